#include "anomo/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "anomo/error.hpp"

namespace anomo::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError(fmt::format("cannot write {}", path.string()));
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(fmt::format("cannot read {}", path.string()));
  return is;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_cell(std::string_view cell, const std::filesystem::path& path, std::size_t line, std::size_t col) {
  cell = trim(cell);
  T value{};
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end)
    throw ParseError(fmt::format("{}:{}:{}: cannot parse '{}'", path.string(), line, col, cell));
  return value;
}

}  // namespace

std::string format_double(double x) { return fmt::format("{}", x); }

void write_dense_csv(const std::filesystem::path& path, const Matrix& m) {
  auto os = open_out(path);
  std::string line = "row";
  for (Eigen::Index c = 0; c < m.cols(); ++c) line += fmt::format(",{}", c + 1);
  os << line << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    line = fmt::format("{}", r);
    for (Eigen::Index c = 0; c < m.cols(); ++c) line += fmt::format(",{}", m(r, c));
    os << line << '\n';
  }
}

Matrix read_dense_csv(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) throw ParseError(fmt::format("{}:1:1: missing header", path.string()));
  const auto cols = static_cast<Eigen::Index>(split(trim(line)).size()) - 1;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (static_cast<Eigen::Index>(cells.size()) != cols + 1)
      throw ParseError(fmt::format("{}:{}:1: expected {} fields, found {}", path.string(), lineno, cols + 1,
                                   cells.size()));
    const auto idx = parse_cell<long>(cells[0], path, lineno, 1);
    if (idx != static_cast<long>(rows.size()))
      throw ParseError(fmt::format("{}:{}:1: row index {} out of sequence", path.string(), lineno, idx));
    std::vector<double> row(static_cast<std::size_t>(cols));
    for (Eigen::Index c = 0; c < cols; ++c)
      row[static_cast<std::size_t>(c)] =
          parse_cell<double>(cells[static_cast<std::size_t>(c + 1)], path, lineno, static_cast<std::size_t>(c + 2));
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  return m;
}

Matrix read_plain_matrix(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    // Accept comma or whitespace separated cells.
    std::string norm(line);
    for (char& ch : norm)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ss(norm);
    std::vector<double> row;
    std::string cell;
    while (ss >> cell) row.push_back(parse_cell<double>(cell, path, lineno, row.size() + 1));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(fmt::format("{}:{}:{}: expected {} columns, found {}", path.string(), lineno,
                                   std::min(row.size(), rows.front().size()) + 1, rows.front().size(), row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(fmt::format("{}:1:1: empty matrix", path.string()));
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

void write_triplets(const std::filesystem::path& path, const std::vector<Triplet>& entries,
                    const std::string& row_name, const std::string& col_name, const std::string& value_name) {
  auto os = open_out(path);
  os << row_name << ',' << col_name << ',' << value_name << '\n';
  for (const auto& e : entries) os << fmt::format("{},{},{}\n", e.row, e.col, e.value);
}

std::vector<Triplet> read_triplets(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) throw ParseError(fmt::format("{}:1:1: missing header", path.string()));
  if (split(trim(line)).size() != 3) throw ParseError(fmt::format("{}:1:1: header must have 3 fields", path.string()));
  std::vector<Triplet> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 3)
      throw ParseError(fmt::format("{}:{}:1: expected 3 fields, found {}", path.string(), lineno, cells.size()));
    out.push_back({parse_cell<int>(cells[0], path, lineno, 1), parse_cell<int>(cells[1], path, lineno, 2),
                   parse_cell<double>(cells[2], path, lineno, 3)});
  }
  return out;
}

void write_mask_csv(const std::filesystem::path& path, const Mask& mask, const std::string& row_name) {
  std::vector<Triplet> entries;
  for (Eigen::Index r = 0; r < mask.rows(); ++r)
    for (Eigen::Index c = 0; c < mask.cols(); ++c)
      if (mask(r, c)) entries.push_back({static_cast<int>(r), static_cast<int>(c + 1), 1.0});
  write_triplets(path, entries, row_name, "time", "value");
}

Mask read_mask_csv(const std::filesystem::path& path, int rows, int cols) {
  Mask m = Mask::Zero(rows, cols);
  for (const auto& e : read_triplets(path)) {
    if (e.row < 0 || e.row >= rows || e.col < 1 || e.col > cols)
      throw DataError(fmt::format("{}: entry ({}, {}) outside the {}x{} grid", path.string(), e.row, e.col, rows, cols));
    m(e.row, e.col - 1) = e.value != 0.0 ? 1 : 0;
  }
  return m;
}

}  // namespace anomo::io
