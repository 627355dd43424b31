#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "anomo/types.hpp"

namespace anomo::io {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Dense matrix: header "row,1,2,...,cols", then one line per row prefixed by
/// its 0-based index. Values use the shortest round-trip decimal form.
void write_dense_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_dense_csv(const std::filesystem::path& path);

/// Headerless numeric table (a plain F x T flow file). ParseError carries
/// line and column of the first bad cell.
Matrix read_plain_matrix(const std::filesystem::path& path);

/// Sparse triplets with a header naming the three columns.
void write_triplets(const std::filesystem::path& path, const std::vector<Triplet>& entries,
                    const std::string& row_name, const std::string& col_name, const std::string& value_name);
std::vector<Triplet> read_triplets(const std::filesystem::path& path);

/// Observation masks and truth labels as triplets (row, 1-based time, 1).
void write_mask_csv(const std::filesystem::path& path, const Mask& mask, const std::string& row_name);
Mask read_mask_csv(const std::filesystem::path& path, int rows, int cols);

std::string format_double(double x);

}  // namespace anomo::io
