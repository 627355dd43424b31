#include "anomo/types.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "anomo/error.hpp"

namespace anomo {

RoutingMatrix::RoutingMatrix(int links, std::vector<std::vector<int>> paths)
    : links_(links), columns_(std::move(paths)), rows_(static_cast<std::size_t>(links)) {
  if (links < 0) throw DimensionError("routing matrix: negative link count");
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    auto& col = columns_[i];
    std::sort(col.begin(), col.end());
    if (std::adjacent_find(col.begin(), col.end()) != col.end())
      throw DimensionError(fmt::format("routing matrix: flow {} lists a link twice", i));
    for (int l : col) {
      if (l < 0 || l >= links)
        throw DimensionError(fmt::format("routing matrix: flow {} references link {} (L={})", i, l, links));
      rows_[static_cast<std::size_t>(l)].push_back(static_cast<int>(i));
    }
    nnz_ += col.size();
  }
}

RoutingMatrix RoutingMatrix::from_dense(const Matrix& dense) {
  std::vector<std::vector<int>> paths(static_cast<std::size_t>(dense.cols()));
  for (Eigen::Index i = 0; i < dense.cols(); ++i) {
    for (Eigen::Index l = 0; l < dense.rows(); ++l) {
      const double x = dense(l, i);
      if (x == 1.0) {
        paths[static_cast<std::size_t>(i)].push_back(static_cast<int>(l));
      } else if (x != 0.0) {
        throw DimensionError(fmt::format("routing matrix: entry ({}, {}) = {} is not binary", l, i, x));
      }
    }
  }
  return RoutingMatrix(static_cast<int>(dense.rows()), std::move(paths));
}

Matrix RoutingMatrix::dense() const {
  Matrix out = Matrix::Zero(links_, flows());
  for (int i = 0; i < flows(); ++i)
    for (int l : columns_[static_cast<std::size_t>(i)]) out(l, i) = 1.0;
  return out;
}

Vector RoutingMatrix::apply(const Vector& x) const {
  if (x.size() != flows()) throw DimensionError("routing apply: vector length != F");
  Vector y = Vector::Zero(links_);
  for (int i = 0; i < flows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (int l : columns_[static_cast<std::size_t>(i)]) y[l] += xi;
  }
  return y;
}

Vector RoutingMatrix::apply_transpose(const Vector& y) const {
  if (y.size() != links_) throw DimensionError("routing apply_transpose: vector length != L");
  Vector x(flows());
  for (int i = 0; i < flows(); ++i) {
    double s = 0.0;
    for (int l : columns_[static_cast<std::size_t>(i)]) s += y[l];
    x[i] = s;
  }
  return x;
}

std::string structure_tag(const EventStructure& s) {
  struct Visitor {
    std::string operator()(const OneToOne&) const { return "one_to_one"; }
    std::string operator()(const NToOne&) const { return "n_to_one"; }
    std::string operator()(const AllOdsOneLink&) const { return "all_ods_one_link"; }
  };
  return std::visit(Visitor{}, s);
}

std::vector<std::string> validate(const Hyperparams& hp) {
  std::vector<std::string> out;
  if (!(hp.lambda > 0.0 && hp.lambda <= 1.0)) out.emplace_back("forgetting factor out of range");
  if (!(hp.mu_r >= 0.0)) out.emplace_back("mu_r must be nonnegative");
  if (!(hp.mu_h >= 0.0)) out.emplace_back("mu_h must be nonnegative");
  if (!(hp.mu_s_scale >= 0.0)) out.emplace_back("sparsity scale must be nonnegative");
  if (!(hp.xi > 0.0)) out.emplace_back("ADMM penalty xi must be positive");
  if (hp.max_iter < 1) out.emplace_back("ADMM iteration cap must be >= 1");
  if (!(hp.eps_abs >= 0.0) || !(hp.eps_rel >= 0.0)) out.emplace_back("ADMM tolerances must be nonnegative");
  if (hp.rank < 1) out.emplace_back("rank must be >= 1");
  if (hp.window <= 1) out.emplace_back("window must be > 1");
  return out;
}

std::vector<std::string> validate(const RoutingMatrix& routing) {
  std::vector<std::string> out;
  for (int i = 0; i < routing.flows(); ++i)
    if (routing.column(i).empty()) out.push_back(fmt::format("flow {} traverses no link", i));
  return out;
}

std::vector<std::string> validate(const CpModel& model) {
  std::vector<std::string> out;
  const auto r = model.A.cols();
  if (model.C.cols() != r) out.emplace_back("A and C have different rank");
  if (model.b_curr.size() != r || model.b_prev.size() != r) out.emplace_back("b vectors do not match rank");
  if (!model.A.allFinite() || !model.C.allFinite() || !model.b_curr.allFinite() || !model.b_prev.allFinite())
    out.emplace_back("model contains non-finite entries");
  return out;
}

std::vector<std::string> validate(const RlsCaches& caches, double mu_r) {
  std::vector<std::string> out;
  auto check = [&](const Matrix& m, const char* name, std::size_t i) {
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      out.push_back(fmt::format("{}[{}] is not symmetric", name, i));
    if (mu_r > 0.0 && Eigen::LLT<Matrix>(m).info() != Eigen::Success)
      out.push_back(fmt::format("{}[{}] is not positive definite", name, i));
  };
  for (std::size_t i = 0; i < caches.RA.size(); ++i) check(caches.RA[i], "RA", i);
  for (std::size_t i = 0; i < caches.RC.size(); ++i) check(caches.RC[i], "RC", i);
  return out;
}

std::vector<std::string> validate(const AnomalyEvent& e) {
  std::vector<std::string> out;
  if (e.gamma_i < 0.0 || e.gamma_i >= 0.5 || e.gamma_d < 0.0 || e.gamma_d >= 0.5)
    out.emplace_back("rise/fall ratios must lie in [0, 0.5)");
  if (e.gamma_i + e.gamma_d > 1.0) out.emplace_back("rise + fall ratio exceeds 1");
  if (!(e.delta >= 0.0)) out.emplace_back("multiplicative ratio must be nonnegative");
  if (e.duration < 1) out.emplace_back("duration must be >= 1");
  if (e.flows.empty()) out.emplace_back("event targets no flow");
  return out;
}

std::vector<std::string> validate(const CpModel& model, const RoutingMatrix& routing,
                                  const Hyperparams& hp) {
  auto out = validate(hp);
  auto add = [&out](std::vector<std::string> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  add(validate(routing));
  add(validate(model));
  if (model.A.rows() != routing.links())
    out.push_back(fmt::format("A has {} rows but routing has {} links", model.A.rows(), routing.links()));
  if (model.C.rows() != hp.window)
    out.push_back(fmt::format("C has {} rows but window is {}", model.C.rows(), hp.window));
  if (model.A.cols() != hp.rank) out.push_back(fmt::format("model rank {} != configured rank {}", model.A.cols(), hp.rank));
  return out;
}

}  // namespace anomo
