#include "anomo/subspace_rls.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "anomo/error.hpp"

namespace anomo {
namespace {

void symmetrize(Matrix& m) { m = 0.5 * (m + m.transpose()).eval(); }

void check_slice(const CpModel& model, const ObservedSlice& slice, const Matrix* anomaly) {
  if (slice.values.rows() != model.A.rows() || slice.values.cols() != model.C.rows())
    throw DimensionError(fmt::format("slice {} is {}x{} but model expects {}x{}", slice.index, slice.values.rows(),
                                     slice.values.cols(), model.A.rows(), model.C.rows()));
  if (slice.mask.rows() != slice.values.rows() || slice.mask.cols() != slice.values.cols())
    throw DimensionError(fmt::format("slice {}: mask shape differs from values", slice.index));
  if (anomaly && (anomaly->rows() != slice.values.rows() || anomaly->cols() != slice.values.cols()))
    throw DimensionError(fmt::format("slice {}: anomaly contribution has wrong shape", slice.index));
}

}  // namespace

std::pair<CpModel, RlsCaches> init_model(int links, int window, int rank, std::uint64_t seed, double mu_r) {
  if (rank < 1) throw ParameterError("init_model: rank must be >= 1");
  if (links < 1 || window < 1) throw DimensionError("init_model: links and window must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(rank)));

  CpModel model;
  model.A.resize(links, rank);
  model.C.resize(window, rank);
  for (Eigen::Index i = 0; i < model.A.size(); ++i) model.A.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < model.C.size(); ++i) model.C.data()[i] = normal(rng);
  model.b_curr = Vector::Zero(rank);
  model.b_prev = Vector::Zero(rank);

  RlsCaches caches;
  const Matrix prior = mu_r * Matrix::Identity(rank, rank);
  caches.RA.assign(static_cast<std::size_t>(links), prior);
  caches.RC.assign(static_cast<std::size_t>(window), prior);
  return {std::move(model), std::move(caches)};
}

Matrix reconstruct(const CpModel& model, const Vector& b) {
  return model.A * b.asDiagonal() * model.C.transpose();
}

BNormalEquations b_normal_equations(const CpModel& model, const ObservedSlice& slice, const Hyperparams& hp) {
  check_slice(model, slice, nullptr);
  const auto links = model.A.rows();
  const auto window = model.C.rows();
  const auto rank = model.A.cols();

  // Previous-slice reconstruction, shifted by one column inside the Hankel term.
  const Matrix prev = reconstruct(model, model.b_prev);

  BNormalEquations eq{hp.mu_r * Matrix::Identity(rank, rank), Vector::Zero(rank)};
  Vector g(rank);
  for (Eigen::Index w = 0; w < window; ++w) {
    const bool hankel = w + 1 < window;
    const double weight = hankel ? 1.0 + hp.mu_h : 1.0;
    for (Eigen::Index l = 0; l < links; ++l) {
      if (!slice.mask(l, w)) continue;
      g = model.A.row(l).transpose().cwiseProduct(model.C.row(w).transpose());
      eq.M.noalias() += weight * g * g.transpose();
      double target = slice.values(l, w);
      if (hankel) target += hp.mu_h * prev(l, w + 1);
      eq.r.noalias() += target * g;
    }
  }
  symmetrize(eq.M);
  return eq;
}

Vector update_b(const CpModel& model, const ObservedSlice& slice, const Hyperparams& hp) {
  const auto eq = b_normal_equations(model, slice, hp);
  Eigen::LLT<Matrix> llt(eq.M);
  if (llt.info() != Eigen::Success)
    throw SolverError(fmt::format("update_b: normal matrix of slice {} is singular", slice.index));
  Vector b = llt.solve(eq.r);
  if (!b.allFinite()) throw SolverError(fmt::format("update_b: non-finite solution at slice {}", slice.index));
  return b;
}

void update_A(CpModel& model, RlsCaches& caches, const ObservedSlice& slice, const Matrix& anomaly,
              const Hyperparams& hp) {
  check_slice(model, slice, &anomaly);
  const int links = static_cast<int>(model.A.rows());
  const auto window = model.C.rows();
  const auto rank = model.A.cols();

  const Matrix alpha = model.C * model.b_curr.asDiagonal();  // row w = alpha_w^T
  Matrix beta(std::max<Eigen::Index>(window - 1, 0), rank);
  if (window > 1)
    beta = model.C.bottomRows(window - 1) * model.b_prev.asDiagonal() - alpha.topRows(window - 1);
  const Matrix drift = (1.0 - hp.lambda) * hp.mu_r * Matrix::Identity(rank, rank);

  int failed = -1;
#pragma omp parallel for schedule(static) if (links >= 64)
  for (int l = 0; l < links; ++l) {
    Matrix& ra = caches.RA[static_cast<std::size_t>(l)];
    Vector rhs = hp.lambda * (ra * model.A.row(l).transpose());
    Matrix next = hp.lambda * ra + drift;
    for (Eigen::Index w = 0; w < window; ++w) {
      if (!slice.mask(l, w)) continue;
      const auto a_w = alpha.row(w).transpose();
      next.noalias() += a_w * a_w.transpose();
      rhs.noalias() += (slice.values(l, w) - anomaly(l, w)) * a_w;
      if (w + 1 < window) {
        const auto b_w = beta.row(w).transpose();
        next.noalias() += hp.mu_h * b_w * b_w.transpose();
      }
    }
    symmetrize(next);
    Eigen::LLT<Matrix> llt(next);
    if (llt.info() != Eigen::Success) {
#pragma omp critical
      failed = l;
      continue;
    }
    ra = std::move(next);
    model.A.row(l) = llt.solve(rhs).transpose();
  }
  if (failed >= 0) throw SolverError(fmt::format("update_A: RA system of link {} is singular", failed + 1));
}

void update_C(CpModel& model, RlsCaches& caches, const ObservedSlice& slice, const Matrix& anomaly,
              const Hyperparams& hp) {
  check_slice(model, slice, &anomaly);
  const auto links = model.A.rows();
  const auto window = model.C.rows();
  const auto rank = model.A.cols();

  const Matrix gamma = model.A * model.b_curr.asDiagonal();  // row l = gamma_l^T
  const Matrix eta = model.A * model.b_prev.asDiagonal();
  const Matrix drift = (1.0 - hp.lambda) * hp.mu_r * Matrix::Identity(rank, rank);

  for (Eigen::Index w = window - 1; w >= 0; --w) {
    const bool hankel = w + 1 < window;
    const double weight = hankel ? 1.0 + hp.mu_h : 1.0;
    Matrix& rc = caches.RC[static_cast<std::size_t>(w)];
    Vector rhs = hp.lambda * (rc * model.C.row(w).transpose());
    Matrix next = hp.lambda * rc + drift;
    // eta_l^T c^{w+1}[t], using the row refreshed in the previous iteration.
    Vector shifted;
    if (hankel) shifted = eta * model.C.row(w + 1).transpose();
    for (Eigen::Index l = 0; l < links; ++l) {
      if (!slice.mask(l, w)) continue;
      const auto g = gamma.row(l).transpose();
      next.noalias() += weight * g * g.transpose();
      double target = slice.values(l, w) - anomaly(l, w);
      if (hankel) target += hp.mu_h * shifted[l];
      rhs.noalias() += target * g;
    }
    symmetrize(next);
    Eigen::LLT<Matrix> llt(next);
    if (llt.info() != Eigen::Success)
      throw SolverError(fmt::format("update_C: RC system of window column {} is singular", w + 1));
    rc = std::move(next);
    model.C.row(w) = llt.solve(rhs).transpose();
  }
}

}  // namespace anomo
