#pragma once
// Independent reference implementations used by the unit tests and the
// acceptance suite. Deliberately naive: plain loops, dense algebra.

#include <cmath>
#include <vector>

#include "anomo/sparse_admm.hpp"
#include "anomo/subspace_rls.hpp"
#include "anomo/types.hpp"

namespace anomo::testing {

/// Objective of the b subproblem evaluated entry by entry:
/// 1/2 sum_{l,w} m (y - sum_r A_lr b_r C_wr)^2
/// + mu_h/2 sum_{l,w<W} m (sum_r A_lr b_r C_wr - sum_r A_lr bp_r C_{w+1,r})^2 + mu_r/2 |b|^2.
inline double b_objective(const CpModel& model, const ObservedSlice& s, const Hyperparams& hp, const Vector& b) {
  const auto L = model.A.rows(), W = model.C.rows(), R = model.A.cols();
  double fit = 0.0, hank = 0.0, reg = 0.0;
  for (Eigen::Index l = 0; l < L; ++l) {
    for (Eigen::Index w = 0; w < W; ++w) {
      if (!s.mask(l, w)) continue;
      double x = 0.0;
      for (Eigen::Index r = 0; r < R; ++r) x += model.A(l, r) * b[r] * model.C(w, r);
      fit += (s.values(l, w) - x) * (s.values(l, w) - x);
      if (w + 1 < W) {
        double p = 0.0;
        for (Eigen::Index r = 0; r < R; ++r) p += model.A(l, r) * model.b_prev[r] * model.C(w + 1, r);
        hank += (x - p) * (x - p);
      }
    }
  }
  for (Eigen::Index r = 0; r < R; ++r) reg += b[r] * b[r];
  return 0.5 * fit + 0.5 * hp.mu_h * hank + 0.5 * hp.mu_r * reg;
}

/// Central-difference gradient.
template <typename F>
Vector numeric_gradient(F&& f, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector p = x, m = x;
    p[i] += h;
    m[i] -= h;
    g[i] = (f(p) - f(m)) / (2 * h);
  }
  return g;
}

/// Dense (R_w^T R_w + xi I)^{-1} rhs.
inline Vector dense_regularized_solve(const RoutingMatrix& routing, const MaskVector& mask, double xi,
                                      const Vector& rhs) {
  Matrix rw = routing.dense();
  for (Eigen::Index l = 0; l < rw.rows(); ++l)
    if (!mask[l]) rw.row(l).setZero();
  const Matrix sys = rw.transpose() * rw + xi * Matrix::Identity(rw.cols(), rw.cols());
  return sys.inverse() * rhs;
}

/// Proximal gradient for 1/2 |q - R_w v|^2 + mu |v|_1 with step 1 / |R_w^T R_w|_2.
inline Vector ista(const Vector& q, const RoutingMatrix& routing, const MaskVector& mask, double mu, int iters) {
  Matrix rw = routing.dense();
  for (Eigen::Index l = 0; l < rw.rows(); ++l)
    if (!mask[l]) rw.row(l).setZero();
  Vector qm = q;
  for (Eigen::Index l = 0; l < qm.size(); ++l)
    if (!mask[l]) qm[l] = 0.0;
  const Matrix gram = rw.transpose() * rw;
  const Vector rq = rw.transpose() * qm;
  const double lip = Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff();
  Vector v = Vector::Zero(rw.cols());
  if (lip <= 0.0) return v;
  const double step = 1.0 / lip;
  for (int k = 0; k < iters; ++k) {
    const Vector grad = gram * v - rq;
    Vector x = v - step * grad;
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = soft_threshold(x[i], step * mu);
    v = x;
  }
  return v;
}

/// Records the per-step data terms of the A and C recursions and evaluates the
/// caches from their closed-form weighted sums: mu_r I + sum_tau lambda^{t-tau} S_tau.
struct CacheOracle {
  std::vector<std::vector<Matrix>> sa;  // [step][l]
  std::vector<std::vector<Matrix>> sc;  // [step][w]

  /// Call with the model after b is refreshed and before update_C.
  void record_c(const CpModel& m, const ObservedSlice& s, const Hyperparams& hp) {
    const auto L = m.A.rows(), W = m.C.rows(), R = m.A.cols();
    std::vector<Matrix> out(static_cast<std::size_t>(W), Matrix::Zero(R, R));
    for (Eigen::Index w = 0; w < W; ++w) {
      const double weight = w + 1 < W ? 1.0 + hp.mu_h : 1.0;
      for (Eigen::Index l = 0; l < L; ++l) {
        if (!s.mask(l, w)) continue;
        for (Eigen::Index i = 0; i < R; ++i)
          for (Eigen::Index j = 0; j < R; ++j)
            out[static_cast<std::size_t>(w)](i, j) +=
                weight * m.A(l, i) * m.b_curr[i] * m.A(l, j) * m.b_curr[j];
      }
    }
    sc.push_back(std::move(out));
  }

  /// Call with the model after update_C and before update_A.
  void record_a(const CpModel& m, const ObservedSlice& s, const Hyperparams& hp) {
    const auto L = m.A.rows(), W = m.C.rows(), R = m.A.cols();
    std::vector<Matrix> out(static_cast<std::size_t>(L), Matrix::Zero(R, R));
    for (Eigen::Index l = 0; l < L; ++l) {
      for (Eigen::Index w = 0; w < W; ++w) {
        if (!s.mask(l, w)) continue;
        for (Eigen::Index i = 0; i < R; ++i) {
          for (Eigen::Index j = 0; j < R; ++j) {
            const double ai = m.b_curr[i] * m.C(w, i), aj = m.b_curr[j] * m.C(w, j);
            double add = ai * aj;
            if (w + 1 < W) {
              const double bi = m.b_prev[i] * m.C(w + 1, i) - ai;
              const double bj = m.b_prev[j] * m.C(w + 1, j) - aj;
              add += hp.mu_h * bi * bj;
            }
            out[static_cast<std::size_t>(l)](i, j) += add;
          }
        }
      }
    }
    sa.push_back(std::move(out));
  }

  static Matrix direct(const std::vector<std::vector<Matrix>>& terms, std::size_t idx, double lambda, double mu_r) {
    const auto R = terms.front()[idx].rows();
    Matrix out = mu_r * Matrix::Identity(R, R);
    const std::size_t t = terms.size();
    for (std::size_t tau = 0; tau < t; ++tau)
      out += std::pow(lambda, static_cast<double>(t - 1 - tau)) * terms[tau][idx];
    return out;
  }
};

}  // namespace anomo::testing
