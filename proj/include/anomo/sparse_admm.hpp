#pragma once

#include <optional>
#include <vector>

#include "anomo/types.hpp"

namespace anomo {

/// sign(a) * max(|a| - kappa, 0).
inline double soft_threshold(double a, double kappa) {
  if (a > kappa) return a - kappa;
  if (a < -kappa) return a + kappa;
  return 0.0;
}

/// Masked last-column residual of a slice against A diag(b[t]) C^T, where the
/// model still holds A[t-1], C[t-1] and b_curr = b[t].
Vector build_q(const ObservedSlice& slice, const CpModel& model);

/// Applies (R_w^T R_w + xi I_F)^{-1} through the matrix inversion lemma,
/// with R_w = diag(mask) R. Only the L' x L' matrix xi I + R_w R_w^T is
/// factorized; no F x F matrix is ever formed.
class WoodburySolver {
 public:
  WoodburySolver(const RoutingMatrix& routing, const MaskVector& mask, double xi);

  Vector apply(const Vector& rhs) const;

  const MaskVector& mask() const { return mask_; }
  double xi() const { return xi_; }
  int observed_links() const { return static_cast<int>(observed_.size()); }

 private:
  const RoutingMatrix* routing_;
  MaskVector mask_;
  double xi_;
  std::vector<int> observed_;  // observed link ids
  std::vector<int> compact_;   // link id -> position in observed_, or -1
  Eigen::LLT<Matrix> inner_;
};

/// One-shot form of WoodburySolver::apply.
Vector woodbury_apply(const RoutingMatrix& routing, const MaskVector& mask, double xi, const Vector& rhs);

/// R_w x and R_w^T y with R_w = diag(mask) R.
Vector masked_apply(const RoutingMatrix& routing, const MaskVector& mask, const Vector& x);
Vector masked_apply_transpose(const RoutingMatrix& routing, const MaskVector& mask, const Vector& y);

/// Per-stream cache: keeps the Woodbury factorization until the observation
/// pattern of the last column (or xi) changes.
class AdmmWorkspace {
 public:
  const WoodburySolver& solver(const RoutingMatrix& routing, const MaskVector& mask, double xi);
  int refreshes() const { return refreshes_; }

 private:
  std::optional<WoodburySolver> solver_;
  const RoutingMatrix* routing_ = nullptr;
  int refreshes_ = 0;
};

struct AdmmResult {
  AnomalyVector state;  ///< v, z, u after the last iteration
  Vector estimate;      ///< reported anomaly vector (= z, exactly sparse)
  double mu_s = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> r_pri;
  std::vector<double> r_dual;
  std::vector<double> eps_pri;
  std::vector<double> eps_dual;
};

/// mu_s = hp.mu_s_scale * max|q|.
double sparsity_weight(const Vector& q, const Hyperparams& hp);

/// Scaled-form ADMM for min_v 1/2 ||q - R_w v||^2 + mu_s ||v||_1.
/// Stops when r_pri <= eps_pri and r_dual <= eps_dual, or after hp.max_iter
/// iterations. Throws NumericalError on a non-finite iterate.
AdmmResult admm_lasso(const Vector& q, const RoutingMatrix& routing, const MaskVector& mask, double mu_s,
                      const Hyperparams& hp, const AnomalyVector* warm = nullptr,
                      AdmmWorkspace* workspace = nullptr);

/// admm_lasso with mu_s chosen by sparsity_weight().
AdmmResult admm_solve(const Vector& q, const RoutingMatrix& routing, const MaskVector& mask, const Hyperparams& hp,
                      const AnomalyVector* warm = nullptr, AdmmWorkspace* workspace = nullptr);

/// 1/2 ||q - R_w v||^2 + mu_s ||v||_1.
double lasso_objective(const Vector& q, const RoutingMatrix& routing, const MaskVector& mask, double mu_s,
                       const Vector& v);

}  // namespace anomo
