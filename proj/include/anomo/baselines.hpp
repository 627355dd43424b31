#pragma once

#include <vector>

#include "anomo/pipeline.hpp"
#include "anomo/sparse_admm.hpp"
#include "anomo/types.hpp"

namespace anomo {

struct EwmaForecast {
  Matrix filled;    ///< observations with gaps carried forward (0 before the first sample)
  Matrix forecast;  ///< x_hat, column t predicts column t from the samples before it
  Matrix residual;  ///< filled - forecast
};

/// Per-link x_1 = y_1, x_t = alpha y_{t-1} + (1 - alpha) x_{t-1}, with 0 < alpha <= 1.
EwmaForecast ewma_model(const Matrix& links, const Mask& mask, double alpha);

/// Minimum-norm least-squares v = R^+ d via a complete orthogonal decomposition.
class FrobeniusEstimator {
 public:
  explicit FrobeniusEstimator(const RoutingMatrix& routing);
  Vector apply(const Vector& d) const;

 private:
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod_;
};

Vector frobenius_estimate(const Vector& d, const RoutingMatrix& routing);

/// The l1 identification stage on a forecasting residual column: admm_solve
/// with q = mask .* d.
AdmmResult sparsity_max_on_residual(const Vector& d, const RoutingMatrix& routing, const MaskVector& mask,
                                    const Hyperparams& hp, const AnomalyVector* warm = nullptr,
                                    AdmmWorkspace* workspace = nullptr);

/// EWMA forecaster followed by sparsity maximization at every time W..T, in the
/// same StepResult form as the subspace tracker. Residual is the masked
/// relative forecast error of the newest column.
std::vector<StepResult> run_ewma(const Matrix& links, const Mask& mask, const RoutingMatrix& routing,
                                 const Hyperparams& hp, double alpha);

}  // namespace anomo
