#include "anomo/baselines.hpp"

#include <chrono>

#include <fmt/format.h>

#include "anomo/error.hpp"

namespace anomo {

EwmaForecast ewma_model(const Matrix& links, const Mask& mask, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError(fmt::format("ewma_model: alpha {} not in (0, 1]", alpha));
  if (mask.rows() != links.rows() || mask.cols() != links.cols())
    throw DimensionError("ewma_model: mask and link matrix differ in shape");
  EwmaForecast out;
  const auto L = links.rows();
  const auto T = links.cols();
  out.filled.resize(L, T);
  out.forecast.resize(L, T);
  for (Eigen::Index l = 0; l < L; ++l) {
    double last = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
      if (mask(l, t)) last = links(l, t);
      out.filled(l, t) = last;
    }
  }
  if (T > 0) out.forecast.col(0) = out.filled.col(0);
  for (Eigen::Index t = 1; t < T; ++t)
    out.forecast.col(t) = alpha * out.filled.col(t - 1) + (1.0 - alpha) * out.forecast.col(t - 1);
  out.residual = out.filled - out.forecast;
  return out;
}

FrobeniusEstimator::FrobeniusEstimator(const RoutingMatrix& routing) : cod_(routing.dense()) {}

Vector FrobeniusEstimator::apply(const Vector& d) const {
  if (d.size() != cod_.rows())
    throw DimensionError(fmt::format("frobenius_estimate: residual has {} entries, routing has {} links", d.size(),
                                     cod_.rows()));
  return cod_.solve(d);
}

Vector frobenius_estimate(const Vector& d, const RoutingMatrix& routing) { return FrobeniusEstimator(routing).apply(d); }

AdmmResult sparsity_max_on_residual(const Vector& d, const RoutingMatrix& routing, const MaskVector& mask,
                                    const Hyperparams& hp, const AnomalyVector* warm, AdmmWorkspace* workspace) {
  if (d.size() != routing.links() || mask.size() != routing.links())
    throw DimensionError("sparsity_max_on_residual: residual or mask length differs from link count");
  const Vector q = d.cwiseProduct(mask.cast<double>());
  return admm_solve(q, routing, mask, hp, warm, workspace);
}

std::vector<StepResult> run_ewma(const Matrix& links, const Mask& mask, const RoutingMatrix& routing,
                                 const Hyperparams& hp, double alpha) {
  using clock = std::chrono::steady_clock;
  if (links.rows() != routing.links())
    throw DimensionError(fmt::format("run_ewma: {} link rows, routing has {} links", links.rows(), routing.links()));
  const auto t0 = clock::now();
  const EwmaForecast fc = ewma_model(links, mask, alpha);
  const double forecast_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  const auto T = static_cast<int>(links.cols());
  const int W = hp.window;
  std::vector<StepResult> out;
  if (T < W) return out;
  out.reserve(static_cast<std::size_t>(T - W + 1));
  // Forecasting cost is amortized evenly over the scored steps.
  const double share = forecast_seconds / (T - W + 1);

  AdmmWorkspace ws;
  AnomalyVector warm = AnomalyVector::zeros(routing.flows());
  for (int t = W; t <= T; ++t) {
    const auto s0 = clock::now();
    const MaskVector m = mask.col(t - 1);
    const Vector d = fc.residual.col(t - 1);
    AdmmResult res = sparsity_max_on_residual(d, routing, m, hp, &warm, &ws);
    StepResult r;
    r.slice_index = t - W + 1;
    r.measurement_time = t;
    r.estimate = res.estimate;
    r.flagged = detect(res.estimate, hp.delta_v);
    r.admm_iters = res.iterations;
    r.converged = res.converged;
    warm = res.state;
    r.state = std::move(res.state);
    const Vector md = d.cwiseProduct(m.cast<double>());
    const double norm = links.col(t - 1).cwiseProduct(m.cast<double>()).norm();
    r.residual = norm > 0 ? md.norm() / norm : 0.0;
    r.tracking_seconds = share;
    r.sparse_seconds = std::chrono::duration<double>(clock::now() - s0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace anomo
