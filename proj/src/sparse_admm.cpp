#include "anomo/sparse_admm.hpp"

#include <cmath>

#include <fmt/format.h>

#include "anomo/error.hpp"

namespace anomo {

Vector build_q(const ObservedSlice& slice, const CpModel& model) {
  const auto last = slice.values.cols() - 1;
  if (slice.values.rows() != model.A.rows() || slice.values.cols() != model.C.rows())
    throw DimensionError(fmt::format("build_q: slice {} does not match model shape", slice.index));
  // Last column of A diag(b) C^T only.
  const Vector fit = model.A * model.b_curr.cwiseProduct(model.C.row(last).transpose());
  Vector q(slice.values.rows());
  for (Eigen::Index l = 0; l < q.size(); ++l)
    q[l] = slice.mask(l, last) ? slice.values(l, last) - fit[l] : 0.0;
  return q;
}

Vector masked_apply(const RoutingMatrix& routing, const MaskVector& mask, const Vector& x) {
  Vector y = routing.apply(x);
  for (Eigen::Index l = 0; l < y.size(); ++l)
    if (!mask[l]) y[l] = 0.0;
  return y;
}

Vector masked_apply_transpose(const RoutingMatrix& routing, const MaskVector& mask, const Vector& y) {
  Vector masked = y;
  for (Eigen::Index l = 0; l < masked.size(); ++l)
    if (!mask[l]) masked[l] = 0.0;
  return routing.apply_transpose(masked);
}

WoodburySolver::WoodburySolver(const RoutingMatrix& routing, const MaskVector& mask, double xi)
    : routing_(&routing), mask_(mask), xi_(xi), compact_(static_cast<std::size_t>(routing.links()), -1) {
  if (!(xi > 0.0)) throw ParameterError("WoodburySolver: xi must be positive");
  if (mask.size() != routing.links()) throw DimensionError("WoodburySolver: mask length != L");
  for (int l = 0; l < routing.links(); ++l) {
    if (mask[l]) {
      compact_[static_cast<std::size_t>(l)] = static_cast<int>(observed_.size());
      observed_.push_back(l);
    }
  }
  const auto n = static_cast<Eigen::Index>(observed_.size());
  // xi I + R_w R_w^T restricted to observed links: entry (i, j) counts the flows
  // crossing both links.
  Matrix inner = xi * Matrix::Identity(n, n);
  std::vector<int> local;
  for (int f = 0; f < routing.flows(); ++f) {
    local.clear();
    for (int l : routing.column(f))
      if (compact_[static_cast<std::size_t>(l)] >= 0) local.push_back(compact_[static_cast<std::size_t>(l)]);
    for (int i : local)
      for (int j : local) inner(i, j) += 1.0;
  }
  inner_.compute(inner);
  if (inner_.info() != Eigen::Success) throw SolverError("WoodburySolver: inner system is not positive definite");
}

Vector WoodburySolver::apply(const Vector& rhs) const {
  const RoutingMatrix& r = *routing_;
  if (rhs.size() != r.flows()) throw DimensionError("WoodburySolver::apply: rhs length != F");
  if (observed_.empty()) return rhs / xi_;

  Vector projected = Vector::Zero(static_cast<Eigen::Index>(observed_.size()));
  for (int f = 0; f < r.flows(); ++f) {
    const double x = rhs[f];
    if (x == 0.0) continue;
    for (int l : r.column(f)) {
      const int c = compact_[static_cast<std::size_t>(l)];
      if (c >= 0) projected[c] += x;
    }
  }
  const Vector inner = inner_.solve(projected);
  Vector out(rhs.size());
  for (int f = 0; f < r.flows(); ++f) {
    double s = 0.0;
    for (int l : r.column(f)) {
      const int c = compact_[static_cast<std::size_t>(l)];
      if (c >= 0) s += inner[c];
    }
    out[f] = (rhs[f] - s) / xi_;
  }
  return out;
}

Vector woodbury_apply(const RoutingMatrix& routing, const MaskVector& mask, double xi, const Vector& rhs) {
  return WoodburySolver(routing, mask, xi).apply(rhs);
}

const WoodburySolver& AdmmWorkspace::solver(const RoutingMatrix& routing, const MaskVector& mask, double xi) {
  if (!solver_ || routing_ != &routing || solver_->xi() != xi || solver_->mask() != mask) {
    solver_.emplace(routing, mask, xi);
    routing_ = &routing;
    ++refreshes_;
  }
  return *solver_;
}

double sparsity_weight(const Vector& q, const Hyperparams& hp) {
  return q.size() == 0 ? 0.0 : hp.mu_s_scale * q.cwiseAbs().maxCoeff();
}

double lasso_objective(const Vector& q, const RoutingMatrix& routing, const MaskVector& mask, double mu_s,
                       const Vector& v) {
  Vector residual = q - masked_apply(routing, mask, v);
  for (Eigen::Index l = 0; l < residual.size(); ++l)
    if (!mask[l]) residual[l] = 0.0;
  return 0.5 * residual.squaredNorm() + mu_s * v.lpNorm<1>();
}

AdmmResult admm_lasso(const Vector& q, const RoutingMatrix& routing, const MaskVector& mask, double mu_s,
                      const Hyperparams& hp, const AnomalyVector* warm, AdmmWorkspace* workspace) {
  if (!(hp.xi > 0.0)) throw ParameterError("admm: xi must be positive");
  if (hp.max_iter < 1) throw ParameterError("admm: max_iter must be >= 1");
  if (q.size() != routing.links() || mask.size() != routing.links())
    throw DimensionError("admm: q and mask must have one entry per link");
  const int flows = routing.flows();

  std::optional<WoodburySolver> local;
  const WoodburySolver* solver = nullptr;
  if (workspace) {
    solver = &workspace->solver(routing, mask, hp.xi);
  } else {
    local.emplace(routing, mask, hp.xi);
    solver = &*local;
  }

  AdmmResult res;
  res.mu_s = mu_s;
  if (warm && warm->v.size() == flows) {
    res.state = *warm;
  } else {
    res.state = AnomalyVector::zeros(flows);
  }
  Vector& v = res.state.v;
  Vector& z = res.state.z;
  Vector& u = res.state.u;

  const Vector rq = masked_apply_transpose(routing, mask, q);
  const double kappa = mu_s / hp.xi;
  const double sqrt_n = std::sqrt(static_cast<double>(flows));
  Vector z_old(flows);

  for (int k = 1; k <= hp.max_iter; ++k) {
    v = solver->apply(rq + hp.xi * (z - u));
    z_old = z;
    for (int i = 0; i < flows; ++i) z[i] = soft_threshold(v[i] + u[i], kappa);
    u += v - z;
    if (!v.allFinite() || !z.allFinite() || !u.allFinite())
      throw NumericalError(fmt::format("admm: non-finite iterate at iteration {}", k));

    const double r_pri = (v - z).norm();
    const double r_dual = hp.xi * (z - z_old).norm();
    const double eps_pri = sqrt_n * hp.eps_abs + hp.eps_rel * std::max(v.norm(), z.norm());
    const double eps_dual = sqrt_n * hp.eps_abs + hp.eps_rel * hp.xi * u.norm();
    res.r_pri.push_back(r_pri);
    res.r_dual.push_back(r_dual);
    res.eps_pri.push_back(eps_pri);
    res.eps_dual.push_back(eps_dual);
    res.iterations = k;
    if (r_pri <= eps_pri && r_dual <= eps_dual) {
      res.converged = true;
      break;
    }
  }
  res.estimate = z;
  return res;
}

AdmmResult admm_solve(const Vector& q, const RoutingMatrix& routing, const MaskVector& mask, const Hyperparams& hp,
                      const AnomalyVector* warm, AdmmWorkspace* workspace) {
  return admm_lasso(q, routing, mask, sparsity_weight(q, hp), hp, warm, workspace);
}

}  // namespace anomo
