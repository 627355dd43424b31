#include "anomo/pipeline.hpp"

#include <chrono>
#include <limits>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "anomo/error.hpp"
#include "anomo/serialize.hpp"
#include "anomo/subspace_rls.hpp"

namespace anomo {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<int> detect(const Vector& estimate, double delta_v) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < estimate.size(); ++i)
    if (std::abs(estimate[i]) > delta_v) out.push_back(static_cast<int>(i));
  return out;
}

double slice_residual(const ObservedSlice& slice, const CpModel& model) {
  const Matrix fit = reconstruct(model, model.b_curr);
  double err = 0.0;
  double ref = 0.0;
  for (Eigen::Index w = 0; w < slice.values.cols(); ++w) {
    for (Eigen::Index l = 0; l < slice.values.rows(); ++l) {
      if (!slice.mask(l, w)) continue;
      const double y = slice.values(l, w);
      err += (y - fit(l, w)) * (y - fit(l, w));
      ref += y * y;
    }
  }
  constexpr double tiny = std::numeric_limits<double>::min();
  // An all-zero observed slice that is fitted exactly counts as zero error.
  if (err == 0.0) return 0.0;
  return std::sqrt(err) / std::max(std::sqrt(ref), tiny);
}

Tracker::Tracker(RoutingMatrix routing, Hyperparams hp, std::uint64_t seed)
    : routing_(std::move(routing)), hp_(hp) {
  if (auto bad = validate(hp_); !bad.empty()) throw ParameterError("tracker: " + bad.front());
  if (auto bad = validate(routing_); !bad.empty()) throw DimensionError("tracker: " + bad.front());
  std::tie(model_, caches_) = init_model(routing_.links(), hp_.window, hp_.rank, seed, hp_.mu_r);
  warm_ = AnomalyVector::zeros(routing_.flows());
}

StepResult Tracker::step(const ObservedSlice& slice) {
  if (slice.index != last_index_ + 1)
    throw SequencingError(fmt::format("tracker expected slice {}, got {}", last_index_ + 1, slice.index));
  if (slice.links() != routing_.links() || slice.window() != hp_.window)
    throw DimensionError(fmt::format("slice {} is {}x{}, tracker expects {}x{}", slice.index, slice.links(),
                                     slice.window(), routing_.links(), hp_.window));

  StepResult out;
  out.slice_index = slice.index;
  out.measurement_time = slice.newest_time();

  auto t0 = Clock::now();
  model_.b_prev = model_.b_curr;
  model_.b_curr = update_b(model_, slice, hp_);
  out.tracking_seconds += seconds_since(t0);

  t0 = Clock::now();
  const Vector q = build_q(slice, model_);
  const MaskVector last_mask = slice.mask.col(slice.window() - 1);
  AdmmResult admm = admm_solve(q, routing_, last_mask, hp_, &warm_, &workspace_);
  out.flagged = detect(admm.estimate, hp_.delta_v);
  out.sparse_seconds += seconds_since(t0);

  t0 = Clock::now();
  // Only the newest column carries the current anomaly estimate.
  Matrix anomaly = Matrix::Zero(slice.links(), slice.window());
  anomaly.col(slice.window() - 1) = routing_.apply(admm.estimate);
  update_C(model_, caches_, slice, anomaly, hp_);
  update_A(model_, caches_, slice, anomaly, hp_);
  out.tracking_seconds += seconds_since(t0);

  out.b = model_.b_curr;
  out.residual = slice_residual(slice, model_);
  out.admm_iters = admm.iterations;
  out.converged = admm.converged;
  out.estimate = std::move(admm.estimate);
  warm_ = admm.state;
  out.state = std::move(admm.state);
  last_index_ = slice.index;
  return out;
}

std::size_t Tracker::state_bytes() const {
  std::size_t n = static_cast<std::size_t>(model_.A.size() + model_.C.size() + model_.b_curr.size() +
                                           model_.b_prev.size());
  for (const auto& m : caches_.RA) n += static_cast<std::size_t>(m.size());
  for (const auto& m : caches_.RC) n += static_cast<std::size_t>(m.size());
  n += static_cast<std::size_t>(warm_.v.size() + warm_.z.size() + warm_.u.size());
  return n * sizeof(double);
}

nlohmann::json Tracker::checkpoint() const {
  nlohmann::json j;
  j["format"] = "anomo-checkpoint";
  j["version"] = 1;
  j["last_index"] = last_index_;
  j["hyperparams"] = io::to_json(hp_);
  j["routing"] = io::to_json(routing_);
  j["model"] = io::to_json(model_);
  j["caches"] = io::to_json(caches_);
  j["warm"] = io::to_json(warm_);
  return j;
}

Tracker Tracker::restore(const nlohmann::json& j) {
  if (j.value("format", "") != "anomo-checkpoint" || j.value("version", 0) != 1)
    throw ParseError("checkpoint: unknown format or version");
  Tracker t;
  t.hp_ = io::hyperparams_from_json(j.at("hyperparams"));
  t.routing_ = io::routing_from_json(j.at("routing"));
  t.model_ = io::model_from_json(j.at("model"));
  t.caches_ = io::caches_from_json(j.at("caches"));
  t.warm_ = io::anomaly_from_json(j.at("warm"));
  t.last_index_ = j.at("last_index").get<int>();
  if (auto bad = validate(t.model_, t.routing_, t.hp_); !bad.empty())
    throw ParseError("checkpoint: " + bad.front());
  return t;
}

std::vector<StepResult> run(const std::vector<ObservedSlice>& slices, const RoutingMatrix& routing,
                            const Hyperparams& hp, std::uint64_t seed) {
  Tracker tracker(routing, hp, seed);
  std::vector<StepResult> out;
  out.reserve(slices.size());
  for (const auto& s : slices) {
    try {
      out.push_back(tracker.step(s));
    } catch (const SolverError& e) {
      throw SolverError(fmt::format("slice {}: {}", s.index, e.what()));
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("slice {}: {}", s.index, e.what()));
    }
  }
  return out;
}

}  // namespace anomo
