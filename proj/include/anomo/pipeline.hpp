#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "anomo/sparse_admm.hpp"
#include "anomo/types.hpp"

namespace anomo {

struct StepResult {
  int slice_index = 0;
  int measurement_time = 0;  ///< t + W - 1
  Vector b;
  AnomalyVector state;  ///< ADMM (v, z, u)
  Vector estimate;      ///< reported abnormal-flow vector (sparse)
  std::vector<int> flagged;
  double residual = 0.0;
  int admm_iters = 0;
  bool converged = false;
  double tracking_seconds = 0.0;  ///< b, C and A updates
  double sparse_seconds = 0.0;    ///< q assembly, ADMM and thresholding
};

/// Online subspace tracker and abnormal-flow detector for one link stream.
/// Each step runs: b[t] -> ADMM v[t] -> threshold -> C[t] -> A[t].
class Tracker {
 public:
  Tracker(RoutingMatrix routing, Hyperparams hp, std::uint64_t seed);

  /// Processes slice `index() + 1`; any other index raises SequencingError.
  StepResult step(const ObservedSlice& slice);

  /// Index of the last processed slice (0 before the first step).
  int index() const { return last_index_; }

  const CpModel& model() const { return model_; }
  const RlsCaches& caches() const { return caches_; }
  const AnomalyVector& warm_state() const { return warm_; }
  const Hyperparams& hyperparams() const { return hp_; }
  const RoutingMatrix& routing() const { return routing_; }

  /// Bytes held by the tracker state; does not grow with the number of steps.
  std::size_t state_bytes() const;

  /// Full state (model, caches, warm ADMM state, hyperparameters, routing).
  nlohmann::json checkpoint() const;
  static Tracker restore(const nlohmann::json& checkpoint);

 private:
  Tracker() = default;

  RoutingMatrix routing_;
  Hyperparams hp_;
  CpModel model_;
  RlsCaches caches_;
  AnomalyVector warm_;
  AdmmWorkspace workspace_;
  int last_index_ = 0;
};

/// flagged = { i : |v_i| > delta_v }.
std::vector<int> detect(const Vector& estimate, double delta_v);

/// ||mask .* (Y - A diag(b) C^T)||_F / max(||mask .* Y||_F, tiny).
double slice_residual(const ObservedSlice& slice, const CpModel& model);

/// Runs a fresh tracker over consecutive slices starting at index 1.
std::vector<StepResult> run(const std::vector<ObservedSlice>& slices, const RoutingMatrix& routing,
                            const Hyperparams& hp, std::uint64_t seed);

}  // namespace anomo
