#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "anomo/metrics.hpp"
#include "anomo/netgen.hpp"
#include "anomo/pipeline.hpp"
#include "anomo/traffic.hpp"

namespace anomo {

inline constexpr int kConfigVersion = 1;

struct NetworkConfig {
  int nodes = 50;
  int flows = 500;
};

struct TrafficConfig {
  int times = 168;
  double observation_ratio = 30.0;  ///< percent of link samples observed
  FlowGenParams gen;
  /// earliest_start 0 means "from the first scored time W".
  EventPlan events = [] {
    EventPlan p;
    p.earliest_start = 0;
    return p;
  }();
};

struct DetectorConfig {
  Hyperparams hp;
  double ewma_alpha = 0.2;
  std::vector<std::string> algorithms{"proposed", "ewma"};
  int checkpoint_every = 0;  ///< 0 writes a checkpoint only at the end
};

struct EvalConfig {
  int top_k = 5;  ///< largest |v| entries echoed per result row
};

struct Config {
  int version = kConfigVersion;
  std::uint64_t seed = 1;
  NetworkConfig network;
  TrafficConfig traffic;
  DetectorConfig detector;
  EvalConfig eval;
};

/// Strict parse: unknown keys, wrong types and unsupported versions raise
/// ConfigError. Missing keys keep their defaults.
Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& cfg);
/// Checks ranges that the individual modules would otherwise reject later.
void validate_config(const Config& cfg);

/// Independent seeds for each random stream, derived from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

struct Dataset {
  Network net;
  RoutingMatrix routing;
  GeneratedFlows normal;
  std::vector<AnomalyEvent> events;
  Injection injected;  ///< flows with anomalies and their labels
  Matrix links;        ///< L x T
  Mask mask;           ///< L x T
};

Network synthesize_network(const Config& cfg);
/// Flows, events, link matrix and mask for an existing network. Masks drawn
/// at two observation ratios under one seed are nested.
Dataset synthesize_traffic(Network net, const Config& cfg);
Dataset synthesize(const Config& cfg);

std::vector<ObservedSlice> make_slices(const Matrix& links, const Mask& mask, int window);

struct AlgorithmRun {
  std::string name;
  std::vector<StepResult> steps;
  double tracking_seconds = 0.0;
  double sparse_seconds = 0.0;
};

AlgorithmRun run_algorithm(const std::string& name, const Dataset& data, const Config& cfg);

struct Evaluation {
  RocCurve roc;
  FTrace f1;          ///< at the configured delta_v
  double best_f1 = 0.0;
  double best_threshold = 0.0;
};

Evaluation evaluate(const Matrix& scores, const Mask& labels, double delta_v);

}  // namespace anomo
