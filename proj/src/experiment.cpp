#include "anomo/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "anomo/baselines.hpp"
#include "anomo/error.hpp"
#include "anomo/hankel.hpp"

namespace anomo {
namespace {

using nlohmann::json;

// Reads one JSON object, rejecting keys it was not asked about.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("config: '{}' must be an object", name_));
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(fmt::format("config: '{}.{}' has the wrong type", name_, key));
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.contains(key)) throw ConfigError(fmt::format("config: unknown key '{}.{}'", name_, key));
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

std::string structure_name(StructureMix s) {
  switch (s) {
    case StructureMix::OneToOne: return "one_to_one";
    case StructureMix::NToOne: return "n_to_one";
    case StructureMix::AllOdsOneLink: return "all_ods_one_link";
    case StructureMix::Mixture: return "mixture";
  }
  return "mixture";
}

}  // namespace

Config config_from_json(const json& j) {
  Config cfg;
  Section root(j, "config");
  root.read("version", cfg.version);
  if (cfg.version != kConfigVersion)
    throw ConfigError(fmt::format("config: unsupported version {} (expected {})", cfg.version, kConfigVersion));
  root.read("seed", cfg.seed);

  if (const auto* n = root.child("network")) {
    Section s(*n, "network");
    s.read("nodes", cfg.network.nodes);
    s.read("flows", cfg.network.flows);
    s.finish();
  }
  if (const auto* t = root.child("traffic")) {
    Section s(*t, "traffic");
    s.read("times", cfg.traffic.times);
    s.read("observation_ratio", cfg.traffic.observation_ratio);
    if (const auto* g = s.child("generator")) {
      Section gs(*g, "traffic.generator");
      auto& p = cfg.traffic.gen;
      gs.read("c0", p.c0);
      gs.read("a1", p.a1);
      gs.read("omega", p.omega);
      if (g->contains("b1") && g->at("b1").is_null()) {
        gs.child("b1");
        p.b1 = -1.0;
      } else {
        gs.read("b1", p.b1);
      }
      gs.read("a2", p.a2);
      gs.read("b2", p.b2);
      gs.read("sigma", p.sigma);
      gs.finish();
    }
    if (const auto* a = s.child("anomalies")) {
      Section as(*a, "traffic.anomalies");
      auto& e = cfg.traffic.events;
      as.read("ratio", e.anomaly_ratio);
      std::string structure = structure_name(e.structure);
      as.read("structure", structure);
      try {
        e.structure = parse_structure(structure);
      } catch (const ParameterError& err) {
        throw ConfigError(std::string("config: ") + err.what());
      }
      as.read("earliest_start", e.earliest_start);
      as.read("durations", e.durations);
      as.read("delta_min", e.delta_min);
      as.read("delta_max", e.delta_max);
      as.finish();
    }
    s.finish();
  }
  if (const auto* d = root.child("detector")) {
    Section s(*d, "detector");
    auto& hp = cfg.detector.hp;
    s.read("lambda", hp.lambda);
    s.read("mu_r", hp.mu_r);
    s.read("mu_h", hp.mu_h);
    s.read("mu_s_scale", hp.mu_s_scale);
    s.read("xi", hp.xi);
    s.read("max_iter", hp.max_iter);
    s.read("eps_abs", hp.eps_abs);
    s.read("eps_rel", hp.eps_rel);
    s.read("delta_v", hp.delta_v);
    s.read("rank", hp.rank);
    s.read("window", hp.window);
    s.read("ewma_alpha", cfg.detector.ewma_alpha);
    s.read("algorithms", cfg.detector.algorithms);
    s.read("checkpoint_every", cfg.detector.checkpoint_every);
    s.finish();
  }
  if (const auto* e = root.child("eval")) {
    Section s(*e, "eval");
    s.read("top_k", cfg.eval.top_k);
    s.finish();
  }
  root.finish();
  validate_config(cfg);
  return cfg;
}

json config_to_json(const Config& cfg) {
  const auto& g = cfg.traffic.gen;
  const auto& e = cfg.traffic.events;
  const auto& hp = cfg.detector.hp;
  json gen = {{"c0", g.c0}, {"a1", g.a1}, {"omega", g.omega}, {"a2", g.a2}, {"b2", g.b2}, {"sigma", g.sigma}};
  gen["b1"] = g.b1 < 0 ? json(nullptr) : json(g.b1);
  return {
      {"version", cfg.version},
      {"seed", cfg.seed},
      {"network", {{"nodes", cfg.network.nodes}, {"flows", cfg.network.flows}}},
      {"traffic",
       {{"times", cfg.traffic.times},
        {"observation_ratio", cfg.traffic.observation_ratio},
        {"generator", gen},
        {"anomalies",
         {{"ratio", e.anomaly_ratio},
          {"structure", structure_name(e.structure)},
          {"earliest_start", e.earliest_start},
          {"durations", e.durations},
          {"delta_min", e.delta_min},
          {"delta_max", e.delta_max}}}}},
      {"detector",
       {{"lambda", hp.lambda},
        {"mu_r", hp.mu_r},
        {"mu_h", hp.mu_h},
        {"mu_s_scale", hp.mu_s_scale},
        {"xi", hp.xi},
        {"max_iter", hp.max_iter},
        {"eps_abs", hp.eps_abs},
        {"eps_rel", hp.eps_rel},
        {"delta_v", hp.delta_v},
        {"rank", hp.rank},
        {"window", hp.window},
        {"ewma_alpha", cfg.detector.ewma_alpha},
        {"algorithms", cfg.detector.algorithms},
        {"checkpoint_every", cfg.detector.checkpoint_every}}},
      {"eval", {{"top_k", cfg.eval.top_k}}},
  };
}

void validate_config(const Config& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (cfg.network.nodes < 3) fail("network.nodes must be >= 3");
  if (cfg.network.flows < 1) fail("network.flows must be >= 1");
  if (cfg.network.flows > cfg.network.nodes * (cfg.network.nodes - 1))
    fail(fmt::format("network.flows {} exceeds the {} ordered node pairs", cfg.network.flows,
                     cfg.network.nodes * (cfg.network.nodes - 1)));
  if (cfg.traffic.times < cfg.detector.hp.window)
    fail(fmt::format("traffic.times {} is shorter than the window {}", cfg.traffic.times, cfg.detector.hp.window));
  if (!(cfg.traffic.observation_ratio > 0 && cfg.traffic.observation_ratio <= 100))
    fail("traffic.observation_ratio must lie in (0, 100]");
  const auto& g = cfg.traffic.gen;
  if (g.c0 < 0 || g.a1 < 0 || g.sigma < 0) fail("traffic.generator: c0, a1 and sigma must be >= 0");
  if (g.b2 == 0) fail("traffic.generator.b2 must be nonzero");
  const auto& e = cfg.traffic.events;
  if (!(e.anomaly_ratio >= 0 && e.anomaly_ratio <= 1)) fail("traffic.anomalies.ratio must lie in [0, 1]");
  if (e.earliest_start < 0) fail("traffic.anomalies.earliest_start must be >= 0");
  if (e.durations.empty()) fail("traffic.anomalies.durations must not be empty");
  for (int d : e.durations)
    if (d < 1) fail("traffic.anomalies.durations must be >= 1");
  if (!(e.delta_min >= 0 && e.delta_min <= e.delta_max)) fail("traffic.anomalies: need 0 <= delta_min <= delta_max");
  if (auto bad = validate(cfg.detector.hp); !bad.empty()) fail("detector: " + bad.front());
  if (!(cfg.detector.ewma_alpha > 0 && cfg.detector.ewma_alpha <= 1)) fail("detector.ewma_alpha must lie in (0, 1]");
  if (cfg.detector.checkpoint_every < 0) fail("detector.checkpoint_every must be >= 0");
  for (const auto& a : cfg.detector.algorithms)
    if (a != "proposed" && a != "ewma") fail(fmt::format("detector: unknown algorithm '{}'", a));
  if (cfg.eval.top_k < 0) fail("eval.top_k must be >= 0");
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  // FNV-1a of the stream name mixed into the master seed by splitmix64.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : stream) h = (h ^ c) * 1099511628211ULL;
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (h | 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Network synthesize_network(const Config& cfg) {
  Network net = make_network(generate_nodes(cfg.network.nodes, derive_seed(cfg.seed, "nodes")));
  build_routing(net, cfg.network.flows, derive_seed(cfg.seed, "flows"));
  return net;
}

Dataset synthesize_traffic(Network net, const Config& cfg) {
  Dataset d;
  d.net = std::move(net);
  d.routing = routing_of(d.net);
  const int T = cfg.traffic.times;
  d.normal = gen_flows(static_cast<int>(d.net.flows.size()), T, cfg.traffic.gen, derive_seed(cfg.seed, "traffic"));
  EventPlan plan = cfg.traffic.events;
  // 0 places events anywhere in the scored region, which starts at time W.
  if (plan.earliest_start == 0) plan.earliest_start = std::min(cfg.detector.hp.window, T);
  d.events = plan_events(d.net, T, plan, derive_seed(cfg.seed, "events"));
  d.injected = inject(d.normal.flows, d.events);
  d.links = make_link_matrix(d.routing, d.injected.flows);
  d.mask = sample_mask(d.routing.links(), T, cfg.traffic.observation_ratio, derive_seed(cfg.seed, "mask"));
  return d;
}

Dataset synthesize(const Config& cfg) { return synthesize_traffic(synthesize_network(cfg), cfg); }

std::vector<ObservedSlice> make_slices(const Matrix& links, const Mask& mask, int window) {
  std::vector<ObservedSlice> out;
  const auto T = static_cast<int>(links.cols());
  for (int t = 1; t + window - 1 <= T; ++t) out.push_back(frontal_slice(links, mask, window, t));
  return out;
}

AlgorithmRun run_algorithm(const std::string& name, const Dataset& data, const Config& cfg) {
  AlgorithmRun out;
  out.name = name;
  const auto& hp = cfg.detector.hp;
  if (name == "proposed") {
    out.steps = run(make_slices(data.links, data.mask, hp.window), data.routing, hp, derive_seed(cfg.seed, "tracker"));
  } else if (name == "ewma") {
    out.steps = run_ewma(data.links, data.mask, data.routing, hp, cfg.detector.ewma_alpha);
  } else {
    throw ConfigError(fmt::format("unknown algorithm '{}'", name));
  }
  for (const auto& s : out.steps) {
    out.tracking_seconds += s.tracking_seconds;
    out.sparse_seconds += s.sparse_seconds;
  }
  return out;
}

Evaluation evaluate(const Matrix& scores, const Mask& labels, double delta_v) {
  Evaluation ev;
  ev.roc = roc(scores, labels);
  ev.f1 = f_measure(threshold_grid(scores, delta_v), labels);
  long pos = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) pos += labels.data()[i] ? 1 : 0;
  const long neg = static_cast<long>(labels.size()) - pos;
  for (const auto& p : ev.roc.points) {
    const auto tp = std::lround(p.tpr * static_cast<double>(pos));
    const auto fp = std::lround(p.fpr * static_cast<double>(neg));
    const double f1 = f_score(tp, fp, pos - tp).f1;
    if (f1 > ev.best_f1) {
      ev.best_f1 = f1;
      ev.best_threshold = p.threshold;
    }
  }
  return ev;
}

}  // namespace anomo
