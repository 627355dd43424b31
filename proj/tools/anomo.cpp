// anomo: generate synthetic networks and traffic, run detectors, evaluate.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "anomo/baselines.hpp"
#include "anomo/csv.hpp"
#include "anomo/error.hpp"
#include "anomo/experiment.hpp"
#include "anomo/hankel.hpp"
#include "anomo/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace anomo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError(fmt::format("cannot read {}", path.string()));
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError(fmt::format("cannot write {}", path.string()));
  os << j.dump(2) << '\n';
}

Config load_config(const std::string& path) {
  Config cfg;
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw ConfigError(fmt::format("cannot read config {}", path));
    json j;
    try {
      j = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError(fmt::format("config {}: {}", path, e.what()));
    }
    cfg = config_from_json(j);
  }
  if (const char* env = std::getenv("ANOMO_SEED")) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("ANOMO_SEED='{}' is not an unsigned integer", env));
    }
  }
  return cfg;
}

// Anomography expects fewer links than flows; more links is legal but unusual.
void warn_if_overdetermined(const Network& net) {
  const auto flows = net.flows.size();
  if (static_cast<std::size_t>(net.links()) >= flows)
    std::cerr << fmt::format("warning: {} links for {} flows; the flow inverse problem is not under-constrained\n",
                             net.links(), flows);
}

Network load_network(const fs::path& dir) {
  const auto path = dir / "network.json";
  if (!fs::exists(path)) throw ConfigError(fmt::format("network file {} not found", path.string()));
  try {
    Network net = network_from_json(read_json(path));
    warn_if_overdetermined(net);
    return net;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const fs::path& path) {
  if (m.rows() != rows || m.cols() != cols)
    throw DataError(fmt::format("{}: expected {}x{} matrix, found {}x{}", path.string(), rows, cols, m.rows(),
                                m.cols()));
}

void write_events(const fs::path& path, const std::vector<AnomalyEvent>& events) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError(fmt::format("cannot write {}", path.string()));
  os << "event,structure,n,link,start,duration,delta,gamma_i,gamma_d,flows\n";
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    int n = static_cast<int>(e.flows.size());
    int link = -1;
    if (const auto* a = std::get_if<AllOdsOneLink>(&e.structure)) link = a->link;
    std::string flows;
    for (std::size_t k = 0; k < e.flows.size(); ++k) flows += (k ? ";" : "") + std::to_string(e.flows[k]);
    os << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", i, structure_tag(e.structure), n, link, e.start, e.duration,
                      e.delta, e.gamma_i, e.gamma_d, flows);
  }
}

// ---------------------------------------------------------------- gen-network

int cmd_gen_network(const Config& cfg, const fs::path& out) {
  fs::create_directories(out);
  const Network net = synthesize_network(cfg);
  const RoutingMatrix routing = routing_of(net);
  warn_if_overdetermined(net);
  write_json(out / "network.json", network_to_json(net));
  std::vector<io::Triplet> entries;
  for (int f = 0; f < routing.flows(); ++f)
    for (int l : routing.column(f)) entries.push_back({l, f, 1.0});
  io::write_triplets(out / "routing.csv", entries, "link", "flow", "value");
  std::cout << fmt::format("nodes={} links={} flows={}\n", net.nodes.size(), routing.links(), routing.flows());
  return kExitOk;
}

// ---------------------------------------------------------------- gen-traffic

int cmd_gen_traffic(const Config& cfg, const fs::path& network_dir, const fs::path& out) {
  Network net = load_network(network_dir);
  if (static_cast<int>(net.flows.size()) != cfg.network.flows)
    throw ConfigError(fmt::format("network has {} flows but config asks for {}", net.flows.size(),
                                  cfg.network.flows));
  fs::create_directories(out);
  const Dataset d = synthesize_traffic(std::move(net), cfg);
  io::write_dense_csv(out / "flows.csv", d.injected.flows);
  io::write_dense_csv(out / "links.csv", d.links);
  io::write_mask_csv(out / "mask.csv", d.mask, "link");
  io::write_mask_csv(out / "truth.csv", d.injected.labels, "flow");
  write_events(out / "events.csv", d.events);
  std::vector<std::string> seasonal;
  for (auto s : d.normal.seasonal) seasonal.push_back(seasonal_name(s));
  json events = json::array();
  for (const auto& e : d.events) events.push_back(io::to_json(e));
  write_json(out / "traffic.json", {{"flows", d.routing.flows()},
                                    {"links", d.routing.links()},
                                    {"times", cfg.traffic.times},
                                    {"seasonal", seasonal},
                                    {"events", events}});
  long anomalous = 0;
  for (const auto& e : d.events) anomalous += static_cast<long>(e.flows.size());
  std::cout << fmt::format("links={} flows={} times={} events={} anomalous_flows={} observed={:.4f}\n",
                           d.routing.links(), d.routing.flows(), cfg.traffic.times, d.events.size(), anomalous,
                           d.mask.cast<double>().mean());
  return kExitOk;
}

// ------------------------------------------------------------------------ run

struct RunInputs {
  RoutingMatrix routing;
  Matrix links;
  Mask mask;
};

RunInputs load_run_inputs(const Config& cfg, const fs::path& network_dir, const fs::path& data_dir) {
  RunInputs in;
  in.routing = routing_of(load_network(network_dir));
  const auto links_path = data_dir / "links.csv";
  const auto mask_path = data_dir / "mask.csv";
  for (const auto& p : {links_path, mask_path})
    if (!fs::exists(p)) throw DataError(fmt::format("{} not found", p.string()));
  in.links = io::read_dense_csv(links_path);
  require_shape(in.links, in.routing.links(), in.links.cols(), links_path);
  if (in.links.cols() != cfg.traffic.times)
    throw DataError(fmt::format("{}: {} time columns, config says {}", links_path.string(), in.links.cols(),
                                cfg.traffic.times));
  in.mask = io::read_mask_csv(mask_path, in.routing.links(), static_cast<int>(in.links.cols()));
  return in;
}

std::string top_entries(const Vector& v, int k) {
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) idx.push_back(static_cast<int>(i));
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(v[a]) > std::abs(v[b]); });
  if (static_cast<int>(idx.size()) > k) idx.resize(static_cast<std::size_t>(k));
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) s += fmt::format("{}{}:{}", i ? ";" : "", idx[i], v[idx[i]]);
  return s;
}

void write_results(const fs::path& dir, const std::string& alg, const std::vector<StepResult>& steps, int top_k,
                   bool append) {
  const auto results_path = dir / fmt::format("results_{}.csv", alg);
  const auto scores_path = dir / fmt::format("scores_{}.csv", alg);
  const auto mode = append ? std::ios::binary | std::ios::app : std::ios::binary | std::ios::trunc;
  std::ofstream rs(results_path, mode);
  std::ofstream ss(scores_path, mode);
  if (!rs || !ss) throw DataError(fmt::format("cannot write results in {}", dir.string()));
  if (!append) {
    rs << "slice,time,residual,admm_iters,converged,flagged,top\n";
    ss << "flow,time,score\n";
  }
  for (const auto& r : steps) {
    rs << fmt::format("{},{},{},{},{},{},{}\n", r.slice_index, r.measurement_time, r.residual, r.admm_iters,
                      r.converged ? 1 : 0, r.flagged.size(), top_entries(r.estimate, top_k));
    for (Eigen::Index f = 0; f < r.estimate.size(); ++f)
      if (r.estimate[f] != 0.0) ss << fmt::format("{},{},{}\n", f, r.measurement_time, std::abs(r.estimate[f]));
  }
}

int cmd_run(const Config& cfg, const fs::path& network_dir, const fs::path& data_dir, const fs::path& out,
            const std::string& resume, int stop_after) {
  const RunInputs in = load_run_inputs(cfg, network_dir, data_dir);
  fs::create_directories(out);
  const auto& hp = cfg.detector.hp;
  const int T = static_cast<int>(in.links.cols());
  json timing = json::object();
  const auto summary_path = out / "run_summary.json";
  if (!resume.empty() && fs::exists(summary_path)) timing = read_json(summary_path).value("timing", json::object());

  for (const auto& alg : cfg.detector.algorithms) {
    std::vector<StepResult> steps;
    bool append = false;
    if (alg == "proposed") {
      std::optional<Tracker> tracker;
      if (!resume.empty()) {
        tracker.emplace(Tracker::restore(read_json(resume)));
        append = true;
      } else {
        tracker.emplace(in.routing, hp, derive_seed(cfg.seed, "tracker"));
      }
      if (tracker->routing() != in.routing || tracker->hyperparams().window != hp.window)
        throw DataError("checkpoint does not match the network or window of this run");
      const int last = T - hp.window + 1;
      const int end = stop_after > 0 ? std::min(last, stop_after) : last;
      for (int t = tracker->index() + 1; t <= end; ++t) {
        steps.push_back(tracker->step(frontal_slice(in.links, in.mask, hp.window, t)));
        if (cfg.detector.checkpoint_every > 0 && t % cfg.detector.checkpoint_every == 0)
          write_json(out / fmt::format("checkpoint_{}.json", t), tracker->checkpoint());
      }
      write_json(out / "checkpoint.json", tracker->checkpoint());
    } else {
      if (!resume.empty()) continue;
      steps = run_ewma(in.links, in.mask, in.routing, hp, cfg.detector.ewma_alpha);
    }
    write_results(out, alg, steps, cfg.eval.top_k, append);
    double track = 0.0;
    double sparse = 0.0;
    for (const auto& s : steps) {
      track += s.tracking_seconds;
      sparse += s.sparse_seconds;
    }
    if (append && timing.contains(alg)) {
      track += timing[alg].value("tracking", 0.0);
      sparse += timing[alg].value("sparse_estimation", 0.0);
    }
    timing[alg] = {{"tracking", track}, {"sparse_estimation", sparse}, {"total", track + sparse}};
    std::cout << fmt::format("{}: {} steps, tracking {:.3f}s, sparse estimation {:.3f}s\n", alg, steps.size(), track,
                             sparse);
  }
  write_json(summary_path, {{"flows", in.routing.flows()},
                            {"links", in.routing.links()},
                            {"times", T},
                            {"window", hp.window},
                            {"algorithms", cfg.detector.algorithms},
                            {"timing", timing}});
  return kExitOk;
}

// ----------------------------------------------------------------------- eval

int cmd_eval(const Config& cfg, const fs::path& data_dir, const fs::path& run_dir, const fs::path& out) {
  const json run = read_json(run_dir / "run_summary.json");
  const int F = run.at("flows").get<int>();
  const int T = run.at("times").get<int>();
  const int W = run.at("window").get<int>();
  const auto truth_path = data_dir / "truth.csv";
  if (!fs::exists(truth_path)) throw DataError(fmt::format("{} not found", truth_path.string()));
  const Mask labels = label_grid(io::read_mask_csv(truth_path, F, T), W);
  fs::create_directories(out);

  json rows = json::array();
  for (const auto& alg : run.at("algorithms").get<std::vector<std::string>>()) {
    const auto scores_path = run_dir / fmt::format("scores_{}.csv", alg);
    Matrix scores = Matrix::Zero(F, T - W + 1);
    for (const auto& e : io::read_triplets(scores_path)) {
      if (e.row < 0 || e.row >= F || e.col < W || e.col > T)
        throw DataError(fmt::format("{}: entry (flow {}, time {}) outside the scored grid [0,{}) x [{},{}]",
                                    scores_path.string(), e.row, e.col, F, W, T));
      scores(e.row, e.col - W) = e.value;
    }
    const Evaluation ev = evaluate(scores, labels, cfg.detector.hp.delta_v);
    {
      std::ofstream os(out / fmt::format("roc_{}.csv", alg), std::ios::binary);
      os << "threshold,tpr,fpr\n";
      for (const auto& p : ev.roc.points) os << fmt::format("{},{},{}\n", p.threshold, p.tpr, p.fpr);
    }
    {
      std::ofstream os(out / fmt::format("f1_{}.csv", alg), std::ios::binary);
      os << "time,precision,recall,f1\n";
      for (std::size_t k = 0; k < ev.f1.per_time.size(); ++k) {
        const auto& s = ev.f1.per_time[k];
        os << fmt::format("{},{},{},{}\n", W + static_cast<int>(k), s.precision, s.recall, s.f1);
      }
    }
    const json t = run.at("timing").value(alg, json::object());
    rows.push_back({{"algorithm", alg},
                    {"auc", ev.roc.auc},
                    {"f1", ev.f1.overall.f1},
                    {"precision", ev.f1.overall.precision},
                    {"recall", ev.f1.overall.recall},
                    {"best_f1", ev.best_f1},
                    {"best_threshold", ev.best_threshold},
                    {"tracking_seconds", t.value("tracking", 0.0)},
                    {"sparse_estimation_seconds", t.value("sparse_estimation", 0.0)}});
    std::cout << fmt::format("{}: auc={:.4f} f1={:.4f} best_f1={:.4f}\n", alg, ev.roc.auc, ev.f1.overall.f1,
                             ev.best_f1);
  }
  write_json(out / "summary.json", {{"delta_v", cfg.detector.hp.delta_v}, {"results", rows}});
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e)) return kExitConfig;
  if (dynamic_cast<const SolverError*>(&e) || dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  return kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online network anomography: synthetic data, detectors and evaluation"};
  app.require_subcommand(1);
  std::string config_path;
  int jobs = 0;
  app.add_option("-c,--config", config_path, "JSON experiment config (defaults if omitted)");
  app.add_option("-j,--jobs", jobs, "worker threads for parallel sections (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);

  auto* print = app.add_subcommand("default-config", "print the default configuration");

  std::string out_dir;
  auto* gen_net = app.add_subcommand("gen-network", "generate a random Delaunay network and routed flows");
  gen_net->add_option("-o,--out", out_dir, "output directory")->required();

  std::string network_dir;
  auto* gen_traffic = app.add_subcommand("gen-traffic", "generate flows, link loads, mask and truth");
  gen_traffic->add_option("-n,--network", network_dir, "directory holding network.json")->required();
  gen_traffic->add_option("-o,--out", out_dir, "output directory")->required();

  std::string data_dir;
  std::string resume;
  int stop_after = 0;
  auto* run = app.add_subcommand("run", "run the configured detectors over a link stream");
  run->add_option("-n,--network", network_dir, "directory holding network.json")->required();
  run->add_option("-d,--data", data_dir, "directory holding links.csv and mask.csv")->required();
  run->add_option("-o,--out", out_dir, "output directory")->required();
  run->add_option("--resume", resume, "continue the tracker from a checkpoint file");
  run->add_option("--stop-after", stop_after, "stop the tracker after this slice index")
      ->check(CLI::NonNegativeNumber);

  std::string run_dir;
  auto* eval = app.add_subcommand("eval", "score detector output against the truth labels");
  eval->add_option("-d,--data", data_dir, "directory holding truth.csv")->required();
  eval->add_option("-r,--run", run_dir, "directory holding run output")->required();
  eval->add_option("-o,--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#endif

  try {
    const Config cfg = load_config(config_path);
    if (*print) {
      std::cout << config_to_json(cfg).dump(2) << '\n';
      return kExitOk;
    }
    if (*gen_net) return cmd_gen_network(cfg, out_dir);
    if (*gen_traffic) return cmd_gen_traffic(cfg, network_dir, out_dir);
    if (*run) return cmd_run(cfg, network_dir, data_dir, out_dir, resume, stop_after);
    if (*eval) return cmd_eval(cfg, data_dir, run_dir, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitOk;
}
