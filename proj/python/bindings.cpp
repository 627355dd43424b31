#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "anomo/error.hpp"
#include "anomo/experiment.hpp"
#include "anomo/hankel.hpp"
#include "anomo/metrics.hpp"
#include "anomo/netgen.hpp"
#include "anomo/pipeline.hpp"
#include "anomo/serialize.hpp"
#include "anomo/sparse_admm.hpp"

namespace py = pybind11;
using namespace anomo;

namespace {

// Configs cross the boundary as JSON text; the Python side wraps them in dicts.
Config parse_config(const std::string& text) {
  const Config cfg = config_from_json(nlohmann::json::parse(text));
  validate_config(cfg);
  return cfg;
}

py::dict step_to_dict(const StepResult& r) {
  py::dict d;
  d["slice"] = r.slice_index;
  d["time"] = r.measurement_time;
  d["b"] = r.b;
  d["estimate"] = r.estimate;
  d["flagged"] = r.flagged;
  d["residual"] = r.residual;
  d["admm_iters"] = r.admm_iters;
  d["converged"] = r.converged;
  d["tracking_seconds"] = r.tracking_seconds;
  d["sparse_seconds"] = r.sparse_seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming network anomography: CP subspace tracking with sparse ADMM anomaly estimation";

  auto base = py::register_exception<Error>(m, "AnomoError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<SequencingError>(m, "SequencingError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());

  m.def("_default_config", [] { return config_to_json(Config{}).dump(); });
  m.def("_hyperparams", [](const std::string& cfg) { return io::to_json(parse_config(cfg).detector.hp).dump(); });

  m.def(
      "hankelize",
      [](const Vector& series, int window) {
        return hankelize(std::span<const double>(series.data(), static_cast<std::size_t>(series.size())), window);
      },
      py::arg("series"), py::arg("window"));

  m.def("soft_threshold", &soft_threshold, py::arg("a"), py::arg("kappa"));

  m.def(
      "roc",
      [](const Matrix& scores, const Mask& labels) {
        const auto c = roc(scores, labels);
        std::vector<std::tuple<double, double, double>> pts;
        for (const auto& p : c.points) pts.emplace_back(p.threshold, p.tpr, p.fpr);
        return py::make_tuple(c.auc, pts);
      },
      py::arg("scores"), py::arg("labels"), "Returns (auc, [(threshold, tpr, fpr), ...]).");

  m.def(
      "generate_nodes",
      [](int count, std::uint64_t seed) {
        const auto pts = generate_nodes(count, seed);
        Matrix out(count, 2);
        for (int i = 0; i < count; ++i) {
          out(i, 0) = pts[static_cast<std::size_t>(i)].x;
          out(i, 1) = pts[static_cast<std::size_t>(i)].y;
        }
        return out;
      },
      py::arg("count"), py::arg("seed"));

  m.def(
      "link_count",
      [](int nodes, std::uint64_t seed) { return make_network(generate_nodes(nodes, seed)).links(); },
      py::arg("nodes"), py::arg("seed"), "Directed links of the Delaunay network on `nodes` random points.");

  py::class_<RoutingMatrix>(m, "RoutingMatrix")
      .def(py::init<int, std::vector<std::vector<int>>>(), py::arg("links"), py::arg("paths"))
      .def_property_readonly("links", &RoutingMatrix::links)
      .def_property_readonly("flows", &RoutingMatrix::flows)
      .def("dense", &RoutingMatrix::dense)
      .def("column", [](const RoutingMatrix& r, int f) {
        const auto c = r.column(f);
        return std::vector<int>(c.begin(), c.end());
      });

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("routing", [](const Dataset& d) { return d.routing; })
      .def_property_readonly("links", [](const Dataset& d) { return d.links; })
      .def_property_readonly("mask", [](const Dataset& d) { return d.mask; })
      .def_property_readonly("flows", [](const Dataset& d) { return d.injected.flows; })
      .def_property_readonly("normal_flows", [](const Dataset& d) { return d.normal.flows; })
      .def_property_readonly("labels", [](const Dataset& d) { return d.injected.labels; })
      .def_property_readonly("event_count", [](const Dataset& d) { return d.events.size(); });

  m.def(
      "_synthesize", [](const std::string& cfg) { return synthesize(parse_config(cfg)); }, py::arg("config"));

  m.def(
      "_run",
      [](const Dataset& d, const std::string& cfg_text) {
        const Config cfg = parse_config(cfg_text);
        const int W = cfg.detector.hp.window;
        const int T = static_cast<int>(d.links.cols());
        const Mask labels = label_grid(d.injected.labels, W);
        const bool scorable = labels.cast<int>().sum() > 0;
        py::dict out;
        for (const auto& alg : cfg.detector.algorithms) {
          const auto run = run_algorithm(alg, d, cfg);
          py::dict r;
          py::list steps;
          for (const auto& s : run.steps) steps.append(step_to_dict(s));
          r["steps"] = steps;
          r["tracking_seconds"] = run.tracking_seconds;
          r["sparse_seconds"] = run.sparse_seconds;
          const Matrix scores = score_grid(run.steps, d.routing.flows(), T, W);
          r["scores"] = scores;
          if (scorable) {
            const auto ev = evaluate(scores, labels, cfg.detector.hp.delta_v);
            r["auc"] = ev.roc.auc;
            r["f1"] = ev.f1.overall.f1;
            r["best_f1"] = ev.best_f1;
          }
          out[py::str(alg)] = r;
        }
        return out;
      },
      py::arg("dataset"), py::arg("config"));

  m.def(
      "frontal_slice",
      [](const Matrix& links, const Mask& mask, int window, int t) {
        const auto s = frontal_slice(links, mask, window, t);
        return py::make_tuple(s.values, s.mask);
      },
      py::arg("links"), py::arg("mask"), py::arg("window"), py::arg("t"));

  py::class_<Tracker>(m, "_Tracker")
      .def(py::init([](RoutingMatrix r, const std::string& hp, std::uint64_t seed) {
             return Tracker(std::move(r), io::hyperparams_from_json(nlohmann::json::parse(hp)), seed);
           }),
           py::arg("routing"), py::arg("hyperparams"), py::arg("seed"))
      .def_property_readonly("index", &Tracker::index)
      .def_property_readonly("state_bytes", &Tracker::state_bytes)
      .def(
          "step",
          [](Tracker& t, const Matrix& values, const Mask& mask) {
            ObservedSlice s;
            s.index = t.index() + 1;
            s.values = values;
            s.mask = mask;
            return step_to_dict(t.step(s));
          },
          py::arg("values"), py::arg("mask"))
      .def("checkpoint", [](const Tracker& t) { return t.checkpoint().dump(); })
      .def_static("restore", [](const std::string& text) { return Tracker::restore(nlohmann::json::parse(text)); });
}
