#include "anomo/serialize.hpp"

#include <set>

#include "anomo/error.hpp"

namespace anomo::io {
namespace {

template <typename Derived>
json dense_to_json(const Eigen::DenseBase<Derived>& m) {
  json data = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

template <typename M>
M dense_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw ParseError("matrix json: data length does not match rows * cols");
  M m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = data[k++].get<typename M::Scalar>();
  return m;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* what) {
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) throw ParseError(std::string(what) + ": unknown key '" + key + "'");
}

}  // namespace

json to_json(const Matrix& m) { return dense_to_json(m); }
json to_json(const Mask& m) { return dense_to_json(m); }

json to_json(const Vector& v) {
  json data = json::array();
  for (double x : v) data.push_back(x);
  return data;
}

Matrix matrix_from_json(const json& j) { return dense_from_json<Matrix>(j); }
Mask mask_from_json(const json& j) { return dense_from_json<Mask>(j); }

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json to_json(const RoutingMatrix& r) {
  json cols = json::array();
  for (int f = 0; f < r.flows(); ++f) {
    const auto c = r.column(f);
    cols.push_back(std::vector<int>(c.begin(), c.end()));
  }
  return {{"links", r.links()}, {"columns", std::move(cols)}};
}

RoutingMatrix routing_from_json(const json& j) {
  return RoutingMatrix(j.at("links").get<int>(), j.at("columns").get<std::vector<std::vector<int>>>());
}

json to_json(const CpModel& m) {
  return {{"A", to_json(m.A)}, {"C", to_json(m.C)}, {"b_curr", to_json(m.b_curr)}, {"b_prev", to_json(m.b_prev)}};
}

CpModel model_from_json(const json& j) {
  return {matrix_from_json(j.at("A")), matrix_from_json(j.at("C")), vector_from_json(j.at("b_curr")),
          vector_from_json(j.at("b_prev"))};
}

json to_json(const RlsCaches& c) {
  json ra = json::array();
  json rc = json::array();
  for (const auto& m : c.RA) ra.push_back(to_json(m));
  for (const auto& m : c.RC) rc.push_back(to_json(m));
  return {{"RA", std::move(ra)}, {"RC", std::move(rc)}};
}

RlsCaches caches_from_json(const json& j) {
  RlsCaches c;
  for (const auto& m : j.at("RA")) c.RA.push_back(matrix_from_json(m));
  for (const auto& m : j.at("RC")) c.RC.push_back(matrix_from_json(m));
  return c;
}

json to_json(const Hyperparams& hp) {
  return {{"lambda", hp.lambda},   {"mu_r", hp.mu_r},         {"mu_h", hp.mu_h},       {"mu_s_scale", hp.mu_s_scale},
          {"xi", hp.xi},           {"max_iter", hp.max_iter}, {"eps_abs", hp.eps_abs}, {"eps_rel", hp.eps_rel},
          {"delta_v", hp.delta_v}, {"rank", hp.rank},         {"window", hp.window}};
}

Hyperparams hyperparams_from_json(const json& j) {
  reject_unknown(j,
                 {"lambda", "mu_r", "mu_h", "mu_s_scale", "xi", "max_iter", "eps_abs", "eps_rel", "delta_v", "rank",
                  "window"},
                 "hyperparams");
  Hyperparams hp;
  hp.lambda = j.value("lambda", hp.lambda);
  hp.mu_r = j.value("mu_r", hp.mu_r);
  hp.mu_h = j.value("mu_h", hp.mu_h);
  hp.mu_s_scale = j.value("mu_s_scale", hp.mu_s_scale);
  hp.xi = j.value("xi", hp.xi);
  hp.max_iter = j.value("max_iter", hp.max_iter);
  hp.eps_abs = j.value("eps_abs", hp.eps_abs);
  hp.eps_rel = j.value("eps_rel", hp.eps_rel);
  hp.delta_v = j.value("delta_v", hp.delta_v);
  hp.rank = j.value("rank", hp.rank);
  hp.window = j.value("window", hp.window);
  return hp;
}

json to_json(const AnomalyVector& a) { return {{"v", to_json(a.v)}, {"z", to_json(a.z)}, {"u", to_json(a.u)}}; }

AnomalyVector anomaly_from_json(const json& j) {
  return {vector_from_json(j.at("v")), vector_from_json(j.at("z")), vector_from_json(j.at("u"))};
}

json to_json(const AnomalyEvent& e) {
  json s = {{"type", structure_tag(e.structure)}};
  if (const auto* n = std::get_if<NToOne>(&e.structure)) s["n"] = n->n;
  if (const auto* a = std::get_if<AllOdsOneLink>(&e.structure)) s["link"] = a->link;
  return {{"flows", e.flows},     {"start", e.start},     {"duration", e.duration}, {"delta", e.delta},
          {"gamma_i", e.gamma_i}, {"gamma_d", e.gamma_d}, {"structure", std::move(s)}};
}

AnomalyEvent event_from_json(const json& j) {
  AnomalyEvent e;
  e.flows = j.at("flows").get<std::vector<int>>();
  e.start = j.at("start").get<int>();
  e.duration = j.at("duration").get<int>();
  e.delta = j.at("delta").get<double>();
  e.gamma_i = j.at("gamma_i").get<double>();
  e.gamma_d = j.at("gamma_d").get<double>();
  const auto& s = j.at("structure");
  const auto type = s.at("type").get<std::string>();
  if (type == "one_to_one") {
    e.structure = OneToOne{};
  } else if (type == "n_to_one") {
    e.structure = NToOne{s.at("n").get<int>()};
  } else if (type == "all_ods_one_link") {
    e.structure = AllOdsOneLink{s.at("link").get<int>()};
  } else {
    throw ParseError("event: unknown structure '" + type + "'");
  }
  return e;
}

}  // namespace anomo::io
