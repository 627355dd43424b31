#include "anomo/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "anomo/error.hpp"

namespace anomo {

std::string seasonal_name(Seasonal s) {
  switch (s) {
    case Seasonal::None: return "none";
    case Seasonal::Linear: return "linear";
    case Seasonal::Weekly: return "weekly";
  }
  return "unknown";
}

GeneratedFlows gen_flows(int flows, int times, const FlowGenParams& params, std::uint64_t seed) {
  if (times < 1) throw ParameterError("gen_flows: need at least one time step");
  if (flows < 0) throw ParameterError("gen_flows: negative flow count");
  if (params.a1 < 0 || params.sigma < 0 || params.c0 < 0)
    throw ParameterError("gen_flows: amplitude, noise and offset must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kind(0, 2);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double slope = params.b1 < 0 ? 1.0 / times : params.b1;

  GeneratedFlows out;
  out.flows.resize(flows, times);
  out.seasonal.resize(static_cast<std::size_t>(flows));
  for (int i = 0; i < flows; ++i) {
    const auto type = static_cast<Seasonal>(kind(rng));
    out.seasonal[static_cast<std::size_t>(i)] = type;
    for (int s = 1; s <= times; ++s) {
      double f = params.c0 + params.a1 * std::sin(params.omega * s);
      if (type == Seasonal::Linear) f += slope * s;
      if (type == Seasonal::Weekly) f += params.a2 / params.b2 * std::sin(7.0 * params.omega * s);
      if (params.sigma > 0) f += params.sigma * noise(rng);
      out.flows(i, s - 1) = std::max(f, 0.0);
    }
  }
  return out;
}

double event_shape(const AnomalyEvent& e, int k) {
  if (k < 0 || k >= e.duration) return 0.0;
  const auto rise = static_cast<int>(std::lround(e.gamma_i * e.duration));
  const auto fall = static_cast<int>(std::lround(e.gamma_d * e.duration));
  if (k < rise) return static_cast<double>(k + 1) / (rise + 1);
  const int from_end = e.duration - 1 - k;
  if (from_end < fall) return static_cast<double>(from_end + 1) / (fall + 1);
  return 1.0;
}

Injection inject(const Matrix& flows, const std::vector<AnomalyEvent>& events) {
  const auto nflows = static_cast<int>(flows.rows());
  const auto times = static_cast<int>(flows.cols());
  // Validate everything before touching the data.
  std::map<int, std::vector<std::size_t>> by_flow;
  for (std::size_t id = 0; id < events.size(); ++id) {
    const auto& e = events[id];
    if (auto bad = validate(e); !bad.empty()) throw DataError(fmt::format("event {}: {}", id, bad.front()));
    if (e.start < 1 || e.start + e.duration - 1 > times)
      throw DataError(fmt::format("event {}: interval [{}, {}] outside [1, {}]", id, e.start,
                                  e.start + e.duration - 1, times));
    for (int f : e.flows) {
      if (f < 0 || f >= nflows) throw DataError(fmt::format("event {}: flow {} out of range", id, f));
      for (std::size_t other : by_flow[f]) {
        const auto& o = events[other];
        if (e.start <= o.start + o.duration - 1 && o.start <= e.start + e.duration - 1)
          throw DataError(fmt::format("events {} and {} overlap on flow {}", other, id, f));
      }
      by_flow[f].push_back(id);
    }
  }

  Injection out{flows, Mask::Zero(flows.rows(), flows.cols())};
  for (const auto& e : events) {
    if (e.delta == 1.0) continue;
    for (int k = 0; k < e.duration; ++k) {
      const double s = event_shape(e, k);
      if (s <= 0.0) continue;
      const int col = e.start - 1 + k;
      for (int f : e.flows) {
        out.flows(f, col) += (e.delta - 1.0) * flows(f, col) * s;
        out.labels(f, col) = 1;
      }
    }
  }
  return out;
}

Matrix make_link_matrix(const RoutingMatrix& routing, const Matrix& flows) {
  if (flows.rows() != routing.flows())
    throw DimensionError(fmt::format("make_link_matrix: flow matrix has {} rows, routing has {} flows", flows.rows(),
                                     routing.flows()));
  Matrix links = Matrix::Zero(routing.links(), flows.cols());
  for (int f = 0; f < routing.flows(); ++f)
    for (int l : routing.column(f)) links.row(l) += flows.row(f);
  return links;
}

Mask sample_mask(int links, int times, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 100.0)) throw ParameterError(fmt::format("sample_mask: ratio {} not in (0, 100]", ratio));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double p = ratio / 100.0;
  Mask m(links, times);
  for (int t = 0; t < times; ++t)
    for (int l = 0; l < links; ++l) m(l, t) = unit(rng) < p ? 1 : 0;
  return m;
}

StructureMix parse_structure(const std::string& name) {
  if (name == "one_to_one") return StructureMix::OneToOne;
  if (name == "n_to_one") return StructureMix::NToOne;
  if (name == "all_ods_one_link") return StructureMix::AllOdsOneLink;
  if (name == "mixture") return StructureMix::Mixture;
  throw ParameterError("unknown anomaly structure '" + name + "'");
}

std::vector<AnomalyEvent> plan_events(const Network& net, int times, const EventPlan& plan, std::uint64_t seed) {
  const int nflows = static_cast<int>(net.flows.size());
  if (!(plan.anomaly_ratio >= 0.0 && plan.anomaly_ratio <= 1.0))
    throw ParameterError("plan_events: anomaly ratio must lie in [0, 1]");
  int budget = static_cast<int>(std::lround(plan.anomaly_ratio * nflows));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<char> used(static_cast<std::size_t>(nflows), 0);

  std::vector<int> durations;
  for (int d : plan.durations)
    if (d >= 1 && plan.earliest_start + d - 1 <= times) durations.push_back(d);
  if (budget > 0 && durations.empty()) throw ParameterError("plan_events: no event duration fits the horizon");

  auto unused_flows = [&](auto&& pred) {
    std::vector<int> out;
    for (int f = 0; f < nflows; ++f)
      if (!used[static_cast<std::size_t>(f)] && pred(f)) out.push_back(f);
    return out;
  };
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  const std::array<StructureMix, 3> cycle{StructureMix::OneToOne, StructureMix::NToOne, StructureMix::AllOdsOneLink};
  std::size_t offset = 0;
  std::vector<AnomalyEvent> events;
  while (budget > 0) {
    StructureMix kind = plan.structure;
    if (kind == StructureMix::Mixture) kind = cycle[offset++ % cycle.size()];
    // Leave one flow for each structure not yet drawn in a mixture.
    int cap = budget;
    if (plan.structure == StructureMix::Mixture && offset < cycle.size())
      cap = std::max(1, budget - static_cast<int>(cycle.size() - offset));

    AnomalyEvent e;
    if (kind == StructureMix::NToOne) {
      std::map<int, std::vector<int>> by_dst;
      for (int f : unused_flows([](int) { return true; })) by_dst[net.flows[static_cast<std::size_t>(f)].dst].push_back(f);
      std::vector<int> dsts;
      for (const auto& [d, fs] : by_dst)
        if (fs.size() >= 2) dsts.push_back(d);
      if (dsts.empty() || cap < 2) {
        kind = StructureMix::OneToOne;
      } else {
        auto fs = by_dst[dsts[pick(dsts.size())]];
        std::shuffle(fs.begin(), fs.end(), rng);
        const int n = std::uniform_int_distribution<int>(3, 10)(rng);
        fs.resize(std::min<std::size_t>({fs.size(), static_cast<std::size_t>(n), static_cast<std::size_t>(cap)}));
        std::sort(fs.begin(), fs.end());
        e.flows = fs;
        e.structure = NToOne{static_cast<int>(fs.size())};
      }
    }
    if (kind == StructureMix::AllOdsOneLink) {
      std::map<int, std::vector<int>> by_link;
      for (int f : unused_flows([](int) { return true; }))
        for (int l : net.flows[static_cast<std::size_t>(f)].path) by_link[l].push_back(f);
      std::vector<int> fitting;
      std::vector<int> any;
      for (const auto& [l, fs] : by_link) {
        any.push_back(l);
        if (static_cast<int>(fs.size()) <= cap) fitting.push_back(l);
      }
      if (any.empty()) break;
      const auto& pool = fitting.empty() ? any : fitting;
      const int link = pool[pick(pool.size())];
      auto fs = by_link[link];
      if (static_cast<int>(fs.size()) > cap) {
        std::shuffle(fs.begin(), fs.end(), rng);
        fs.resize(static_cast<std::size_t>(cap));
        std::sort(fs.begin(), fs.end());
      }
      e.flows = fs;
      e.structure = AllOdsOneLink{link};
      e.delta = 0.0;
    }
    if (kind == StructureMix::OneToOne) {
      const auto pool = unused_flows([](int) { return true; });
      if (pool.empty()) break;
      e.flows = {pool[pick(pool.size())]};
      e.structure = OneToOne{};
    }
    if (kind != StructureMix::AllOdsOneLink)
      e.delta = plan.delta_min + (plan.delta_max - plan.delta_min) * unit(rng);
    e.duration = durations[pick(durations.size())];
    e.start = std::uniform_int_distribution<int>(plan.earliest_start, times - e.duration + 1)(rng);
    e.gamma_i = 0.5 * unit(rng);
    e.gamma_d = 0.5 * unit(rng);
    for (int f : e.flows) used[static_cast<std::size_t>(f)] = 1;
    budget -= static_cast<int>(e.flows.size());
    events.push_back(std::move(e));
  }
  return events;
}

Matrix moving_average(const Matrix& flows, int window) {
  if (window < 1) throw ParameterError("moving_average: window must be >= 1");
  const auto times = flows.cols();
  const int left = (window - 1) / 2;
  const int right = window / 2;
  Matrix out(flows.rows(), times);
  for (Eigen::Index t = 0; t < times; ++t) {
    const auto lo = std::max<Eigen::Index>(0, t - left);
    const auto hi = std::min<Eigen::Index>(times - 1, t + right);
    out.col(t) = flows.middleCols(lo, hi - lo + 1).rowwise().mean();
  }
  return out;
}

RealPrep prep_real(const Matrix& flows, int window, bool refit_noise, const std::vector<AnomalyEvent>& events,
                   std::uint64_t seed) {
  if ((flows.array() < 0.0).any()) throw DataError("prep_real: flow matrix has negative entries");
  RealPrep out;
  out.smoothed = moving_average(flows, window);
  out.residual = flows - out.smoothed;
  out.sigma.resize(static_cast<std::size_t>(flows.rows()), 0.0);
  // The smoother absorbs 1/window of white-noise variance; undo that bias.
  const double bias = window > 1 ? std::sqrt(static_cast<double>(window) / (window - 1)) : 1.0;
  for (Eigen::Index f = 0; f < flows.rows(); ++f) {
    const auto r = out.residual.row(f);
    const auto n = r.size();
    if (n < 2) continue;
    const double mean = r.mean();
    out.sigma[static_cast<std::size_t>(f)] = bias * std::sqrt((r.array() - mean).square().sum() / (n - 1));
  }
  Matrix base = out.smoothed;
  if (refit_noise) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (Eigen::Index t = 0; t < base.cols(); ++t)
      for (Eigen::Index f = 0; f < base.rows(); ++f)
        base(f, t) = std::max(0.0, base(f, t) + out.sigma[static_cast<std::size_t>(f)] * noise(rng));
  }
  out.injected = inject(base, events);
  return out;
}

}  // namespace anomo
