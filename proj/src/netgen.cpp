#include "anomo/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "anomo/error.hpp"

namespace anomo {
namespace {

constexpr int kGhost = -1;

long double orient(const Point& a, const Point& b, const Point& c) {
  return (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
         (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
}

// > 0 when d lies strictly inside the circumcircle of the ccw triangle abc.
long double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const long double adx = static_cast<long double>(a.x) - d.x, ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x, bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x, cdy = static_cast<long double>(c.y) - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

bool strictly_between(const Point& a, const Point& b, const Point& x) {
  const double dot = (x.x - a.x) * (b.x - a.x) + (x.y - a.y) * (b.y - a.y);
  const double len2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
  return dot > 0.0 && dot < len2;
}

// Ghost triangle (a, b, G): a -> b is a hull edge seen from outside, so the
// triangulated region lies to its right.
bool in_conflict(const Triangle& t, const std::vector<Point>& p, const Point& x) {
  if (t[2] == kGhost) {
    const Point& a = p[static_cast<std::size_t>(t[0])];
    const Point& b = p[static_cast<std::size_t>(t[1])];
    const long double o = orient(a, b, x);
    return o > 0 || (o == 0 && strictly_between(a, b, x));
  }
  return incircle(p[static_cast<std::size_t>(t[0])], p[static_cast<std::size_t>(t[1])],
                  p[static_cast<std::size_t>(t[2])], x) > 0;
}

// Rotates so a ghost vertex, if any, sits last.
Triangle normalize(Triangle t) {
  while (t[2] != kGhost && (t[0] == kGhost || t[1] == kGhost)) t = {t[1], t[2], t[0]};
  return t;
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Adjacency {
  struct Arc {
    int to;
    int link;
    double weight;
  };
  std::vector<std::vector<Arc>> out;
};

Adjacency adjacency(const Network& net) {
  Adjacency adj;
  adj.out.resize(net.nodes.size());
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    const auto [u, v] = net.edges[k];
    const double w = distance(net.nodes[static_cast<std::size_t>(u)], net.nodes[static_cast<std::size_t>(v)]);
    adj.out[static_cast<std::size_t>(u)].push_back({v, static_cast<int>(2 * k), w});
    adj.out[static_cast<std::size_t>(v)].push_back({u, static_cast<int>(2 * k + 1), w});
  }
  return adj;
}

struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<int> pred_node;
  std::vector<int> pred_link;
};

ShortestPathTree dijkstra(const Adjacency& adj, int src) {
  const auto n = adj.out.size();
  ShortestPathTree tree{std::vector<double>(n, std::numeric_limits<double>::infinity()), std::vector<int>(n, -1),
                        std::vector<int>(n, -1)};
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  tree.dist[static_cast<std::size_t>(src)] = 0.0;
  pq.emplace(0.0, src);
  std::vector<char> done(n, 0);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    for (const auto& arc : adj.out[static_cast<std::size_t>(u)]) {
      const auto v = static_cast<std::size_t>(arc.to);
      if (done[v]) continue;
      const double nd = d + arc.weight;
      if (nd < tree.dist[v] || (nd == tree.dist[v] && u < tree.pred_node[v])) {
        tree.dist[v] = nd;
        tree.pred_node[v] = u;
        tree.pred_link[v] = arc.link;
        pq.emplace(nd, arc.to);
      }
    }
  }
  return tree;
}

std::vector<int> extract_path(const ShortestPathTree& tree, int src, int dst) {
  if (!std::isfinite(tree.dist[static_cast<std::size_t>(dst)]))
    throw PathError(fmt::format("no path from node {} to node {}", src, dst));
  std::vector<int> links;
  for (int v = dst; v != src; v = tree.pred_node[static_cast<std::size_t>(v)])
    links.push_back(tree.pred_link[static_cast<std::size_t>(v)]);
  std::reverse(links.begin(), links.end());
  return links;
}

}  // namespace

std::pair<int, int> Network::link_endpoints(int link) const {
  const auto& [u, v] = edges.at(static_cast<std::size_t>(link / 2));
  return link % 2 == 0 ? std::pair{u, v} : std::pair{v, u};
}

double Network::link_length(int link) const {
  const auto [u, v] = link_endpoints(link);
  return distance(nodes[static_cast<std::size_t>(u)], nodes[static_cast<std::size_t>(v)]);
}

std::vector<Point> generate_nodes(int count, std::uint64_t seed) {
  if (count < 3) throw ParameterError(fmt::format("generate_nodes: need at least 3 nodes, got {}", count));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> pts(static_cast<std::size_t>(count));
  for (auto& p : pts) {
    p.x = unit(rng);
    p.y = unit(rng);
  }
  return pts;
}

Triangulation delaunay(const std::vector<Point>& p) {
  const int n = static_cast<int>(p.size());
  if (n < 3) throw DegeneracyError("delaunay: need at least 3 points");
  {
    std::set<std::pair<double, double>> seen;
    for (const auto& q : p)
      if (!seen.emplace(q.x, q.y).second) throw DegeneracyError("delaunay: duplicate points");
  }

  // Seed triangle: the first point, the next distinct one and the first point off their line.
  const int i0 = 0;
  const int i1 = 1;
  int i2 = -1;
  for (int i = 2; i < n; ++i) {
    if (orient(p[0], p[1], p[static_cast<std::size_t>(i)]) != 0) {
      i2 = i;
      break;
    }
  }
  if (i2 < 0) throw DegeneracyError("delaunay: all points are collinear");

  std::vector<Triangle> tris;
  if (orient(p[0], p[1], p[static_cast<std::size_t>(i2)]) > 0) {
    tris = {{i0, i1, i2}, {i1, i0, kGhost}, {i2, i1, kGhost}, {i0, i2, kGhost}};
  } else {
    tris = {{i0, i2, i1}, {i2, i0, kGhost}, {i1, i2, kGhost}, {i0, i1, kGhost}};
  }

  std::vector<Triangle> kept;
  std::map<std::pair<int, int>, int> directed;
  for (int x = 2; x < n; ++x) {
    if (x == i2) continue;
    const Point& px = p[static_cast<std::size_t>(x)];
    kept.clear();
    directed.clear();
    std::vector<Triangle> cavity;
    for (const auto& t : tris) {
      if (in_conflict(t, p, px)) {
        cavity.push_back(t);
      } else {
        kept.push_back(t);
      }
    }
    if (cavity.empty()) throw DegeneracyError(fmt::format("delaunay: point {} could not be inserted", x));
    for (const auto& t : cavity)
      for (int e = 0; e < 3; ++e) ++directed[{t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)]}];
    for (const auto& [edge, count] : directed) {
      if (directed.contains({edge.second, edge.first})) continue;
      kept.push_back(normalize({edge.first, edge.second, x}));
    }
    tris.swap(kept);
  }

  Triangulation out;
  std::set<Edge> edges;
  for (const auto& t : tris) {
    if (t[2] == kGhost) continue;
    out.triangles.push_back(t);
    for (int e = 0; e < 3; ++e) {
      const int a = t[static_cast<std::size_t>(e)];
      const int b = t[static_cast<std::size_t>((e + 1) % 3)];
      edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

Network make_network(std::vector<Point> nodes) {
  Network net;
  net.edges = delaunay(nodes).edges;
  net.nodes = std::move(nodes);
  return net;
}

std::vector<int> shortest_path(const Network& net, int src, int dst) {
  const int n = static_cast<int>(net.nodes.size());
  if (src < 0 || src >= n || dst < 0 || dst >= n) throw PathError("shortest_path: node index out of range");
  if (src == dst) throw PathError(fmt::format("shortest_path: source and destination are both node {}", src));
  return extract_path(dijkstra(adjacency(net), src), src, dst);
}

RoutingMatrix routing_of(const Network& net) {
  std::vector<std::vector<int>> cols;
  cols.reserve(net.flows.size());
  for (const auto& f : net.flows) cols.push_back(f.path);
  return RoutingMatrix(net.links(), std::move(cols));
}

RoutingMatrix build_routing(Network& net, int flows, std::uint64_t seed) {
  const auto n = static_cast<std::int64_t>(net.nodes.size());
  if (flows < 1) throw ParameterError("build_routing: need at least one flow");
  if (flows > n * (n - 1))
    throw ParameterError(fmt::format("build_routing: {} flows exceed the {} ordered node pairs", flows, n * (n - 1)));

  std::mt19937_64 rng(seed);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(flows));
  if (2 * static_cast<std::int64_t>(flows) < n * (n - 1)) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(n - 1));
    std::unordered_set<std::int64_t> used;
    while (static_cast<int>(pairs.size()) < flows) {
      const int s = pick(rng);
      const int d = pick(rng);
      if (s == d || !used.insert(s * n + d).second) continue;
      pairs.emplace_back(s, d);
    }
  } else {
    std::vector<std::pair<int, int>> all;
    for (int s = 0; s < n; ++s)
      for (int d = 0; d < n; ++d)
        if (s != d) all.emplace_back(s, d);
    std::shuffle(all.begin(), all.end(), rng);
    pairs.assign(all.begin(), all.begin() + flows);
  }

  const Adjacency adj = adjacency(net);
  std::map<int, ShortestPathTree> trees;
  net.flows.clear();
  for (const auto& [s, d] : pairs) {
    auto it = trees.find(s);
    if (it == trees.end()) it = trees.emplace(s, dijkstra(adj, s)).first;
    net.flows.push_back({s, d, extract_path(it->second, s, d)});
  }
  return routing_of(net);
}

nlohmann::json network_to_json(const Network& net) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& p : net.nodes) nodes.push_back({p.x, p.y});
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [u, v] : net.edges) edges.push_back({u, v});
  nlohmann::json links = nlohmann::json::array();
  for (int l = 0; l < net.links(); ++l) {
    const auto [a, b] = net.link_endpoints(l);
    links.push_back({{"id", l}, {"from", a}, {"to", b}});
  }
  nlohmann::json flows = nlohmann::json::array();
  for (const auto& f : net.flows) flows.push_back({{"src", f.src}, {"dst", f.dst}, {"path", f.path}});
  return {{"format", "anomo-network"}, {"version", 1}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)},
          {"links", std::move(links)},    {"flows", std::move(flows)}};
}

Network network_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "anomo-network") throw ParseError("network json: missing format tag");
  Network net;
  for (const auto& p : j.at("nodes")) net.nodes.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  for (const auto& e : j.at("edges")) net.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  for (const auto& f : j.at("flows"))
    net.flows.push_back({f.at("src").get<int>(), f.at("dst").get<int>(), f.at("path").get<std::vector<int>>()});
  return net;
}

}  // namespace anomo
