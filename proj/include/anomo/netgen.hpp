#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "anomo/types.hpp"

namespace anomo {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Undirected edge with u < v.
using Edge = std::pair<int, int>;
/// Counter-clockwise vertex triple.
using Triangle = std::array<int, 3>;

struct Triangulation {
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;  ///< sorted, unique
};

struct Flow {
  int src = 0;
  int dst = 0;
  std::vector<int> path;  ///< ordered directed link ids
};

/// Random geometric network. Undirected edge k yields directed links
/// 2k (u -> v) and 2k + 1 (v -> u).
struct Network {
  std::vector<Point> nodes;
  std::vector<Edge> edges;
  std::vector<Flow> flows;

  int links() const { return 2 * static_cast<int>(edges.size()); }
  /// (from, to) endpoints of a directed link.
  std::pair<int, int> link_endpoints(int link) const;
  double link_length(int link) const;
};

/// N i.i.d. uniform points in the unit square.
std::vector<Point> generate_nodes(int count, std::uint64_t seed);

/// Incremental Bowyer-Watson triangulation with ghost triangles on the hull.
/// Throws DegeneracyError for all-collinear or duplicate points.
Triangulation delaunay(const std::vector<Point>& points);

/// Network with Delaunay edges and no flows yet.
Network make_network(std::vector<Point> nodes);

/// Euclidean-weighted shortest path as directed link ids. At equal distance the
/// predecessor with the smaller node index wins.
std::vector<int> shortest_path(const Network& net, int src, int dst);

/// Samples F distinct ordered (src, dst) pairs, routes each on its shortest
/// path and stores them in `net.flows`. Returns the incidence matrix.
RoutingMatrix build_routing(Network& net, int flows, std::uint64_t seed);

/// Incidence matrix of the flows already stored in `net`.
RoutingMatrix routing_of(const Network& net);

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

}  // namespace anomo
