#include "geogossip/routing.hpp"

#include <cmath>

namespace geogossip {

NodeId nearest_node(const Network& net, const Point& target) {
  NodeId best = 0;
  double best_d2 = (net.position(0) - target).squaredNorm();
  for (NodeId v = 1; v < net.n; ++v) {
    const double d2 = (net.position(v) - target).squaredNorm();
    if (d2 < best_d2) {
      best = v;
      best_d2 = d2;
    }
  }
  return best;
}

RoutePath greedy_route(const Network& net, NodeId source, const Point& target) {
  RoutePath path;
  path.hops.push_back(source);
  NodeId current = source;
  double current_d2 = (net.position(current) - target).squaredNorm();
  for (;;) {
    NodeId best = current;
    double best_d2 = current_d2;
    for (NodeId u : net.adjacency[current]) {
      const double d2 = (net.position(u) - target).squaredNorm();
      if (d2 < best_d2) {
        best = u;
        best_d2 = d2;
      }
    }
    if (best == current) break;
    current = best;
    current_d2 = best_d2;
    path.hops.push_back(current);
  }
  path.terminal = current;
  path.hop_count = path.hops.size() - 1;
  const NodeId nearest = nearest_node(net, target);
  path.dead_end = current_d2 > (net.position(nearest) - target).squaredNorm();
  return path;
}

std::size_t route_cost_bound(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(2.0 / transmission_radius(n))) + 1;
}

}  // namespace geogossip
