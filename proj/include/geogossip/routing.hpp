#pragma once

#include <cstddef>
#include <vector>

#include "geogossip/geometry.hpp"

namespace geogossip {

struct RoutePath {
  std::vector<NodeId> hops;  // hops.front() is the source
  NodeId terminal = 0;
  std::size_t hop_count = 0;
  // Greedy stalled at a node that is not a nearest node to the target.
  bool dead_end = false;
};

// Node nearest to `target` by linear scan; lowest id on ties.
NodeId nearest_node(const Network& net, const Point& target);

// Forwards to the neighbor strictly closest to the target until no neighbor
// improves. Equidistant neighbors resolve to the lowest id.
RoutePath greedy_route(const Network& net, NodeId source, const Point& target);

// ceil(2 / r(n)) + 1 hops: row-then-column traversal plus one final hop.
std::size_t route_cost_bound(std::size_t n);

}  // namespace geogossip
