#include "geogossip/geometry.hpp"

#include <cmath>
#include <queue>
#include <random>
#include <string>

#include "geogossip/rng.hpp"

namespace geogossip {

bool operator==(const Network& a, const Network& b) {
  return a.n == b.n && a.radius == b.radius && a.positions == b.positions &&
         a.adjacency == b.adjacency && a.areas == b.areas;
}

double transmission_radius(std::size_t n) {
  if (n < 2) throw InvalidParameter("transmission_radius: n must be >= 2");
  const double nd = static_cast<double>(n);
  return std::sqrt(10.0 * std::log(nd) / nd);
}

double default_radius(std::size_t n) { return std::min(transmission_radius(n), std::sqrt(2.0)); }

double occupancy_cell_side(std::size_t n) {
  if (n < 2) throw InvalidParameter("occupancy_cell_side: n must be >= 2");
  const double nd = static_cast<double>(n);
  return std::sqrt(2.0 * std::log(nd) / nd);
}

Network build_network(const Points& positions, double radius) {
  Network net;
  net.n = static_cast<std::size_t>(positions.cols());
  net.radius = radius;
  net.positions = positions;
  net.adjacency.assign(net.n, {});
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < net.n; ++i) {
    for (std::size_t j = i + 1; j < net.n; ++j) {
      if ((positions.col(i) - positions.col(j)).squaredNorm() <= r2) {
        net.adjacency[i].push_back(static_cast<NodeId>(j));
        net.adjacency[j].push_back(static_cast<NodeId>(i));
      }
    }
  }
  // j ascends in the inner loop and i ascends in the outer one, so every
  // list is already sorted.
  net.areas = voronoi_areas(positions);
  return net;
}

Network generate_network(std::size_t n, double radius, std::uint64_t seed) {
  if (n < 2) throw InvalidParameter("generate_network: n must be >= 2");
  if (!(radius > 0.0) || radius > std::sqrt(2.0))
    throw InvalidParameter("generate_network: radius must lie in (0, sqrt 2]");
  Rng rng = make_stream(seed, {0});
  Points positions(2, static_cast<Eigen::Index>(n));
  for (Eigen::Index v = 0; v < positions.cols(); ++v) {
    positions(0, v) = uniform01(rng);
    positions(1, v) = uniform01(rng);
  }
  return build_network(positions, radius);
}

ConnectedNetwork generate_connected_network(std::size_t n, double radius, std::uint64_t seed,
                                            std::size_t max_resamples) {
  for (std::size_t k = 0; k <= max_resamples; ++k) {
    Network net = generate_network(n, radius, seed + k);
    if (is_connected(net)) return {std::move(net), seed + k, k};
  }
  throw ConfigurationError("no connected instance for n=" + std::to_string(n) + " after " +
                           std::to_string(max_resamples) + " resamples");
}

bool is_connected(const Network& net) {
  if (net.n == 0) return true;
  std::vector<char> seen(net.n, 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop();
    for (NodeId u : net.adjacency[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        frontier.push(u);
      }
    }
  }
  return reached == net.n;
}

bool occupancy_check(const Points& positions, double cell_side) {
  if (!(cell_side > 0.0)) throw InvalidParameter("occupancy_check: cell side must be positive");
  const auto k = static_cast<std::size_t>(std::ceil(1.0 / cell_side));
  std::vector<char> hit(k * k, 0);
  std::size_t empty = k * k;
  for (Eigen::Index v = 0; v < positions.cols(); ++v) {
    const auto cx = std::min(k - 1, static_cast<std::size_t>(positions(0, v) * static_cast<double>(k)));
    const auto cy = std::min(k - 1, static_cast<std::size_t>(positions(1, v) * static_cast<double>(k)));
    char& cell = hit[cy * k + cx];
    if (!cell) {
      cell = 1;
      --empty;
    }
  }
  return empty == 0;
}

}  // namespace geogossip
