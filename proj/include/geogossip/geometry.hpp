#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "geogossip/errors.hpp"

namespace geogossip {

using NodeId = std::uint32_t;

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Points2 = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

using Point = Point2<double>;
using Points = Points2<double>;

/// Random geometric graph G(n, r) on the unit square, together with the
/// Voronoi cell area of every node. Immutable once built.
struct Network {
  std::size_t n = 0;
  double radius = 0.0;
  Points positions;                          // 2 x n, column v is node v
  std::vector<std::vector<NodeId>> adjacency;  // ascending ids
  Eigen::VectorXd areas;                     // sums to 1

  Point position(NodeId v) const { return positions.col(v); }
  std::size_t degree(NodeId v) const { return adjacency[v].size(); }
};

bool operator==(const Network& a, const Network& b);

// sqrt(10 ln n / n); natural log.
double transmission_radius(std::size_t n);

// transmission_radius(n) capped at sqrt(2), where every pair is adjacent.
double default_radius(std::size_t n);

// Side of the occupancy partition, sqrt(2 ln n / n).
double occupancy_cell_side(std::size_t n);

Network generate_network(std::size_t n, double radius, std::uint64_t seed);

// Adjacency by the inclusive distance rule; areas via voronoi_areas.
Network build_network(const Points& positions, double radius);

struct ConnectedNetwork {
  Network network;
  std::uint64_t seed = 0;       // seed of the accepted instance
  std::size_t resamples = 0;    // disconnected instances discarded
};

// Draws instances with seed, seed+1, ... until one is connected.
ConnectedNetwork generate_connected_network(std::size_t n, double radius, std::uint64_t seed,
                                            std::size_t max_resamples = 100);

bool is_connected(const Network& net);

// Splits the square into k x k equal cells, k = ceil(1 / cell_side), and
// reports whether every cell holds at least one node.
bool occupancy_check(const Points& positions, double cell_side);
inline bool occupancy_check(const Network& net, double cell_side) {
  return occupancy_check(net.positions, cell_side);
}

namespace detail {

template <typename Scalar>
Scalar polygon_area(const std::vector<Point2<Scalar>>& poly) {
  Scalar twice = 0;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % m];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return twice / 2;
}

// Keeps the part of a convex polygon where (p - mid) . normal <= 0.
template <typename Scalar>
void clip_halfplane(std::vector<Point2<Scalar>>& poly, const Point2<Scalar>& mid,
                    const Point2<Scalar>& normal, std::vector<Point2<Scalar>>& scratch) {
  scratch.clear();
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % m];
    const Scalar da = (a - mid).dot(normal);
    const Scalar db = (b - mid).dot(normal);
    if (da <= 0) scratch.push_back(a);
    if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
      const Scalar t = da / (da - db);
      scratch.push_back(a + t * (b - a));
    }
  }
  poly.swap(scratch);
}

}  // namespace detail

/// Exact area of each site's Voronoi cell restricted to the unit square.
///
/// Each cell starts as the square and is clipped by the bisector half-plane
/// of every other site, visited in order of increasing distance. Once the
/// half-distance to the next site exceeds the farthest cell vertex from the
/// site, no remaining bisector can cut the cell and the loop stops.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> voronoi_areas(
    const Eigen::MatrixBase<Derived>& positions) {
  using Scalar = typename Derived::Scalar;
  using P = Point2<Scalar>;
  static_assert(Derived::RowsAtCompileTime == 2, "positions must be 2 x n");

  const Eigen::Index n = positions.cols();
  if (n == 0) throw InvalidInput("voronoi_areas: empty site list");
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar x = positions(0, i), y = positions(1, i);
    if (!(x >= 0 && x <= 1 && y >= 0 && y <= 1))
      throw InvalidInput("voronoi_areas: site outside the unit square");
  }
  {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      if (positions(0, a) != positions(0, b)) return positions(0, a) < positions(0, b);
      return positions(1, a) < positions(1, b);
    });
    for (std::size_t k = 1; k < order.size(); ++k)
      if (positions.col(order[k]) == positions.col(order[k - 1]))
        throw InvalidInput("voronoi_areas: duplicate sites");
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> areas(n);
  std::vector<std::pair<Scalar, Eigen::Index>> others;
  others.reserve(static_cast<std::size_t>(n));
  std::vector<P> poly, scratch;

  for (Eigen::Index i = 0; i < n; ++i) {
    const P site = positions.col(i);
    others.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) others.emplace_back((P(positions.col(j)) - site).squaredNorm(), j);
    std::sort(others.begin(), others.end());

    poly = {P(0, 0), P(1, 0), P(1, 1), P(0, 1)};
    Scalar reach2 = 0;
    for (const auto& v : poly) reach2 = std::max(reach2, (v - site).squaredNorm());

    for (const auto& [d2, j] : others) {
      if (d2 / 4 > reach2) break;
      const P other = positions.col(j);
      detail::clip_halfplane<Scalar>(poly, (site + other) / 2, other - site, scratch);
      reach2 = 0;
      for (const auto& v : poly) reach2 = std::max(reach2, (v - site).squaredNorm());
    }
    areas(i) = poly.size() < 3 ? Scalar(0) : detail::polygon_area(poly);
  }
  return areas;
}

}  // namespace geogossip
