#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "geogossip/geometry.hpp"
#include "geogossip/rng.hpp"
#include "geogossip/routing.hpp"

namespace geogossip {

inline constexpr double kDefaultNu = 0.1;
inline constexpr double kDefaultMu = 0.1;

/// Rejection-sampling policy over Voronoi areas.
///
/// A query whose greedy route terminates at v is accepted with probability
/// accept_prob[v] = min(tau / a_v, 1). The induced partner distribution is
/// q_v = min(tau, a_v) / sum_t min(tau, a_t) and a single query succeeds
/// with probability p_accept = sum_v min(tau, a_v).
struct SamplingPolicy {
  double tau = 0.0;
  double nu = kDefaultNu;
  double mu = kDefaultMu;
  Eigen::VectorXd accept_prob;
  Eigen::VectorXd q;
  double p_accept = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(q.size()); }
};

// Empirical area quantile at level min(nu, mu / (1 + mu)): the largest area
// value tau with |{v : a_v <= tau}| <= floor(level * n). Falls back to
// min(areas) / 2 when no area can sit at or below tau.
double choose_threshold(const Eigen::VectorXd& areas, double nu, double mu);

SamplingPolicy make_policy(const Eigen::VectorXd& areas, double nu = kDefaultNu,
                           double mu = kDefaultMu);
SamplingPolicy make_policy_with_threshold(const Eigen::VectorXd& areas, double tau,
                                          double nu = kDefaultNu, double mu = kDefaultMu);

// tau = min(areas): every node accepts with probability tau / a_v, which
// makes q exactly uniform at the price of p_accept = n * min(areas).
SamplingPolicy make_uniform_policy(const Eigen::VectorXd& areas);

// Lower bound 1 - 4c on P(a_v > c / n); requires 0 < c < 1/4.
double acceptance_lower_bound(double c);

// E[Q] = 1 / p_accept.
double expected_queries(const SamplingPolicy& policy);

// Smallest m with P(max of K geometric(p_accept) draws > m) <= eps / 2
// via m = ceil(-rho log K / log(1 - p)), rho = log(2 / eps) / log K + 1.
std::uint64_t max_queries_bound(std::uint64_t rounds, double eps, double p_accept);

struct UniformDistance {
  double l1 = 0.0;
  double l2 = 0.0;
};
UniformDistance q_distance_to_uniform(const Eigen::VectorXd& q);
inline UniformDistance q_distance_to_uniform(const SamplingPolicy& policy) {
  return q_distance_to_uniform(policy.q);
}

struct QueryLeg {
  Point target;
  RoutePath path;
};

struct SampleOutcome {
  bool failed = false;       // a route leg dead-ended
  NodeId accepted = 0;       // valid when !failed
  std::size_t queries = 0;   // Q, including the failing query
  std::size_t hops = 0;      // summed over every forward leg
};

// One partner search: uniform target, greedy route from the current holder,
// accept at the terminal with accept_prob; on rejection the rejecting node
// draws a fresh target and forwards from there. Legs are appended to
// `legs` when it is non-null.
SampleOutcome sample_with_rejection(const SamplingPolicy& policy, const Network& net,
                                    NodeId origin, Rng& rng,
                                    std::vector<QueryLeg>* legs = nullptr);

}  // namespace geogossip
