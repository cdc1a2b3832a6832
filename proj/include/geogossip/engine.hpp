#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "geogossip/geometry.hpp"
#include "geogossip/rng.hpp"
#include "geogossip/sampling.hpp"

namespace geogossip {

enum class ProtocolKind { Geographic, StandardUniform };

std::string_view to_string(ProtocolKind kind);
ProtocolKind parse_protocol(std::string_view name);

struct GossipState {
  Eigen::VectorXd estimates;
  std::uint64_t tick = 0;
  std::uint64_t transmissions = 0;
  std::uint64_t rounds_failed = 0;
  std::vector<std::uint32_t> q_history;

  static GossipState from_values(Eigen::VectorXd values) {
    GossipState s;
    s.estimates = std::move(values);
    return s;
  }
};

/// What happened in one activation. `legs` is filled only when tracing.
struct RoundReport {
  std::uint64_t tick = 0;          // tick index of this activation
  NodeId initiator = 0;
  std::optional<NodeId> partner;   // empty on failure or isolated node
  std::size_t queries = 0;
  std::size_t forward_hops = 0;
  std::size_t return_hops = 0;
  std::uint64_t transmissions = 0;
  bool failed = false;
  // Decrease of sum_v (x_v - c)^2 for any constant c: (x_s - x_v)^2 / 2.
  double variance_drop = 0.0;
  std::vector<QueryLeg> legs;
  RoutePath return_path;
};

/// Advances the global clock by one tick. A uniformly random node wakes up
/// and runs one gossip round of the given protocol; `state` is updated in
/// place. Geographic rounds that dead-end are charged for the hops spent,
/// counted in rounds_failed and leave the estimates unchanged.
RoundReport activate_tick(GossipState& state, const Network& net, const SamplingPolicy& policy,
                          ProtocolKind kind, Rng& rng, bool trace = false);

struct Checkpoint {
  std::uint64_t tick = 0;
  std::uint64_t transmissions = 0;
  double error = 0.0;
  std::uint64_t rounds_failed = 0;
  std::uint32_t max_q = 0;
};

struct Crossing {
  double epsilon = 0.0;
  bool reached = false;
  std::uint64_t tick = 0;
  std::uint64_t transmissions = 0;
};

struct TrialRecord {
  std::vector<Checkpoint> checkpoints;  // ascending tick
  std::vector<Crossing> crossings;      // one per requested tolerance, descending epsilon
  bool converged = false;               // smallest tolerance reached
  std::uint64_t crossing_tick = 0;
  std::uint64_t crossing_transmissions = 0;
  double initial_norm = 0.0;

  const Crossing* crossing_for(double epsilon) const;
};

struct RunOptions {
  double checkpoint_factor = 1.25;
  // Receives every round when set (trace mode).
  std::function<void(const RoundReport&)> on_round;
};

// ||x - mean(x0) 1||_2 / ||x0||_2.
double normalized_error(const Eigen::VectorXd& x, double mean, double initial_norm);

/// Runs gossip until the normalized error first drops to the smallest of
/// `epsilons` or `max_ticks` ticks have elapsed. Checkpoints are taken at
/// tick 0, whenever the transmission count passes the next point of a
/// geometric schedule, at every first crossing and at the final tick.
TrialRecord run_until(GossipState& state, const Network& net, const SamplingPolicy& policy,
                      ProtocolKind kind, const std::vector<double>& epsilons,
                      std::uint64_t max_ticks, Rng& rng, const RunOptions& options = {});

inline TrialRecord run_until(GossipState& state, const Network& net,
                             const SamplingPolicy& policy, ProtocolKind kind, double epsilon,
                             std::uint64_t max_ticks, Rng& rng, const RunOptions& options = {}) {
  return run_until(state, net, policy, kind, std::vector<double>{epsilon}, max_ticks, rng,
                   options);
}

// Upper-convention (1 - eps)-quantile of first-crossing ticks over at least
// 20 trials. Empty when that quantile falls on a trial that never crossed.
std::optional<std::uint64_t> averaging_time_estimate(const std::vector<TrialRecord>& records,
                                                     double epsilon);

// Same quantile rule on raw samples; exposed for reuse on other columns.
std::optional<std::uint64_t> upper_quantile(std::vector<std::optional<std::uint64_t>> samples,
                                            double level);

}  // namespace geogossip
