#include "geogossip/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "geogossip/errors.hpp"

namespace geogossip {

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Geographic:
      return "geographic";
    case ProtocolKind::StandardUniform:
      return "standard";
  }
  return "unknown";
}

ProtocolKind parse_protocol(std::string_view name) {
  if (name == "geographic" || name == "geo") return ProtocolKind::Geographic;
  if (name == "standard" || name == "standard-uniform" || name == "std")
    return ProtocolKind::StandardUniform;
  throw InvalidParameter("unknown protocol '" + std::string(name) + "'");
}

namespace {

void average_pair(GossipState& state, NodeId s, NodeId v, RoundReport& report) {
  const double a = state.estimates(s);
  const double b = state.estimates(v);
  const double mid = (a + b) / 2.0;
  state.estimates(s) = mid;
  state.estimates(v) = mid;
  report.variance_drop = (a - b) * (a - b) / 2.0;
  report.partner = v;
}

void geographic_round(GossipState& state, const Network& net, const SamplingPolicy& policy,
                      Rng& rng, bool trace, RoundReport& report) {
  const NodeId s = report.initiator;
  const SampleOutcome found =
      sample_with_rejection(policy, net, s, rng, trace ? &report.legs : nullptr);
  report.queries = found.queries;
  report.forward_hops = found.hops;
  state.q_history.push_back(static_cast<std::uint32_t>(found.queries));
  if (found.failed) {
    report.failed = true;
    report.transmissions = found.hops;
    return;
  }
  // The accepted node sends its value back toward l(s).
  RoutePath back = greedy_route(net, found.accepted, net.position(s));
  report.return_hops = back.hop_count;
  report.transmissions = found.hops + back.hop_count;
  const bool returned = back.terminal == s && !back.dead_end;
  if (trace) report.return_path = std::move(back);
  if (!returned) {
    report.failed = true;
    return;
  }
  average_pair(state, s, found.accepted, report);
}

void standard_round(GossipState& state, const Network& net, Rng& rng, RoundReport& report) {
  const NodeId s = report.initiator;
  const auto& nbrs = net.adjacency[s];
  if (nbrs.empty()) return;  // isolated: no-op, zero cost
  std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
  const NodeId j = nbrs[pick(rng)];
  report.queries = 1;
  report.forward_hops = 1;
  report.transmissions = 1;
  state.q_history.push_back(1);
  average_pair(state, s, j, report);
}

}  // namespace

RoundReport activate_tick(GossipState& state, const Network& net, const SamplingPolicy& policy,
                          ProtocolKind kind, Rng& rng, bool trace) {
  RoundReport report;
  report.tick = state.tick;
  std::uniform_int_distribution<NodeId> wake(0, static_cast<NodeId>(net.n - 1));
  report.initiator = wake(rng);
  if (kind == ProtocolKind::Geographic)
    geographic_round(state, net, policy, rng, trace, report);
  else
    standard_round(state, net, rng, report);
  state.tick += 1;
  state.transmissions += report.transmissions;
  if (report.failed) state.rounds_failed += 1;
  return report;
}

const Crossing* TrialRecord::crossing_for(double epsilon) const {
  for (const auto& c : crossings)
    if (std::abs(c.epsilon - epsilon) <= 1e-12 * std::max(1.0, std::abs(epsilon))) return &c;
  return nullptr;
}

double normalized_error(const Eigen::VectorXd& x, double mean, double initial_norm) {
  return (x.array() - mean).matrix().norm() / initial_norm;
}

TrialRecord run_until(GossipState& state, const Network& net, const SamplingPolicy& policy,
                      ProtocolKind kind, const std::vector<double>& epsilons,
                      std::uint64_t max_ticks, Rng& rng, const RunOptions& options) {
  if (epsilons.empty()) throw InvalidParameter("run_until: no tolerance given");
  for (double e : epsilons)
    if (!(e > 0.0)) throw InvalidParameter("run_until: tolerances must be positive");
  if (!(options.checkpoint_factor > 1.0))
    throw InvalidParameter("run_until: checkpoint factor must exceed 1");
  if (static_cast<std::size_t>(state.estimates.size()) != net.n)
    throw InvalidInput("run_until: estimate vector does not match the network");

  TrialRecord rec;
  rec.initial_norm = state.estimates.norm();
  if (!(rec.initial_norm > 0.0)) throw InvalidInput("run_until: initial vector is zero");
  const double mean = state.estimates.mean();

  std::vector<double> eps = epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  for (double e : eps) rec.crossings.push_back({e, false, 0, 0});
  std::vector<double> limit(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double l = eps[i] * rec.initial_norm;
    limit[i] = l * l;
  }

  auto exact_ss = [&] { return (state.estimates.array() - mean).square().sum(); };
  double ss = exact_ss();
  std::uint32_t max_q = 0;
  const std::size_t q_base = state.q_history.size();

  auto push_checkpoint = [&](double sum_sq) {
    if (!rec.checkpoints.empty() && rec.checkpoints.back().tick == state.tick) return;
    rec.checkpoints.push_back({state.tick, state.transmissions,
                               std::sqrt(std::max(sum_sq, 0.0)) / rec.initial_norm,
                               state.rounds_failed, max_q});
  };

  std::size_t pending = 0;  // first tolerance not yet reached
  auto mark_crossings = [&](double exact) {
    bool any = false;
    while (pending < eps.size() && exact <= limit[pending]) {
      auto& c = rec.crossings[pending];
      c.reached = true;
      c.tick = state.tick;
      c.transmissions = state.transmissions;
      ++pending;
      any = true;
    }
    return any;
  };

  push_checkpoint(ss);
  mark_crossings(ss);

  const std::uint64_t resync_every = std::max<std::uint64_t>(net.n, 64);
  const std::uint64_t start_tick = state.tick;
  double next_checkpoint = 1.0;
  while (pending < eps.size() && state.tick - start_tick < max_ticks) {
    const RoundReport round = activate_tick(state, net, policy, kind, rng, bool(options.on_round));
    if (options.on_round) options.on_round(round);
    if (state.q_history.size() > q_base) max_q = std::max(max_q, state.q_history.back());
    ss -= round.variance_drop;

    const std::uint64_t elapsed = state.tick - start_tick;
    bool exact_now = false;
    if (elapsed % resync_every == 0 || ss <= limit[pending] * (1.0 + 1e-6)) {
      ss = exact_ss();
      exact_now = true;
    }
    if (exact_now && mark_crossings(ss)) push_checkpoint(ss);

    if (static_cast<double>(state.transmissions) >= next_checkpoint) {
      while (next_checkpoint <= static_cast<double>(state.transmissions))
        next_checkpoint *= options.checkpoint_factor;
      if (!exact_now) ss = exact_ss();
      push_checkpoint(ss);
    }
  }
  push_checkpoint(exact_ss());

  rec.converged = pending == eps.size();
  if (rec.converged) {
    rec.crossing_tick = rec.crossings.back().tick;
    rec.crossing_transmissions = rec.crossings.back().transmissions;
  }
  return rec;
}

std::optional<std::uint64_t> upper_quantile(std::vector<std::optional<std::uint64_t>> samples,
                                            double level) {
  if (samples.empty()) throw InvalidInput("upper_quantile: no samples");
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
    if (!a) return false;
    if (!b) return true;
    return *a < *b;
  });
  const std::size_t m = samples.size();
  auto idx = static_cast<std::size_t>(std::floor(level * static_cast<double>(m) + 1e-9));
  idx = std::min(idx, m - 1);
  return samples[idx];
}

std::optional<std::uint64_t> averaging_time_estimate(const std::vector<TrialRecord>& records,
                                                     double epsilon) {
  if (records.size() < 20)
    throw InvalidInput("averaging_time_estimate: need at least 20 trials");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw InvalidParameter("averaging_time_estimate: need 0 < eps < 1");
  std::vector<std::optional<std::uint64_t>> ticks;
  ticks.reserve(records.size());
  for (const auto& r : records) {
    const Crossing* c = r.crossing_for(epsilon);
    if (!c) throw InvalidInput("averaging_time_estimate: tolerance was not tracked");
    ticks.push_back(c->reached ? std::optional<std::uint64_t>(c->tick) : std::nullopt);
  }
  return upper_quantile(std::move(ticks), 1.0 - epsilon);
}

}  // namespace geogossip
