#include "geogossip/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "geogossip/errors.hpp"

namespace geogossip {

namespace {

void require_areas(const Eigen::VectorXd& areas) {
  if (areas.size() == 0) throw InvalidInput("empty area vector");
  if ((areas.array() <= 0.0).any()) throw InvalidInput("areas must be positive");
  if (std::abs(areas.sum() - 1.0) > 1e-6) throw InvalidInput("areas must sum to 1");
}

void require_nu_mu(double nu, double mu) {
  if (!(nu > 0.0 && nu < 1.0)) throw InvalidParameter("nu must lie in (0, 1)");
  if (!(mu > 0.0)) throw InvalidParameter("mu must be positive");
}

}  // namespace

double choose_threshold(const Eigen::VectorXd& areas, double nu, double mu) {
  require_nu_mu(nu, mu);
  require_areas(areas);
  const double level = std::min(nu, mu / (1.0 + mu));
  std::vector<double> sorted(areas.data(), areas.data() + areas.size());
  std::sort(sorted.begin(), sorted.end());
  auto allowed = static_cast<std::size_t>(std::floor(level * static_cast<double>(sorted.size()) + 1e-9));
  while (allowed > 0) {
    const double candidate = sorted[allowed - 1];
    const auto at_or_below = static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), candidate) - sorted.begin());
    if (at_or_below <= allowed) return candidate;
    --allowed;
  }
  return sorted.front() / 2.0;
}

SamplingPolicy make_policy_with_threshold(const Eigen::VectorXd& areas, double tau, double nu,
                                          double mu) {
  require_areas(areas);
  if (!(tau > 0.0)) throw InvalidParameter("tau must be positive");
  SamplingPolicy p;
  p.tau = tau;
  p.nu = nu;
  p.mu = mu;
  p.accept_prob = (tau / areas.array()).min(1.0).matrix();
  const Eigen::VectorXd clipped = areas.array().min(tau).matrix();
  p.p_accept = clipped.sum();
  p.q = clipped / p.p_accept;
  return p;
}

SamplingPolicy make_policy(const Eigen::VectorXd& areas, double nu, double mu) {
  return make_policy_with_threshold(areas, choose_threshold(areas, nu, mu), nu, mu);
}

SamplingPolicy make_uniform_policy(const Eigen::VectorXd& areas) {
  require_areas(areas);
  return make_policy_with_threshold(areas, areas.minCoeff());
}

double acceptance_lower_bound(double c) {
  if (!(c > 0.0 && c < 0.25)) throw InvalidParameter("acceptance_lower_bound: need 0 < c < 1/4");
  return 1.0 - 4.0 * c;
}

double expected_queries(const SamplingPolicy& policy) {
  if (!(policy.p_accept > 0.0)) throw InvalidPolicy("expected_queries: acceptance probability is zero");
  return 1.0 / policy.p_accept;
}

std::uint64_t max_queries_bound(std::uint64_t rounds, double eps, double p_accept) {
  if (rounds < 2) throw InvalidParameter("max_queries_bound: need K >= 2");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("max_queries_bound: need 0 < eps < 1");
  if (!(p_accept > 0.0 && p_accept <= 1.0))
    throw InvalidParameter("max_queries_bound: need 0 < p_accept <= 1");
  if (p_accept == 1.0) return 1;
  const double log_k = std::log(static_cast<double>(rounds));
  const double rho = std::log(2.0 / eps) / log_k + 1.0;
  const double m = -rho * log_k / std::log1p(-p_accept);
  // Absorb rounding so exact integers (e.g. 12 for P_a = 1/2, K = 1024,
  // eps = 1/2) are not bumped to the next one.
  return static_cast<std::uint64_t>(std::ceil(m - 1e-9 * m));
}

UniformDistance q_distance_to_uniform(const Eigen::VectorXd& q) {
  const Eigen::ArrayXd dev = q.array() - 1.0 / static_cast<double>(q.size());
  return {dev.abs().sum(), std::sqrt(dev.square().sum())};
}

SampleOutcome sample_with_rejection(const SamplingPolicy& policy, const Network& net,
                                    NodeId origin, Rng& rng, std::vector<QueryLeg>* legs) {
  SampleOutcome out;
  NodeId holder = origin;
  for (;;) {
    const double tx = uniform01(rng);
    const double ty = uniform01(rng);
    const Point target(tx, ty);
    RoutePath path = greedy_route(net, holder, target);
    ++out.queries;
    out.hops += path.hop_count;
    const NodeId terminal = path.terminal;
    const bool dead_end = path.dead_end;
    if (legs) legs->push_back({target, std::move(path)});
    if (dead_end) {
      out.failed = true;
      return out;
    }
    if (uniform01(rng) < policy.accept_prob(terminal)) {
      out.accepted = terminal;
      return out;
    }
    holder = terminal;
  }
}

}  // namespace geogossip
