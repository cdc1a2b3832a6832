#include "geogossip/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <tuple>

#include "geogossip/errors.hpp"
#include "geogossip/io.hpp"
#include "geogossip/routing.hpp"

namespace geogossip {

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Linear:
      return "linear";
    case FieldKind::Diffusion:
      return "diffusion";
    case FieldKind::Spike:
      return "spike";
  }
  return "unknown";
}

FieldKind parse_field(std::string_view name) {
  if (name == "linear") return FieldKind::Linear;
  if (name == "diffusion" || name == "diffusion-sources") return FieldKind::Diffusion;
  if (name == "spike") return FieldKind::Spike;
  throw InvalidParameter("unknown field '" + std::string(name) + "'");
}

void smooth_once(Eigen::VectorXd& x, const Network& net) {
  std::size_t max_degree = 0;
  for (const auto& nbrs : net.adjacency) max_degree = std::max(max_degree, nbrs.size());
  const double alpha = 1.0 / static_cast<double>(1 + max_degree);
  Eigen::VectorXd next = x;
  for (std::size_t v = 0; v < net.n; ++v) {
    double flow = 0.0;
    for (NodeId u : net.adjacency[v]) flow += x(u) - x(static_cast<Eigen::Index>(v));
    next(static_cast<Eigen::Index>(v)) += alpha * flow;
  }
  x.swap(next);
}

Eigen::VectorXd make_field(const FieldSpec& spec, const Network& net) {
  const auto n = static_cast<Eigen::Index>(net.n);
  const double nd = static_cast<double>(net.n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  switch (spec.kind) {
    case FieldKind::Linear:
      if (spec.axis != 0 && spec.axis != 1) throw InvalidParameter("linear field: axis must be 0 or 1");
      x = net.positions.row(spec.axis).transpose();
      break;
    case FieldKind::Spike: {
      const NodeId node = spec.spike_node ? *spec.spike_node : nearest_node(net, Point(0.5, 0.5));
      if (node >= net.n) throw InvalidParameter("spike field: node index out of range");
      x(node) = spec.spike_amplitude.value_or(nd);
      break;
    }
    case FieldKind::Diffusion: {
      if (!spec.amplitudes.empty() && spec.amplitudes.size() != spec.sources.size())
        throw InvalidParameter("diffusion field: one amplitude per source");
      if (spec.smoothing_passes < 0) throw InvalidParameter("diffusion field: negative pass count");
      for (std::size_t k = 0; k < spec.sources.size(); ++k) {
        const double amp = spec.amplitudes.empty()
                               ? nd / static_cast<double>(spec.sources.size())
                               : spec.amplitudes[k];
        x(nearest_node(net, spec.sources[k])) += amp;
      }
      for (int pass = 0; pass < spec.smoothing_passes; ++pass) smooth_once(x, net);
      break;
    }
  }
  return x;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.sizes.empty()) throw ConfigurationError("config: no network sizes");
  for (auto n : cfg.sizes)
    if (n < 2) throw ConfigurationError("config: sizes must be >= 2");
  if (cfg.epsilons.empty()) throw ConfigurationError("config: no tolerances");
  for (double e : cfg.epsilons)
    if (!(e > 0.0 && e < 1.0)) throw ConfigurationError("config: tolerances must lie in (0, 1)");
  if (cfg.trials < 1) throw ConfigurationError("config: trials must be >= 1");
  if (cfg.protocols.empty()) throw ConfigurationError("config: no protocols");
  if (cfg.fields.empty()) throw ConfigurationError("config: no fields");
  if (!(cfg.nu > 0.0 && cfg.nu < 1.0) || !(cfg.mu > 0.0))
    throw ConfigurationError("config: need 0 < nu < 1 and mu > 0");
  if (!(cfg.checkpoint_factor > 1.0)) throw ConfigurationError("config: checkpoint factor must exceed 1");
  if (cfg.max_ticks == 0) throw ConfigurationError("config: max_ticks must be positive");
}

ConnectedNetwork experiment_network(const ExperimentConfig& cfg, std::size_t n, std::size_t trial) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, {1, n, trial});
  return generate_connected_network(n, default_radius(n), seed, 100);
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<std::size_t> sizes = cfg.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  std::vector<FieldSpec> fields = cfg.fields;
  std::stable_sort(fields.begin(), fields.end(),
                   [](const FieldSpec& a, const FieldSpec& b) { return a.kind < b.kind; });
  std::vector<ProtocolKind> protocols = cfg.protocols;
  std::sort(protocols.begin(), protocols.end());
  protocols.erase(std::unique(protocols.begin(), protocols.end()), protocols.end());

  const std::size_t per_trial = fields.size() * protocols.size();
  const std::size_t jobs_total = sizes.size() * cfg.trials;
  // Slot layout: [size][trial][field][protocol].
  std::vector<TrialResult> slots(jobs_total * per_trial);

  parallel_for(jobs_total, cfg.jobs, [&](std::size_t job) {
    const std::size_t n = sizes[job / cfg.trials];
    const std::size_t trial = job % cfg.trials;
    const ConnectedNetwork inst = experiment_network(cfg, n, trial);
    const SamplingPolicy policy = cfg.uniform_q ? make_uniform_policy(inst.network.areas)
                                                : make_policy(inst.network.areas, cfg.nu, cfg.mu);
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const Eigen::VectorXd x0 = make_field(fields[f], inst.network);
      for (std::size_t p = 0; p < protocols.size(); ++p) {
        Rng rng = make_stream(cfg.master_seed,
                              {2, n, static_cast<std::uint64_t>(fields[f].kind),
                               static_cast<std::uint64_t>(protocols[p]), trial});
        GossipState state = GossipState::from_values(x0);
        RunOptions opts;
        opts.checkpoint_factor = cfg.checkpoint_factor;
        TrialResult& out = slots[job * per_trial + f * protocols.size() + p];
        out.n = n;
        out.field = fields[f].kind;
        out.protocol = protocols[p];
        out.trial = trial;
        out.resamples = inst.resamples;
        out.record = run_until(state, inst.network, policy, protocols[p], cfg.epsilons,
                               cfg.max_ticks, rng, opts);
      }
    }
  });

  ResultTable table = std::move(slots);
  std::stable_sort(table.begin(), table.end(), [](const TrialResult& a, const TrialResult& b) {
    return std::tie(a.n, a.field, a.protocol, a.trial) < std::tie(b.n, b.field, b.protocol, b.trial);
  });
  return table;
}

std::optional<double> median(std::vector<std::optional<double>> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
    if (!a) return false;
    if (!b) return true;
    return *a < *b;
  });
  const std::size_t m = values.size();
  const auto& hi = values[m / 2];
  if (m % 2 == 1) return hi;
  const auto& lo = values[m / 2 - 1];
  if (!lo || !hi) return std::nullopt;
  return (*lo + *hi) / 2.0;
}

Summary summarize(const ResultTable& results, double epsilon) {
  Summary summary;
  summary.epsilon = epsilon;
  using Key = std::tuple<std::size_t, FieldKind, ProtocolKind>;
  std::map<Key, std::vector<std::optional<double>>> groups;
  for (const auto& r : results) {
    const Crossing* c = r.record.crossing_for(epsilon);
    if (!c) throw InvalidInput("summarize: tolerance was not tracked by the run");
    groups[{r.n, r.field, r.protocol}].push_back(
        c->reached ? std::optional<double>(static_cast<double>(c->transmissions)) : std::nullopt);
  }
  for (auto& [key, vals] : groups) {
    SummaryRow row;
    std::tie(row.n, row.field, row.protocol) = key;
    row.median_transmissions = median(vals);
    summary.rows.push_back(row);
  }

  std::map<std::pair<std::size_t, FieldKind>, double> ratios;
  for (auto& row : summary.rows) {
    const auto geo = std::find_if(summary.rows.begin(), summary.rows.end(), [&](const SummaryRow& o) {
      return o.n == row.n && o.field == row.field && o.protocol == ProtocolKind::Geographic;
    });
    const auto std_ = std::find_if(summary.rows.begin(), summary.rows.end(), [&](const SummaryRow& o) {
      return o.n == row.n && o.field == row.field && o.protocol == ProtocolKind::StandardUniform;
    });
    if (geo == summary.rows.end() || std_ == summary.rows.end()) continue;
    if (!geo->median_transmissions || !std_->median_transmissions || *geo->median_transmissions <= 0.0)
      continue;
    row.ratio_std_over_geo = *std_->median_transmissions / *geo->median_transmissions;
    ratios[{row.n, row.field}] = *row.ratio_std_over_geo;
  }

  std::map<FieldKind, std::vector<std::pair<std::size_t, double>>> by_field;
  for (const auto& [key, ratio] : ratios) by_field[key.second].emplace_back(key.first, ratio);
  for (const auto& [field, series] : by_field)
    if (series.size() >= 2) summary.ratio_growth.emplace_back(field, series.back().second / series.front().second);
  return summary;
}

void write_results_csv(std::ostream& out, const ResultTable& results) {
  out << "n,field,protocol,trial,tick,transmissions,error,rounds_failed,max_q\n";
  for (const auto& r : results) {
    for (const auto& c : r.record.checkpoints) {
      out << r.n << ',' << to_string(r.field) << ',' << to_string(r.protocol) << ',' << r.trial << ','
          << c.tick << ',' << c.transmissions << ',' << format_double(c.error) << ','
          << c.rounds_failed << ',' << c.max_q << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const Summary& summary) {
  const bool with_ratio = std::any_of(summary.rows.begin(), summary.rows.end(),
                                      [](const SummaryRow& r) { return r.ratio_std_over_geo.has_value(); });
  out << "n,field,protocol,median_transmissions_to_eps";
  if (with_ratio) out << ",ratio_std_over_geo";
  out << '\n';
  for (const auto& r : summary.rows) {
    out << r.n << ',' << to_string(r.field) << ',' << to_string(r.protocol) << ','
        << (r.median_transmissions ? format_double(*r.median_transmissions) : std::string("inf"));
    if (with_ratio) out << ',' << (r.ratio_std_over_geo ? format_double(*r.ratio_std_over_geo) : std::string());
    out << '\n';
  }
}

}  // namespace geogossip
