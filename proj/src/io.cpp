#include "geogossip/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "geogossip/errors.hpp"

namespace geogossip {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

Json network_to_json(const Network& net) {
  Json doc;
  doc["n"] = net.n;
  doc["radius"] = net.radius;
  Json positions = Json::array();
  for (std::size_t v = 0; v < net.n; ++v)
    positions.push_back({net.positions(0, static_cast<Eigen::Index>(v)),
                         net.positions(1, static_cast<Eigen::Index>(v))});
  doc["positions"] = std::move(positions);
  doc["adjacency"] = net.adjacency;
  doc["areas"] = std::vector<double>(net.areas.data(), net.areas.data() + net.areas.size());
  return doc;
}

Network network_from_json(const Json& doc) {
  try {
    const auto n = doc.at("n").get<std::size_t>();
    const auto radius = doc.at("radius").get<double>();
    const auto& pos = doc.at("positions");
    if (pos.size() != n) throw InvalidInput("network json: positions length differs from n");
    Points positions(2, static_cast<Eigen::Index>(n));
    for (std::size_t v = 0; v < n; ++v) {
      const auto xy = pos.at(v).get<std::vector<double>>();
      if (xy.size() != 2) throw InvalidInput("network json: position entries must be [x, y]");
      positions(0, static_cast<Eigen::Index>(v)) = xy[0];
      positions(1, static_cast<Eigen::Index>(v)) = xy[1];
    }
    Network net = build_network(positions, radius);
    if (doc.contains("adjacency") &&
        doc.at("adjacency").get<std::vector<std::vector<NodeId>>>() != net.adjacency)
      throw InvalidInput("network json: adjacency disagrees with positions and radius");
    if (doc.contains("areas")) {
      const auto areas = doc.at("areas").get<std::vector<double>>();
      if (areas.size() != n) throw InvalidInput("network json: areas length differs from n");
      for (std::size_t v = 0; v < n; ++v)
        if (std::abs(areas[v] - net.areas(static_cast<Eigen::Index>(v))) > 1e-12)
          throw InvalidInput("network json: areas disagree with positions");
    }
    return net;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("network json: ") + e.what());
  }
}

Json policy_to_json(const SamplingPolicy& policy, int bins) {
  const auto n = static_cast<double>(policy.size());
  const Eigen::ArrayXd scaled = policy.q.array() * n;
  const double top = scaled.maxCoeff();
  const double width = top / bins;
  std::vector<double> edges;
  for (int b = 0; b <= bins; ++b) edges.push_back(width * b);
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double s : scaled) {
    auto b = width > 0 ? static_cast<int>(s / width) : 0;
    counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))] += 1;
  }
  Json doc;
  doc["n"] = policy.size();
  doc["tau"] = policy.tau;
  doc["nu"] = policy.nu;
  doc["mu"] = policy.mu;
  doc["p_accept"] = policy.p_accept;
  doc["expected_queries"] = 1.0 / policy.p_accept;
  doc["q_histogram"] = {{"scale", "n*q"}, {"edges", edges}, {"counts", counts}};
  return doc;
}

Json spectral_report_to_json(const SpectralReport& r) {
  Json doc;
  doc["n"] = r.n;
  doc["lambda2"] = r.lambda2;
  doc["one_minus_lambda2_times_n"] = r.one_minus_lambda2_times_n;
  doc["weyl_bound"] = r.weyl_bound;
  doc["certificate_holds"] = r.certificate_holds;
  doc["tave_prediction"] = r.tave_prediction;
  return doc;
}

Json round_to_json(const RoundReport& round) {
  Json doc;
  doc["tick"] = round.tick;
  doc["s"] = round.initiator;
  Json legs = Json::array();
  for (const auto& leg : round.legs)
    legs.push_back({{"target", {leg.target.x(), leg.target.y()}},
                    {"path", leg.path.hops},
                    {"dead_end", leg.path.dead_end}});
  doc["legs"] = std::move(legs);
  doc["Q"] = round.queries;
  doc["accepted"] = round.partner ? Json(*round.partner) : Json(nullptr);
  doc["return_path"] = round.return_path.hops;
  doc["transmissions"] = round.transmissions;
  doc["failed"] = round.failed;
  return doc;
}

void write_trial_csv_header(std::ostream& out) {
  out << "trial_id,tick,transmissions,error,rounds_failed\n";
}

void write_trial_csv_rows(std::ostream& out, std::size_t trial_id, const TrialRecord& record) {
  for (const auto& c : record.checkpoints)
    out << trial_id << ',' << c.tick << ',' << c.transmissions << ',' << format_double(c.error) << ','
        << c.rounds_failed << '\n';
}

namespace {

FieldSpec field_from_json(const Json& j) {
  FieldSpec spec;
  if (j.is_string()) {
    spec.kind = parse_field(j.get<std::string>());
    return spec;
  }
  spec.kind = parse_field(j.at("kind").get<std::string>());
  if (j.contains("axis")) {
    const auto& a = j.at("axis");
    if (a.is_string()) {
      const auto s = a.get<std::string>();
      if (s != "x" && s != "y") throw ConfigurationError("config: axis must be x or y");
      spec.axis = s == "x" ? 0 : 1;
    } else {
      spec.axis = a.get<int>();
    }
  }
  if (j.contains("sources")) {
    spec.sources.clear();
    for (const auto& p : j.at("sources")) {
      const auto xy = p.get<std::vector<double>>();
      if (xy.size() != 2) throw ConfigurationError("config: sources must be [x, y] pairs");
      spec.sources.emplace_back(xy[0], xy[1]);
    }
  }
  if (j.contains("amplitudes")) spec.amplitudes = j.at("amplitudes").get<std::vector<double>>();
  if (j.contains("passes")) spec.smoothing_passes = j.at("passes").get<int>();
  if (j.contains("node")) spec.spike_node = j.at("node").get<NodeId>();
  if (j.contains("amplitude")) spec.spike_amplitude = j.at("amplitude").get<double>();
  return spec;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const Json& doc) {
  static const std::vector<std::string> known = {
      "sizes", "epsilons", "trials", "master_seed", "protocols", "fields", "nu",
      "mu",    "uniform_q", "checkpoint_factor", "max_ticks", "jobs"};
  ExperimentConfig cfg;
  try {
    for (const auto& [key, value] : doc.items())
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigurationError("config: unknown key '" + key + "'");
    if (doc.contains("sizes")) cfg.sizes = doc.at("sizes").get<std::vector<std::size_t>>();
    if (doc.contains("epsilons")) cfg.epsilons = doc.at("epsilons").get<std::vector<double>>();
    if (doc.contains("trials")) cfg.trials = doc.at("trials").get<std::size_t>();
    if (doc.contains("master_seed")) cfg.master_seed = doc.at("master_seed").get<std::uint64_t>();
    if (doc.contains("protocols")) {
      cfg.protocols.clear();
      for (const auto& p : doc.at("protocols")) cfg.protocols.push_back(parse_protocol(p.get<std::string>()));
    }
    if (doc.contains("fields")) {
      cfg.fields.clear();
      for (const auto& f : doc.at("fields")) cfg.fields.push_back(field_from_json(f));
    }
    if (doc.contains("nu")) cfg.nu = doc.at("nu").get<double>();
    if (doc.contains("mu")) cfg.mu = doc.at("mu").get<double>();
    if (doc.contains("uniform_q")) cfg.uniform_q = doc.at("uniform_q").get<bool>();
    if (doc.contains("checkpoint_factor")) cfg.checkpoint_factor = doc.at("checkpoint_factor").get<double>();
    if (doc.contains("max_ticks")) cfg.max_ticks = doc.at("max_ticks").get<std::uint64_t>();
    if (doc.contains("jobs")) cfg.jobs = doc.at("jobs").get<std::size_t>();
  } catch (const Json::exception& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  } catch (const InvalidParameter& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

Json experiment_config_to_json(const ExperimentConfig& cfg) {
  Json doc;
  doc["sizes"] = cfg.sizes;
  doc["epsilons"] = cfg.epsilons;
  doc["trials"] = cfg.trials;
  doc["master_seed"] = cfg.master_seed;
  Json protocols = Json::array();
  for (auto p : cfg.protocols) protocols.push_back(std::string(to_string(p)));
  doc["protocols"] = std::move(protocols);
  Json fields = Json::array();
  for (const auto& f : cfg.fields) {
    Json j;
    j["kind"] = std::string(to_string(f.kind));
    switch (f.kind) {
      case FieldKind::Linear:
        j["axis"] = f.axis;
        break;
      case FieldKind::Diffusion: {
        Json src = Json::array();
        for (const auto& p : f.sources) src.push_back({p.x(), p.y()});
        j["sources"] = std::move(src);
        if (!f.amplitudes.empty()) j["amplitudes"] = f.amplitudes;
        j["passes"] = f.smoothing_passes;
        break;
      }
      case FieldKind::Spike:
        if (f.spike_node) j["node"] = *f.spike_node;
        if (f.spike_amplitude) j["amplitude"] = *f.spike_amplitude;
        break;
    }
    fields.push_back(std::move(j));
  }
  doc["fields"] = std::move(fields);
  doc["nu"] = cfg.nu;
  doc["mu"] = cfg.mu;
  doc["uniform_q"] = cfg.uniform_q;
  doc["checkpoint_factor"] = cfg.checkpoint_factor;
  doc["max_ticks"] = cfg.max_ticks;
  doc["jobs"] = cfg.jobs;
  return doc;
}

}  // namespace geogossip
