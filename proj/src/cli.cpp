#include "geogossip/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geogossip/analysis.hpp"
#include "geogossip/engine.hpp"
#include "geogossip/errors.hpp"
#include "geogossip/experiments.hpp"
#include "geogossip/geometry.hpp"
#include "geogossip/io.hpp"
#include "geogossip/sampling.hpp"

namespace geogossip {

namespace {

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t n = 100;
  double epsilon = 0.01;
  double nu = kDefaultNu;
  double mu = kDefaultMu;
  std::string protocol = "geographic";
  std::string field = "spike";
  std::size_t trials = 1;
  std::string out;
  std::string config;
  std::uint64_t max_ticks = 10'000'000;
  std::size_t jobs = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes `text` to `path`, or to `out` when path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FileError("cannot write " + path);
  f << text;
  f.close();
  if (!f) throw FileError("failed writing " + path);
}

ConnectedNetwork load_or_generate(const std::string& network_path, std::size_t n, std::uint64_t seed) {
  if (!network_path.empty()) {
    Json doc;
    try {
      doc = Json::parse(read_file(network_path));
    } catch (const Json::parse_error& e) {
      throw InvalidInput(network_path + ": " + e.what());
    }
    ConnectedNetwork loaded{network_from_json(doc), seed, 0};
    return loaded;
  }
  return generate_connected_network(n, default_radius(n), derive_seed(seed, {1, n}), 100);
}

int cmd_gen_network(const GlobalOptions& g, std::optional<double> radius, bool allow_disconnected,
                    std::ostream& out, std::ostream& err) {
  const double r = radius.value_or(default_radius(g.n));
  Network net;
  if (allow_disconnected) {
    net = generate_network(g.n, r, derive_seed(g.seed, {1, g.n}));
  } else {
    ConnectedNetwork c = generate_connected_network(g.n, r, derive_seed(g.seed, {1, g.n}), 100);
    if (c.resamples > 0) err << "resampled " << c.resamples << " disconnected instance(s)\n";
    net = std::move(c.network);
  }
  emit(g.out, network_to_json(net).dump(2) + "\n", out);
  return 0;
}

int cmd_simulate(const GlobalOptions& g, bool uniform_q, const std::string& trace_path,
                 const std::string& network_path, const std::string& policy_path,
                 std::ostream& out, std::ostream& err) {
  const ProtocolKind kind = parse_protocol(g.protocol);
  FieldSpec spec;
  spec.kind = parse_field(g.field);
  const ConnectedNetwork inst = load_or_generate(network_path, g.n, g.seed);
  const Network& net = inst.network;
  const SamplingPolicy policy = uniform_q ? make_uniform_policy(net.areas) : make_policy(net.areas, g.nu, g.mu);
  if (!policy_path.empty()) emit(policy_path, policy_to_json(policy).dump(2) + "\n", out);

  std::unique_ptr<std::ofstream> trace;
  if (!trace_path.empty()) {
    trace = std::make_unique<std::ofstream>(trace_path, std::ios::binary | std::ios::trunc);
    if (!*trace) throw FileError("cannot write " + trace_path);
  }

  const Eigen::VectorXd x0 = make_field(spec, net);
  std::ostringstream csv;
  write_trial_csv_header(csv);
  std::size_t converged = 0;
  for (std::size_t t = 0; t < g.trials; ++t) {
    Rng rng = make_stream(g.seed, {2, net.n, static_cast<std::uint64_t>(spec.kind),
                                   static_cast<std::uint64_t>(kind), t});
    GossipState state = GossipState::from_values(x0);
    RunOptions opts;
    if (trace) {
      opts.on_round = [&, t](const RoundReport& round) {
        Json line = round_to_json(round);
        line["trial"] = t;
        *trace << line.dump() << '\n';
      };
    }
    const TrialRecord rec = run_until(state, net, policy, kind, g.epsilon, g.max_ticks, rng, opts);
    if (rec.converged) ++converged;
    write_trial_csv_rows(csv, t, rec);
  }
  if (trace) {
    trace->close();
    if (!*trace) throw FileError("failed writing " + trace_path);
  }
  emit(g.out, csv.str(), out);
  err << converged << "/" << g.trials << " trial(s) reached epsilon=" << format_double(g.epsilon) << "\n";
  return 0;
}

int cmd_analyze(const GlobalOptions& g, bool uniform_q, const std::string& network_path,
                const std::string& policy_path, std::ostream& out) {
  Eigen::VectorXd q;
  if (uniform_q && network_path.empty()) {
    if (g.n < 2) throw InvalidParameter("analyze: n must be >= 2");
    q = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g.n), 1.0 / static_cast<double>(g.n));
  } else {
    const ConnectedNetwork inst = load_or_generate(network_path, g.n, g.seed);
    const SamplingPolicy policy = uniform_q ? make_uniform_policy(inst.network.areas)
                                            : make_policy(inst.network.areas, g.nu, g.mu);
    if (!policy_path.empty()) emit(policy_path, policy_to_json(policy).dump(2) + "\n", out);
    q = policy.q;
  }
  emit(g.out, spectral_report_to_json(spectral_report(q, g.epsilon)).dump(2) + "\n", out);
  return 0;
}

int cmd_certify(const GlobalOptions& g, std::ostream& out) {
  Json results = Json::array();
  std::size_t holds = 0;
  for (std::size_t i = 0; i < g.trials; ++i) {
    const ConnectedNetwork inst =
        generate_connected_network(g.n, default_radius(g.n), derive_seed(g.seed, {3, g.n, i}), 100);
    const SamplingPolicy policy = make_policy(inst.network.areas, g.nu, g.mu);
    const WeylCertificate cert = weyl_certificate(policy.q);
    const UniformDistance dist = q_distance_to_uniform(policy);
    if (cert.holds) ++holds;
    results.push_back({{"instance", i},
                       {"lambda2", cert.lambda2},
                       {"eps2", cert.eps2},
                       {"weyl_bound", cert.bound},
                       {"holds", cert.holds},
                       {"l1", dist.l1},
                       {"l2", dist.l2}});
  }
  Json doc;
  doc["n"] = g.n;
  doc["nu"] = g.nu;
  doc["mu"] = g.mu;
  doc["instances"] = g.trials;
  doc["holds"] = holds;
  doc["all_hold"] = holds == g.trials;
  doc["results"] = std::move(results);
  emit(g.out, doc.dump(2) + "\n", out);
  return 0;
}

int cmd_experiment(const GlobalOptions& g, const CLI::App& app, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  if (!g.config.empty()) {
    Json doc;
    try {
      doc = Json::parse(read_file(g.config));
    } catch (const Json::parse_error& e) {
      throw ConfigurationError(g.config + ": " + e.what());
    }
    cfg = experiment_config_from_json(doc);
  }
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--seed")) cfg.master_seed = g.seed;
  if (given("--n")) cfg.sizes = {g.n};
  if (given("--epsilon")) cfg.epsilons = {g.epsilon};
  if (given("--nu")) cfg.nu = g.nu;
  if (given("--mu")) cfg.mu = g.mu;
  if (given("--protocol")) cfg.protocols = {parse_protocol(g.protocol)};
  if (given("--field")) {
    FieldSpec spec;
    spec.kind = parse_field(g.field);
    cfg.fields = {spec};
  }
  if (given("--trials")) cfg.trials = g.trials;
  if (given("--max-ticks")) cfg.max_ticks = g.max_ticks;
  if (given("--jobs")) cfg.jobs = g.jobs;
  validate(cfg);

  const ResultTable table = run_experiment(cfg);
  double smallest = cfg.epsilons.front();
  for (double e : cfg.epsilons) smallest = std::min(smallest, e);
  const Summary summary = summarize(table, smallest);

  const std::filesystem::path dir = g.out.empty() ? std::filesystem::path("results") : std::filesystem::path(g.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FileError("cannot create " + dir.string());
  std::ostringstream results_csv, summary_csv;
  write_results_csv(results_csv, table);
  write_summary_csv(summary_csv, summary);
  emit((dir / "results.csv").string(), results_csv.str(), out);
  emit((dir / "summary.csv").string(), summary_csv.str(), out);
  emit((dir / "config.json").string(), experiment_config_to_json(cfg).dump(2) + "\n", out);
  for (const auto& [field, growth] : summary.ratio_growth)
    err << "ratio growth (" << to_string(field) << ", eps=" << format_double(smallest)
        << "): " << format_double(growth) << "\n";
  return 0;
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geographic gossip simulator and spectral analysis toolkit", "geogossip"};
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1, 1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed; generated and reported when omitted");
  app.add_option("--n", g.n, "Number of nodes")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
  app.add_option("--epsilon", g.epsilon, "Target normalized error")->check(CLI::PositiveNumber);
  app.add_option("--nu", g.nu, "Undersampling parameter")->check(CLI::Range(0.0, 1.0));
  app.add_option("--mu", g.mu, "Oversampling parameter")->check(CLI::PositiveNumber);
  app.add_option("--protocol", g.protocol, "geographic | standard")
      ->check(CLI::IsMember({"geographic", "standard"}));
  app.add_option("--field", g.field, "linear | diffusion | spike")
      ->check(CLI::IsMember({"linear", "diffusion", "spike"}));
  app.add_option("--trials", g.trials, "Trials or instances")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 30));
  app.add_option("--out", g.out, "Output file (directory for experiment)");
  app.add_option("--config", g.config, "Experiment config (JSON)");
  app.add_option("--max-ticks", g.max_ticks, "Tick budget per trial")->check(CLI::PositiveNumber);
  app.add_option("--jobs", g.jobs, "Worker threads (0: all cores)");

  auto* gen = app.add_subcommand("gen-network", "Generate a random geometric graph as JSON");
  std::optional<double> radius;
  bool allow_disconnected = false;
  gen->add_option("--radius", radius, "Transmission radius (default sqrt(10 ln n / n))")
      ->check(CLI::Range(1e-9, 1.4142135623730951));
  gen->add_flag("--allow-disconnected", allow_disconnected, "Skip connectivity resampling");

  auto* sim = app.add_subcommand("simulate", "Run gossip trials and emit checkpoint CSV");
  bool uniform_q = false;
  std::string trace_path, network_path, policy_path;
  sim->add_flag("--uniform-q", uniform_q, "Use tau = min area (uniform partner distribution)");
  sim->add_option("--trace", trace_path, "Write per-round JSON lines to this file");
  sim->add_option("--network", network_path, "Load the network from JSON instead of generating");
  sim->add_option("--policy-out", policy_path, "Write the sampling policy dump to this file");

  auto* ana = app.add_subcommand("analyze", "Spectral report of the expected update matrix");
  ana->add_flag("--uniform-q", uniform_q, "Analyze the uniform distribution q = 1/n");
  ana->add_option("--network", network_path, "Load the network from JSON instead of generating");
  ana->add_option("--policy-out", policy_path, "Write the sampling policy dump to this file");

  auto* cert = app.add_subcommand("certify", "Weyl certificate sweep over random instances");
  auto* exp = app.add_subcommand("experiment", "Full sweep: fields x protocols x sizes");

  for (auto* sub : {gen, sim, ana, cert, exp}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code;
  }

  // An experiment config carries its own master seed.
  if (app.count("--seed") == 0 && !(exp->parsed() && !g.config.empty())) {
    g.seed = std::random_device{}();
    g.seed = (g.seed << 32) ^ std::random_device{}();
    err << "seed: " << g.seed << "\n";
  }
  if (!trace_path.empty() && !sim->parsed()) {
    err << "--trace is only valid with simulate\n" << app.help();
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_network(g, radius, allow_disconnected, out, err);
    if (sim->parsed()) return cmd_simulate(g, uniform_q, trace_path, network_path, policy_path, out, err);
    if (ana->parsed()) return cmd_analyze(g, uniform_q, network_path, policy_path, out);
    if (cert->parsed()) return cmd_certify(g, out);
    if (exp->parsed()) return cmd_experiment(g, app, out, err);
  } catch (const FileError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace geogossip
