#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "geogossip/engine.hpp"
#include "geogossip/geometry.hpp"
#include "geogossip/parallel.hpp"

namespace geogossip {

enum class FieldKind { Linear, Diffusion, Spike };

std::string_view to_string(FieldKind kind);
FieldKind parse_field(std::string_view name);

struct FieldSpec {
  FieldKind kind = FieldKind::Spike;

  // Linear: 0 varies along x, 1 along y.
  int axis = 0;

  // Diffusion. Empty amplitudes mean n / 3 per source.
  std::vector<Point> sources = {Point(0.2, 0.2), Point(0.8, 0.3), Point(0.5, 0.8)};
  std::vector<double> amplitudes;
  int smoothing_passes = 10;

  // Spike. Defaults: node nearest the center, amplitude n.
  std::optional<NodeId> spike_node;
  std::optional<double> spike_amplitude;
};

Eigen::VectorXd make_field(const FieldSpec& spec, const Network& net);

// x <- x - alpha L x with alpha = 1 / (1 + max degree). Symmetric weights,
// so the total is preserved.
void smooth_once(Eigen::VectorXd& x, const Network& net);

struct ExperimentConfig {
  std::vector<std::size_t> sizes = {200};
  std::vector<double> epsilons = {0.1, 0.01};
  std::size_t trials = 1;
  std::uint64_t master_seed = 1;
  std::vector<ProtocolKind> protocols = {ProtocolKind::Geographic, ProtocolKind::StandardUniform};
  std::vector<FieldSpec> fields = {FieldSpec{}};
  double nu = kDefaultNu;
  double mu = kDefaultMu;
  bool uniform_q = false;
  double checkpoint_factor = 1.25;
  std::uint64_t max_ticks = 20'000'000;
  std::size_t jobs = 0;  // 0: hardware concurrency
};

void validate(const ExperimentConfig& cfg);

struct TrialResult {
  std::size_t n = 0;
  FieldKind field = FieldKind::Spike;
  ProtocolKind protocol = ProtocolKind::Geographic;
  std::size_t trial = 0;
  std::size_t resamples = 0;
  TrialRecord record;
};

// Sorted by (n, field, protocol, trial).
using ResultTable = std::vector<TrialResult>;

// Network instance for (n, trial); shared by every field and protocol of
// that trial so the protocols are compared on the same graph.
ConnectedNetwork experiment_network(const ExperimentConfig& cfg, std::size_t n, std::size_t trial);

ResultTable run_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
  std::size_t n = 0;
  FieldKind field = FieldKind::Spike;
  ProtocolKind protocol = ProtocolKind::Geographic;
  std::optional<double> median_transmissions;  // empty if the median trial never crossed
  std::optional<double> ratio_std_over_geo;    // set when both protocols are present
};

struct Summary {
  double epsilon = 0.0;
  std::vector<SummaryRow> rows;
  // ratio at the largest n over ratio at the smallest n, per field.
  std::vector<std::pair<FieldKind, double>> ratio_growth;
};

Summary summarize(const ResultTable& results, double epsilon);

std::optional<double> median(std::vector<std::optional<double>> values);

void write_results_csv(std::ostream& out, const ResultTable& results);
void write_summary_csv(std::ostream& out, const Summary& summary);

}  // namespace geogossip
