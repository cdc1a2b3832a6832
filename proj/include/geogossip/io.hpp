#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "geogossip/analysis.hpp"
#include "geogossip/engine.hpp"
#include "geogossip/experiments.hpp"
#include "geogossip/geometry.hpp"
#include "geogossip/sampling.hpp"

namespace geogossip {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form, so equal doubles always print equally.
std::string format_double(double value);

// {n, radius, positions: [[x, y], ...], adjacency: [[ids], ...], areas: [...]}
Json network_to_json(const Network& net);
// Rebuilds adjacency and areas from positions and radius, then checks the
// stored ones against them.
Network network_from_json(const Json& doc);

// {tau, nu, mu, p_accept, expected_queries, q_histogram: {edges, counts}}
// with the histogram over n * q_v.
Json policy_to_json(const SamplingPolicy& policy, int bins = 20);

// {n, lambda2, one_minus_lambda2_times_n, weyl_bound, certificate_holds, tave_prediction}
Json spectral_report_to_json(const SpectralReport& report);

// One trace line: {tick, s, legs: [{target, path}], Q, accepted, ...}.
Json round_to_json(const RoundReport& round);

// trial_id,tick,transmissions,error,rounds_failed
void write_trial_csv_header(std::ostream& out);
void write_trial_csv_rows(std::ostream& out, std::size_t trial_id, const TrialRecord& record);

ExperimentConfig experiment_config_from_json(const Json& doc);
Json experiment_config_to_json(const ExperimentConfig& cfg);

}  // namespace geogossip
