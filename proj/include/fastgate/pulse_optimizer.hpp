// Copyright 2026 The fastgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Two-stage pulse-sequence search. Stage 1 picks integer group sizes at
// uniform group timings against the closed-form cost; Stage 2 moves the
// group centres on the laser repetition grid against the trajectory cost.

#pragma once

#include <cstdint>
#include <vector>

#include "fastgate/chain_model.hpp"
#include "fastgate/fidelity.hpp"
#include "fastgate/gate_dynamics.hpp"

namespace fastgate {

/// 16 groups when a target sits at the end of the chain, 18 otherwise.
int default_group_count(const ChainModel &chain, IonPair targets);

/// 0.5 us to 1.5 us in 50 ns steps.
std::vector<double> default_gate_time_scan();

struct Stage1Config {
    int group_count = 0;  // N_k; 0 selects default_group_count
    std::vector<double> gate_time_scan = default_gate_time_scan();  // s
    std::vector<int> z_bound_schedule{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    IonPair targets;
    ThermalSpec thermal = ThermalSpec::uniform(0.1);
    double epsilon = 0.0;  // pulse error used for selection
    PulseCounting counting = PulseCounting::kPulses;
    int top_k = 10;
    int restarts = 24;  // random restarts per bound and gate time
    int relaxed_starts = 8;  // continuous solves per bound and gate time
    int lattice_points = 8;  // integer points taken near each continuous solve
    std::int64_t exhaustive_threshold = 50000;  // enumerate when (2b+1)^(N_k/2) is at most this
    int max_sdks = 100;
    /// Search nodes for the branch-and-bound pass that follows the heuristics
    /// at each bound; 0 disables it.
    std::int64_t enumeration_budget = 20000000;
    std::uint64_t seed = 1;
    int threads = 1;

    /// Throws ConfigError. Requires adjacent targets inside the chain.
    void validate(const ChainModel &chain) const;
    int resolved_group_count(const ChainModel &chain) const;
};

struct Stage1Candidate {
    PulseGroupSequence sequence;  // trailing zero groups trimmed
    GateReport report;            // analytic, instantaneous groups
    double selection_cost = 0.0;  // pulse-error-adjusted infidelity
    double scan_gate_time = 0.0;  // scan value before trimming
    int bound = 0;                // z bound at which this point was found
};

struct Stage1Telemetry {
    std::int64_t evaluations = 0;
    /// Best selection cost over the scan after each bound of the schedule.
    std::vector<double> best_cost_by_bound;
    /// Gate time and bound pairs whose branch-and-bound pass ran out of nodes.
    int incomplete_enumerations = 0;
};

struct Stage1Result {
    std::vector<Stage1Candidate> candidates;  // ranked best first
    Stage1Telemetry telemetry;
};

/// Search at a single scan gate time. `stream` decorrelates the restarts of
/// different gate times.
Stage1Result stage1_at_gate_time(const ChainModel &chain, const Stage1Config &config, double gate_time,
                                 std::uint64_t stream);
Stage1Result stage1(const ChainModel &chain, const Stage1Config &config);

/// Orders candidates: lower cost, then fewer SDKs, then shorter gate, then
/// lexicographic group sizes.
bool candidate_less(double cost_a, const PulseGroupSequence &a, double cost_b, const PulseGroupSequence &b);

struct Stage2Config {
    double repetition_rate = 300e6;  // Hz
    double timing_variation = 0.25;  // allowed fractional change of each gap
    int restarts = 200;
    int max_sweeps = 200;
    int max_step = 8;  // largest single move, half periods
    int combo_depth = 4;  // most centres moved together when smaller moves stall
    /// Windows with at most this many grid points are searched exhaustively
    /// instead of by restarts.
    std::int64_t exhaustive_limit = 100000000;
    std::uint64_t seed = 1;

    void validate() const;
};

struct OptimizationTelemetry {
    std::int64_t stage1_evaluations = 0;
    std::int64_t stage2_evaluations = 0;
    int bound_found = 0;
    int candidates_refined = 0;
    double wall_seconds = 0.0;
};

struct OptimizationResult {
    PulseGroupSequence sequence;  // refined group centres on the grid
    KickTrain train;
    double epsilon = 0.0;
    PulseCounting counting = PulseCounting::kPulses;
    ThermalSpec thermal = ThermalSpec::uniform(0.1);
    GateReport report;            // trajectory evaluation of `train`
    double adjusted_infidelity = 0.0;
    double seed_adjusted_infidelity = 0.0;  // Stage-1 point snapped to the grid
    Stage1Candidate seed_candidate;
    OptimizationTelemetry telemetry;
};

/// Pulse-error-adjusted trajectory infidelity of the sequence after snapping
/// it to the repetition grid.
double stage2_objective(const PulseGroupSequence &sequence, const ChainModel &chain, double repetition_rate,
                        const ThermalSpec &thermal, double epsilon, PulseCounting counting = PulseCounting::kPulses);

/// The same quantity from per-burst phasor sums instead of propagation; the
/// Stage-2 search runs on this form.
double stage2_closed_form(const PulseGroupSequence &sequence, const ChainModel &chain, double repetition_rate,
                          const ThermalSpec &thermal, double epsilon, PulseCounting counting = PulseCounting::kPulses);

/// Throws ConfigError when the bursts cannot be placed on the grid inside the
/// allowed timing window.
OptimizationResult stage2(const Stage1Candidate &candidate, const ChainModel &chain, const Stage2Config &config,
                          const ThermalSpec &thermal, double epsilon,
                          PulseCounting counting = PulseCounting::kPulses, std::uint64_t stream = 0);

/// Stage 2 on every candidate of a finished Stage 1; best adjusted infidelity
/// wins. Thread count is taken from stage1_config.threads.
OptimizationResult refine_candidates(const ChainModel &chain, const Stage1Result &stage1_result,
                                     const Stage1Config &stage1_config, const Stage2Config &stage2_config);

/// Stage 1, then Stage 2 on every returned candidate; best adjusted
/// infidelity wins. Thread count is taken from stage1.threads.
OptimizationResult optimize_gate(const ChainModel &chain, const Stage1Config &stage1_config,
                                 const Stage2Config &stage2_config);

struct JitterStats {
    double mean_added = 0.0;
    double p95_added = 0.0;
    double max_added = 0.0;
    int samples = 0;
};

/// Monte Carlo over uniform shot-to-shot fractional shifts in
/// [-instability, instability] of the trap frequency and the repetition rate.
JitterStats jitter_sensitivity(const OptimizationResult &result, const ChainModel &chain, double instability,
                               int samples, std::uint64_t seed, int threads = 1);

}  // namespace fastgate
