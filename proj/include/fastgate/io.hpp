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


// JSON forms of the library's data types. Doubles are written with
// round-trip precision and keys in a fixed order, so equal values give
// byte-identical documents.

#pragma once

#include <string>

#include "json.hpp"

#include "fastgate/chain_model.hpp"
#include "fastgate/fidelity.hpp"
#include "fastgate/gate_dynamics.hpp"
#include "fastgate/pulse_optimizer.hpp"

namespace fastgate {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const TrapConfig &config);
TrapConfig trap_from_json(const Json &j);

/// {trap, positions_m, mode_freqs_rad_s, couplings, lamb_dicke}
Json to_json(const ChainModel &chain);
ChainModel chain_from_json(const Json &j);

Json to_json(const PulseGroupSequence &sequence);
PulseGroupSequence sequence_from_json(const Json &j);

/// {rep_rate_hz, targets:[mu, nu], kicks:[{t_s, sign}]}
Json to_json(const KickTrain &train);
KickTrain train_from_json(const Json &j);

Json to_json(const ThermalSpec &thermal);
ThermalSpec thermal_from_json(const Json &j);

std::string to_string(PulseCounting counting);
PulseCounting counting_from_string(const std::string &name);

/// {dphi, entangling_phase, per_mode:[{omega, dalpha_re, dalpha_im, weight}],
///  ideal_inf, motional_inf, sdks, pulses}
Json to_json(const GateReport &report);

Json to_json(const Stage1Candidate &candidate);

/// The stored result, with the chain it was optimized for. Wall time is left
/// out so repeated runs produce identical files.
Json to_json(const OptimizationResult &result, const ChainModel &chain);

/// Parses a stored result and checks its schema version. The report fields
/// are re-derived by evaluating the stored train, the reported numbers are
/// returned alongside for comparison.
struct StoredResult {
    ChainModel chain;
    PulseGroupSequence sequence;
    KickTrain train;
    ThermalSpec thermal;
    double epsilon;
    PulseCounting counting;
    double reported_ideal_infidelity;
    double reported_adjusted_infidelity;
};
StoredResult stored_result_from_json(const Json &j);

/// Reads and parses a JSON file; ConfigError on I/O or syntax problems.
Json read_json_file(const std::string &path);

}  // namespace fastgate
