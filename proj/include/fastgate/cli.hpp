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


// Run configuration and the command implementations behind the fastgate
// executable. Configs use laboratory units (MHz, us, nm, amu) and are
// normalized to SI on load.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fastgate/chain_model.hpp"
#include "fastgate/io.hpp"
#include "fastgate/pulse_optimizer.hpp"

namespace fastgate {

struct SweepSpec {
    std::string variable;  // num_ions, repetition_rate, epsilon, temperature, jitter
    std::vector<double> values;  // config units: ions, MHz, -, K, fraction
};

struct StarkSpec {
    std::string data_path = "data/ca40_shelving.json";
    std::optional<double> rabi_frequency;  // rad/s, replaces the data file's value
    int pulse_pairs = 30;
};

struct RunConfig {
    TrapConfig trap;
    Stage1Config stage1;
    Stage2Config stage2;
    std::optional<SweepSpec> sweep;
    StarkSpec stark;
    int jitter_samples = 200;
    int trajectory_samples = 400;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Parses a config document. Unknown keys anywhere are rejected; missing
/// keys take defaults.
RunConfig parse_run_config(const Json &j);
RunConfig load_run_config(const std::string &path);

/// The fully populated config in its own units, for provenance. Thread count
/// is omitted so serial and parallel runs write the same files.
Json run_config_to_json(const RunConfig &config);

struct CommandOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
};

void apply_overrides(RunConfig &config, const CommandOverrides &overrides);

/// Each command writes its files under config.out_dir and a short report to
/// `out`. Errors propagate as ConfigError / NumericalError.
void cmd_modes(const RunConfig &config, std::ostream &out);
OptimizationResult cmd_optimize(const RunConfig &config, std::ostream &out);
void cmd_sweep(const RunConfig &config, std::ostream &out);
void cmd_stark(const RunConfig &config, std::ostream &out);
/// Re-scores the stored train in `result_path`; returns false when the
/// stored numbers are not reproduced to 1e-12 relative.
bool cmd_evaluate(const RunConfig &config, const std::string &result_path, std::ostream &out);

/// Exit-code mapping shared by the executable: 0 success, 2 configuration
/// error, 3 numerical failure.
enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

}  // namespace fastgate
