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


// Leading-order AC Stark shifts of shelved qubit levels during an ultrafast
// pulse, and the differential qubit phase they imprint.

#pragma once

#include <array>
#include <string>
#include <vector>

namespace fastgate {

/// One dipole-allowed route out of a shelf level.
struct TransitionData {
    std::string label;
    double wavelength = 0.0;    // m
    double dipole_ratio = 0.0;  // relative to the driven transition's moment
};

struct ShelfLevel {
    std::string name;
    std::vector<TransitionData> routes;
};

struct ShelvingScenario {
    std::string drive_label;
    double rabi_frequency = 0.0;    // rad/s, on the driven transition
    double drive_wavelength = 0.0;  // m
    std::array<ShelfLevel, 2> levels;

    /// Throws ConfigError on non-positive wavelengths or Rabi frequency,
    /// negative ratios, or a route resonant with the drive.
    void validate() const;
};

/// Signed shift Omega_t^2 / (4 Delta) in rad/s, with Omega_t = ratio * Omega
/// and Delta = omega_L - omega_t. A shelf level below a transition driven
/// blue of resonance moves up (positive), red of resonance down.
double stark_shift(const TransitionData &transition, const ShelvingScenario &scenario);

/// Sum over the level's routes.
double level_shift(const ShelfLevel &level, const ShelvingScenario &scenario);

/// tau_pi = pi / Omega.
double pi_pulse_duration(const ShelvingScenario &scenario);

/// tau_pi * (shift(levels[1]) - shift(levels[0])), rad.
double qubit_phase_per_pulse(const ShelvingScenario &scenario);

/// Two pulses per counter-propagating pair: 2 * pulse_pairs * phase.
double gate_phase_budget(double phase_per_pulse, int pulse_pairs);

/// Reads the atomic data file (drive block, two shelf levels with routes
/// given as label / wavelength_nm / dipole_ratio). Unknown keys are rejected.
ShelvingScenario load_shelving_scenario(const std::string &path);
ShelvingScenario parse_shelving_scenario(const std::string &json_text);

}  // namespace fastgate
