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


#include "fastgate/stark_shift.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fastgate/constants.hpp"
#include "fastgate/errors.hpp"

namespace fastgate {

namespace {

double angular_frequency(double wavelength) { return kTwoPi * kConstants.speed_of_light / wavelength; }

// Detuning below this fraction of the drive frequency counts as resonant.
constexpr double kResonanceTolerance = 1e-9;

void check_keys(const nlohmann::json &j, const std::set<std::string> &allowed, const std::string &where) {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto &[key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

double positive_number(const nlohmann::json &j, const std::string &key, const std::string &where) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(where + ": missing numeric '" + key + "'");
    }
    return j.at(key).get<double>();
}

}  // namespace

void ShelvingScenario::validate() const {
    if (!(rabi_frequency > 0.0) || !(drive_wavelength > 0.0)) {
        throw ConfigError("stark: drive Rabi frequency and wavelength must be positive");
    }
    const double wl = angular_frequency(drive_wavelength);
    for (const ShelfLevel &level : levels) {
        for (const TransitionData &t : level.routes) {
            if (!(t.wavelength > 0.0)) {
                throw ConfigError("stark: wavelength of " + t.label + " must be positive");
            }
            if (!(t.dipole_ratio >= 0.0)) {
                throw ConfigError("stark: dipole ratio of " + t.label + " must be non-negative");
            }
            if (std::abs(wl - angular_frequency(t.wavelength)) <= kResonanceTolerance * wl) {
                throw ConfigError("stark: " + t.label + " is resonant with the drive; the level is not shelved");
            }
        }
    }
}

double stark_shift(const TransitionData &transition, const ShelvingScenario &scenario) {
    scenario.validate();
    const double detuning = angular_frequency(scenario.drive_wavelength) - angular_frequency(transition.wavelength);
    if (!(transition.wavelength > 0.0) ||
        std::abs(detuning) <= kResonanceTolerance * angular_frequency(scenario.drive_wavelength)) {
        throw ConfigError("stark: " + transition.label + " has zero detuning from the drive");
    }
    const double omega = transition.dipole_ratio * scenario.rabi_frequency;
    return omega * omega / (4.0 * detuning);
}

double level_shift(const ShelfLevel &level, const ShelvingScenario &scenario) {
    double total = 0.0;
    for (const TransitionData &t : level.routes) {
        total += stark_shift(t, scenario);
    }
    return total;
}

double pi_pulse_duration(const ShelvingScenario &scenario) {
    scenario.validate();
    return std::numbers::pi / scenario.rabi_frequency;
}

double qubit_phase_per_pulse(const ShelvingScenario &scenario) {
    return pi_pulse_duration(scenario) *
           (level_shift(scenario.levels[1], scenario) - level_shift(scenario.levels[0], scenario));
}

double gate_phase_budget(double phase_per_pulse, int pulse_pairs) {
    if (pulse_pairs < 0) {
        throw ConfigError("stark: pulse pair count must be non-negative");
    }
    return 2.0 * pulse_pairs * phase_per_pulse;
}

ShelvingScenario parse_shelving_scenario(const std::string &json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("stark: atomic data is not valid JSON: ") + e.what());
    }
    check_keys(j, {"species", "drive", "levels"}, "stark data");
    if (!j.contains("drive") || !j.contains("levels")) {
        throw ConfigError("stark data: 'drive' and 'levels' are required");
    }
    const nlohmann::json &drive = j.at("drive");
    check_keys(drive, {"label", "wavelength_nm", "rabi_frequency_rad_s"}, "stark data: drive");

    ShelvingScenario s;
    s.drive_label = drive.value("label", std::string("drive"));
    s.drive_wavelength = nm_to_m(positive_number(drive, "wavelength_nm", "stark data: drive"));
    s.rabi_frequency = positive_number(drive, "rabi_frequency_rad_s", "stark data: drive");

    const nlohmann::json &levels = j.at("levels");
    if (!levels.is_array() || levels.size() != 2) {
        throw ConfigError("stark data: 'levels' must list exactly two shelf levels");
    }
    for (std::size_t i = 0; i < 2; ++i) {
        const std::string where = "stark data: levels[" + std::to_string(i) + "]";
        check_keys(levels[i], {"name", "transitions"}, where);
        s.levels[i].name = levels[i].value("name", "level " + std::to_string(i));
        if (!levels[i].contains("transitions") || !levels[i].at("transitions").is_array()) {
            throw ConfigError(where + ": 'transitions' must be a list");
        }
        for (const auto &t : levels[i].at("transitions")) {
            check_keys(t, {"label", "wavelength_nm", "dipole_ratio"}, where);
            TransitionData td;
            td.label = t.value("label", std::string("?"));
            td.wavelength = nm_to_m(positive_number(t, "wavelength_nm", where));
            td.dipole_ratio = positive_number(t, "dipole_ratio", where);
            s.levels[i].routes.push_back(td);
        }
    }
    s.validate();
    return s;
}

ShelvingScenario load_shelving_scenario(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("stark: cannot open atomic data file " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_shelving_scenario(buf.str());
}

}  // namespace fastgate
