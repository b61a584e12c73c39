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

#include <cmath>
#include <string>

#include "doctest.h"
#include "fastgate/constants.hpp"
#include "fastgate/errors.hpp"
#include "fastgate/stark_shift.hpp"

using namespace fastgate;

namespace {

const std::string kData = std::string(FASTGATE_SOURCE_DIR) + "/data/ca40_shelving.json";

// Omega_t^2 / (4 Delta) from wavelengths directly.
double shift_by_hand(double ratio, double rabi, double drive_nm, double line_nm) {
    const double c = kConstants.speed_of_light;
    const double delta = kTwoPi * c * (1.0 / (drive_nm * 1e-9) - 1.0 / (line_nm * 1e-9));
    return ratio * ratio * rabi * rabi / (4.0 * delta);
}

}  // namespace

TEST_CASE("shipped calcium data reproduces the quoted shelving numbers") {
    const ShelvingScenario s = load_shelving_scenario(kData);
    const double d32 = level_shift(s.levels[0], s);
    const double d52 = level_shift(s.levels[1], s);
    CHECK(d32 == doctest::Approx(shift_by_hand(0.8773, 3e11, 393.366, 866.214)).epsilon(1e-12));
    CHECK(d52 == doctest::Approx(shift_by_hand(0.8304, 3e11, 393.366, 854.209)).epsilon(1e-12));
    CHECK(d32 == doctest::Approx(6.62e6).epsilon(0.02));
    CHECK(d52 == doctest::Approx(6.01e6).epsilon(0.02));
    CHECK(pi_pulse_duration(s) == doctest::Approx(10.5e-12).epsilon(0.02));
    CHECK(std::abs(qubit_phase_per_pulse(s)) == doctest::Approx(6.51e-6).epsilon(0.02));
}

TEST_CASE("stark shift scaling and sign") {
    ShelvingScenario s = load_shelving_scenario(kData);
    const TransitionData &t = s.levels[0].routes[0];
    const double base = stark_shift(t, s);
    s.rabi_frequency *= 2.0;
    CHECK(stark_shift(t, s) == doctest::Approx(4.0 * base));
    // Driving below the line flips the sign.
    TransitionData blue = t;
    blue.wavelength = 300e-9;
    CHECK(stark_shift(blue, s) < 0.0);
    CHECK(gate_phase_budget(1e-6, 30) == doctest::Approx(6e-5));
    CHECK_THROWS_AS(gate_phase_budget(1e-6, -1), ConfigError);
}

TEST_CASE("stark data errors") {
    CHECK_THROWS_AS(load_shelving_scenario("/nonexistent.json"), ConfigError);
    CHECK_THROWS_AS(parse_shelving_scenario("{"), ConfigError);
    const std::string good = R"({"drive": {"wavelength_nm": 393.366, "rabi_frequency_rad_s": 3e11},
        "levels": [{"transitions": [{"wavelength_nm": 866.2, "dipole_ratio": 0.9}]},
                   {"transitions": [{"wavelength_nm": 854.2, "dipole_ratio": 0.8}]}]})";
    CHECK_NOTHROW(parse_shelving_scenario(good));
    std::string extra = good;
    extra.insert(1, R"("colour": 1, )");
    CHECK_THROWS_AS(parse_shelving_scenario(extra), ConfigError);
    std::string resonant = good;
    resonant.replace(resonant.find("866.2"), 5, "393.366");
    CHECK_THROWS_AS(parse_shelving_scenario(resonant), ConfigError);
    std::string one_level = R"({"drive": {"wavelength_nm": 393.366, "rabi_frequency_rad_s": 3e11},
        "levels": [{"transitions": []}]})";
    CHECK_THROWS_AS(parse_shelving_scenario(one_level), ConfigError);
}
