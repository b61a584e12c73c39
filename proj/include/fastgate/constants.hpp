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

#pragma once

#include <numbers>

namespace fastgate {

/// CODATA 2018 exact / recommended values, SI units.
struct PhysicalConstants {
    double hbar;                 // J s
    double boltzmann;            // J / K
    double elementary_charge;    // C
    double vacuum_permittivity;  // F / m
    double atomic_mass_unit;     // kg
    double speed_of_light;       // m / s

    /// Coulomb constant q^2 / (4 pi eps0) for a singly charged ion, J m.
    constexpr double coulomb_energy_scale() const {
        return elementary_charge * elementary_charge /
               (4.0 * std::numbers::pi * vacuum_permittivity);
    }
};

inline constexpr PhysicalConstants kConstants{
    1.054571817e-34,
    1.380649e-23,
    1.602176634e-19,
    8.8541878128e-12,
    1.66053906660e-27,
    299792458.0,
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Boundary conversions. Everything inside the library is SI with angular
// frequencies in rad/s.
constexpr double mhz_to_rad_s(double mhz) { return kTwoPi * mhz * 1e6; }
constexpr double rad_s_to_mhz(double w) { return w / kTwoPi * 1e-6; }
constexpr double us_to_s(double us) { return us * 1e-6; }
constexpr double s_to_us(double s) { return s * 1e6; }
constexpr double nm_to_m(double nm) { return nm * 1e-9; }

}  // namespace fastgate
