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

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fastgate/constants.hpp"

namespace fastgate {

/// Axial frequency that keeps an N-ion chain linear at a fixed radial
/// frequency: w_t = w_r / (0.65 N^0.865).
double axial_frequency(int num_ions, double radial_frequency);

/// Species, laser and trap parameters. SI units, angular frequencies in rad/s.
struct TrapConfig {
    double ion_mass = 39.9626 * kConstants.atomic_mass_unit;
    double laser_wavelength = 393.37e-9;
    double radial_frequency = mhz_to_rad_s(5.0);
    int num_ions = 2;
    /// Replaces the scaling rule. Zero is allowed only with a positive quartic term.
    std::optional<double> axial_frequency_override;
    /// Coefficient of sum_i x_i^4 in the axial potential, J/m^4.
    std::optional<double> quartic_coefficient;

    double wavenumber() const;
    /// The harmonic axial frequency actually used (override or scaling rule).
    double axial_frequency() const;
    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// Dimensionless form of the axial potential,
///   V / (M w_s^2 l^2) = a/2 sum u^2 + c sum u^4 + sum_{i<j} 1/|u_i - u_j|,
/// with l^3 = q^2 / (4 pi eps0 M w_s^2).
struct TrapScales {
    double length;     // l, m
    double frequency;  // w_s, rad/s
    double harmonic;   // a
    double quartic;    // c

    static TrapScales from(const TrapConfig &config);
};

struct EquilibriumOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-13;  // scaled units
};

/// Stationary point of the trap-plus-Coulomb potential, metres, ascending.
std::vector<double> equilibrium_positions(const TrapConfig &config,
                                          const EquilibriumOptions &options = {});

/// Total axial potential energy, J.
double potential_energy(const TrapConfig &config, std::span<const double> positions);

/// dV/dx_i, N.
std::vector<double> potential_gradient(const TrapConfig &config, std::span<const double> positions);

/// H_ij = (1/M) d^2V/dx_i dx_j in s^-2, analytic.
Eigen::MatrixXd hessian(const TrapConfig &config, std::span<const double> positions);

struct NormalModes {
    std::vector<double> frequencies;  // rad/s, ascending
    Eigen::MatrixXd couplings;        // row m is b_m
};

/// Eigen-decomposition of a mass-weighted Hessian. Each row's largest-magnitude
/// entry is made positive so results are reproducible.
NormalModes normal_modes(const Eigen::MatrixXd &hessian);

/// eta = k sqrt(hbar / (2 M w)).
double lamb_dicke(double wavenumber, double mode_frequency, double mass);

/// Immutable description of a linear ion crystal and its axial normal modes.
class ChainModel {
  public:
    static ChainModel build(const TrapConfig &config);
    /// Assembles a model from precomputed parts (deserialization, perturbation
    /// studies). Checks shapes only.
    static ChainModel from_parts(const TrapConfig &config, std::vector<double> positions,
                                 std::vector<double> frequencies, Eigen::MatrixXd couplings,
                                 std::vector<double> lamb_dicke);

    const TrapConfig &config() const { return config_; }
    int num_ions() const { return config_.num_ions; }
    int num_modes() const { return config_.num_ions; }
    double mass() const { return config_.ion_mass; }
    double wavenumber() const { return config_.wavenumber(); }
    double length_scale() const { return length_scale_; }

    const std::vector<double> &positions() const { return positions_; }
    const std::vector<double> &mode_frequencies() const { return frequencies_; }
    const Eigen::MatrixXd &couplings() const { return couplings_; }
    const std::vector<double> &lamb_dicke() const { return lamb_dicke_; }
    double coupling(int mode, int ion) const { return couplings_(mode, ion); }

  private:
    ChainModel() = default;

    TrapConfig config_;
    double length_scale_ = 0.0;
    std::vector<double> positions_;
    std::vector<double> frequencies_;
    Eigen::MatrixXd couplings_;
    std::vector<double> lamb_dicke_;
};

}  // namespace fastgate
