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

#include <complex>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "fastgate/chain_model.hpp"
#include "fastgate/gate_dynamics.hpp"

namespace fastgate {

inline constexpr double kTargetPhase = std::numbers::pi / 4.0;

/// Bose-Einstein occupation 1 / (exp(hbar w / k_B T) - 1); zero at T = 0.
double thermal_occupation(double temperature, double mode_frequency);

/// Temperature (K) at which k_B T / hbar equals `rate` (s^-1).
double temperature_from_rate(double rate);

/// Initial motional state: per-mode mean occupations, one occupation shared
/// by every mode, or a temperature.
class ThermalSpec {
  public:
    static ThermalSpec uniform(double nbar);
    static ThermalSpec occupations(std::vector<double> nbar);
    static ThermalSpec temperature(double kelvin);

    /// Mean phonon number of every mode of `chain`.
    std::vector<double> occupations_for(const ChainModel &chain) const;

    enum class Kind { kUniform, kPerMode, kTemperature };
    Kind kind() const { return static_cast<Kind>(data_.index()); }
    double uniform_nbar() const;
    const std::vector<double> &per_mode_nbar() const;
    double temperature_kelvin() const;

  private:
    struct Uniform {
        double nbar;
    };
    struct PerMode {
        std::vector<double> nbar;
    };
    struct Temperature {
        double kelvin;
    };
    explicit ThermalSpec(std::variant<Uniform, PerMode, Temperature> d) : data_(std::move(d)) {}

    std::variant<Uniform, PerMode, Temperature> data_;
};

/// How many error-prone operations a gate contains. Each kick is a
/// counter-propagating pair of pi pulses, so kPulses counts 2 per kick.
enum class PulseCounting { kPulses, kSdks };

int pulse_count(int sdk_count, PulseCounting counting);

/// F = (1 - count * eps)^2 F0. Logs a warning when count * eps > 0.5.
double apply_pulse_error(double ideal_fidelity, int pulse_count, double epsilon);

struct InfidelityTerms {
    double phase = 0.0;      // (2/3) dphi^2
    double motional = 0.0;   // (4/3) sum_m (1/2 + n_m) <|alpha_m|^2>
    double total() const { return phase + motional; }
};

/// State-averaged infidelity from the phase mismatch and the per-basis-state
/// rotating-frame residuals alpha_m^(s). `residuals` holds either all four
/// basis states (++, +-, -+, --) or only (++, +-); with four, the
/// alpha^(--) = -alpha^(++) symmetry is checked.
InfidelityTerms infidelity_terms(double phase_mismatch,
                                 std::span<const std::vector<std::complex<double>>> residuals,
                                 std::span<const double> occupations);
double infidelity(double phase_mismatch, std::span<const std::vector<std::complex<double>>> residuals,
                  const ChainModel &chain, const ThermalSpec &thermal);

struct ModeResidual {
    double omega;                  // rad/s
    std::complex<double> dalpha;   // common displacement, alpha^(s) = -(s_mu b_mu + s_nu b_nu) dalpha
    double weight;                 // (4/3)(1/2 + n_m)(b_mu^2 + b_nu^2)
};

struct GateReport {
    double entangling_phase = 0.0;
    double phase_mismatch = 0.0;  // |Theta| - pi/4
    std::vector<ModeResidual> per_mode;
    double ideal_infidelity = 0.0;
    double motional_infidelity = 0.0;
    int sdk_count = 0;
    int pulse_count = 0;

    double ideal_fidelity() const { return 1.0 - ideal_infidelity; }
    double adjusted_fidelity(double epsilon) const;
    double adjusted_infidelity(double epsilon) const { return 1.0 - adjusted_fidelity(epsilon); }
};

/// Closed-form phase and displacement of a sequence in the instantaneous-group
/// limit. Theta matches the trajectory convention:
///   Theta    = -sum_m 8 eta_m^2 b_m^mu b_m^nu sum_{i<j} z_i z_j sin(w_m (t_j - t_i))
///   dalpha_m =  2 eta_m sum_k z_k sin(w_m t_k)
struct AnalyticTerms {
    double entangling_phase = 0.0;
    double phase_mismatch = 0.0;
    std::vector<double> dalpha;
};

AnalyticTerms analytic_terms(const PulseGroupSequence &sequence, const ChainModel &chain);
double analytic_cost(const PulseGroupSequence &sequence, const ChainModel &chain, const ThermalSpec &thermal);
GateReport analytic_report(const PulseGroupSequence &sequence, const ChainModel &chain, const ThermalSpec &thermal,
                           PulseCounting counting = PulseCounting::kPulses);

/// Trajectory-based report for arbitrary impulses (a kick train, or groups in
/// the instantaneous limit).
GateReport evaluate_impulses(std::span<const Impulse> impulses, const ChainModel &chain, IonPair targets,
                             const ThermalSpec &thermal, int sdk_count,
                             PulseCounting counting = PulseCounting::kPulses);
GateReport evaluate_train(const KickTrain &train, const ChainModel &chain, const ThermalSpec &thermal,
                          PulseCounting counting = PulseCounting::kPulses);

}  // namespace fastgate
