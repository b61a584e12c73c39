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

#include "fastgate/fidelity.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "fastgate/errors.hpp"

namespace fastgate {

double thermal_occupation(double temperature, double mode_frequency) {
    if (temperature < 0.0 || !(mode_frequency > 0.0)) {
        throw ConfigError("thermal_occupation: need T >= 0 and w > 0");
    }
    if (temperature == 0.0) {
        return 0.0;
    }
    const double x = kConstants.hbar * mode_frequency / (kConstants.boltzmann * temperature);
    return 1.0 / std::expm1(x);
}

double temperature_from_rate(double rate) { return rate * kConstants.hbar / kConstants.boltzmann; }

ThermalSpec ThermalSpec::uniform(double nbar) {
    if (!(nbar >= 0.0)) {
        throw ConfigError("thermal: mean occupation must be non-negative");
    }
    return ThermalSpec(Uniform{nbar});
}

ThermalSpec ThermalSpec::occupations(std::vector<double> nbar) {
    for (double n : nbar) {
        if (!(n >= 0.0)) {
            throw ConfigError("thermal: mean occupations must be non-negative");
        }
    }
    return ThermalSpec(PerMode{std::move(nbar)});
}

ThermalSpec ThermalSpec::temperature(double kelvin) {
    if (!(kelvin >= 0.0)) {
        throw ConfigError("thermal: temperature must be non-negative");
    }
    return ThermalSpec(Temperature{kelvin});
}

double ThermalSpec::uniform_nbar() const { return std::get<Uniform>(data_).nbar; }
const std::vector<double> &ThermalSpec::per_mode_nbar() const { return std::get<PerMode>(data_).nbar; }
double ThermalSpec::temperature_kelvin() const { return std::get<Temperature>(data_).kelvin; }

std::vector<double> ThermalSpec::occupations_for(const ChainModel &chain) const {
    const auto modes = static_cast<std::size_t>(chain.num_modes());
    switch (kind()) {
    case Kind::kUniform:
        return std::vector<double>(modes, uniform_nbar());
    case Kind::kPerMode:
        if (per_mode_nbar().size() != modes) {
            throw ConfigError("thermal: " + std::to_string(per_mode_nbar().size()) + " occupations given for " +
                              std::to_string(modes) + " modes");
        }
        return per_mode_nbar();
    case Kind::kTemperature: {
        std::vector<double> out;
        out.reserve(modes);
        for (double w : chain.mode_frequencies()) {
            out.push_back(thermal_occupation(temperature_kelvin(), w));
        }
        return out;
    }
    }
    return {};
}

int pulse_count(int sdk_count, PulseCounting counting) {
    return counting == PulseCounting::kPulses ? 2 * sdk_count : sdk_count;
}

double apply_pulse_error(double ideal_fidelity, int pulse_count, double epsilon) {
    const double x = pulse_count * epsilon;
    if (x > 0.5) {
        std::clog << "fastgate: warning: pulse_count * epsilon = " << x
                  << " is outside the small-error regime of the pulse-error model\n";
    }
    return (1.0 - x) * (1.0 - x) * ideal_fidelity;
}

double GateReport::adjusted_fidelity(double epsilon) const {
    return apply_pulse_error(1.0 - ideal_infidelity, pulse_count, epsilon);
}

InfidelityTerms infidelity_terms(double phase_mismatch,
                                 std::span<const std::vector<std::complex<double>>> residuals,
                                 std::span<const double> occupations) {
    if (residuals.size() != 2 && residuals.size() != 4) {
        throw ConfigError("infidelity: residuals for 2 or 4 basis states required, got " +
                          std::to_string(residuals.size()));
    }
    const std::size_t modes = occupations.size();
    for (const auto &r : residuals) {
        if (r.size() != modes) {
            throw ConfigError("infidelity: residual count does not match mode count");
        }
    }
    if (residuals.size() == 4) {
        for (std::size_t m = 0; m < modes; ++m) {
            const double scale = 1e-9 * (1e-12 + std::abs(residuals[0][m]) + std::abs(residuals[1][m]));
            if (std::abs(residuals[0][m] + residuals[3][m]) > scale ||
                std::abs(residuals[1][m] + residuals[2][m]) > scale) {
                throw NumericalError("infidelity: basis-state residual symmetry violated");
            }
        }
    }
    InfidelityTerms terms;
    terms.phase = (2.0 / 3.0) * phase_mismatch * phase_mismatch;
    const double states = static_cast<double>(residuals.size());
    for (std::size_t m = 0; m < modes; ++m) {
        double mean = 0.0;
        for (const auto &r : residuals) {
            mean += std::norm(r[m]);
        }
        mean /= states;
        terms.motional += (4.0 / 3.0) * (0.5 + occupations[m]) * mean;
    }
    return terms;
}

double infidelity(double phase_mismatch, std::span<const std::vector<std::complex<double>>> residuals,
                  const ChainModel &chain, const ThermalSpec &thermal) {
    const std::vector<double> n = thermal.occupations_for(chain);
    return infidelity_terms(phase_mismatch, residuals, n).total();
}

AnalyticTerms analytic_terms(const PulseGroupSequence &sequence, const ChainModel &chain) {
    sequence.validate();
    const int mu = sequence.targets.first;
    const int nu = sequence.targets.second;
    if (mu < 0 || nu < 0 || mu >= chain.num_ions() || nu >= chain.num_ions()) {
        throw ConfigError("analytic_terms: targets outside the chain");
    }
    const auto &z = sequence.group_sizes;
    const auto &t = sequence.group_times;
    const int groups = sequence.group_count();

    AnalyticTerms out;
    out.dalpha.assign(static_cast<std::size_t>(chain.num_modes()), 0.0);
    double theta = 0.0;
    for (int m = 0; m < chain.num_modes(); ++m) {
        const double w = chain.mode_frequencies()[m];
        const double eta = chain.lamb_dicke()[m];
        double pairs = 0.0;
        double disp = 0.0;
        for (int i = 0; i < groups; ++i) {
            if (z[i] == 0) {
                continue;
            }
            disp += z[i] * std::sin(w * t[i]);
            for (int j = i + 1; j < groups; ++j) {
                if (z[j] != 0) {
                    pairs += static_cast<double>(z[i] * z[j]) * std::sin(w * (t[j] - t[i]));
                }
            }
        }
        theta -= 8.0 * eta * eta * chain.coupling(m, mu) * chain.coupling(m, nu) * pairs;
        out.dalpha[m] = 2.0 * eta * disp;
    }
    out.entangling_phase = theta;
    out.phase_mismatch = std::abs(theta) - kTargetPhase;
    return out;
}

GateReport analytic_report(const PulseGroupSequence &sequence, const ChainModel &chain, const ThermalSpec &thermal,
                           PulseCounting counting) {
    const AnalyticTerms a = analytic_terms(sequence, chain);
    const std::vector<double> n = thermal.occupations_for(chain);
    const int mu = sequence.targets.first;
    const int nu = sequence.targets.second;

    GateReport rep;
    rep.entangling_phase = a.entangling_phase;
    rep.phase_mismatch = a.phase_mismatch;
    double motional = 0.0;
    for (int m = 0; m < chain.num_modes(); ++m) {
        const double bmu = chain.coupling(m, mu);
        const double bnu = chain.coupling(m, nu);
        const double weight = (4.0 / 3.0) * (0.5 + n[m]) * (bmu * bmu + bnu * bnu);
        rep.per_mode.push_back({chain.mode_frequencies()[m], {a.dalpha[m], 0.0}, weight});
        motional += weight * a.dalpha[m] * a.dalpha[m];
    }
    rep.motional_infidelity = motional;
    rep.ideal_infidelity = (2.0 / 3.0) * a.phase_mismatch * a.phase_mismatch + motional;
    rep.sdk_count = sequence.sdk_count();
    rep.pulse_count = pulse_count(rep.sdk_count, counting);
    return rep;
}

double analytic_cost(const PulseGroupSequence &sequence, const ChainModel &chain, const ThermalSpec &thermal) {
    return analytic_report(sequence, chain, thermal).ideal_infidelity;
}

GateReport evaluate_impulses(std::span<const Impulse> impulses, const ChainModel &chain, IonPair targets,
                             const ThermalSpec &thermal, int sdk_count, PulseCounting counting) {
    const std::array<TrajectoryResult, 2> traj = propagate_two_states(impulses, chain, targets);
    const std::vector<double> n = thermal.occupations_for(chain);

    GateReport rep;
    // Phi_{--} = Phi_{++} and Phi_{-+} = Phi_{+-} exactly (the dynamics are
    // linear in the kick sign), so the four-state combination halves.
    rep.entangling_phase = 0.5 * (traj[0].phase - traj[1].phase);
    rep.phase_mismatch = std::abs(rep.entangling_phase) - kTargetPhase;

    const std::array<std::vector<std::complex<double>>, 2> residuals{traj[0].residuals, traj[1].residuals};
    const InfidelityTerms terms = infidelity_terms(rep.phase_mismatch, residuals, n);
    rep.motional_infidelity = terms.motional;
    rep.ideal_infidelity = terms.total();

    const int mu = targets.first;
    const int nu = targets.second;
    for (int m = 0; m < chain.num_modes(); ++m) {
        const double bmu = chain.coupling(m, mu);
        const double bnu = chain.coupling(m, nu);
        const double norm = bmu * bmu + bnu * bnu;
        // Least-squares common displacement over the basis states.
        std::complex<double> dalpha{};
        if (norm > 0.0) {
            dalpha = -((bmu + bnu) * traj[0].residuals[m] + (bmu - bnu) * traj[1].residuals[m]) / (2.0 * norm);
        }
        rep.per_mode.push_back({chain.mode_frequencies()[m], dalpha, (4.0 / 3.0) * (0.5 + n[m]) * norm});
    }
    rep.sdk_count = sdk_count;
    rep.pulse_count = pulse_count(sdk_count, counting);
    return rep;
}

GateReport evaluate_train(const KickTrain &train, const ChainModel &chain, const ThermalSpec &thermal,
                          PulseCounting counting) {
    const std::vector<Impulse> imp = impulses(train);
    return evaluate_impulses(imp, chain, train.targets, thermal, train.sdk_count(), counting);
}

}  // namespace fastgate
