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


#include "fastgate/nonlinear.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "fastgate/errors.hpp"

namespace fastgate {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

// Scaled units: positions in l, time in 1/w_s, displacements and velocities
// in units of kappa, the velocity one kick imparts. The state is
// (delta_1..N, v_1..N, S) with S the action integral of
//   1/2 v^2 - R(delta),
// where R is the potential minus its value and gradient at equilibrium.
struct Dynamics {
    TrapScales scales;
    std::vector<double> u;  // equilibrium
    double kappa;
    bool harmonic_only;
    Eigen::MatrixXd hessian;  // scaled

    int n() const { return static_cast<int>(u.size()); }

    void operator()(const State &y, State &dy, double /*t*/) const {
        const int N = n();
        double kinetic = 0.0;
        for (int i = 0; i < N; ++i) {
            dy[i] = y[N + i];
            kinetic += 0.5 * y[N + i] * y[N + i];
        }
        double remainder = 0.0;
        if (harmonic_only) {
            for (int i = 0; i < N; ++i) {
                double f = 0.0;
                for (int j = 0; j < N; ++j) {
                    f -= hessian(i, j) * y[j];
                }
                dy[N + i] = f;
                remainder -= 0.5 * f * y[i];
            }
        } else {
            const double a = scales.harmonic;
            const double c = scales.quartic;
            const double k = kappa;
            for (int i = 0; i < N; ++i) {
                const double d = y[i];
                const double ui = u[i];
                dy[N + i] = -a * d - c * (12.0 * ui * ui * d + 12.0 * ui * k * d * d + 4.0 * k * k * d * d * d);
                remainder += 0.5 * a * d * d + c * d * d * (6.0 * ui * ui + 4.0 * ui * k * d + k * k * d * d);
            }
            for (int i = 0; i < N; ++i) {
                for (int j = i + 1; j < N; ++j) {
                    const double sep = u[j] - u[i];
                    const double rel = y[j] - y[i];
                    const double now = sep + k * rel;
                    if (!(now > 0.0)) {
                        throw NumericalError("propagate_nonlinear: ions " + std::to_string(i) + " and " +
                                             std::to_string(j) + " collided");
                    }
                    const double force = rel * (2.0 * sep + k * rel) / (sep * sep * now * now);
                    dy[N + i] += force;
                    dy[N + j] -= force;
                    remainder += rel * rel / (sep * sep * now);
                }
            }
        }
        dy[2 * N] = kinetic - remainder;
    }
};

}  // namespace

TrajectoryResult propagate_nonlinear(const KickTrain &train, const ChainModel &chain, BasisState basis,
                                     const NonlinearOptions &options) {
    train.validate();
    const IonPair targets = train.targets;
    const int N = chain.num_ions();
    if (targets.first == targets.second || targets.first < 0 || targets.second < 0 || targets.first >= N ||
        targets.second >= N) {
        throw ConfigError("propagate_nonlinear: targets outside the chain");
    }
    if (!(options.relative_tolerance > 0.0) || !(options.absolute_tolerance > 0.0)) {
        throw ConfigError("propagate_nonlinear: tolerances must be positive");
    }

    Dynamics dyn;
    dyn.scales = TrapScales::from(chain.config());
    const double l = dyn.scales.length;
    const double ws = dyn.scales.frequency;
    for (double x : chain.positions()) {
        dyn.u.push_back(x / l);
    }
    const double kick = 2.0 * kConstants.hbar * chain.wavenumber() / chain.mass();
    dyn.kappa = kick / (ws * l);
    dyn.harmonic_only = options.harmonic_only;
    if (options.harmonic_only) {
        dyn.hessian = hessian(chain.config(), chain.positions()) / (ws * ws);
    }

    State y(static_cast<std::size_t>(2 * N + 1), 0.0);
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(options.absolute_tolerance,
                                                                            options.relative_tolerance);
    const double t0 = train.kicks.empty() ? 0.0 : train.kicks.front().time;
    double tau = 0.0;
    for (const Kick &kk : train.kicks) {
        const double next = (kk.time - t0) * ws;
        if (next > tau) {
            odeint::integrate_adaptive(stepper, dyn, y, tau, next, 1e-3);
            tau = next;
        }
        y[N + targets.first] += kk.sign * basis.first;
        y[N + targets.second] += kk.sign * basis.second;
    }

    TrajectoryResult result;
    result.basis = basis;
    result.end_time = train.kicks.empty() ? 0.0 : train.kicks.back().time;
    result.final_states.assign(static_cast<std::size_t>(N), ModeState{});
    result.residuals.resize(static_cast<std::size_t>(N));
    double boundary = 0.0;
    for (int m = 0; m < N; ++m) {
        double q = 0.0;
        double v = 0.0;
        for (int i = 0; i < N; ++i) {
            q += chain.coupling(m, i) * y[i];
            v += chain.coupling(m, i) * y[N + i];
        }
        ModeState &st = result.final_states[m];
        st.position = q * dyn.kappa * l;
        st.velocity = v * dyn.kappa * l * ws;
        const double w = chain.mode_frequencies()[m];
        const std::complex<double> lab = std::sqrt(chain.mass() * w / (2.0 * kConstants.hbar)) *
                                         std::complex<double>(st.position, st.velocity / w);
        result.residuals[m] = lab * std::polar(1.0, w * result.end_time);
        boundary += 0.5 * std::imag(lab * lab);
    }
    const double action_unit = chain.mass() * ws * l * l * dyn.kappa * dyn.kappa;
    result.phase = y[2 * N] * action_unit / kConstants.hbar - boundary;
    return result;
}

GateReport evaluate_nonlinear(const KickTrain &train, const ChainModel &chain, const ThermalSpec &thermal,
                              PulseCounting counting, const NonlinearOptions &options) {
    std::array<TrajectoryResult, 4> r;
    for (std::size_t s = 0; s < 4; ++s) {
        r[s] = propagate_nonlinear(train, chain, kBasisStates[s], options);
    }
    GateReport rep;
    rep.entangling_phase = 0.25 * (r[0].phase - r[1].phase - r[2].phase + r[3].phase);
    rep.phase_mismatch = std::abs(rep.entangling_phase) - kTargetPhase;

    // The two-state form of infidelity_terms averages without a symmetry
    // check; averaging its two halves covers all four states.
    const std::vector<double> occ = thermal.occupations_for(chain);
    const std::array<std::vector<std::complex<double>>, 2> first{r[0].residuals, r[1].residuals};
    const std::array<std::vector<std::complex<double>>, 2> second{r[2].residuals, r[3].residuals};
    const InfidelityTerms a = infidelity_terms(rep.phase_mismatch, first, occ);
    const InfidelityTerms b = infidelity_terms(rep.phase_mismatch, second, occ);
    rep.motional_infidelity = 0.5 * (a.motional + b.motional);
    rep.ideal_infidelity = a.phase + rep.motional_infidelity;

    const int mu = train.targets.first;
    const int nu = train.targets.second;
    for (int m = 0; m < chain.num_modes(); ++m) {
        const double bmu = chain.coupling(m, mu);
        const double bnu = chain.coupling(m, nu);
        const double norm = bmu * bmu + bnu * bnu;
        std::complex<double> dalpha{};
        if (norm > 0.0) {
            dalpha = -((bmu + bnu) * (r[0].residuals[m] - r[3].residuals[m]) +
                       (bmu - bnu) * (r[1].residuals[m] - r[2].residuals[m])) /
                     (4.0 * norm);
        }
        rep.per_mode.push_back({chain.mode_frequencies()[m], dalpha, (4.0 / 3.0) * (0.5 + occ[m]) * norm});
    }
    rep.sdk_count = train.sdk_count();
    rep.pulse_count = pulse_count(rep.sdk_count, counting);
    return rep;
}

}  // namespace fastgate
