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

// Reference values computed independently of the library, shared by the unit
// tests and the acceptance binary.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "fastgate/chain_model.hpp"
#include "fastgate/gate_dynamics.hpp"

namespace fastgate::oracle {

// Scaled harmonic-trap equilibrium, u_i in units of (q^2 / 4 pi eps0 M w^2)^(1/3),
// by plain gradient flow on the force balance. Slow and simple on purpose.
inline std::vector<double> scaled_equilibrium(int n) {
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) {
        u[i] = 0.8 * (i - 0.5 * (n - 1));
    }
    std::vector<double> f(n);
    for (int it = 0; it < 400000; ++it) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            f[i] = -u[i];
            for (int j = 0; j < n; ++j) {
                if (j != i) {
                    const double d = u[i] - u[j];
                    f[i] += (d > 0 ? 1.0 : -1.0) / (d * d);
                }
            }
            worst = std::max(worst, std::abs(f[i]));
        }
        if (worst < 1e-14) {
            break;
        }
        for (int i = 0; i < n; ++i) {
            u[i] += 0.05 * f[i];
        }
    }
    return u;
}

// Squared mode frequencies in units of w_z^2, ascending.
inline std::vector<double> scaled_mode_eigenvalues(int n) {
    const std::vector<double> u = scaled_equilibrium(n);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) {
                const double c = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
                h(i, j) = -c;
                h(i, i) += c;
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    return {eig.eigenvalues().data(), eig.eigenvalues().data() + n};
}

// Entangling phase of instantaneous groups straight from the double sum
// -sum_m 8 eta^2 b_mu b_nu sum_{i<j} z_i z_j sin(w (t_j - t_i)).
inline double entangling_phase(const PulseGroupSequence &seq, const ChainModel &chain) {
    double theta = 0.0;
    const int k = seq.group_count();
    for (int m = 0; m < chain.num_modes(); ++m) {
        const double w = chain.mode_frequencies()[m];
        const double eta = chain.lamb_dicke()[m];
        const double pref = -8.0 * eta * eta * chain.coupling(m, seq.targets.first) *
                            chain.coupling(m, seq.targets.second);
        for (int i = 0; i < k; ++i) {
            for (int j = i + 1; j < k; ++j) {
                theta += pref * seq.group_sizes[i] * seq.group_sizes[j] *
                         std::sin(w * (seq.group_times[j] - seq.group_times[i]));
            }
        }
    }
    return theta;
}

// Common displacement 2 eta sum_k z_k e^{i w t_k} per mode, referred to t = 0.
inline std::vector<std::complex<double>> displacements(const PulseGroupSequence &seq, const ChainModel &chain) {
    std::vector<std::complex<double>> out;
    for (int m = 0; m < chain.num_modes(); ++m) {
        const double w = chain.mode_frequencies()[m];
        std::complex<double> s = 0.0;
        for (int k = 0; k < seq.group_count(); ++k) {
            s += static_cast<double>(seq.group_sizes[k]) * std::polar(1.0, w * seq.group_times[k]);
        }
        out.push_back(2.0 * chain.lamb_dicke()[m] * s);
    }
    return out;
}

// Infidelity (2/3) dphi^2 + (4/3) sum_m (1/2 + n) (b_mu^2 + b_nu^2) |dalpha_m|^2.
inline double infidelity(const PulseGroupSequence &seq, const ChainModel &chain, double nbar) {
    const double dphi = std::abs(entangling_phase(seq, chain)) - std::numbers::pi / 4.0;
    double total = (2.0 / 3.0) * dphi * dphi;
    const auto d = displacements(seq, chain);
    for (int m = 0; m < chain.num_modes(); ++m) {
        const double bm = chain.coupling(m, seq.targets.first);
        const double bn = chain.coupling(m, seq.targets.second);
        total += (4.0 / 3.0) * (0.5 + nbar) * (bm * bm + bn * bn) * std::norm(d[m]);
    }
    return total;
}

// Random antisymmetric sequence with `half` groups per side.
inline PulseGroupSequence random_sequence(std::mt19937_64 &rng, int half, IonPair targets, double gate_time,
                                          int bound = 6) {
    std::uniform_int_distribution<int> size(-bound, bound);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> t(half);
    for (double &v : t) {
        v = unit(rng) * 0.5 * gate_time;
    }
    std::sort(t.begin(), t.end());
    std::vector<int> z(half);
    for (int &v : z) {
        v = size(rng);
    }
    z[0] = z[0] == 0 ? 1 : z[0];
    return PulseGroupSequence::from_half(z, t, targets, gate_time);
}

}  // namespace fastgate::oracle
