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

#include "fastgate/chain_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastgate/errors.hpp"

namespace fastgate {

double axial_frequency(int num_ions, double radial_frequency) {
    if (num_ions < 1) {
        throw ConfigError("axial_frequency: num_ions must be >= 1, got " + std::to_string(num_ions));
    }
    if (!(radial_frequency > 0.0)) {
        throw ConfigError("axial_frequency: radial frequency must be positive");
    }
    return radial_frequency / (0.65 * std::pow(static_cast<double>(num_ions), 0.865));
}

double TrapConfig::wavenumber() const { return kTwoPi / laser_wavelength; }

double TrapConfig::axial_frequency() const {
    if (axial_frequency_override) {
        return *axial_frequency_override;
    }
    return fastgate::axial_frequency(num_ions, radial_frequency);
}

void TrapConfig::validate() const {
    if (num_ions < 1) {
        throw ConfigError("num_ions must be >= 1");
    }
    if (!(radial_frequency > 0.0)) {
        throw ConfigError("radial frequency must be positive");
    }
    if (!(ion_mass > 0.0)) {
        throw ConfigError("ion mass must be positive");
    }
    if (!(laser_wavelength > 0.0)) {
        throw ConfigError("laser wavelength must be positive");
    }
    const double quartic = quartic_coefficient.value_or(0.0);
    if (axial_frequency_override) {
        const double w = *axial_frequency_override;
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ConfigError("axial frequency override must be finite and non-negative");
        }
        if (w == 0.0 && !(quartic > 0.0)) {
            throw ConfigError("non-confining axial potential: zero harmonic term without a positive quartic term");
        }
    } else if (!(axial_frequency() < radial_frequency)) {
        throw ConfigError("axial frequency must stay below the radial frequency");
    }
    if (!std::isfinite(quartic)) {
        throw ConfigError("quartic coefficient must be finite");
    }
}

TrapScales TrapScales::from(const TrapConfig &config) {
    const double coulomb = kConstants.coulomb_energy_scale();
    const double mass = config.ion_mass;
    const double w_t = config.axial_frequency();
    const double beta = config.quartic_coefficient.value_or(0.0);

    TrapScales s{};
    if (w_t > 0.0) {
        s.frequency = w_t;
    } else {
        // Pick w_s so the dimensionless quartic coefficient is one.
        s.frequency = std::pow(beta * std::pow(coulomb, 2.0 / 3.0) * std::pow(mass, -5.0 / 3.0), 0.3);
    }
    s.length = std::cbrt(coulomb / (mass * s.frequency * s.frequency));
    s.harmonic = (w_t / s.frequency) * (w_t / s.frequency);
    s.quartic = beta * s.length * s.length / (mass * s.frequency * s.frequency);
    return s;
}

namespace {

double scaled_energy(const TrapScales &s, std::span<const double> u) {
    const std::size_t n = u.size();
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u2 = u[i] * u[i];
        e += 0.5 * s.harmonic * u2 + s.quartic * u2 * u2;
        for (std::size_t j = i + 1; j < n; ++j) {
            e += 1.0 / std::abs(u[i] - u[j]);
        }
    }
    return e;
}

Eigen::VectorXd scaled_gradient(const TrapScales &s, std::span<const double> u) {
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double gi = s.harmonic * u[i] + 4.0 * s.quartic * u[i] * u[i] * u[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const double d = u[i] - u[j];
            gi -= (d > 0 ? 1.0 : -1.0) / (d * d);
        }
        g(i) = gi;
    }
    return g;
}

Eigen::MatrixXd scaled_hessian(const TrapScales &s, std::span<const double> u) {
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double diag = s.harmonic + 12.0 * s.quartic * u[i] * u[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const double d = std::abs(u[i] - u[j]);
            const double c = 2.0 / (d * d * d);
            h(i, j) = -c;
            diag += c;
        }
        h(i, i) = diag;
    }
    return h;
}

bool strictly_ascending(std::span<const double> u) {
    return std::adjacent_find(u.begin(), u.end(), [](double a, double b) { return !(a < b); }) == u.end();
}

// Best uniform spacing for the seed u_i = s (i - (N+1)/2), from a 1-D Newton
// solve of dE/ds = 0 along that family.
double seed_spacing(const TrapScales &sc, int n) {
    double sum2 = 0.0, sum4 = 0.0, inv = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k = i - 0.5 * (n - 1);
        sum2 += k * k;
        sum4 += k * k * k * k;
        for (int j = i + 1; j < n; ++j) {
            inv += 1.0 / (j - i);
        }
    }
    // E(s) = a/2 s^2 sum2 + c s^4 sum4 + inv / s
    double s = 1.0;
    for (int it = 0; it < 100; ++it) {
        const double d1 = sc.harmonic * s * sum2 + 4.0 * sc.quartic * s * s * s * sum4 - inv / (s * s);
        const double d2 = sc.harmonic * sum2 + 12.0 * sc.quartic * s * s * sum4 + 2.0 * inv / (s * s * s);
        double next = s - d1 / d2;
        if (next <= 0.0) {
            next = 0.5 * s;
        }
        if (std::abs(next - s) < 1e-15 * s) {
            s = next;
            break;
        }
        s = next;
    }
    return s;
}

}  // namespace

std::vector<double> equilibrium_positions(const TrapConfig &config, const EquilibriumOptions &options) {
    config.validate();
    const int n = config.num_ions;
    if (n == 1) {
        return {0.0};
    }
    const TrapScales sc = TrapScales::from(config);

    const double s0 = seed_spacing(sc, n);
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) {
        u[i] = s0 * (i - 0.5 * (n - 1));
    }

    double energy = scaled_energy(sc, u);
    Eigen::VectorXd g = scaled_gradient(sc, u);
    int it = 0;
    for (; it < options.max_iterations && g.cwiseAbs().maxCoeff() > options.gradient_tolerance; ++it) {
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled_hessian(sc, u));
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
            throw NumericalError("equilibrium solve: Hessian not positive definite (non-confining potential?)");
        }
        const Eigen::VectorXd step = ldlt.solve(-g);

        // Damping: halve until ordering is preserved and the energy does not increase.
        double t = 1.0;
        std::vector<double> trial(n);
        bool accepted = false;
        for (int k = 0; k < 60; ++k, t *= 0.5) {
            for (int i = 0; i < n; ++i) {
                trial[i] = u[i] + t * step(i);
            }
            if (!strictly_ascending(trial)) {
                continue;
            }
            const double e = scaled_energy(sc, trial);
            const Eigen::VectorXd gt = scaled_gradient(sc, trial);
            if (e <= energy + 1e-14 * std::abs(energy) || gt.cwiseAbs().maxCoeff() < g.cwiseAbs().maxCoeff()) {
                u = trial;
                energy = e;
                g = gt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            break;  // stagnated at round-off level; checked below
        }
    }

    // The potential is even, so enforce exact mirror symmetry.
    for (int i = 0; i < n / 2; ++i) {
        const double half = 0.5 * (u[n - 1 - i] - u[i]);
        u[i] = -half;
        u[n - 1 - i] = half;
    }
    if (n % 2 == 1) {
        u[n / 2] = 0.0;
    }
    g = scaled_gradient(sc, u);
    if (!(g.cwiseAbs().maxCoeff() < 1e-10)) {
        throw NumericalError("equilibrium solve did not converge after " + std::to_string(it) +
                             " iterations (residual " + std::to_string(g.cwiseAbs().maxCoeff()) + ")");
    }

    for (double &x : u) {
        x *= sc.length;
    }
    return u;
}

double potential_energy(const TrapConfig &config, std::span<const double> positions) {
    const TrapScales sc = TrapScales::from(config);
    std::vector<double> u(positions.begin(), positions.end());
    for (double &x : u) {
        x /= sc.length;
    }
    return config.ion_mass * sc.frequency * sc.frequency * sc.length * sc.length * scaled_energy(sc, u);
}

std::vector<double> potential_gradient(const TrapConfig &config, std::span<const double> positions) {
    const TrapScales sc = TrapScales::from(config);
    std::vector<double> u(positions.begin(), positions.end());
    for (double &x : u) {
        x /= sc.length;
    }
    const Eigen::VectorXd g = scaled_gradient(sc, u);
    const double unit = config.ion_mass * sc.frequency * sc.frequency * sc.length;
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = unit * g(static_cast<Eigen::Index>(i));
    }
    return out;
}

Eigen::MatrixXd hessian(const TrapConfig &config, std::span<const double> positions) {
    const TrapScales sc = TrapScales::from(config);
    std::vector<double> u(positions.begin(), positions.end());
    for (double &x : u) {
        x /= sc.length;
    }
    Eigen::MatrixXd h = scaled_hessian(sc, u) * (sc.frequency * sc.frequency);
    return h;
}

NormalModes normal_modes(const Eigen::MatrixXd &hessian) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hessian);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("normal_modes: eigen-decomposition failed");
    }
    const auto n = hessian.rows();
    NormalModes modes;
    modes.frequencies.resize(static_cast<std::size_t>(n));
    modes.couplings = solver.eigenvectors().transpose();
    const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();
    for (Eigen::Index m = 0; m < n; ++m) {
        const double lambda = solver.eigenvalues()(m);
        if (!(lambda > 0.0)) {
            throw NumericalError("normal_modes: non-positive eigenvalue " + std::to_string(lambda / scale) +
                                 " (relative); configuration is not a potential minimum");
        }
        modes.frequencies[static_cast<std::size_t>(m)] = std::sqrt(lambda);

        // First entry within round-off of the row maximum decides the sign.
        auto row = modes.couplings.row(m);
        const double peak = row.cwiseAbs().maxCoeff();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(row(j)) >= peak * (1.0 - 1e-9)) {
                if (row(j) < 0.0) {
                    row *= -1.0;
                }
                break;
            }
        }
    }
    return modes;
}

double lamb_dicke(double wavenumber, double mode_frequency, double mass) {
    return wavenumber * std::sqrt(kConstants.hbar / (2.0 * mass * mode_frequency));
}

ChainModel ChainModel::build(const TrapConfig &config) {
    config.validate();
    ChainModel model;
    model.config_ = config;
    model.length_scale_ = TrapScales::from(config).length;
    model.positions_ = equilibrium_positions(config);
    NormalModes modes = normal_modes(hessian(config, model.positions_));
    model.frequencies_ = std::move(modes.frequencies);
    model.couplings_ = std::move(modes.couplings);
    model.lamb_dicke_.reserve(model.frequencies_.size());
    for (double w : model.frequencies_) {
        model.lamb_dicke_.push_back(fastgate::lamb_dicke(config.wavenumber(), w, config.ion_mass));
    }
    return model;
}

ChainModel ChainModel::from_parts(const TrapConfig &config, std::vector<double> positions,
                                  std::vector<double> frequencies, Eigen::MatrixXd couplings,
                                  std::vector<double> lamb_dicke) {
    const auto n = static_cast<std::size_t>(config.num_ions);
    if (positions.size() != n || frequencies.size() != n || lamb_dicke.size() != n ||
        couplings.rows() != config.num_ions || couplings.cols() != config.num_ions) {
        throw ConfigError("ChainModel::from_parts: inconsistent sizes for " + std::to_string(n) + " ions");
    }
    ChainModel model;
    model.config_ = config;
    model.length_scale_ = TrapScales::from(config).length;
    model.positions_ = std::move(positions);
    model.frequencies_ = std::move(frequencies);
    model.couplings_ = std::move(couplings);
    model.lamb_dicke_ = std::move(lamb_dicke);
    return model;
}

}  // namespace fastgate
