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
#include <random>

#include "doctest.h"
#include "fastgate/chain_model.hpp"
#include "fastgate/errors.hpp"
#include "oracles.hpp"

using namespace fastgate;

namespace {

TrapConfig harmonic(int n, double axial_mhz = 1.0) {
    TrapConfig c;
    c.num_ions = n;
    c.axial_frequency_override = mhz_to_rad_s(axial_mhz);
    return c;
}

}  // namespace

TEST_CASE("two and three ion chains match closed forms") {
    const ChainModel two = ChainModel::build(harmonic(2));
    const double l = two.length_scale();
    CHECK(two.positions()[1] / l == doctest::Approx(std::cbrt(0.25)).epsilon(1e-12));
    CHECK(two.positions()[0] == doctest::Approx(-two.positions()[1]).epsilon(1e-14));
    CHECK(two.mode_frequencies()[1] / two.mode_frequencies()[0] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(std::abs(two.coupling(1, 0)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    const ChainModel three = ChainModel::build(harmonic(3));
    CHECK(three.positions()[2] / three.length_scale() == doctest::Approx(std::cbrt(1.25)).epsilon(1e-12));
    CHECK(three.positions()[1] == doctest::Approx(0.0));
    const double w0 = three.mode_frequencies()[0];
    CHECK(three.mode_frequencies()[1] / w0 == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(three.mode_frequencies()[2] / w0 == doctest::Approx(std::sqrt(29.0 / 5.0)).epsilon(1e-12));
    // Stretch mode leaves the centre ion still; the top mode moves it twice as far.
    CHECK(std::abs(three.coupling(1, 1)) < 1e-12);
    CHECK(std::abs(three.coupling(2, 1)) == doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("mode spectrum agrees with a gradient-flow reference") {
    for (int n = 4; n <= 9; ++n) {
        CAPTURE(n);
        const ChainModel chain = ChainModel::build(harmonic(n));
        const std::vector<double> ref = oracle::scaled_mode_eigenvalues(n);
        const double w0 = chain.mode_frequencies()[0];
        for (int m = 0; m < n; ++m) {
            const double ratio = chain.mode_frequencies()[m] / w0;
            CHECK(ratio * ratio == doctest::Approx(ref[m]).epsilon(1e-9));
        }
    }
}

TEST_CASE("axial scaling rule") {
    const double w = axial_frequency(5, mhz_to_rad_s(5.0));
    CHECK(rad_s_to_mhz(w) == doctest::Approx(5.0 / (0.65 * std::pow(5.0, 0.865))).epsilon(1e-14));
    TrapConfig c;
    c.num_ions = 5;
    CHECK(c.axial_frequency() == doctest::Approx(w));
}

TEST_CASE("lamb-dicke parameter") {
    const double k = kTwoPi / 393.37e-9;
    const double mass = 39.9626 * kConstants.atomic_mass_unit;
    const double w = mhz_to_rad_s(1.0);
    CHECK(lamb_dicke(k, w, mass) == doctest::Approx(k * std::sqrt(kConstants.hbar / (2.0 * mass * w))));
}

TEST_CASE("property: random chains are orthonormal, balanced and mirror symmetric") {
    std::mt19937_64 rng(20260114);
    std::uniform_int_distribution<int> pick_n(2, 40);
    std::uniform_real_distribution<double> pick_w(0.3, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = pick_n(rng);
        const TrapConfig cfg = harmonic(n, pick_w(rng));
        CAPTURE(n);
        const ChainModel chain = ChainModel::build(cfg);
        const Eigen::MatrixXd &b = chain.couplings();
        CHECK((b * b.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
        // Centre of mass at the trap frequency and the breathing mode at sqrt(3) of it.
        CHECK(chain.mode_frequencies()[0] == doctest::Approx(cfg.axial_frequency()).epsilon(1e-9));
        CHECK(chain.mode_frequencies()[1] / chain.mode_frequencies()[0] ==
              doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(b(0, i)) == doctest::Approx(1.0 / std::sqrt(n)).epsilon(1e-9));
        }
        const auto &x = chain.positions();
        const auto g = potential_gradient(cfg, x);
        const double force_scale = cfg.ion_mass * cfg.axial_frequency() * cfg.axial_frequency() *
                                   chain.length_scale();
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(g[i]) < 1e-9 * force_scale);
            CHECK(x[i] == doctest::Approx(-x[n - 1 - i]).epsilon(1e-12));
            if (i > 0) {
                CHECK(x[i] > x[i - 1]);
            }
        }
        for (int m = 1; m < n; ++m) {
            CHECK(chain.mode_frequencies()[m] > chain.mode_frequencies()[m - 1]);
        }
    }
}

TEST_CASE("hessian is the curvature of the potential") {
    const TrapConfig cfg = harmonic(6);
    const auto x = equilibrium_positions(cfg);
    const Eigen::MatrixXd h = hessian(cfg, x);
    const double step = 1e-4 * (x[1] - x[0]);
    for (int i = 0; i < 6; ++i) {
        auto plus = x, minus = x;
        plus[i] += step;
        minus[i] -= step;
        const auto gp = potential_gradient(cfg, plus);
        const auto gm = potential_gradient(cfg, minus);
        for (int j = 0; j < 6; ++j) {
            const double fd = (gp[j] - gm[j]) / (2.0 * step) / cfg.ion_mass;
            CHECK(fd == doctest::Approx(h(j, i)).epsilon(1e-6));
        }
    }
}

TEST_CASE("quartic trap without harmonic term confines the chain") {
    TrapConfig cfg;
    cfg.num_ions = 8;
    cfg.axial_frequency_override = 0.0;
    cfg.quartic_coefficient = 1e9;
    const ChainModel chain = ChainModel::build(cfg);
    const auto g = potential_gradient(cfg, chain.positions());
    const TrapScales s = TrapScales::from(cfg);
    CHECK(s.quartic == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : g) {
        CHECK(std::abs(v) < 1e-9 * cfg.ion_mass * s.frequency * s.frequency * s.length);
    }
    // Quartic chains are more uniformly spaced than harmonic ones.
    const auto &x = chain.positions();
    const ChainModel ref = ChainModel::build(harmonic(8));
    const auto &y = ref.positions();
    CHECK(std::abs((x[4] - x[3]) / (x[1] - x[0]) - 1.0) < std::abs((y[4] - y[3]) / (y[1] - y[0]) - 1.0));
}

TEST_CASE("invalid traps are rejected") {
    TrapConfig c;
    c.num_ions = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = TrapConfig{};
    c.axial_frequency_override = 0.0;
    CHECK_THROWS_AS(ChainModel::build(c), ConfigError);
    c = TrapConfig{};
    c.num_ions = 3;
    c.radial_frequency = -1.0;
    CHECK_THROWS_AS(ChainModel::build(c), ConfigError);
}
