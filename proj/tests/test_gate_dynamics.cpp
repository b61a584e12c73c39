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
#include "fastgate/errors.hpp"
#include "fastgate/gate_dynamics.hpp"
#include "oracles.hpp"

using namespace fastgate;

namespace {

ChainModel chain_of(int n) {
    TrapConfig c;
    c.num_ions = n;
    return ChainModel::build(c);
}

// Trapezoid rule for int (M/2)(V^2 - w^2 Q^2) dt along the free orbit.
double action_by_quadrature(const ModeState &s, double w, double duration, double mass) {
    const int steps = 20000;
    double total = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double t = duration * i / steps;
        const double q = s.position * std::cos(w * t) + s.velocity / w * std::sin(w * t);
        const double v = s.velocity * std::cos(w * t) - w * s.position * std::sin(w * t);
        const double lag = 0.5 * mass * (v * v - w * w * q * q);
        total += (i == 0 || i == steps ? 0.5 : 1.0) * lag;
    }
    return total * duration / steps;
}

}  // namespace

TEST_CASE("free evolution conserves energy and composes") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double mass = 6.6e-26;
    for (int trial = 0; trial < 50; ++trial) {
        const double w = mhz_to_rad_s(1.0 + 4.0 * std::abs(u(rng)));
        const ModeState s0{1e-8 * u(rng), 1e-2 * u(rng), 0.0};
        const double t1 = 1e-6 * std::abs(u(rng));
        const double t2 = 1e-6 * std::abs(u(rng));
        const ModeState a = free_evolution(free_evolution(s0, w, t1, mass), w, t2, mass);
        const ModeState b = free_evolution(s0, w, t1 + t2, mass);
        const double e0 = s0.velocity * s0.velocity + w * w * s0.position * s0.position;
        const double eb = b.velocity * b.velocity + w * w * b.position * b.position;
        CHECK(eb == doctest::Approx(e0).epsilon(1e-12));
        CHECK(a.position == doctest::Approx(b.position).epsilon(1e-10).scale(1e-8));
        CHECK(a.velocity == doctest::Approx(b.velocity).epsilon(1e-10).scale(1e-2));
        CHECK(a.action == doctest::Approx(b.action).epsilon(1e-9).scale(std::abs(b.action) + 1e-40));
    }
}

TEST_CASE("closed-form action matches quadrature") {
    const double mass = 6.6e-26;
    const double w = mhz_to_rad_s(2.3);
    const ModeState s{3e-9, -4e-3, 0.0};
    const double t = 0.77e-6;
    const double ref = action_by_quadrature(s, w, t, mass);
    CHECK(free_evolution(s, w, t, mass).action == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("one kick displaces each mode by twice its lamb-dicke parameter") {
    const ChainModel chain = chain_of(4);
    const std::vector<Impulse> one{{0.0, 1.0}};
    const IonPair pair{1, 2};
    for (const BasisState s : kBasisStates) {
        const TrajectoryResult r = propagate(one, chain, pair, s, 0.35e-6);
        for (int m = 0; m < 4; ++m) {
            const double b = s.first * chain.coupling(m, 1) + s.second * chain.coupling(m, 2);
            CHECK(std::abs(r.residuals[m]) == doctest::Approx(2.0 * chain.lamb_dicke()[m] * std::abs(b)).epsilon(1e-12)
                      .scale(1e-9));
        }
    }
}

TEST_CASE("property: random antisymmetric sequences against the double-sum reference") {
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<int> pick_n(2, 10);
    std::uniform_int_distribution<int> pick_h(1, 8);
    std::uniform_real_distribution<double> pick_t(0.3e-6, 2.0e-6);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = pick_n(rng);
        const ChainModel chain = chain_of(n);
        std::uniform_int_distribution<int> pick_ion(0, n - 2);
        const int a = pick_ion(rng);
        const PulseGroupSequence seq = oracle::random_sequence(rng, pick_h(rng), {a, a + 1}, pick_t(rng));
        CAPTURE(trial);
        const auto imp = instantaneous_impulses(seq);
        const auto states = propagate_basis_states(imp, chain, seq.targets);
        const double theta = entangling_phase(states);
        const double ref = oracle::entangling_phase(seq, chain);
        CHECK(theta == doctest::Approx(ref).epsilon(1e-9).scale(1.0));

        const auto disp = oracle::displacements(seq, chain);
        double peak = 0.0;
        for (int z : seq.group_sizes) {
            peak = std::max(peak, 2.0 * std::abs(z));
        }
        for (const auto &st : states) {
            for (int m = 0; m < n; ++m) {
                const double b = st.basis.first * chain.coupling(m, a) + st.basis.second * chain.coupling(m, a + 1);
                CHECK(std::abs(st.residuals[m]) ==
                      doctest::Approx(std::abs(b * disp[m])).epsilon(1e-9).scale(chain.lamb_dicke()[m]));
                // Momentum is restored: the midpoint-referred residual is pure position.
                CHECK(std::abs(st.residuals[m].imag()) < 1e-12 * peak * chain.lamb_dicke()[m]);
            }
        }
    }
}

TEST_CASE("phase does not depend on where the window closes") {
    const ChainModel chain = chain_of(3);
    std::mt19937_64 rng(11);
    const PulseGroupSequence seq = oracle::random_sequence(rng, 4, {0, 1}, 1e-6);
    const auto imp = instantaneous_impulses(seq);
    const TrajectoryResult a = propagate(imp, chain, seq.targets, {1, -1});
    const TrajectoryResult b = propagate(imp, chain, seq.targets, {1, -1}, 5e-6);
    CHECK(a.phase == doctest::Approx(b.phase).epsilon(1e-9));
    for (int m = 0; m < 3; ++m) {
        CHECK(std::abs(a.residuals[m] - b.residuals[m]) < 1e-9 * (1.0 + std::abs(a.residuals[m])));
    }
}

TEST_CASE("sampled trajectory ends where propagation ends") {
    const ChainModel chain = chain_of(3);
    std::mt19937_64 rng(12);
    const PulseGroupSequence seq = oracle::random_sequence(rng, 3, {1, 2}, 1e-6);
    const auto imp = instantaneous_impulses(seq);
    const double t0 = -0.6e-6, t1 = 0.6e-6;
    const auto samples = sample_trajectory(imp, chain, seq.targets, {1, 1}, t0, t1, 50);
    REQUIRE(samples.size() == 150);
    const TrajectoryResult r = propagate(imp, chain, seq.targets, {1, 1}, t1);
    for (int m = 0; m < 3; ++m) {
        const TrajectorySample &s = samples[147 + m];
        CHECK(s.time == doctest::Approx(t1));
        CHECK(s.position == doctest::Approx(r.final_states[m].position).scale(1e-9));
        CHECK(s.velocity == doctest::Approx(r.final_states[m].velocity).scale(1e-3));
    }
}

TEST_CASE("bursts land on the repetition grid") {
    const double rate = 300e6;
    const double period = 1.0 / rate;
    const std::vector<int> z{3, -4, 2};
    const std::vector<double> t{0.1e-6, 0.25e-6, 0.4e-6};
    const PulseGroupSequence seq = PulseGroupSequence::from_half(z, t, {0, 1}, 1e-6);
    const KickTrain train = expand_groups(seq, rate);
    CHECK_NOTHROW(train.validate());
    CHECK(train.sdk_count() == 18);
    for (std::size_t i = 0; i < train.kicks.size(); ++i) {
        const Kick &k = train.kicks[i];
        const Kick &mirror = train.kicks[train.kicks.size() - 1 - i];
        CHECK(k.time == doctest::Approx(-mirror.time));
        CHECK(k.sign == -mirror.sign);
        CHECK(std::abs(k.time / period - std::round(k.time / period)) < 1e-9);
    }
    // Odd bursts centre on a grid point, even ones between two.
    double centre = 0.0;
    for (int k = 9; k < 12; ++k) {
        centre += train.kicks[k].time;
    }
    CHECK(std::abs(centre / 3.0 - 0.1e-6) <= 0.5 * period);

    const PulseGroupSequence crowded = PulseGroupSequence::from_half(std::vector<int>{10, 10},
                                                                     std::vector<double>{0.02e-6, 0.03e-6}, {0, 1},
                                                                     1e-6);
    CHECK_THROWS_AS(expand_groups(crowded, rate), ConfigError);
}

TEST_CASE("malformed inputs are rejected") {
    PulseGroupSequence seq = PulseGroupSequence::from_half(std::vector<int>{1, 2}, std::vector<double>{1e-7, 2e-7},
                                                           {0, 1}, 1e-6);
    CHECK_NOTHROW(seq.validate());
    seq.group_sizes[0] = 5;
    CHECK_THROWS_AS(seq.validate(), ConfigError);
    seq = PulseGroupSequence::from_half(std::vector<int>{1}, std::vector<double>{0.6e-6}, {0, 1}, 1e-6);
    CHECK_THROWS_AS(seq.validate(), ConfigError);

    KickTrain train;
    train.repetition_rate = 1e8;
    train.kicks = {{0.0, 1}, {0.5e-8, 1}};
    CHECK_THROWS_AS(train.validate(), ConfigError);
    train.kicks = {{0.0, 1}, {1e-8, 2}};
    CHECK_THROWS_AS(train.validate(), ConfigError);

    const ChainModel chain = chain_of(2);
    const std::vector<Impulse> backwards{{1e-7, 1.0}, {0.0, -1.0}};
    CHECK_THROWS_AS(propagate(backwards, chain, {0, 1}, {1, 1}), ConfigError);
    CHECK_THROWS_AS(propagate(backwards, chain, {0, 2}, {1, 1}), ConfigError);
}
