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

#include "doctest.h"
#include "fastgate/nonlinear.hpp"

using namespace fastgate;

namespace {

KickTrain short_train(double rate, IonPair targets) {
    const auto seq = PulseGroupSequence::from_half(std::vector<int>{2, -3, 2}, std::vector<double>{0.1e-6, 0.25e-6, 0.4e-6},
                                                   targets, 1e-6);
    return expand_groups(seq, rate);
}

}  // namespace

TEST_CASE("harmonic-only integration reproduces the piecewise propagator") {
    for (int n : {2, 3}) {
        TrapConfig cfg;
        cfg.num_ions = n;
        const ChainModel chain = ChainModel::build(cfg);
        const KickTrain train = short_train(300e6, {0, 1});
        NonlinearOptions opt;
        opt.harmonic_only = true;
        for (const BasisState s : kBasisStates) {
            const TrajectoryResult exact = propagate(train, chain, s);
            const TrajectoryResult ode = propagate_nonlinear(train, chain, s, opt);
            CHECK(ode.phase == doctest::Approx(exact.phase).epsilon(1e-10).scale(1.0));
            for (int m = 0; m < n; ++m) {
                CHECK(std::abs(ode.residuals[m] - exact.residuals[m]) < 1e-10);
            }
        }
        const GateReport a = evaluate_train(train, chain, ThermalSpec::uniform(0.1));
        const GateReport b = evaluate_nonlinear(train, chain, ThermalSpec::uniform(0.1), PulseCounting::kPulses, opt);
        CHECK(std::abs(a.ideal_infidelity - b.ideal_infidelity) < 1e-10);
    }
}

TEST_CASE("anharmonic corrections grow as the spacing shrinks") {
    // At fixed kick timing the excursion is set by the kick velocity and the
    // gate duration, while the ion spacing falls as w^(-2/3).
    double last = 0.0;
    for (double mhz : {0.5, 1.0, 2.0}) {
        TrapConfig cfg;
        cfg.num_ions = 2;
        cfg.axial_frequency_override = mhz_to_rad_s(mhz);
        const ChainModel chain = ChainModel::build(cfg);
        const KickTrain train = short_train(300e6, {0, 1});
        const TrajectoryResult lin = propagate(train, chain, {1, -1});
        const TrajectoryResult non = propagate_nonlinear(train, chain, {1, -1});
        const double diff = std::abs(non.phase - lin.phase);
        CHECK(diff > last);
        last = diff;
    }
}

TEST_CASE("common-mode kicks see no anharmonicity in a harmonic trap") {
    // With both ions pushed the same way only the centre of mass moves, which
    // leaves the Coulomb term untouched.
    TrapConfig cfg;
    cfg.num_ions = 2;
    const ChainModel chain = ChainModel::build(cfg);
    const KickTrain train = short_train(300e6, {0, 1});
    const TrajectoryResult lin = propagate(train, chain, {1, 1});
    const TrajectoryResult non = propagate_nonlinear(train, chain, {1, 1});
    CHECK(non.phase == doctest::Approx(lin.phase).epsilon(1e-9).scale(1.0));
}
