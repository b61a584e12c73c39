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

#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "fastgate/errors.hpp"
#include "fastgate/lattice.hpp"

using namespace fastgate;

namespace {

// Odometer over the box, calling fn on each point.
template <class Fn>
void for_each_point(const std::vector<long> &lo, const std::vector<long> &hi, Fn &&fn) {
    std::vector<long> k = lo;
    for (;;) {
        fn(k);
        std::size_t i = 0;
        while (i < k.size() && k[i] == hi[i]) {
            k[i] = lo[i];
            ++i;
        }
        if (i == k.size()) {
            return;
        }
        ++k[i];
    }
}

long abs_sum(const std::vector<long> &k) {
    long s = 0;
    for (long v : k) {
        s += std::abs(v);
    }
    return s;
}

}  // namespace

TEST_CASE("nearest lattice points match brute force") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4;
        Eigen::MatrixXd A(6, n);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < n; ++j) {
                A(i, j) = g(rng);
            }
        }
        Eigen::VectorXd y(6);
        for (int i = 0; i < 6; ++i) {
            y[i] = 3.0 * g(rng);
        }
        const std::vector<long> lo(n, -3), hi(n, 3);
        const long cap = trial % 2 == 0 ? -1 : 5;
        std::vector<std::pair<double, std::vector<long>>> all;
        for_each_point(lo, hi, [&](const std::vector<long> &k) {
            if (cap >= 0 && abs_sum(k) > cap) {
                return;
            }
            Eigen::VectorXd kv(n);
            for (int j = 0; j < n; ++j) {
                kv[j] = static_cast<double>(k[j]);
            }
            all.emplace_back((A * kv - y).squaredNorm(), k);
        });
        std::sort(all.begin(), all.end());
        LatticeLimits limits;
        limits.max_abs_sum = cap;
        const auto got = nearest_lattice_points(A, y, lo, hi, 5, limits);
        REQUIRE(got.size() == 5);
        for (int i = 0; i < 5; ++i) {
            CHECK(got[i].cost == doctest::Approx(all[i].first).epsilon(1e-10));
        }
        CHECK(got[0].k == all[0].second);
    }
}

TEST_CASE("ellipsoid enumeration visits exactly the points inside") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5;
        // Rank-deficient on purpose: three rows.
        Eigen::MatrixXd L(3, n);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < n; ++j) {
                L(i, j) = g(rng);
            }
        }
        const Eigen::MatrixXd Q = L.transpose() * L;
        const std::vector<long> lo(n, -2), hi(n, 2);
        const double r = 2.0 + std::abs(g(rng));
        LatticeLimits limits;
        limits.max_abs_sum = trial % 2 == 0 ? -1 : 6;
        std::set<std::vector<long>> expect;
        for_each_point(lo, hi, [&](const std::vector<long> &k) {
            if (limits.max_abs_sum >= 0 && abs_sum(k) > limits.max_abs_sum) {
                return;
            }
            Eigen::VectorXd kv(n);
            for (int j = 0; j < n; ++j) {
                kv[j] = static_cast<double>(k[j]);
            }
            if (kv.dot(Q * kv) <= r) {
                expect.insert(k);
            }
        });
        std::set<std::vector<long>> seen;
        const auto stats = enumerate_ellipsoid(
            Q, lo, hi, limits, [&] { return r; },
            [&](std::span<const long> k) { seen.emplace(k.begin(), k.end()); });
        CHECK(stats.complete);
        // Every inside point is visited; extras are only allowed within the ridge slack.
        for (const auto &k : expect) {
            CHECK(seen.count(k) == 1);
        }
        for (const auto &k : seen) {
            Eigen::VectorXd kv(n);
            for (int j = 0; j < n; ++j) {
                kv[j] = static_cast<double>(k[j]);
            }
            CHECK(kv.dot(Q * kv) <= r * (1.0 + 1e-6));
        }
    }
}

TEST_CASE("shrinking radius and node budget") {
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(3, 3);
    const std::vector<long> lo(3, -3), hi(3, 3);
    double r = 100.0;
    double best = 1e9;
    const auto stats = enumerate_ellipsoid(
        Q, lo, hi, {}, [&] { return r; },
        [&](std::span<const long> k) {
            const double c = static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) + 0.5;
            best = std::min(best, c);
            r = best;
        });
    CHECK(stats.complete);
    CHECK(best == doctest::Approx(0.5));

    LatticeLimits tight;
    tight.node_budget = 10;
    const auto cut = enumerate_ellipsoid(Q, lo, hi, tight, [] { return 100.0; }, [](std::span<const long>) {});
    CHECK_FALSE(cut.complete);
    CHECK(cut.nodes == 10);
}

TEST_CASE("lattice inputs are checked") {
    const Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 2);
    const std::vector<long> lo(2, -1), hi(2, 1);
    CHECK_THROWS_AS(nearest_lattice_points(A, Eigen::VectorXd::Zero(3), lo, hi, 1), NumericalError);
    CHECK_THROWS_AS(nearest_lattice_points(A, Eigen::VectorXd::Zero(2), lo, hi, 1), ConfigError);
    Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(enumerate_ellipsoid(neg, lo, hi, {}, [] { return 1.0; }, [](std::span<const long>) {}),
                    NumericalError);
}
