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


#include "fastgate/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "fastgate/errors.hpp"

namespace fastgate {

std::vector<LatticePoint> nearest_lattice_points(const Eigen::MatrixXd &A, const Eigen::VectorXd &y,
                                                 std::span<const long> lo, std::span<const long> hi, int count,
                                                 const LatticeLimits &limits) {
    const int n = static_cast<int>(A.cols());
    if (A.rows() < n || y.size() != A.rows() || static_cast<int>(lo.size()) != n ||
        static_cast<int>(hi.size()) != n || count < 1) {
        throw ConfigError("nearest_lattice_points: inconsistent dimensions");
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    const Eigen::VectorXd qy = qr.householderQ().transpose() * y;
    const double floor_cost = qy.tail(qy.size() - n).squaredNorm();
    const Eigen::VectorXd yh = qy.head(n);
    for (int i = 0; i < n; ++i) {
        if (!(std::abs(R(i, i)) > 1e-14 * (1.0 + R.cwiseAbs().maxCoeff()))) {
            throw NumericalError("nearest_lattice_points: rank-deficient system");
        }
    }

    std::vector<LatticePoint> kept;
    std::vector<long> k(n, 0);
    auto radius = [&] {
        return static_cast<int>(kept.size()) < count ? std::numeric_limits<double>::infinity() : kept.back().cost;
    };

    std::int64_t nodes = 0;
    std::function<void(int, double, long)> visit = [&](int i, double partial, long used) {
        if (i < 0) {
            LatticePoint p{partial + floor_cost, k};
            kept.insert(std::upper_bound(kept.begin(), kept.end(), p.cost,
                                         [](double c, const LatticePoint &q) { return c < q.cost; }),
                        std::move(p));
            if (static_cast<int>(kept.size()) > count) {
                kept.pop_back();
            }
            return;
        }
        double rest = yh[i];
        for (int j = i + 1; j < n; ++j) {
            rest -= R(i, j) * static_cast<double>(k[j]);
        }
        const double r = R(i, i);
        const double centre = rest / r;
        // Visit integers in order of distance from the centre.
        long left = static_cast<long>(std::floor(centre));
        long right = left + 1;
        left = std::min(left, hi[i]);
        right = std::max(right, lo[i]);
        for (;;) {
            const bool has_left = left >= lo[i];
            const bool has_right = right <= hi[i];
            if (!has_left && !has_right) {
                return;
            }
            long v;
            if (has_left && (!has_right || centre - left <= right - centre)) {
                v = left--;
            } else {
                v = right++;
            }
            if (limits.max_abs_sum >= 0 && used + std::abs(v) > limits.max_abs_sum) {
                continue;
            }
            if (++nodes > limits.node_budget) {
                return;
            }
            const double e = r * (static_cast<double>(v) - centre);
            const double total = partial + e * e;
            if (total + floor_cost >= radius()) {
                return;  // remaining values are farther from the centre
            }
            k[i] = v;
            visit(i - 1, total, used + std::abs(v));
        }
    };
    visit(n - 1, 0.0, 0);
    return kept;
}

EnumerationStats enumerate_ellipsoid(const Eigen::MatrixXd &Q, std::span<const long> lo, std::span<const long> hi,
                                     const LatticeLimits &limits, const std::function<double()> &radius,
                                     const std::function<void(std::span<const long>)> &leaf) {
    const int n = static_cast<int>(Q.cols());
    if (Q.rows() != n || static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n) {
        throw ConfigError("enumerate_ellipsoid: inconsistent dimensions");
    }
    // kmax2 bounds |k|^2 over the feasible set; the ridge adds at most ridge * kmax2.
    double kmax2 = 0.0;
    double kmax_abs = 0.0;
    for (int i = 0; i < n; ++i) {
        const double m = static_cast<double>(std::max(std::abs(lo[i]), std::abs(hi[i])));
        kmax2 += m * m;
        kmax_abs = std::max(kmax_abs, m);
    }
    if (limits.max_abs_sum >= 0) {
        // With sum |k_i| <= c and |k_i| <= m, |k|^2 <= m c.
        kmax2 = std::min(kmax2, kmax_abs * static_cast<double>(limits.max_abs_sum));
    }
    const double ridge = 1e-10 * std::max(Q.trace() / std::max(n, 1), 1e-300);
    Eigen::MatrixXd Qr = Q;
    Qr.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(Qr);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("enumerate_ellipsoid: matrix is not positive semidefinite");
    }
    const Eigen::MatrixXd R = llt.matrixU();
    const double slack = ridge * kmax2;

    EnumerationStats stats;
    std::vector<long> k(n, 0);
    std::function<void(int, double, long)> visit = [&](int i, double partial, long used) {
        if (!stats.complete) {
            return;
        }
        if (i < 0) {
            leaf(k);
            return;
        }
        double s = 0.0;
        for (int j = i + 1; j < n; ++j) {
            s += R(i, j) * static_cast<double>(k[j]);
        }
        const double room = radius() + slack - partial;
        if (!(room >= 0.0)) {
            return;
        }
        const double r = R(i, i);
        const double w = std::sqrt(room);
        long a = static_cast<long>(std::ceil((-s - w) / r));
        long b = static_cast<long>(std::floor((-s + w) / r));
        long left_cap = lo[i];
        long right_cap = hi[i];
        if (limits.max_abs_sum >= 0) {
            const long rest = limits.max_abs_sum - used;
            left_cap = std::max(left_cap, -rest);
            right_cap = std::min(right_cap, rest);
        }
        a = std::max(a, left_cap);
        b = std::min(b, right_cap);
        for (long v = a; v <= b; ++v) {
            if (stats.nodes >= limits.node_budget) {
                stats.complete = false;
                return;
            }
            ++stats.nodes;
            const double e = r * static_cast<double>(v) + s;
            const double total = partial + e * e;
            if (total > radius() + slack) {
                continue;
            }
            k[i] = v;
            visit(i - 1, total, used + std::abs(v));
        }
        k[i] = 0;
    };
    visit(n - 1, 0.0, 0);
    return stats;
}

}  // namespace fastgate
