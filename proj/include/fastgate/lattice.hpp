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

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fastgate {

struct LatticePoint {
    double cost;  // |A k - y|^2
    std::vector<long> k;
};

struct LatticeLimits {
    long max_abs_sum = -1;              // sum_i |k_i| cap; negative means none
    std::int64_t node_budget = 2000000;  // search nodes before giving up
};

/// The `count` integer vectors k with lo <= k <= hi (elementwise) and the
/// smallest |A k - y|^2, best first. A needs full column rank. Depth-first
/// search over the triangular factor of A, pruned by the current count-th
/// best cost. When the node budget runs out the best points found so far are
/// returned.
std::vector<LatticePoint> nearest_lattice_points(const Eigen::MatrixXd &A, const Eigen::VectorXd &y,
                                                 std::span<const long> lo, std::span<const long> hi, int count,
                                                 const LatticeLimits &limits = {});

struct EnumerationStats {
    std::int64_t nodes = 0;
    bool complete = true;  // false when the node budget ran out
};

/// Visits every integer k with lo <= k <= hi and k^T Q k <= radius() for a
/// positive semidefinite Q. radius() is re-read after each leaf so callers
/// can shrink it as better points turn up. Singular Q is handled with a small
/// ridge whose contribution is added back to the radius, so no qualifying
/// point is skipped.
EnumerationStats enumerate_ellipsoid(const Eigen::MatrixXd &Q, std::span<const long> lo, std::span<const long> hi,
                                     const LatticeLimits &limits, const std::function<double()> &radius,
                                     const std::function<void(std::span<const long>)> &leaf);

}  // namespace fastgate
