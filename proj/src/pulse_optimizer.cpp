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


#include "fastgate/pulse_optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>

#include "fastgate/errors.hpp"
#include "fastgate/lattice.hpp"
#include "fastgate/work_pool.hpp"

namespace fastgate {

namespace {

constexpr double kNoGateCost = (2.0 / 3.0) * kTargetPhase * kTargetPhase;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

double adjusted(double cost, int pulses, double epsilon) {
    const double x = 1.0 - pulses * epsilon;
    return 1.0 - x * x * (1.0 - cost);
}

bool same_cost(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

// Stage-1 cost as quadratic forms in the free half x = (z_1..z_h):
//   Theta = x^T P x,  motional = x^T G x.
struct Forms {
    int h = 0;
    std::vector<double> times;  // t_j = j T_G / N_k
    std::vector<double> P;      // row-major h x h
    std::vector<double> G;
    Eigen::MatrixXd Pm;         // same forms as matrices
    Eigen::MatrixXd L;          // G = L^T L
};

Forms build_forms(const ChainModel &chain, IonPair targets, double gate_time, int group_count,
                  std::span<const double> occupations) {
    Forms f;
    f.h = group_count / 2;
    const int h = f.h;
    for (int j = 1; j <= h; ++j) {
        f.times.push_back(j * gate_time / group_count);
    }
    f.P.assign(static_cast<std::size_t>(h * h), 0.0);
    f.G.assign(static_cast<std::size_t>(h * h), 0.0);

    // Full list T = (-t_h .. -t_1, t_1 .. t_h); Z = E x with Z for -t_j equal to -x_j.
    std::vector<double> T(2 * h);
    std::vector<int> src(2 * h);
    std::vector<int> sgn(2 * h);
    for (int j = 0; j < h; ++j) {
        T[h + j] = f.times[j];
        src[h + j] = j;
        sgn[h + j] = 1;
        T[h - 1 - j] = -f.times[j];
        src[h - 1 - j] = j;
        sgn[h - 1 - j] = -1;
    }
    for (int m = 0; m < chain.num_modes(); ++m) {
        const double w = chain.mode_frequencies()[m];
        const double eta = chain.lamb_dicke()[m];
        const double bmu = chain.coupling(m, targets.first);
        const double bnu = chain.coupling(m, targets.second);
        const double pref = -8.0 * eta * eta * bmu * bnu;
        for (int i = 0; i < 2 * h; ++i) {
            for (int k = i + 1; k < 2 * h; ++k) {
                const double wik = pref * std::sin(w * (T[k] - T[i])) * sgn[i] * sgn[k];
                // Symmetrize: half to (a, b) and half to (b, a).
                f.P[src[i] * h + src[k]] += 0.5 * wik;
                f.P[src[k] * h + src[i]] += 0.5 * wik;
            }
        }
        const double weight = (4.0 / 3.0) * (0.5 + occupations[m]) * (bmu * bmu + bnu * bnu);
        std::vector<double> a(h);
        for (int j = 0; j < h; ++j) {
            a[j] = 4.0 * eta * std::sin(w * f.times[j]);
        }
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < h; ++j) {
                f.G[i * h + j] += weight * a[i] * a[j];
            }
        }
    }
    f.Pm = Eigen::Map<const Eigen::MatrixXd>(f.P.data(), h, h);
    const Eigen::MatrixXd Gm = Eigen::Map<const Eigen::MatrixXd>(f.G.data(), h, h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Gm);
    f.L = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
    return f;
}

struct Point {
    std::vector<int> x;
    std::vector<double> u;  // P x
    std::vector<double> v;  // G x
    double theta = 0.0;
    double motional = 0.0;
    int abs_sum = 0;
    double score = 0.0;
};

// Lexicographic order used wherever two points share a cost.
bool point_less(const Point &a, const Point &b) {
    if (!same_cost(a.score, b.score)) {
        return a.score < b.score;
    }
    if (a.abs_sum != b.abs_sum) {
        return a.abs_sum < b.abs_sum;
    }
    return a.x < b.x;
}

class Searcher {
  public:
    Searcher(const Forms &forms, const Stage1Config &config) : f_(forms), c_(config) {}

    double score(double theta, double motional, int abs_sum) {
        ++evaluations_;
        const double dphi = std::abs(theta) - kTargetPhase;
        const double cost = (2.0 / 3.0) * dphi * dphi + motional;
        return adjusted(cost, pulse_count(2 * abs_sum, c_.counting), c_.epsilon);
    }

    Point make(std::vector<int> x) {
        const int h = f_.h;
        Point p;
        p.x = std::move(x);
        p.u.assign(h, 0.0);
        p.v.assign(h, 0.0);
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < h; ++j) {
                p.u[i] += f_.P[i * h + j] * p.x[j];
                p.v[i] += f_.G[i * h + j] * p.x[j];
            }
        }
        p.theta = 0.0;
        p.motional = 0.0;
        p.abs_sum = 0;
        for (int i = 0; i < h; ++i) {
            p.theta += p.x[i] * p.u[i];
            p.motional += p.x[i] * p.v[i];
            p.abs_sum += std::abs(p.x[i]);
        }
        p.score = score(p.theta, p.motional, p.abs_sum);
        return p;
    }

    void shift(Point &p, int j, int d) {
        const int h = f_.h;
        p.theta += 2.0 * d * p.u[j] + d * d * f_.P[j * h + j];
        p.motional += 2.0 * d * p.v[j] + d * d * f_.G[j * h + j];
        p.abs_sum += std::abs(p.x[j] + d) - std::abs(p.x[j]);
        p.x[j] += d;
        for (int i = 0; i < h; ++i) {
            p.u[i] += d * f_.P[i * h + j];
            p.v[i] += d * f_.G[i * h + j];
        }
    }

    // Coordinate descent with exact line search per coordinate, then pair
    // moves of +-1/+-2 when no single coordinate helps.
    void descend(Point &p, int bound) {
        const int h = f_.h;
        const int cap = c_.max_sdks / 2;
        for (int guard = 0; guard < 10000; ++guard) {
            bool improved = false;
            for (int j = 0; j < h; ++j) {
                int best_d = 0;
                double best = p.score;
                for (int val = -bound; val <= bound; ++val) {
                    const int d = val - p.x[j];
                    if (d == 0) {
                        continue;
                    }
                    const int as = p.abs_sum - std::abs(p.x[j]) + std::abs(val);
                    if (as > cap) {
                        continue;
                    }
                    const double th = p.theta + 2.0 * d * p.u[j] + d * d * f_.P[j * h + j];
                    const double mo = p.motional + 2.0 * d * p.v[j] + d * d * f_.G[j * h + j];
                    const double s = score(th, mo, as);
                    if (s < best && !same_cost(s, best)) {
                        best = s;
                        best_d = d;
                    }
                }
                if (best_d != 0) {
                    shift(p, j, best_d);
                    p.score = best;
                    improved = true;
                }
            }
            if (improved) {
                continue;
            }
            improved = pair_move(p, bound, cap);
            if (!improved) {
                break;
            }
        }
        p = make(p.x);  // drop accumulated rounding
    }

    // Continuous minimum of the ideal cost inside the box |x_j| <= bound by
    // projected Levenberg-Marquardt on r = (sqrt(2/3) dphi, L x, cap excess).
    Eigen::VectorXd relax(Eigen::VectorXd x, int bound, int iterations) {
        const int h = f_.h;
        const double cap = c_.max_sdks / 2;
        auto residual = [&](const Eigen::VectorXd &v, Eigen::MatrixXd *J) {
            Eigen::VectorXd r(h + 2);
            const Eigen::VectorXd pv = f_.Pm * v;
            const double theta = v.dot(pv);
            const double sgn = theta >= 0.0 ? 1.0 : -1.0;
            r[0] = std::sqrt(2.0 / 3.0) * (std::abs(theta) - kTargetPhase);
            r.segment(1, h) = f_.L * v;
            const double excess = v.cwiseAbs().sum() - cap;
            r[h + 1] = std::max(0.0, excess);
            if (J) {
                J->setZero(h + 2, h);
                J->row(0) = std::sqrt(2.0 / 3.0) * sgn * 2.0 * pv.transpose();
                J->middleRows(1, h) = f_.L;
                if (excess > 0.0) {
                    for (int j = 0; j < h; ++j) {
                        (*J)(h + 1, j) = v[j] >= 0.0 ? 1.0 : -1.0;
                    }
                }
            }
            ++evaluations_;
            return r;
        };
        x = x.cwiseMax(-bound).cwiseMin(bound);
        Eigen::MatrixXd J;
        Eigen::VectorXd r = residual(x, &J);
        double cost = r.squaredNorm();
        double lambda = 1e-3;
        for (int it = 0; it < iterations; ++it) {
            const Eigen::MatrixXd A = J.transpose() * J;
            const Eigen::VectorXd g = J.transpose() * r;
            bool accepted = false;
            for (int tries = 0; tries < 12 && !accepted; ++tries) {
                Eigen::MatrixXd damped = A;
                damped.diagonal().array() += lambda * (A.diagonal().array() + 1e-12);
                const Eigen::VectorXd xn = (x - damped.ldlt().solve(g)).cwiseMax(-bound).cwiseMin(bound);
                Eigen::MatrixXd Jn;
                const Eigen::VectorXd rn = residual(xn, &Jn);
                if (rn.squaredNorm() < cost) {
                    const double prev = cost;
                    x = xn;
                    r = rn;
                    J = Jn;
                    cost = rn.squaredNorm();
                    lambda = std::max(lambda * 0.3, 1e-12);
                    accepted = true;
                    if (prev - cost <= 1e-12 * prev) {
                        return x;
                    }
                } else {
                    lambda *= 10.0;
                }
            }
            if (!accepted) {
                break;
            }
        }
        return x;
    }

    // Integer points near a relaxed x under the linearized residual, with a
    // weak pull towards x so flat directions stay bounded.
    std::vector<std::vector<int>> lattice(const Eigen::VectorXd &x, int bound, int count) {
        const int h = f_.h;
        const Eigen::VectorXd px = f_.Pm * x;
        const double theta = x.dot(px);
        const double sgn = theta >= 0.0 ? 1.0 : -1.0;
        Eigen::MatrixXd J(1 + h, h);
        J.row(0) = std::sqrt(2.0 / 3.0) * sgn * 2.0 * px.transpose();
        J.bottomRows(h) = f_.L;
        Eigen::VectorXd r(1 + h);
        r[0] = std::sqrt(2.0 / 3.0) * (std::abs(theta) - kTargetPhase);
        r.tail(h) = f_.L * x;
        const double ridge = 1e-4 * std::max(J.cwiseAbs().maxCoeff(), 1e-300);
        Eigen::MatrixXd A(1 + 2 * h, h);
        A.topRows(1 + h) = J;
        A.bottomRows(h) = ridge * Eigen::MatrixXd::Identity(h, h);
        Eigen::VectorXd y(1 + 2 * h);
        y.head(1 + h) = J * x - r;
        y.tail(h) = ridge * x;
        const std::vector<long> lo(h, -bound), hi(h, bound);
        LatticeLimits limits;
        limits.max_abs_sum = c_.max_sdks / 2;
        limits.node_budget = 200000;
        const auto points = nearest_lattice_points(A, y, lo, hi, count, limits);
        std::vector<std::vector<int>> out;
        for (const auto &p : points) {
            out.emplace_back(p.k.begin(), p.k.end());
        }
        return out;
    }

    // Every point whose motional cost lies below the top_k-th best score, which
    // bounds the score from below. Adds those that rank into `optima`. Returns
    // false when the node budget ran out first.
    bool enumerate(std::vector<Point> &optima, int bound, std::int64_t budget) {
        const int h = f_.h;
        std::vector<Point> top;
        std::set<std::vector<int>> seen;
        for (const Point &p : optima) {
            if (seen.insert(p.x).second) {
                top.push_back(p);
            }
        }
        std::sort(top.begin(), top.end(), point_less);
        const auto k = static_cast<std::size_t>(c_.top_k);
        if (top.size() > k) {
            top.resize(k);
        }
        auto radius = [&] {
            return top.size() < k ? std::numeric_limits<double>::infinity() : top.back().score;
        };
        std::vector<int> x(h);
        auto leaf = [&](std::span<const long> z) {
            std::copy(z.begin(), z.end(), x.begin());
            if (seen.count(x)) {
                return;
            }
            Point p = make(x);
            if (top.size() < k || point_less(p, top.back())) {
                seen.insert(p.x);
                top.insert(std::upper_bound(top.begin(), top.end(), p, point_less), std::move(p));
                if (top.size() > k) {
                    top.pop_back();
                }
            }
        };
        const Eigen::MatrixXd Gm = Eigen::Map<const Eigen::MatrixXd>(f_.G.data(), h, h);
        const std::vector<long> lo(h, -bound), hi(h, bound);
        LatticeLimits limits;
        limits.max_abs_sum = c_.max_sdks / 2;
        limits.node_budget = budget;
        const EnumerationStats stats = enumerate_ellipsoid(Gm, lo, hi, limits, radius, leaf);
        optima.insert(optima.end(), top.begin(), top.end());
        std::sort(optima.begin(), optima.end(), point_less);
        return stats.complete;
    }

    std::int64_t evaluations() const { return evaluations_; }

  private:
    bool pair_move(Point &p, int bound, int cap) {
        static constexpr int kSteps[] = {-2, -1, 1, 2};
        const int h = f_.h;
        for (int i = 0; i < h; ++i) {
            for (int j = i + 1; j < h; ++j) {
                for (int di : kSteps) {
                    const int xi = p.x[i] + di;
                    if (std::abs(xi) > bound) {
                        continue;
                    }
                    for (int dj : kSteps) {
                        const int xj = p.x[j] + dj;
                        if (std::abs(xj) > bound) {
                            continue;
                        }
                        const int as = p.abs_sum - std::abs(p.x[i]) - std::abs(p.x[j]) + std::abs(xi) + std::abs(xj);
                        if (as > cap) {
                            continue;
                        }
                        const double th = p.theta + 2.0 * di * p.u[i] + 2.0 * dj * p.u[j] +
                                          di * di * f_.P[i * h + i] + dj * dj * f_.P[j * h + j] +
                                          2.0 * di * dj * f_.P[i * h + j];
                        const double mo = p.motional + 2.0 * di * p.v[i] + 2.0 * dj * p.v[j] +
                                          di * di * f_.G[i * h + i] + dj * dj * f_.G[j * h + j] +
                                          2.0 * di * dj * f_.G[i * h + j];
                        const double s = score(th, mo, as);
                        if (s < p.score && !same_cost(s, p.score)) {
                            shift(p, i, di);
                            shift(p, j, dj);
                            p.score = s;
                            return true;
                        }
                    }
                }
            }
        }
        return false;
    }

    const Forms &f_;
    const Stage1Config &c_;
    std::int64_t evaluations_ = 0;
};

std::int64_t grid_size(int bound, int h, std::int64_t limit) {
    std::int64_t n = 1;
    for (int i = 0; i < h; ++i) {
        n *= 2 * bound + 1;
        if (n > limit) {
            return limit + 1;
        }
    }
    return n;
}

}  // namespace

int default_group_count(const ChainModel &chain, IonPair targets) {
    const int last = chain.num_ions() - 1;
    const bool edge = targets.first == 0 || targets.second == 0 || targets.first == last || targets.second == last;
    return edge ? 16 : 18;
}

std::vector<double> default_gate_time_scan() {
    std::vector<double> out;
    for (int i = 0; i <= 20; ++i) {
        out.push_back((500.0 + 50.0 * i) * 1e-9);
    }
    return out;
}

int Stage1Config::resolved_group_count(const ChainModel &chain) const {
    return group_count > 0 ? group_count : default_group_count(chain, targets);
}

void Stage1Config::validate(const ChainModel &chain) const {
    const int n = chain.num_ions();
    if (targets.first < 0 || targets.second < 0 || targets.first >= n || targets.second >= n) {
        throw ConfigError("stage1: targets (" + std::to_string(targets.first) + ", " +
                          std::to_string(targets.second) + ") outside a " + std::to_string(n) + "-ion chain");
    }
    if (std::abs(targets.first - targets.second) != 1) {
        throw ConfigError("stage1: targets must be neighbouring ions");
    }
    if (group_count < 0 || group_count % 2 != 0) {
        throw ConfigError("stage1: group_count must be a positive even number (or 0 for the default)");
    }
    if (gate_time_scan.empty()) {
        throw ConfigError("stage1: gate_time_scan is empty");
    }
    for (double t : gate_time_scan) {
        if (!(t > 0.0)) {
            throw ConfigError("stage1: gate times must be positive");
        }
    }
    if (z_bound_schedule.empty() || z_bound_schedule.front() < 1) {
        throw ConfigError("stage1: z_bound_schedule must start at a bound >= 1");
    }
    for (std::size_t i = 1; i < z_bound_schedule.size(); ++i) {
        if (z_bound_schedule[i] <= z_bound_schedule[i - 1]) {
            throw ConfigError("stage1: z_bound_schedule must be strictly increasing");
        }
    }
    if (!(epsilon >= 0.0)) {
        throw ConfigError("stage1: epsilon must be non-negative");
    }
    if (top_k < 1 || restarts < 0 || relaxed_starts < 0 || lattice_points < 1 || max_sdks < 2 || threads < 1) {
        throw ConfigError("stage1: top_k >= 1, restarts >= 0, max_sdks >= 2 and threads >= 1 required");
    }
    if (exhaustive_threshold < 0 || enumeration_budget < 0) {
        throw ConfigError("stage1: exhaustive_threshold and enumeration_budget must be non-negative");
    }
}

bool candidate_less(double cost_a, const PulseGroupSequence &a, double cost_b, const PulseGroupSequence &b) {
    if (!same_cost(cost_a, cost_b)) {
        return cost_a < cost_b;
    }
    if (a.sdk_count() != b.sdk_count()) {
        return a.sdk_count() < b.sdk_count();
    }
    if (a.gate_time != b.gate_time) {
        return a.gate_time < b.gate_time;
    }
    return a.half_sizes() < b.half_sizes();
}

Stage1Result stage1_at_gate_time(const ChainModel &chain, const Stage1Config &config, double gate_time,
                                 std::uint64_t stream) {
    config.validate(chain);
    const int nk = config.resolved_group_count(chain);
    const std::vector<double> occ = config.thermal.occupations_for(chain);
    const Forms forms = build_forms(chain, config.targets, gate_time, nk, occ);
    const int h = forms.h;
    Searcher search(forms, config);

    // Distinct local optima, keyed by x, with the bound at which each first appeared.
    std::map<std::vector<int>, std::pair<Point, int>> found;
    // x and -x have the same cost; keep the one whose first nonzero entry is positive.
    auto record = [&](Point p, int bound) {
        const auto nz = std::find_if(p.x.begin(), p.x.end(), [](int v) { return v != 0; });
        if (nz != p.x.end() && *nz < 0) {
            for (int &v : p.x) {
                v = -v;
            }
            for (double &v : p.u) {
                v = -v;
            }
            for (double &v : p.v) {
                v = -v;
            }
        }
        found.try_emplace(p.x, std::move(p), bound);
    };

    Stage1Result result;
    std::vector<Point> seeds{search.make(std::vector<int>(h, 0))};
    double best_so_far = seeds.front().score;
    const int cap = config.max_sdks / 2;

    for (std::size_t bi = 0; bi < config.z_bound_schedule.size(); ++bi) {
        const int bound = config.z_bound_schedule[bi];
        std::vector<Point> optima;
        if (grid_size(bound, h, config.exhaustive_threshold) <= config.exhaustive_threshold) {
            // Odometer over [-bound, bound]^h, keeping the best top_k points.
            std::vector<int> x(h, -bound);
            std::vector<Point> top;
            for (;;) {
                int as = 0;
                for (int v : x) {
                    as += std::abs(v);
                }
                if (as <= cap) {
                    Point p = search.make(x);
                    if (static_cast<int>(top.size()) < config.top_k || point_less(p, top.back())) {
                        top.insert(std::upper_bound(top.begin(), top.end(), p, point_less), std::move(p));
                        if (static_cast<int>(top.size()) > config.top_k) {
                            top.pop_back();
                        }
                    }
                }
                int k = 0;
                while (k < h && x[k] == bound) {
                    x[k] = -bound;
                    ++k;
                }
                if (k == h) {
                    break;
                }
                ++x[k];
            }
            optima = std::move(top);
        } else {
            std::mt19937_64 rng = make_rng(config.seed, stream, bi);
            std::uniform_int_distribution<int> dist(-bound, bound);
            for (const Point &s : seeds) {
                Point p = s;
                search.descend(p, bound);
                optima.push_back(std::move(p));
            }
            std::uniform_real_distribution<double> unit(-1.0, 1.0);
            for (int r = 0; r < config.relaxed_starts; ++r) {
                Eigen::VectorXd x0(h);
                for (int j = 0; j < h; ++j) {
                    x0[j] = bound * unit(rng);
                }
                const Eigen::VectorXd xr = search.relax(x0, bound, 100);
                for (auto &x : search.lattice(xr, bound, config.lattice_points)) {
                    Point p = search.make(std::move(x));
                    search.descend(p, bound);
                    optima.push_back(std::move(p));
                }
            }
            for (int r = 0; r < config.restarts; ++r) {
                std::vector<int> x(h);
                int as = 0;
                for (int j = 0; j < h; ++j) {
                    x[j] = dist(rng);
                    as += std::abs(x[j]);
                }
                for (int j = h - 1; j >= 0 && as > cap; --j) {
                    as -= std::abs(x[j]);
                    x[j] = 0;
                }
                Point p = search.make(std::move(x));
                search.descend(p, bound);
                optima.push_back(std::move(p));
            }
            std::sort(optima.begin(), optima.end(), point_less);
            if (config.enumeration_budget > 0 && !search.enumerate(optima, bound, config.enumeration_budget)) {
                ++result.telemetry.incomplete_enumerations;
            }
        }
        for (const Point &p : optima) {
            record(p, bound);
        }
        best_so_far = std::min(best_so_far, optima.front().score);
        result.telemetry.best_cost_by_bound.push_back(best_so_far);
        // Warm start: the best few points of this bound seed the next.
        seeds.assign(optima.begin(), optima.begin() + std::min<std::size_t>(optima.size(), 3));
    }
    result.telemetry.evaluations = search.evaluations();

    std::vector<std::pair<Point, int>> ranked;
    for (auto &[x, entry] : found) {
        if (entry.first.score < kNoGateCost && entry.first.abs_sum > 0) {
            ranked.push_back(entry);
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) { return point_less(a.first, b.first); });
    if (static_cast<int>(ranked.size()) > config.top_k) {
        ranked.resize(static_cast<std::size_t>(config.top_k));
    }
    for (const auto &[p, bound] : ranked) {
        int keep = h;
        while (keep > 0 && p.x[keep - 1] == 0) {
            --keep;
        }
        const std::vector<int> sizes(p.x.begin(), p.x.begin() + keep);
        const std::vector<double> times(forms.times.begin(), forms.times.begin() + keep);
        Stage1Candidate c;
        c.sequence = PulseGroupSequence::from_half(sizes, times, config.targets, gate_time * keep / h);
        c.report = analytic_report(c.sequence, chain, config.thermal, config.counting);
        c.selection_cost = c.report.adjusted_infidelity(config.epsilon);
        c.scan_gate_time = gate_time;
        c.bound = bound;
        result.candidates.push_back(std::move(c));
    }
    return result;
}

Stage1Result stage1(const ChainModel &chain, const Stage1Config &config) {
    config.validate(chain);
    const std::size_t n = config.gate_time_scan.size();
    std::vector<Stage1Result> parts(n);
    parallel_for(n, config.threads, [&](std::size_t i) {
        parts[i] = stage1_at_gate_time(chain, config, config.gate_time_scan[i], i);
    });

    Stage1Result out;
    out.telemetry.best_cost_by_bound.assign(config.z_bound_schedule.size(), std::numeric_limits<double>::infinity());
    for (auto &part : parts) {
        out.telemetry.evaluations += part.telemetry.evaluations;
        out.telemetry.incomplete_enumerations += part.telemetry.incomplete_enumerations;
        for (std::size_t b = 0; b < part.telemetry.best_cost_by_bound.size(); ++b) {
            out.telemetry.best_cost_by_bound[b] =
                std::min(out.telemetry.best_cost_by_bound[b], part.telemetry.best_cost_by_bound[b]);
        }
        for (auto &c : part.candidates) {
            out.candidates.push_back(std::move(c));
        }
    }
    std::stable_sort(out.candidates.begin(), out.candidates.end(), [](const auto &a, const auto &b) {
        return candidate_less(a.selection_cost, a.sequence, b.selection_cost, b.sequence);
    });
    if (static_cast<int>(out.candidates.size()) > config.top_k) {
        out.candidates.resize(static_cast<std::size_t>(config.top_k));
    }
    return out;
}

void Stage2Config::validate() const {
    if (!(repetition_rate > 0.0)) {
        throw ConfigError("stage2: repetition_rate must be positive");
    }
    if (!(timing_variation > 0.0 && timing_variation <= 0.5)) {
        throw ConfigError("stage2: timing_variation must lie in (0, 0.5]");
    }
    if (restarts < 0 || max_sweeps < 1 || max_step < 2 || max_step % 2 != 0) {
        throw ConfigError("stage2: restarts >= 0, max_sweeps >= 1 and an even max_step >= 2 required");
    }
    if (exhaustive_limit < 0) {
        throw ConfigError("stage2: exhaustive_limit must be non-negative");
    }
    if (combo_depth < 2 || combo_depth > 6) {
        throw ConfigError("stage2: combo_depth must lie in [2, 6]");
    }
}

namespace {

// Positive-half groups placed by their centres c_j in half-period units.
// Odd bursts need even c_j, even bursts odd c_j. Gap g_1 = c_1 is half the
// midpoint gap; g_j = c_j - c_{j-1}.
struct Layout {
    std::vector<int> size;    // |z_j| > 0
    std::vector<int> sign;    // +-1
    std::vector<int> parity;  // required parity of c_j
    std::vector<long> lo;     // allowed gap window, half periods
    std::vector<long> hi;
    double period = 0.0;
    IonPair targets;

    int groups() const { return static_cast<int>(size.size()); }

    long min_gap(int j) const { return j == 0 ? size[0] + 1 : size[j] + size[j - 1]; }
    int gap_parity(int j) const { return j == 0 ? parity[0] : (parity[j] + parity[j - 1]) % 2; }

    // Smallest and largest allowed gap with the right parity.
    long first_allowed(int j) const {
        long g = std::max(lo[j], min_gap(j));
        if (((g % 2) + 2) % 2 != gap_parity(j)) {
            ++g;
        }
        return g;
    }
    long last_allowed(int j) const {
        long g = hi[j];
        if (((g % 2) + 2) % 2 != gap_parity(j)) {
            --g;
        }
        return g;
    }
    bool allowed(int j, long g) const {
        return g >= first_allowed(j) && g <= last_allowed(j) && ((g % 2) + 2) % 2 == gap_parity(j);
    }
    long max_centre() const {
        long c = 0;
        for (int j = 0; j < groups(); ++j) {
            c += last_allowed(j);
        }
        return c;
    }

    int sdk_count() const {
        int n = 0;
        for (int s : size) {
            n += 2 * s;
        }
        return n;
    }

    PulseGroupSequence sequence(std::span<const long> gaps) const {
        std::vector<int> z;
        std::vector<double> t;
        long c = 0;
        for (int j = 0; j < groups(); ++j) {
            c += gaps[j];
            z.push_back(sign[j] * size[j]);
            t.push_back(0.5 * static_cast<double>(c) * period);
        }
        return PulseGroupSequence::from_half(z, t, targets, static_cast<double>(c) * period);
    }
};

Layout make_layout(const PulseGroupSequence &seq, double rate, double variation) {
    Layout L;
    L.period = 1.0 / rate;
    L.targets = seq.targets;
    const std::vector<int> z = seq.half_sizes();
    const std::vector<double> t = seq.half_times();
    double prev = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (z[j] == 0) {
            continue;
        }
        const int n = std::abs(z[j]);
        L.size.push_back(n);
        L.sign.push_back(z[j] > 0 ? 1 : -1);
        L.parity.push_back(n % 2 == 0 ? 1 : 0);
        const double nominal = 2.0 * (t[j] - prev) / L.period;
        L.lo.push_back(static_cast<long>(std::ceil((1.0 - variation) * nominal - 1e-9)));
        L.hi.push_back(static_cast<long>(std::floor((1.0 + variation) * nominal + 1e-9)));
        prev = t[j];
    }
    if (L.size.empty()) {
        throw ConfigError("stage2: candidate has no kicks");
    }
    for (int j = 0; j < L.groups(); ++j) {
        if (L.first_allowed(j) > L.last_allowed(j)) {
            throw ConfigError("stage2: no grid point within the timing window for group " + std::to_string(j + 1) +
                              "; the repetition rate is too low for this gate time");
        }
    }
    return L;
}

// Stage-1 centres snapped to the grid, each gap clamped into its window.
std::vector<long> snapped_gaps(const PulseGroupSequence &seq, const Layout &L) {
    const std::vector<int> z = seq.half_sizes();
    const std::vector<double> t = seq.half_times();
    std::vector<long> gaps;
    long prev_c = 0;
    int j = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] == 0) {
            continue;
        }
        const double half_units = 2.0 * t[i] / L.period;
        const long c = 2 * std::lround((half_units - L.parity[j]) / 2.0) + L.parity[j];
        const long g = std::clamp(c - prev_c, L.first_allowed(j), L.last_allowed(j));
        gaps.push_back(g);
        prev_c += g;
        ++j;
    }
    return gaps;
}

// Trajectory cost of an expanded train in closed form. A burst of n kicks
// centred at c contributes the phasor E = s D_n(w) exp(i w c P / 2) with the
// Dirichlet kernel D_n(w) = sin(n w P / 2) / sin(w P / 2); then
//   dalpha_m = 4 eta Im(sum_j E_j)
//   Theta    = -sum_m 8 eta^2 b_mu b_nu (2 W - Im(E_tot^2) + 2 sum_{i<j} Im(E_j conj(E_i)))
// where W sums sin(w (t_l - t_k)) over kick pairs inside each burst.
class KickSumCost {
  public:
    KickSumCost(const Layout &layout, const ChainModel &chain, const ThermalSpec &thermal, double epsilon,
                PulseCounting counting)
        : L_(layout), epsilon_(epsilon), pulses_(pulse_count(layout.sdk_count(), counting)) {
        const std::vector<double> occ = thermal.occupations_for(chain);
        const int modes = chain.num_modes();
        const int n = L_.groups();
        const long cmax = L_.max_centre();
        phase_weight_.resize(modes);
        disp_weight_.resize(modes);
        burst_.resize(static_cast<std::size_t>(modes * n));
        table_.resize(static_cast<std::size_t>(modes * (cmax + 1)));
        stride_ = cmax + 1;
        constant_.assign(modes, 0.0);
        for (int m = 0; m < modes; ++m) {
            const double w = chain.mode_frequencies()[m];
            const double eta = chain.lamb_dicke()[m];
            const double bmu = chain.coupling(m, L_.targets.first);
            const double bnu = chain.coupling(m, L_.targets.second);
            phase_weight_[m] = -8.0 * eta * eta * bmu * bnu;
            disp_weight_[m] = (4.0 / 3.0) * (0.5 + occ[m]) * (bmu * bmu + bnu * bnu) * 16.0 * eta * eta;
            const double x = 0.5 * w * L_.period;
            for (int j = 0; j < n; ++j) {
                const int size = L_.size[j];
                const double s = std::sin(x);
                const double kernel = std::abs(s) > 1e-300 ? std::sin(size * x) / s : size;
                burst_[m * n + j] = L_.sign[j] * kernel;
                double within = 0.0;
                for (int d = 1; d < size; ++d) {
                    within += (size - d) * std::sin(w * d * L_.period);
                }
                constant_[m] += 2.0 * within;
            }
            for (long c = 0; c <= cmax; ++c) {
                table_[m * stride_ + c] = std::polar(1.0, x * static_cast<double>(c));
            }
        }
    }

    double ideal(std::span<const long> gaps) {
        ++evaluations_;
        const int n = L_.groups();
        centres_.resize(n);
        long c = 0;
        for (int j = 0; j < n; ++j) {
            c += gaps[j];
            centres_[j] = c;
        }
        double theta = 0.0;
        double motional = 0.0;
        const int modes = static_cast<int>(phase_weight_.size());
        for (int m = 0; m < modes; ++m) {
            std::complex<double> prefix{};
            double ordered = 0.0;
            for (int j = 0; j < n; ++j) {
                const std::complex<double> e = burst_[m * n + j] * table_[m * stride_ + centres_[j]];
                ordered += (e * std::conj(prefix)).imag();
                prefix += e;
            }
            theta += phase_weight_[m] * (constant_[m] + 2.0 * ordered - (prefix * prefix).imag());
            motional += disp_weight_[m] * prefix.imag() * prefix.imag();
        }
        const double dphi = std::abs(theta) - kTargetPhase;
        return (2.0 / 3.0) * dphi * dphi + motional;
    }

    double operator()(std::span<const long> gaps) { return adjusted(ideal(gaps), pulses_, epsilon_); }

    std::int64_t evaluations() const { return evaluations_; }

    /// Number of grid points in the window, saturating at `cap`.
    std::int64_t window_size(std::int64_t cap) const {
        std::int64_t total = 1;
        for (int j = 0; j < L_.groups(); ++j) {
            const std::int64_t choices = (L_.last_allowed(j) - L_.first_allowed(j)) / 2 + 1;
            if (total > cap / choices) {
                return cap;
            }
            total *= choices;
        }
        return total;
    }

    /// Best point of the whole window by depth-first enumeration, carrying
    /// the per-mode prefix sums so each node costs one pass over the modes.
    std::vector<long> exhaustive() {
        const int n = L_.groups();
        const int modes = static_cast<int>(phase_weight_.size());
        std::vector<double> pre_re((n + 1) * modes, 0.0), pre_im((n + 1) * modes, 0.0), ord((n + 1) * modes, 0.0);
        std::vector<long> gaps(n), best(n);
        double best_cost = std::numeric_limits<double>::infinity();
        std::function<void(int, long)> visit = [&](int j, long c_prev) {
            const double *pr = &pre_re[j * modes];
            const double *pi = &pre_im[j * modes];
            const double *os = &ord[j * modes];
            double *nr = &pre_re[(j + 1) * modes];
            double *ni = &pre_im[(j + 1) * modes];
            double *no = &ord[(j + 1) * modes];
            for (long g = L_.first_allowed(j); g <= L_.last_allowed(j); g += 2) {
                const long c = c_prev + g;
                gaps[j] = g;
                for (int m = 0; m < modes; ++m) {
                    const std::complex<double> e = burst_[m * n + j] * table_[m * stride_ + c];
                    // Im(e conj(prefix))
                    no[m] = os[m] + e.imag() * pr[m] - e.real() * pi[m];
                    nr[m] = pr[m] + e.real();
                    ni[m] = pi[m] + e.imag();
                }
                if (j + 1 < n) {
                    visit(j + 1, c);
                    continue;
                }
                ++evaluations_;
                double theta = 0.0;
                double motional = 0.0;
                for (int m = 0; m < modes; ++m) {
                    theta += phase_weight_[m] * (constant_[m] + 2.0 * no[m] - 2.0 * nr[m] * ni[m]);
                    motional += disp_weight_[m] * ni[m] * ni[m];
                }
                const double dphi = std::abs(theta) - kTargetPhase;
                const double total = (2.0 / 3.0) * dphi * dphi + motional;
                if (total < best_cost) {
                    best_cost = total;
                    best = gaps;
                }
            }
        };
        visit(0, 0);
        return best;
    }

  private:
    const Layout &L_;
    double epsilon_;
    int pulses_;
    std::vector<double> phase_weight_;
    std::vector<double> disp_weight_;
    std::vector<double> burst_;
    std::vector<double> constant_;
    std::vector<std::complex<double>> table_;
    long stride_ = 0;
    std::vector<long> centres_;
    std::int64_t evaluations_ = 0;
};

// Moves: shift one gap (moves all later groups) or one centre (trades
// between adjacent gaps) by up to max_step half periods. When neither helps,
// any two gaps may change together by one grid step each, then any
// 3..combo_depth centres.
double descend(KickSumCost &cost, const Layout &L, std::vector<long> &gaps, const Stage2Config &config) {
    std::vector<long> steps;
    for (long d = 2; d <= config.max_step; d += 2) {
        steps.push_back(-d);
        steps.push_back(d);
    }
    const int n = L.groups();
    double cur = cost(gaps);
    auto accept_or_undo = [&](auto &&undo) {
        const double c = cost(gaps);
        if (c < cur && !same_cost(c, cur)) {
            cur = c;
            return true;
        }
        undo();
        return false;
    };
    auto attempt = [&](int i, long di, int j, long dj) {
        if (!L.allowed(i, gaps[i] + di) || (j >= 0 && !L.allowed(j, gaps[j] + dj))) {
            return false;
        }
        gaps[i] += di;
        if (j >= 0) {
            gaps[j] += dj;
        }
        return accept_or_undo([&] {
            gaps[i] -= di;
            if (j >= 0) {
                gaps[j] -= dj;
            }
        });
    };
    auto move_centre = [&](int j, long d) {
        gaps[j] += d;
        if (j + 1 < n) {
            gaps[j + 1] -= d;
        }
    };
    auto centres_valid = [&](std::span<const int> idx) {
        for (int j : idx) {
            if (!L.allowed(j, gaps[j]) || (j + 1 < n && !L.allowed(j + 1, gaps[j + 1]))) {
                return false;
            }
        }
        return true;
    };
    // Depth-first over index sets of size k with deltas +-2 each.
    std::vector<int> idx;
    std::function<bool(int, int)> combo = [&](int first, int k) -> bool {
        if (static_cast<int>(idx.size()) == k) {
            if (!centres_valid(idx)) {
                return false;
            }
            const double c = cost(gaps);
            if (c < cur && !same_cost(c, cur)) {
                cur = c;
                return true;
            }
            return false;
        }
        for (int j = first; j < n; ++j) {
            for (long d : {-2L, 2L}) {
                idx.push_back(j);
                move_centre(j, d);
                if (combo(j + 1, k)) {
                    idx.clear();
                    return true;
                }
                move_centre(j, -d);
                idx.pop_back();
            }
        }
        return false;
    };

    for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
        bool improved = false;
        for (int j = 0; j < n; ++j) {
            for (long d : steps) {
                improved |= attempt(j, d, -1, 0);
                if (j + 1 < n) {
                    improved |= attempt(j, d, j + 1, -d);
                }
            }
        }
        if (improved) {
            continue;
        }
        for (int i = 0; i < n && !improved; ++i) {
            for (int j = i + 1; j < n && !improved; ++j) {
                for (long di : {-2L, 2L}) {
                    for (long dj : {-2L, 2L}) {
                        if (!improved && attempt(i, di, j, dj)) {
                            improved = true;
                        }
                    }
                }
            }
        }
        for (int k = 3; k <= config.combo_depth && !improved; ++k) {
            improved = combo(0, k);
        }
        if (!improved) {
            break;
        }
    }
    return cur;
}

}  // namespace

double stage2_objective(const PulseGroupSequence &sequence, const ChainModel &chain, double repetition_rate,
                        const ThermalSpec &thermal, double epsilon, PulseCounting counting) {
    const KickTrain train = expand_groups(sequence, repetition_rate);
    return evaluate_train(train, chain, thermal, counting).adjusted_infidelity(epsilon);
}

double stage2_closed_form(const PulseGroupSequence &sequence, const ChainModel &chain, double repetition_rate,
                          const ThermalSpec &thermal, double epsilon, PulseCounting counting) {
    const Layout L = make_layout(sequence, repetition_rate, 0.5);
    KickSumCost cost(L, chain, thermal, epsilon, counting);
    // Exact centres of the snapped sequence; the window is irrelevant here.
    const KickTrain train = expand_groups(sequence, repetition_rate);
    std::vector<long> gaps;
    long prev = 0;
    std::size_t k = train.kicks.size() / 2;
    for (int j = 0; j < L.groups(); ++j) {
        const long first = std::lround(train.kicks[k].time / L.period);
        const long c = 2 * first + L.size[j] - 1;
        gaps.push_back(c - prev);
        prev = c;
        k += static_cast<std::size_t>(L.size[j]);
    }
    return cost(gaps);
}

OptimizationResult stage2(const Stage1Candidate &candidate, const ChainModel &chain, const Stage2Config &config,
                          const ThermalSpec &thermal, double epsilon, PulseCounting counting, std::uint64_t stream) {
    config.validate();
    candidate.sequence.validate();
    const Layout L = make_layout(candidate.sequence, config.repetition_rate, config.timing_variation);
    KickSumCost cost(L, chain, thermal, epsilon, counting);

    const std::vector<long> seed = snapped_gaps(candidate.sequence, L);
    std::vector<long> best = seed;
    double best_cost = cost(best);
    const bool enumerate = cost.window_size(config.exhaustive_limit + 1) <= config.exhaustive_limit;
    if (enumerate) {
        const std::vector<long> top = cost.exhaustive();
        const double c = cost(top);
        if (c < best_cost && !same_cost(c, best_cost)) {
            best_cost = c;
            best = top;
        }
    } else {
        best_cost = descend(cost, L, best, config);
    }

    for (int r = 1; r <= config.restarts && !enumerate; ++r) {
        std::mt19937_64 rng = make_rng(config.seed, stream, static_cast<std::uint64_t>(r));
        std::vector<long> gaps(L.groups());
        if (r % 2 == 1) {
            for (int j = 0; j < L.groups(); ++j) {
                const long a = L.first_allowed(j);
                const long steps = (L.last_allowed(j) - a) / 2;
                gaps[j] = a + 2 * std::uniform_int_distribution<long>(0, steps)(rng);
            }
        } else {
            // Hop away from the incumbent: each gap moves with probability 1/2.
            gaps = best;
            std::uniform_int_distribution<long> hop(-config.max_step / 2, config.max_step / 2);
            for (int j = 0; j < L.groups(); ++j) {
                if (rng() % 2 == 0) {
                    const long g = gaps[j] + 2 * hop(rng);
                    if (L.allowed(j, g)) {
                        gaps[j] = g;
                    }
                }
            }
        }
        const double c = descend(cost, L, gaps, config);
        if (c < best_cost && !same_cost(c, best_cost)) {
            best_cost = c;
            best = gaps;
        }
    }

    OptimizationResult out;
    out.sequence = L.sequence(best);
    out.train = expand_groups(out.sequence, config.repetition_rate);
    out.epsilon = epsilon;
    out.counting = counting;
    out.thermal = thermal;
    out.report = evaluate_train(out.train, chain, thermal, counting);
    out.adjusted_infidelity = out.report.adjusted_infidelity(epsilon);
    out.seed_adjusted_infidelity =
        evaluate_train(expand_groups(L.sequence(seed), config.repetition_rate), chain, thermal, counting)
            .adjusted_infidelity(epsilon);
    out.seed_candidate = candidate;
    out.telemetry.stage2_evaluations = cost.evaluations();
    out.telemetry.bound_found = candidate.bound;
    out.telemetry.candidates_refined = 1;
    return out;
}

OptimizationResult refine_candidates(const ChainModel &chain, const Stage1Result &s1,
                                     const Stage1Config &stage1_config, const Stage2Config &stage2_config) {
    const auto start = std::chrono::steady_clock::now();
    stage2_config.validate();
    if (s1.candidates.empty()) {
        throw NumericalError("optimize_gate: stage 1 returned no candidate better than the no-gate baseline");
    }

    const std::size_t n = s1.candidates.size();
    std::vector<std::optional<OptimizationResult>> refined(n);
    std::vector<std::string> failures(n);
    parallel_for(n, stage1_config.threads, [&](std::size_t i) {
        try {
            refined[i] = stage2(s1.candidates[i], chain, stage2_config, stage1_config.thermal, stage1_config.epsilon,
                                stage1_config.counting, i);
        } catch (const ConfigError &e) {
            failures[i] = e.what();
        }
    });

    std::optional<OptimizationResult> best;
    std::int64_t evaluations = 0;
    int refined_count = 0;
    for (auto &r : refined) {
        if (!r) {
            continue;
        }
        evaluations += r->telemetry.stage2_evaluations;
        ++refined_count;
        if (!best || candidate_less(r->adjusted_infidelity, r->sequence, best->adjusted_infidelity, best->sequence)) {
            best = std::move(r);
        }
    }
    if (!best) {
        throw ConfigError("optimize_gate: no candidate fits the repetition grid (" + failures.front() + ")");
    }
    best->telemetry.stage1_evaluations = s1.telemetry.evaluations;
    best->telemetry.stage2_evaluations = evaluations;
    best->telemetry.candidates_refined = refined_count;
    best->telemetry.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(*best);
}

OptimizationResult optimize_gate(const ChainModel &chain, const Stage1Config &stage1_config,
                                 const Stage2Config &stage2_config) {
    const auto start = std::chrono::steady_clock::now();
    stage2_config.validate();
    const Stage1Result s1 = stage1(chain, stage1_config);
    OptimizationResult out = refine_candidates(chain, s1, stage1_config, stage2_config);
    out.telemetry.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

JitterStats jitter_sensitivity(const OptimizationResult &result, const ChainModel &chain, double instability,
                               int samples, std::uint64_t seed, int threads) {
    if (!(instability >= 0.0) || samples < 1) {
        throw ConfigError("jitter: instability must be >= 0 and samples >= 1");
    }
    const std::vector<Impulse> nominal = impulses(result.train);
    const IonPair targets = result.train.targets;
    const int sdk = result.train.sdk_count();
    const double base = evaluate_impulses(nominal, chain, targets, result.thermal, sdk, result.counting).ideal_infidelity;

    std::vector<double> added(static_cast<std::size_t>(samples), 0.0);
    parallel_for(added.size(), threads, [&](std::size_t i) {
        std::mt19937_64 rng = make_rng(seed, 0x6a17, i);
        std::uniform_real_distribution<double> dist(-instability, instability);
        const double d_trap = instability > 0.0 ? dist(rng) : 0.0;
        const double d_rate = instability > 0.0 ? dist(rng) : 0.0;
        if (d_trap == 0.0 && d_rate == 0.0) {
            return;
        }
        // A trap-frequency shift scales every curvature of the axial potential.
        std::optional<ChainModel> shifted;
        if (d_trap != 0.0) {
            TrapConfig cfg = chain.config();
            const double scale = (1.0 + d_trap) * (1.0 + d_trap);
            cfg.axial_frequency_override = cfg.axial_frequency() * (1.0 + d_trap);
            if (cfg.quartic_coefficient) {
                *cfg.quartic_coefficient *= scale;
            }
            shifted = ChainModel::build(cfg);
        }
        std::vector<Impulse> imp = nominal;
        for (Impulse &k : imp) {
            k.time /= (1.0 + d_rate);
        }
        const ChainModel &c = shifted ? *shifted : chain;
        added[i] = evaluate_impulses(imp, c, targets, result.thermal, sdk, result.counting).ideal_infidelity - base;
    });

    JitterStats stats;
    stats.samples = samples;
    for (double a : added) {
        stats.mean_added += a;
    }
    stats.mean_added /= samples;
    std::vector<double> sorted = added;
    std::sort(sorted.begin(), sorted.end());
    const auto idx = static_cast<std::size_t>(std::ceil(0.95 * samples)) - 1;
    stats.p95_added = sorted[std::min(idx, sorted.size() - 1)];
    stats.max_added = sorted.back();
    return stats;
}

}  // namespace fastgate
