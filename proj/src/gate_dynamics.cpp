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

#include "fastgate/gate_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "fastgate/errors.hpp"

namespace fastgate {

PulseGroupSequence PulseGroupSequence::from_half(std::span<const int> sizes, std::span<const double> times,
                                                 IonPair targets, double gate_time) {
    if (sizes.size() != times.size()) {
        throw ConfigError("pulse groups: sizes and times differ in length");
    }
    PulseGroupSequence seq;
    const std::size_t h = sizes.size();
    seq.group_sizes.resize(2 * h);
    seq.group_times.resize(2 * h);
    for (std::size_t j = 0; j < h; ++j) {
        seq.group_sizes[h + j] = sizes[j];
        seq.group_times[h + j] = times[j];
        seq.group_sizes[h - 1 - j] = -sizes[j];
        seq.group_times[h - 1 - j] = -times[j];
    }
    seq.targets = targets;
    seq.gate_time = gate_time;
    return seq;
}

std::vector<int> PulseGroupSequence::half_sizes() const {
    return {group_sizes.begin() + group_count() / 2, group_sizes.end()};
}

std::vector<double> PulseGroupSequence::half_times() const {
    return {group_times.begin() + group_count() / 2, group_times.end()};
}

int PulseGroupSequence::sdk_count() const {
    int total = 0;
    for (int z : group_sizes) {
        total += std::abs(z);
    }
    return total;
}

void PulseGroupSequence::validate() const {
    const std::size_t n = group_sizes.size();
    if (n != group_times.size()) {
        throw ConfigError("pulse groups: sizes and times differ in length");
    }
    if (n % 2 != 0) {
        throw ConfigError("pulse groups: group count must be even");
    }
    if (targets.first == targets.second) {
        throw ConfigError("pulse groups: target ions must differ");
    }
    for (std::size_t j = 0; j < n / 2; ++j) {
        if (group_sizes[j] != -group_sizes[n - 1 - j] || group_times[j] != -group_times[n - 1 - j]) {
            throw ConfigError("pulse groups: sequence is not antisymmetric at group " + std::to_string(j));
        }
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (!(group_times[j] < group_times[j + 1])) {
            throw ConfigError("pulse groups: times must be strictly increasing");
        }
    }
    if (n > 0 && group_times.back() > 0.5 * gate_time * (1.0 + 1e-12)) {
        throw ConfigError("pulse groups: group times exceed the gate window");
    }
}

void KickTrain::validate() const {
    if (!(repetition_rate > 0.0)) {
        throw ConfigError("kick train: repetition rate must be positive");
    }
    if (targets.first == targets.second) {
        throw ConfigError("kick train: target ions must differ");
    }
    const double period = repetition_period();
    for (std::size_t i = 0; i < kicks.size(); ++i) {
        if (kicks[i].sign != 1 && kicks[i].sign != -1) {
            throw ConfigError("kick train: kick signs must be +1 or -1");
        }
        const double steps = (kicks[i].time - kicks.front().time) / period;
        if (std::abs(steps - std::round(steps)) > 1e-6) {
            throw ConfigError("kick train: kick " + std::to_string(i) + " is off the repetition grid");
        }
        if (i > 0 && kicks[i].time - kicks[i - 1].time < period * (1.0 - 1e-9)) {
            throw ConfigError("kick train: kicks closer than one repetition period");
        }
    }
}

std::vector<Impulse> impulses(const KickTrain &train) {
    std::vector<Impulse> out;
    out.reserve(train.kicks.size());
    for (const Kick &k : train.kicks) {
        out.push_back({k.time, static_cast<double>(k.sign)});
    }
    return out;
}

std::vector<Impulse> instantaneous_impulses(const PulseGroupSequence &sequence) {
    std::vector<Impulse> out;
    for (int j = 0; j < sequence.group_count(); ++j) {
        if (sequence.group_sizes[j] != 0) {
            out.push_back({sequence.group_times[j], static_cast<double>(sequence.group_sizes[j])});
        }
    }
    return out;
}

KickTrain expand_groups(const PulseGroupSequence &sequence, double repetition_rate) {
    if (!(repetition_rate > 0.0)) {
        throw ConfigError("expand_groups: repetition rate must be positive");
    }
    sequence.validate();
    const double period = 1.0 / repetition_rate;
    const int n = sequence.group_count();

    // Positive half in grid units; the negative half is its mirror image.
    std::vector<Kick> positive;
    long last_index = 0;  // kick at t = 0 is forbidden: it would coincide with its mirror
    for (int j = n / 2; j < n; ++j) {
        const int z = sequence.group_sizes[j];
        const int count = std::abs(z);
        if (count == 0) {
            continue;
        }
        const double centre = sequence.group_times[j] / period;
        // Odd bursts centre on integers, even bursts on half-integers.
        const double offset = (count % 2 == 0) ? 0.5 : 0.0;
        const double snapped = std::round(centre - offset) + offset;
        const long first = std::lround(snapped - 0.5 * (count - 1));
        if (first <= last_index) {
            throw ConfigError("expand_groups: burst of group " + std::to_string(j - n / 2 + 1) +
                              " overlaps its neighbour at repetition rate " + std::to_string(repetition_rate) +
                              " Hz");
        }
        const int sign = z > 0 ? 1 : -1;
        for (int k = 0; k < count; ++k) {
            positive.push_back({static_cast<double>(first + k) * period, sign});
        }
        last_index = first + count - 1;
    }

    KickTrain train;
    train.repetition_rate = repetition_rate;
    train.targets = sequence.targets;
    train.kicks.reserve(2 * positive.size());
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
        train.kicks.push_back({-it->time, -it->sign});
    }
    train.kicks.insert(train.kicks.end(), positive.begin(), positive.end());
    return train;
}

ModeState free_evolution(const ModeState &state, double mode_frequency, double duration, double mass) {
    const double w = mode_frequency;
    const double s = std::sin(w * duration);
    const double c = std::cos(w * duration);
    const double q = state.position;
    const double v = state.velocity;
    ModeState out;
    out.position = q * c + v / w * s;
    out.velocity = v * c - w * q * s;
    // (M/2) [ (V^2 - w^2 Q^2) sin(2 w t) / (2 w) + Q V (cos(2 w t) - 1) ]
    out.action = state.action + 0.5 * mass * ((v * v - w * w * q * q) * s * c / w - 2.0 * q * v * s * s);
    return out;
}

namespace {

double kick_velocity(const ChainModel &chain) {
    return 2.0 * kConstants.hbar * chain.wavenumber() / chain.mass();
}

void check_targets(const ChainModel &chain, IonPair targets) {
    const int n = chain.num_ions();
    if (targets.first == targets.second || targets.first < 0 || targets.second < 0 || targets.first >= n ||
        targets.second >= n) {
        throw ConfigError("target ions (" + std::to_string(targets.first) + ", " +
                          std::to_string(targets.second) + ") invalid for a " + std::to_string(n) + "-ion chain");
    }
}

}  // namespace

void apply_kick(std::span<ModeState> states, const ChainModel &chain, IonPair targets, double strength,
                BasisState basis) {
    const double dv = strength * kick_velocity(chain);
    for (std::size_t m = 0; m < states.size(); ++m) {
        const int mi = static_cast<int>(m);
        states[m].velocity += dv * (basis.first * chain.coupling(mi, targets.first) +
                                    basis.second * chain.coupling(mi, targets.second));
    }
}

TrajectoryResult propagate(std::span<const Impulse> impulses, const ChainModel &chain, IonPair targets,
                           BasisState basis, std::optional<double> end_time) {
    check_targets(chain, targets);
    const int modes = chain.num_modes();
    const double mass = chain.mass();
    const auto &freqs = chain.mode_frequencies();

    TrajectoryResult result;
    result.basis = basis;
    result.final_states.assign(static_cast<std::size_t>(modes), ModeState{});

    double t = impulses.empty() ? 0.0 : impulses.front().time;
    for (const Impulse &imp : impulses) {
        if (imp.time < t) {
            throw ConfigError("propagate: impulses must be in time order");
        }
        const double dt = imp.time - t;
        if (dt > 0.0) {
            for (int m = 0; m < modes; ++m) {
                result.final_states[m] = free_evolution(result.final_states[m], freqs[m], dt, mass);
            }
        }
        apply_kick(result.final_states, chain, targets, imp.strength, basis);
        t = imp.time;
    }
    const double t_end = end_time.value_or(t);
    if (t_end < t) {
        throw ConfigError("propagate: end time precedes the last impulse");
    }
    if (t_end > t) {
        for (int m = 0; m < modes; ++m) {
            result.final_states[m] = free_evolution(result.final_states[m], freqs[m], t_end - t, mass);
        }
    }
    result.end_time = t_end;

    result.residuals.resize(static_cast<std::size_t>(modes));
    double action = 0.0;
    double boundary = 0.0;
    for (int m = 0; m < modes; ++m) {
        const ModeState &st = result.final_states[m];
        const double w = freqs[m];
        const std::complex<double> lab =
            std::sqrt(mass * w / (2.0 * kConstants.hbar)) * std::complex<double>(st.position, st.velocity / w);
        result.residuals[m] = lab * std::polar(1.0, w * t_end);
        action += st.action;
        boundary += 0.5 * std::imag(lab * lab);
    }
    result.phase = action / kConstants.hbar - boundary;
    return result;
}

TrajectoryResult propagate(const KickTrain &train, const ChainModel &chain, BasisState basis) {
    const std::vector<Impulse> imp = impulses(train);
    return propagate(imp, chain, train.targets, basis);
}

double entangling_phase(std::span<const TrajectoryResult, 4> results) {
    for (std::size_t i = 0; i < 4; ++i) {
        if (results[i].basis != kBasisStates[i]) {
            throw ConfigError("entangling_phase: results must be ordered (++, +-, -+, --)");
        }
    }
    const double scale = 1.0 + std::max({std::abs(results[0].phase), std::abs(results[1].phase),
                                         std::abs(results[2].phase), std::abs(results[3].phase)});
    if (std::abs(results[0].phase - results[3].phase) > 1e-9 * scale ||
        std::abs(results[1].phase - results[2].phase) > 1e-9 * scale) {
        throw NumericalError("entangling_phase: basis-state phase symmetry violated");
    }
    return 0.25 * (results[0].phase - results[1].phase - results[2].phase + results[3].phase);
}

std::array<TrajectoryResult, 4> propagate_basis_states(std::span<const Impulse> impulses,
                                                       const ChainModel &chain, IonPair targets) {
    std::array<TrajectoryResult, 4> out;
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = propagate(impulses, chain, targets, kBasisStates[i]);
    }
    return out;
}

std::array<TrajectoryResult, 2> propagate_two_states(std::span<const Impulse> impulses,
                                                     const ChainModel &chain, IonPair targets) {
    return {propagate(impulses, chain, targets, kBasisStates[0]),
            propagate(impulses, chain, targets, kBasisStates[1])};
}

std::vector<TrajectorySample> sample_trajectory(std::span<const Impulse> impulses, const ChainModel &chain,
                                                IonPair targets, BasisState basis, double start_time,
                                                double end_time, int samples) {
    check_targets(chain, targets);
    if (samples < 2 || !(end_time > start_time)) {
        throw ConfigError("sample_trajectory: need at least two samples over a positive interval");
    }
    const int modes = chain.num_modes();
    const auto &freqs = chain.mode_frequencies();
    std::vector<ModeState> states(static_cast<std::size_t>(modes));
    std::vector<TrajectorySample> out;
    out.reserve(static_cast<std::size_t>(samples) * modes);

    std::size_t next = 0;
    double t = start_time;
    for (int s = 0; s < samples; ++s) {
        const double ts = start_time + (end_time - start_time) * s / (samples - 1);
        // Apply impulses up to and including ts.
        while (next < impulses.size() && impulses[next].time <= ts) {
            for (int m = 0; m < modes; ++m) {
                states[m] = free_evolution(states[m], freqs[m], std::max(0.0, impulses[next].time - t), chain.mass());
            }
            t = std::max(t, impulses[next].time);
            apply_kick(states, chain, targets, impulses[next].strength, basis);
            ++next;
        }
        for (int m = 0; m < modes; ++m) {
            states[m] = free_evolution(states[m], freqs[m], ts - t, chain.mass());
            out.push_back({ts, m, states[m].position, states[m].velocity});
        }
        t = ts;
    }
    return out;
}

}  // namespace fastgate
