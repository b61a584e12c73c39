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

// Classical-equivalent gate dynamics. For each two-qubit basis state, every
// normal mode follows a harmonic trajectory that receives an instantaneous
// velocity jump at each state-dependent kick. The geometric phase of the
// basis state is the action of those trajectories.

#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "fastgate/chain_model.hpp"

namespace fastgate {

struct IonPair {
    int first = 0;
    int second = 1;

    bool operator==(const IonPair &) const = default;
};

/// sigma_z eigenvalues (+1 / -1) of the two target ions.
struct BasisState {
    int first = 1;
    int second = 1;

    bool operator==(const BasisState &) const = default;
};

/// (++), (+-), (-+), (--) in that order.
inline constexpr std::array<BasisState, 4> kBasisStates{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

/// Antisymmetric pulse groups: group -j mirrors group j in both size and time.
/// Lists are stored in full (length N_k) in ascending time order.
struct PulseGroupSequence {
    std::vector<int> group_sizes;
    std::vector<double> group_times;  // s, relative to the gate midpoint
    IonPair targets;
    double gate_time = 0.0;  // s

    /// Builds the full sequence from the positive half (z_1.., t_1..).
    static PulseGroupSequence from_half(std::span<const int> sizes, std::span<const double> times,
                                        IonPair targets, double gate_time);

    int group_count() const { return static_cast<int>(group_sizes.size()); }
    std::vector<int> half_sizes() const;
    std::vector<double> half_times() const;
    /// Number of 2 hbar k kicks, sum_j |z_j|.
    int sdk_count() const;
    /// Throws ConfigError unless sizes and times are exactly antisymmetric,
    /// times strictly increase and lie within [-T_G/2, T_G/2].
    void validate() const;
};

struct Kick {
    double time;  // s
    int sign;     // +1 / -1, direction of the 2 hbar k transfer
};

/// Individual kicks placed on the laser repetition grid.
struct KickTrain {
    std::vector<Kick> kicks;
    double repetition_rate = 0.0;  // Hz
    IonPair targets;

    int sdk_count() const { return static_cast<int>(kicks.size()); }
    double repetition_period() const { return 1.0 / repetition_rate; }
    /// Throws ConfigError unless kicks are ordered, at least one period apart
    /// and on a single grid of the repetition period.
    void validate() const;
};

/// Signed momentum transfer, in units of 2 hbar k, at one instant. A group in
/// the instantaneous limit is a single impulse of strength z_j.
struct Impulse {
    double time;
    double strength;
};

std::vector<Impulse> impulses(const KickTrain &train);
std::vector<Impulse> instantaneous_impulses(const PulseGroupSequence &sequence);

/// Expands each group into |z_j| kicks one repetition period apart. Burst
/// centres are snapped to the grid t = n/R (odd |z_j|) or (n + 1/2)/R (even),
/// so every kick lands on t = n/R for integer n and antisymmetry survives.
KickTrain expand_groups(const PulseGroupSequence &sequence, double repetition_rate);

struct ModeState {
    double position = 0.0;  // Q, m
    double velocity = 0.0;  // dQ/dt, m/s
    double action = 0.0;    // int L dt, J s
};

/// Exact harmonic rotation over `duration`, with the closed-form Lagrangian
/// integral added to the action.
ModeState free_evolution(const ModeState &state, double mode_frequency, double duration, double mass);

/// Velocity jump dQ_m/dt += strength * (2 hbar k / M) (s_mu b_m^mu + s_nu b_m^nu).
void apply_kick(std::span<ModeState> states, const ChainModel &chain, IonPair targets, double strength,
                BasisState basis);

struct TrajectoryResult {
    BasisState basis;
    std::vector<ModeState> final_states;  // lab frame at end_time
    /// alpha_m = sqrt(M w / 2 hbar) (Q + i V / w), rotated back to the gate
    /// midpoint (t = 0) so it no longer depends on where the window closes.
    std::vector<std::complex<double>> residuals;
    /// Action / hbar minus the end-point term (1/2) sum_m Im(alpha_lab^2).
    /// The subtraction makes the phase independent of end_time and equal to
    /// minus the displacement-product phase sum_{k>j} Im(beta_k beta_j^*).
    double phase = 0.0;
    double end_time = 0.0;
};

/// Propagates the modes (starting at rest) through the impulses in time order,
/// then freely until end_time (defaults to the last impulse).
TrajectoryResult propagate(std::span<const Impulse> impulses, const ChainModel &chain, IonPair targets,
                           BasisState basis, std::optional<double> end_time = std::nullopt);
TrajectoryResult propagate(const KickTrain &train, const ChainModel &chain, BasisState basis);

/// Theta = (Phi_{++} - Phi_{+-} - Phi_{-+} + Phi_{--}) / 4. Throws
/// NumericalError if Phi_{++} != Phi_{--} or Phi_{+-} != Phi_{-+}.
double entangling_phase(std::span<const TrajectoryResult, 4> results);

/// All four basis-state trajectories.
std::array<TrajectoryResult, 4> propagate_basis_states(std::span<const Impulse> impulses,
                                                       const ChainModel &chain, IonPair targets);

/// The (++) and (+-) trajectories only. The (--) and (-+) results are their
/// exact negatives (same phase, residuals flipped).
std::array<TrajectoryResult, 2> propagate_two_states(std::span<const Impulse> impulses,
                                                     const ChainModel &chain, IonPair targets);

/// Time-sampled phase-space trajectory for plotting.
struct TrajectorySample {
    double time;
    int mode;
    double position;
    double velocity;
};

std::vector<TrajectorySample> sample_trajectory(std::span<const Impulse> impulses, const ChainModel &chain,
                                                IonPair targets, BasisState basis, double start_time,
                                                double end_time, int samples);

}  // namespace fastgate
