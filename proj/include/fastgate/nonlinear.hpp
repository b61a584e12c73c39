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


// Cross-check propagation in ion coordinates with the full Coulomb and
// quartic forces, integrated numerically between kicks. Only practical for
// short chains; the production path is the piecewise-exact normal-mode
// propagation.

#pragma once

#include "fastgate/chain_model.hpp"
#include "fastgate/fidelity.hpp"
#include "fastgate/gate_dynamics.hpp"

namespace fastgate {

struct NonlinearOptions {
    double relative_tolerance = 1e-12;
    double absolute_tolerance = 1e-13;  // in units of one kick's displacement scale
    /// Replace the exact potential by its second-order expansion about
    /// equilibrium. The result must then reproduce `propagate`.
    bool harmonic_only = false;
};

/// Integrates the axial equations of motion of every ion for one basis
/// state. Kicks are velocity jumps of the two target ions. Residuals and
/// phase follow the conventions of `propagate`, with the final ion
/// displacements projected on the chain's normal modes. `final_states`
/// carry mode positions and velocities; their action fields are zero and the
/// total action enters `phase`.
TrajectoryResult propagate_nonlinear(const KickTrain &train, const ChainModel &chain, BasisState basis,
                                     const NonlinearOptions &options = {});

/// Infidelity of a train under the nonlinear dynamics. All four basis states
/// are propagated since the sign symmetry of the linear model no longer holds.
GateReport evaluate_nonlinear(const KickTrain &train, const ChainModel &chain, const ThermalSpec &thermal,
                              PulseCounting counting = PulseCounting::kPulses, const NonlinearOptions &options = {});

}  // namespace fastgate
