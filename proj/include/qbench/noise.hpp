// Copyright 2026 The qbench Authors
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

#include <array>

#include "qbench/core.hpp"
#include "qbench/gates.hpp"

namespace qbench {

/// Error model: relaxation attached to every gate, classical readout
/// confusion, and an optional mixed initial state.
struct NoiseParams {
  double t1_s = 100e-3;
  double t2_s = 600e-6;
  double gate_time_s = 10e-6;
  double p01 = 0.0;           // P(report 1 | true 0)
  double p10 = 0.0;           // P(report 0 | true 1)
  double init_excited = 0.0;  // population of |1> in the prepared state
};

/// Throws UnphysicalParamsError on t2 > 2*t1 or out-of-range fields.
void validate(const NoiseParams& p);

/// Row-stochastic confusion matrix; row = true state, column = reported.
struct ReadoutModel {
  Eigen::Matrix2d confusion;
};

ReadoutModel readout_model(const NoiseParams& p);

/// confusion^T applied to a length-2 outcome distribution.
Eigen::Vector2d apply_readout(const Eigen::Vector2d& true_probs,
                              const ReadoutModel& model);

/// Amplitude damping over gate_time (gamma = 1 - exp(-t/T1)) composed with
/// pure dephasing at rate 1/T2 - 1/(2 T1). gate_time = 0 gives {I}.
KrausSet relaxation_kraus(const NoiseParams& p);

Superoperator relaxation_superop(const NoiseParams& p);

/// Ideal unitary followed by the relaxation channel.
Superoperator noisy_gate(Axis axis, double angle, const NoiseParams& p);
Superoperator noisy_gate(Gate g, const NoiseParams& p);

/// Prepared state: |0><0| mixed with init_excited of |1><1|.
DensityMatrix initial_state(const NoiseParams& p);

/// Per-gate superoperators for all labels under one parameter set, built
/// once so circuit simulation is a chain of 4x4 mat-vecs.
struct GateTable {
  std::array<Mat, kNumGates> superops;
  explicit GateTable(const NoiseParams& p);
  GateTable() = default;
  const Mat& operator[](Gate g) const {
    return superops[static_cast<int>(g)];
  }
};

/// Mean of avg_fidelity(ideal gate, noisy gate) over the given labels.
/// With gate-independent relaxation every term is equal, but the mean is
/// still computed from the superoperators gate by gate.
double analytic_gate_set_fidelity(const NoiseParams& p,
                                  const std::vector<Gate>& gates);

}  // namespace qbench
