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

#include <map>
#include <utility>

#include "qbench/gst.hpp"

namespace qbench {

/// Unitary gauge move: the qubit-level change of frame u followed by the
/// residual z-rotation delta. as_superop() lifts the combined rotation into
/// the transform T fed to transform_gauge; conjugating with T and then with
/// the T of the inverse rotation round-trips an estimate.
struct GaugeTransform {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  double delta = 0.0;
  Superoperator as_superop() const;
};

/// Off-diagonal weight of rho and every POVM element in the current frame:
/// the joint-diagonalization objective evaluated at u = I.
double offdiag_weight(const GateSetEstimate& est);

/// Finds the frame change u minimizing the off-diagonal weight (ZYZ angles,
/// the third angle drops out of the objective; 8 deterministic octant
/// starts of Nelder-Mead descent). The returned estimate is conjugated into
/// that frame, with the residual basis permutation fixed so that the
/// outcome-0 POVM element has its large entry first.
/// *achieved_f (optional) receives the final objective value; a value above
/// warn_threshold sets *warning instead of throwing, the caller decides.
std::pair<GaugeTransform, GateSetEstimate> joint_diagonalize(
    const GateSetEstimate& est, double warn_threshold = 1e-4,
    bool* warning = nullptr, double* achieved_f = nullptr);

/// Scans delta over a dense grid (3600 points) plus golden-section
/// refinement, maximizing the summed average fidelity of the Rz(delta)-
/// conjugated gates against their ideal labels. The rotation is applied to
/// every object; diagonal rho and POVM are invariant under it. Ties across
/// separated maxima pick the smallest delta >= 0 and set *degenerate.
std::pair<double, GateSetEstimate> fix_delta(const GateSetEstimate& est,
                                             bool* degenerate = nullptr);

struct GaugeFixResult {
  GaugeTransform transform;
  GateSetEstimate estimate;
  double f_min = 0.0;            // achieved off-diagonal weight
  bool diag_warning = false;     // f_min above the 1e-4 threshold
  bool delta_degenerate = false;
  std::map<Gate, double> fidelity;  // per gate, after the fix, vs ideal
};

/// joint_diagonalize followed by fix_delta; predicted probabilities are
/// invariant through both stages.
GaugeFixResult gauge_fix(const GateSetEstimate& est);

}  // namespace qbench
