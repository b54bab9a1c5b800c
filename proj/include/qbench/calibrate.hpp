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

#include <utility>
#include <vector>

#include "qbench/circuit.hpp"
#include "qbench/drb.hpp"

namespace qbench {

/// Two-parameter coherent control error: every commanded rotation angle is
/// scaled by k, and the nominal y-axis sits at azimuth phi instead of pi/2.
/// (1, pi/2) is the identity model.
struct MiscalModel {
  double k = 1.0;
  double phi = kPi / 2.0;
};

/// Throws UnphysicalParamsError on k <= 0 or phi outside [0, 2pi).
void validate(const MiscalModel& m);

/// Unitary actually executed for a commanded (axis, angle) under the model:
/// X -> R_x(k*angle), Y -> R_phi(k*angle), I unaffected.
Eigen::Matrix2cd miscalibrated_unitary(Axis axis, double angle,
                                       const MiscalModel& m);

/// Coherent-only superoperator of the miscalibrated unitary.
Superoperator miscalibrated_gate(Axis axis, double angle,
                                 const MiscalModel& m);

/// Gate table under the model; include_noise composes the relaxation channel
/// after each miscalibrated unitary (the identity label idles under
/// relaxation alone, exactly as in the calibrated table).
GateTable miscal_gate_table(const NoiseParams& params, const MiscalModel& m,
                            bool include_noise);

/// Mean avg_fidelity between ideal and miscalibrated gates over the labels.
double mean_coherent_fidelity(const MiscalModel& m,
                              const std::vector<Gate>& gates);

/// Sample binomial counts from the exact per-circuit probabilities under the
/// model. Record i draws from the shots stream at stream_offset + i.
std::vector<ShotRecord> simulate_miscal_records(
    const std::vector<Circuit>& circuits, const NoiseParams& params,
    const MiscalModel& m, int shots, std::uint64_t seed,
    bool include_noise = true, std::uint64_t stream_offset = 0);

/// Calibration scan grids. Defaults: k in [0.8, 1.2] and phi in
/// [pi/2 - 0.3, pi/2 + 0.3], both at step 0.005.
struct GridSpec {
  double k_min = 0.8;
  double k_max = 1.2;
  double k_step = 0.005;
  double phi_min = kPi / 2.0 - 0.3;
  double phi_max = kPi / 2.0 + 0.3;
  double phi_step = 0.005;
};

/// Inclusive [lo, hi] with the given step; hi is kept when it lands within
/// half a step of the last point.
std::vector<double> make_grid(double lo, double hi, double step);

/// Scored calibration map. scores(i, j) = f_x at (k_grid[i], phi_grid[j]);
/// log_scores holds sum log(1 - f_i), monotone-equivalent to the product
/// and safe against underflow when many circuits contribute.
struct CalibrationMap {
  std::vector<double> k_grid;
  std::vector<double> phi_grid;
  Eigen::MatrixXd scores;
  Eigen::MatrixXd log_scores;
  int best_i = 0;
  int best_j = 0;
  MiscalModel argmax;
};

/// Re-simulates every recorded circuit's exact probability at each grid
/// point, scores f_i = (P_sim - P_exp)^2 and f_x = prod(1 - f_i), and takes
/// the argmax of the log score (ties resolve toward the point nearest
/// (1, pi/2), then toward smaller indices).
CalibrationMap score_map(const std::vector<Circuit>& circuits,
                         const std::vector<ShotRecord>& records,
                         const std::vector<double>& k_grid,
                         const std::vector<double>& phi_grid,
                         const NoiseParams& params, bool include_noise = true);

/// One refinement pass: +-1 coarse step around the coarse argmax at 10x
/// resolution. The window deliberately ignores the coarse grid bounds so a
/// boundary argmax can still refine outward.
CalibrationMap refine_map(const std::vector<Circuit>& circuits,
                          const std::vector<ShotRecord>& records,
                          const CalibrationMap& coarse,
                          const NoiseParams& params, bool include_noise = true);

struct CalibrationResult {
  CalibrationMap coarse;
  CalibrationMap refined;
  MiscalModel found;
};

/// Coarse scan over the GridSpec grids followed by one refinement pass.
CalibrationResult run_calibration(const std::vector<Circuit>& circuits,
                                  const std::vector<ShotRecord>& records,
                                  const GridSpec& grids,
                                  const NoiseParams& params,
                                  bool include_noise = true);

/// tau_correct = tau / k, phi_correct = phi - (found.phi - pi/2).
/// Throws UnphysicalParamsError on found.k <= 0.
std::pair<double, double> correct_controls(double current_tau_s,
                                           double current_phi_rad,
                                           const MiscalModel& found);

/// Effective model after commanding the corrected controls on hardware whose
/// true error is `effective`: angles scale by effective.k / found.k and the
/// axis offset shrinks by found.phi - pi/2.
MiscalModel apply_correction(const MiscalModel& effective,
                             const MiscalModel& found);

struct CalibrationRound {
  MiscalModel effective;  // hardware model the round's data was taken under
  MiscalModel found;      // scan argmax for that data
  double fidelity_before = 0.0;
  double fidelity_after = 0.0;
};

struct CalibrationLoopResult {
  std::vector<CalibrationRound> rounds;
  MiscalModel final_effective;
  bool converged = false;
};

/// Repeat simulate -> scan -> correct until the found model is within tol of
/// (1, pi/2) or max_rounds is hit. Each round reuses the circuit list and
/// advances the shot stream by one circuit-list stride.
CalibrationLoopResult calibration_loop(
    const MiscalModel& injected, const std::vector<Circuit>& circuits,
    const GridSpec& grids, const NoiseParams& params, int shots,
    std::uint64_t seed, bool include_noise = true, int max_rounds = 5,
    double tol = 1e-4);

}  // namespace qbench
