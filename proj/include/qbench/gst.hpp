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
#include <string>
#include <vector>

#include "qbench/circuit.hpp"
#include "qbench/core.hpp"
#include "qbench/noise.hpp"

namespace qbench {

/// Experiment design: fiducial frames around a middle block that is either
/// one gate under test, the identity slot, or a repeated germ.
struct GstDesign {
  std::vector<Gate> gate_labels = {Gate::X90, Gate::Y90};
  std::vector<std::vector<Gate>> fiducials = {
      {}, {Gate::X90}, {Gate::Y90}, {Gate::X90, Gate::X90}};
  std::vector<std::vector<Gate>> germs = {{Gate::X90, Gate::Y90},
                                          {Gate::Y90, Gate::X90}};
  int max_reps = 3;
  bool includes_identity_slot = true;
  double gram_condition_bound = 1e6;
};

/// Throws ConfigError unless the identity slot is present, there are at
/// least 4 fiducials, and fiducials[0] is the empty sequence (the native
/// prep/measurement frame the linear-inversion formulas assume).
void validate(const GstDesign& design);

/// Parsed form of a structured circuit tag:
///   "g:k:i:j"        gate k between measurement fiducial i / prep fiducial j
///   "I:i:j"          identity slot (Gram-matrix circuit)
///   "fid:a"          bare fiducial a
///   "germ:g:p:i:j"   germ g repeated p times between fiducials
struct GstKey {
  enum class Kind { Gate, Identity, Fiducial, Germ };
  Kind kind = Kind::Gate;
  int gate = -1;   // index into design.gate_labels
  int germ = -1;   // index into design.germs
  int reps = 0;
  int i = -1;      // measurement fiducial
  int j = -1;      // preparation fiducial
  int a = -1;      // bare fiducial
};

GstKey parse_gst_tag(const std::string& tag);

/// Circuits in emission order: gate blocks, bare fiducials, identity slot,
/// then germ powers. Every circuit targets outcome 0 and stores the full
/// gate word in `layers` (prep and meas stay empty: the native frame).
std::vector<Circuit> generate_gst_circuits(const GstDesign& design);

struct GstData {
  std::vector<Circuit> circuits;
  std::vector<ShotRecord> records;
};

/// Reconstructed gate set. `rho` and `povm` live in the vectorized picture:
/// probability of outcome o is Re(povm[o].vec^dag * chain * rho.vec).
struct GateSetEstimate {
  StateVec rho{Vec::Zero(4)};
  std::vector<PovmElement> povm;
  std::map<Gate, Superoperator> gates;
  double loglik = 0.0;
  bool gauge_fixed = false;
};

GateSetEstimate ideal_estimate(const GstDesign& design);

/// The simulator's own model as a gate-set triple: noisy gates, exact
/// initial state, and the readout confusion folded into the POVM.
GateSetEstimate truth_estimate(const GstDesign& design, const NoiseParams& p);

/// Probability of `c.target` under the estimate; every gate in the circuit
/// must be one of the estimate's labels (DataFormatError otherwise).
double predicted_probability(const GateSetEstimate& est, const Circuit& c);

/// rho -> T rho, povm^dag -> povm^dag T^-1, G -> T G T^-1. Probabilities
/// are invariant for any invertible T.
GateSetEstimate transform_gauge(const GateSetEstimate& est, const Mat& t);

/// Outcome-0 frequency per tag; shots are pooled per circuit id first.
std::map<std::string, double> frequency_by_tag(const GstData& data);

/// Linear inversion seeded from the ideal fiducial frame: B columns are the
/// ideal F_j acting on vec(|0><0|), the Gram matrix g is the identity-slot
/// frequency table, and G_k = B g^-1 p_k B^-1. Not CPTP-constrained.
/// Throws GramSingularError when cond(g) exceeds the design bound.
GateSetEstimate linear_inversion(
    const std::map<std::string, double>& freq_by_tag, const GstDesign& design);
GateSetEstimate linear_inversion(const GstData& data, const GstDesign& design);

/// Nearest-physical repair of a raw estimate: clips Choi/state/POVM spectra
/// (eigenvalue floor keeps every Kraus direction active for the MLE) and
/// restores trace preservation and POVM completeness exactly.
GateSetEstimate project_cptp(const GateSetEstimate& est);

struct MleOptions {
  int rank = 4;              // Kraus rank per gate, in [1, 4]
  int max_iters = 2000;
  double grad_tol = 1e-7;    // on the gradient norm divided by total shots
  // Stop once the last 25 accepted steps gained less than this much
  // log-likelihood in total. Likelihood-ratio units: gains this small move
  // every parameter far below one standard error. 0 disables the stall
  // stop (exact-data studies that need the optimum to many digits).
  double f_tol = 0.05;
  bool optimize_spam = true;
  double clamp_eps = 1e-12;  // probability floor inside the log
};

struct MleDiagnostics {
  std::vector<double> loglik_trace;  // value after every accepted step
  long clamp_events = 0;
  int iterations = 0;
  double final_grad_norm = 0.0;  // relative, same scale as grad_tol
  bool line_search_exhausted = false;
  bool stalled = false;  // stopped by f_tol rather than grad_tol
  bool converged = false;
};

/// Riemannian ascent of the binomial log-likelihood over stacked-Kraus
/// Stiefel points (gates), a factorized state, and a factorized two-outcome
/// POVM. The result is CPTP by construction and its log-likelihood is
/// non-decreasing along the accepted steps, starting from project_cptp(init).
GateSetEstimate mle_refine(const GateSetEstimate& init, const GstData& data,
                           const MleOptions& opts = {},
                           MleDiagnostics* diag = nullptr);

/// Log-likelihood of the data under the estimate (same clamping rule).
double log_likelihood(const GateSetEstimate& est, const GstData& data,
                      double clamp_eps = 1e-12);

/// Readout flips read off the gauge-fixed POVM: p01 = 1 - Re(M0[0,0]),
/// p10 = Re(M0[1,1]).
struct ReadoutEstimate {
  double p01 = 0.0;
  double p10 = 0.0;
};

ReadoutEstimate readout_from_estimate(const GateSetEstimate& est);

}  // namespace qbench
