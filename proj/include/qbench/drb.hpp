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

#include <optional>

#include "qbench/circuit.hpp"
#include "qbench/fit.hpp"

namespace qbench {

/// 95% half-widths for one fitted curve, from the bootstrap. `spam` is the
/// derived quantity 1 - (a + b).
struct FitCi {
  double a = 0.0;
  double b = 0.0;
  double p = 0.0;
  double fidelity = 0.0;
  double spam = 0.0;
};

struct DecayFit {
  double a = 0.0;
  double b = 0.0;
  double p = 0.0;
  double fidelity = 0.0;  // p + (1 - p)/2
  FitCi ci95;
  std::vector<std::pair<int, double>> per_depth_means;
  double rss = 0.0;
  bool converged = true;
};

struct FitOptions {
  bool per_circuit = false;  // fit every circuit point instead of depth means
  int max_iters = 500;
};

/// Per-target fits plus the shared-decay pooled fit over both targets.
struct PooledDecayFit {
  DecayFit fit0;
  DecayFit fit1;
  double pooled_p = 0.0;
  double pooled_fidelity = 0.0;
  double pooled_p_ci95 = 0.0;
  double pooled_fidelity_ci95 = 0.0;
};

struct SpamEstimate {
  double p01 = 0.0;
  double p10 = 0.0;
  double p01_ci95 = 0.0;
  double p10_ci95 = 0.0;
};

/// K circuits per (depth, target in {0,1}): uniform stabilizer prep, uniform
/// layers from the generator set, measurement compiled by ideal tracking so
/// the noiseless circuit hits its target with probability 1.
std::vector<Circuit> generate_drb_circuits(const std::vector<int>& depths,
                                           int k_per_depth, std::uint64_t seed,
                                           bool include_identity = false);

/// Shortest generator sub-sequence (at most 2 gates) mapping the ideal state
/// after prep+layers onto |target>; searched in fixed roster order.
std::vector<Gate> compile_measurement(const std::vector<Gate>& prep,
                                      const std::vector<Gate>& layers,
                                      int target);

/// Simulate every circuit; record i uses the seed stream entry
/// site_offset + i, so array sites can interleave without collisions.
std::vector<ShotRecord> simulate_records(const std::vector<Circuit>& circuits,
                                         const NoiseParams& params, int shots,
                                         std::uint64_t seed,
                                         std::uint64_t site_offset = 0,
                                         Stream stream = kStreamShots);

/// Fit one target's records (depth-mean weighting unless per_circuit).
DecayFit fit_decay(const std::vector<Circuit>& circuits,
                   const std::vector<ShotRecord>& records, int target,
                   const FitOptions& opts = {});

/// Both targets independently plus the shared-p pooled fit.
PooledDecayFit fit_decay_both(const std::vector<Circuit>& circuits,
                              const std::vector<ShotRecord>& records,
                              const FitOptions& opts = {});

/// p01 = 1 - (a0 + b0), p10 = 1 - (a1 + b1); CIs propagated from the fits.
SpamEstimate spam_from_fits(const DecayFit& fit0, const DecayFit& fit1);

/// Runs the bootstrap over the full DRB estimator and writes the CI fields
/// of the given fits in place. resamples <= 0 leaves the CIs at zero.
void drb_bootstrap_ci(const std::vector<Circuit>& circuits,
                      const std::vector<ShotRecord>& records, int resamples,
                      std::uint64_t seed, const FitOptions& opts,
                      PooledDecayFit* fits, std::uint64_t stream_offset = 0);

struct ArrayScenario {
  int n_sites = 0;
  std::vector<NoiseParams> per_site;
  std::vector<std::pair<int, int>> site_positions;  // (row, col)
};

struct SiteResult {
  int site = 0;
  int row = 0;
  int col = 0;
  PooledDecayFit fits;
  SpamEstimate spam;
};

struct ArrayResult {
  std::vector<SiteResult> sites;
  double mean_fidelity = 0.0;
  double mean_fidelity_ci95 = 0.0;  // 1.96 * sample std / sqrt(n)
};

/// Shared circuit list applied to statistically independent sites. Site s
/// reuses the single-qubit seed streams at offset s * n_circuits, so a
/// one-site array is bit-identical to the plain pipeline.
ArrayResult run_array(const ArrayScenario& scenario,
                      const std::vector<Circuit>& circuits, int shots,
                      std::uint64_t seed, const FitOptions& opts = {},
                      int bootstrap_resamples = 100);

}  // namespace qbench
