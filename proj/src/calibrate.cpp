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

#include "qbench/calibrate.hpp"

#include <cmath>
#include <limits>

#include "qbench/errors.hpp"
#include "qbench/parallel.hpp"
#include "qbench/rng.hpp"

namespace qbench {

void validate(const MiscalModel& m) {
  if (!(m.k > 0.0)) {
    throw UnphysicalParamsError("miscalibration k must be positive");
  }
  if (!(m.phi >= 0.0 && m.phi < 2.0 * kPi)) {
    throw UnphysicalParamsError("miscalibration phi must lie in [0, 2pi)");
  }
}

Eigen::Matrix2cd miscalibrated_unitary(Axis axis, double angle,
                                       const MiscalModel& m) {
  switch (axis) {
    case Axis::I:
      return Eigen::Matrix2cd::Identity();
    case Axis::X:
      return rotation_unitary(0.0, m.k * angle);
    case Axis::Y:
      return rotation_unitary(m.phi, m.k * angle);
  }
  throw ConfigError("unknown axis");
}

Superoperator miscalibrated_gate(Axis axis, double angle,
                                 const MiscalModel& m) {
  return superop_from_unitary(miscalibrated_unitary(axis, angle, m));
}

GateTable miscal_gate_table(const NoiseParams& params, const MiscalModel& m,
                            bool include_noise) {
  GateTable table;
  const Mat relax =
      include_noise ? relaxation_superop(params).mat : Mat::Identity(4, 4);
  for (int i = 0; i < kNumGates; ++i) {
    const Gate g = static_cast<Gate>(i);
    const Superoperator ideal =
        miscalibrated_gate(gate_axis(g), gate_angle(g), m);
    table.superops[i] = relax * ideal.mat;
  }
  return table;
}

double mean_coherent_fidelity(const MiscalModel& m,
                              const std::vector<Gate>& gates) {
  if (gates.empty()) return 1.0;
  double sum = 0.0;
  for (Gate g : gates) {
    const Superoperator ideal = superop_from_unitary(gate_unitary(g));
    const Superoperator actual =
        miscalibrated_gate(gate_axis(g), gate_angle(g), m);
    sum += avg_fidelity(ideal, actual);
  }
  return sum / static_cast<double>(gates.size());
}

std::vector<ShotRecord> simulate_miscal_records(
    const std::vector<Circuit>& circuits, const NoiseParams& params,
    const MiscalModel& m, int shots, std::uint64_t seed, bool include_noise,
    std::uint64_t stream_offset) {
  validate(m);
  if (shots <= 0) throw ConfigError("shots must be positive");
  const GateTable table = miscal_gate_table(params, m, include_noise);
  const NoiseParams eff = include_noise ? params : NoiseParams{};
  std::vector<ShotRecord> records(circuits.size());
  par::for_index(circuits.size(), [&](std::size_t i) {
    records[i] = sample_record(
        circuits[i], static_cast<int>(i), table, eff, shots,
        derive_seed(seed, kStreamShots, stream_offset + i));
  });
  return records;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  if (hi < lo) throw ConfigError("grid upper bound below lower bound");
  std::vector<double> grid;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 0.5));
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) grid.push_back(lo + step * i);
  return grid;
}

namespace {

/// f_x and its log at one (k, phi) grid point, over all records.
std::pair<double, double> score_point(const std::vector<Circuit>& circuits,
                                      const std::vector<ShotRecord>& records,
                                      double k, double phi,
                                      const NoiseParams& params,
                                      bool include_noise) {
  const MiscalModel m{k, phi};
  const GateTable table = miscal_gate_table(params, m, include_noise);
  const NoiseParams eff = include_noise ? params : NoiseParams{};
  double prod = 1.0;
  double logsum = 0.0;
  for (const ShotRecord& r : records) {
    const Circuit& c = circuits[static_cast<std::size_t>(r.circuit_id)];
    const double p_sim = circuit_probability(c, table, eff);
    const double p_exp =
        static_cast<double>(r.count_target) / static_cast<double>(r.shots);
    const double fi = (p_sim - p_exp) * (p_sim - p_exp);
    prod *= 1.0 - fi;
    logsum += std::log1p(-fi);  // -inf when fi == 1; argmax handles it
  }
  return {prod, logsum};
}

/// Deterministic argmax over log scores: larger wins; within 1e-12 the point
/// nearer (1, pi/2) wins; then smaller (i, j).
void select_argmax(CalibrationMap* map) {
  const double kTieTol = 1e-12;
  int bi = 0;
  int bj = 0;
  double best = -std::numeric_limits<double>::infinity();
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(map->k_grid.size()); ++i) {
    for (int j = 0; j < static_cast<int>(map->phi_grid.size()); ++j) {
      const double s = map->log_scores(i, j);
      const double dk = map->k_grid[i] - 1.0;
      const double dphi = map->phi_grid[j] - kPi / 2.0;
      const double dist = dk * dk + dphi * dphi;
      const bool better =
          s > best + kTieTol ||
          (s >= best - kTieTol && dist < best_dist - kTieTol * kTieTol);
      if (better) {
        bi = i;
        bj = j;
        best = s;
        best_dist = dist;
      }
    }
  }
  map->best_i = bi;
  map->best_j = bj;
  map->argmax = MiscalModel{map->k_grid[bi], map->phi_grid[bj]};
}

}  // namespace

CalibrationMap score_map(const std::vector<Circuit>& circuits,
                         const std::vector<ShotRecord>& records,
                         const std::vector<double>& k_grid,
                         const std::vector<double>& phi_grid,
                         const NoiseParams& params, bool include_noise) {
  if (records.empty()) throw InsufficientDataError("no records to score");
  if (k_grid.empty() || phi_grid.empty()) {
    throw ConfigError("calibration grids must be nonempty");
  }
  for (const ShotRecord& r : records) {
    if (r.circuit_id < 0 ||
        static_cast<std::size_t>(r.circuit_id) >= circuits.size()) {
      throw DataFormatError("record references unknown circuit id");
    }
    if (r.shots <= 0) throw DataFormatError("record with no shots");
  }
  CalibrationMap map;
  map.k_grid = k_grid;
  map.phi_grid = phi_grid;
  const int nk = static_cast<int>(k_grid.size());
  const int np = static_cast<int>(phi_grid.size());
  map.scores.resize(nk, np);
  map.log_scores.resize(nk, np);
  par::for_index(static_cast<std::size_t>(nk) * np, [&](std::size_t flat) {
    const int i = static_cast<int>(flat) / np;
    const int j = static_cast<int>(flat) % np;
    const auto [prod, logsum] = score_point(circuits, records, k_grid[i],
                                            phi_grid[j], params, include_noise);
    map.scores(i, j) = prod;
    map.log_scores(i, j) = logsum;
  });
  select_argmax(&map);
  return map;
}

CalibrationMap refine_map(const std::vector<Circuit>& circuits,
                          const std::vector<ShotRecord>& records,
                          const CalibrationMap& coarse,
                          const NoiseParams& params, bool include_noise) {
  const auto step_of = [](const std::vector<double>& g, double fallback) {
    return g.size() >= 2 ? g[1] - g[0] : fallback;
  };
  const double ks = step_of(coarse.k_grid, 0.005);
  const double ps = step_of(coarse.phi_grid, 0.005);
  const double k0 = coarse.argmax.k;
  const double p0 = coarse.argmax.phi;
  return score_map(circuits, records, make_grid(k0 - ks, k0 + ks, ks / 10.0),
                   make_grid(p0 - ps, p0 + ps, ps / 10.0), params,
                   include_noise);
}

CalibrationResult run_calibration(const std::vector<Circuit>& circuits,
                                  const std::vector<ShotRecord>& records,
                                  const GridSpec& grids,
                                  const NoiseParams& params,
                                  bool include_noise) {
  CalibrationResult result;
  result.coarse = score_map(
      circuits, records, make_grid(grids.k_min, grids.k_max, grids.k_step),
      make_grid(grids.phi_min, grids.phi_max, grids.phi_step), params,
      include_noise);
  result.refined =
      refine_map(circuits, records, result.coarse, params, include_noise);
  result.found = result.refined.argmax;
  return result;
}

std::pair<double, double> correct_controls(double current_tau_s,
                                           double current_phi_rad,
                                           const MiscalModel& found) {
  if (!(found.k > 0.0)) {
    throw UnphysicalParamsError("cannot correct controls with k <= 0");
  }
  return {current_tau_s / found.k,
          current_phi_rad - (found.phi - kPi / 2.0)};
}

MiscalModel apply_correction(const MiscalModel& effective,
                             const MiscalModel& found) {
  if (!(found.k > 0.0)) {
    throw UnphysicalParamsError("cannot correct controls with k <= 0");
  }
  return MiscalModel{effective.k / found.k,
                     effective.phi - (found.phi - kPi / 2.0)};
}

CalibrationLoopResult calibration_loop(const MiscalModel& injected,
                                       const std::vector<Circuit>& circuits,
                                       const GridSpec& grids,
                                       const NoiseParams& params, int shots,
                                       std::uint64_t seed, bool include_noise,
                                       int max_rounds, double tol) {
  validate(injected);
  if (max_rounds <= 0) throw ConfigError("max_rounds must be positive");
  if (circuits.empty()) throw InsufficientDataError("no calibration circuits");
  const std::vector<Gate> labels = generator_set();
  CalibrationLoopResult result;
  MiscalModel effective = injected;
  for (int round = 0; round < max_rounds; ++round) {
    const std::uint64_t offset =
        static_cast<std::uint64_t>(round) * circuits.size();
    const std::vector<ShotRecord> records = simulate_miscal_records(
        circuits, params, effective, shots, seed, include_noise, offset);
    const CalibrationResult cal =
        run_calibration(circuits, records, grids, params, include_noise);
    CalibrationRound rec;
    rec.effective = effective;
    rec.found = cal.found;
    rec.fidelity_before = mean_coherent_fidelity(effective, labels);
    effective = apply_correction(effective, cal.found);
    rec.fidelity_after = mean_coherent_fidelity(effective, labels);
    result.rounds.push_back(rec);
    if (std::abs(cal.found.k - 1.0) < tol &&
        std::abs(cal.found.phi - kPi / 2.0) < tol) {
      result.converged = true;
      break;
    }
  }
  result.final_effective = effective;
  return result;
}

}  // namespace qbench
