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

#include "qbench/drb.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qbench/parallel.hpp"
#include "qbench/rng.hpp"

namespace qbench {

namespace {

Eigen::Vector2cd ideal_state_after(const std::vector<Gate>& prep,
                                   const std::vector<Gate>& layers) {
  Eigen::Vector2cd psi(1.0, 0.0);
  for (Gate g : prep) psi = gate_unitary(g) * psi;
  for (Gate g : layers) psi = gate_unitary(g) * psi;
  return psi;
}

bool hits_target(const Eigen::Vector2cd& psi, int target) {
  return std::norm(psi(target)) > 1.0 - 1e-10;
}

double fidelity_from_p(double p) { return p + (1.0 - p) / 2.0; }

}  // namespace

std::vector<Gate> compile_measurement(const std::vector<Gate>& prep,
                                      const std::vector<Gate>& layers,
                                      int target) {
  const Eigen::Vector2cd psi = ideal_state_after(prep, layers);
  if (hits_target(psi, target)) return {};
  const std::vector<Gate> roster = generator_set(false);
  for (Gate g : roster) {
    if (hits_target(gate_unitary(g) * psi, target)) return {g};
  }
  for (Gate g1 : roster) {
    const Eigen::Vector2cd mid = gate_unitary(g1) * psi;
    for (Gate g2 : roster) {
      if (hits_target(gate_unitary(g2) * mid, target)) return {g1, g2};
    }
  }
  throw ConstraintViolationError(
      "no 2-gate measurement maps the tracked state onto the target; "
      "the layer gates left the stabilizer states");
}

std::vector<Circuit> generate_drb_circuits(const std::vector<int>& depths,
                                           int k_per_depth, std::uint64_t seed,
                                           bool include_identity) {
  if (k_per_depth < 1) {
    throw ConfigError("circuits per depth must be >= 1");
  }
  for (int m : depths) {
    if (m < 0) throw ConfigError("negative circuit depth");
  }
  const std::vector<Gate> gens = generator_set(include_identity);
  const std::vector<Gate> preps = prep_set();

  std::vector<Circuit> circuits;
  circuits.reserve(depths.size() * 2 * std::size_t(k_per_depth));
  std::uint64_t unit = 0;
  for (int m : depths) {
    for (int target = 0; target < 2; ++target) {
      for (int k = 0; k < k_per_depth; ++k, ++unit) {
        Rng rng(derive_seed(seed, kStreamCircuitGen, unit));
        Circuit c;
        c.depth = m;
        c.target = target;
        c.prep = {preps[rng.bounded(preps.size())]};
        c.layers.reserve(std::size_t(m));
        for (int i = 0; i < m; ++i) {
          c.layers.push_back(gens[rng.bounded(gens.size())]);
        }
        c.meas = compile_measurement(c.prep, c.layers, target);
        circuits.push_back(std::move(c));
      }
    }
  }
  return circuits;
}

std::vector<ShotRecord> simulate_records(const std::vector<Circuit>& circuits,
                                         const NoiseParams& params, int shots,
                                         std::uint64_t seed,
                                         std::uint64_t site_offset,
                                         Stream stream) {
  if (shots < 1) throw ConfigError("shots must be >= 1");
  const GateTable table(params);
  std::vector<ShotRecord> records(circuits.size());
  par::for_index(circuits.size(), [&](std::size_t i) {
    records[i] = sample_record(circuits[i], int(i), table, params, shots,
                               derive_seed(seed, stream, site_offset + i));
  });
  return records;
}

namespace {

// (depths, frequencies) for one target; per-depth means unless per_circuit.
void collect_points(const std::vector<Circuit>& circuits,
                    const std::vector<ShotRecord>& records, int target,
                    bool per_circuit, std::vector<double>* ms,
                    std::vector<double>* ys,
                    std::vector<std::pair<int, double>>* depth_means) {
  std::map<int, std::pair<double, int>> acc;  // depth -> (sum freq, count)
  for (const ShotRecord& r : records) {
    const Circuit& c = circuits.at(std::size_t(r.circuit_id));
    if (c.target != target) continue;
    const double freq = double(r.count_target) / double(r.shots);
    if (per_circuit) {
      ms->push_back(double(c.depth));
      ys->push_back(freq);
    }
    auto& slot = acc[c.depth];
    slot.first += freq;
    slot.second += 1;
  }
  if (acc.empty()) {
    throw InsufficientDataError("no records for target " +
                                std::to_string(target));
  }
  for (const auto& [depth, sum_count] : acc) {
    const double mean = sum_count.first / double(sum_count.second);
    depth_means->emplace_back(depth, mean);
    if (!per_circuit) {
      ms->push_back(double(depth));
      ys->push_back(mean);
    }
  }
}

DecayFit fit_from_apb(const ApbFit& apb,
                      std::vector<std::pair<int, double>> depth_means) {
  DecayFit fit;
  fit.a = apb.a;
  fit.b = apb.b;
  fit.p = apb.p;
  fit.fidelity = fidelity_from_p(apb.p);
  fit.per_depth_means = std::move(depth_means);
  fit.rss = apb.rss;
  fit.converged = apb.converged;
  return fit;
}

}  // namespace

DecayFit fit_decay(const std::vector<Circuit>& circuits,
                   const std::vector<ShotRecord>& records, int target,
                   const FitOptions& opts) {
  std::vector<double> ms, ys;
  std::vector<std::pair<int, double>> depth_means;
  collect_points(circuits, records, target, opts.per_circuit, &ms, &ys,
                 &depth_means);
  return fit_from_apb(fit_apb(ms, ys, opts.max_iters), std::move(depth_means));
}

PooledDecayFit fit_decay_both(const std::vector<Circuit>& circuits,
                              const std::vector<ShotRecord>& records,
                              const FitOptions& opts) {
  PooledDecayFit out;
  out.fit0 = fit_decay(circuits, records, 0, opts);
  out.fit1 = fit_decay(circuits, records, 1, opts);

  std::vector<double> m0, y0, m1, y1;
  std::vector<std::pair<int, double>> means0, means1;
  collect_points(circuits, records, 0, opts.per_circuit, &m0, &y0, &means0);
  collect_points(circuits, records, 1, opts.per_circuit, &m1, &y1, &means1);
  const PooledApbFit pooled = fit_apb_pooled(m0, y0, m1, y1, opts.max_iters);
  out.pooled_p = pooled.p;
  out.pooled_fidelity = fidelity_from_p(pooled.p);
  return out;
}

SpamEstimate spam_from_fits(const DecayFit& fit0, const DecayFit& fit1) {
  SpamEstimate s;
  s.p01 = 1.0 - (fit0.a + fit0.b);
  s.p10 = 1.0 - (fit1.a + fit1.b);
  s.p01_ci95 = fit0.ci95.spam;
  s.p10_ci95 = fit1.ci95.spam;
  return s;
}

void drb_bootstrap_ci(const std::vector<Circuit>& circuits,
                      const std::vector<ShotRecord>& records, int resamples,
                      std::uint64_t seed, const FitOptions& opts,
                      PooledDecayFit* fits, std::uint64_t stream_offset) {
  if (resamples <= 0) return;  // CIs stay zero; 0 means "no bootstrap"
  auto estimator =
      [&](const std::vector<ShotRecord>& resampled) -> Eigen::VectorXd {
    const PooledDecayFit f = fit_decay_both(circuits, resampled, opts);
    Eigen::VectorXd stats(12);
    stats << f.fit0.a, f.fit0.b, f.fit0.p, f.fit0.fidelity,
        1.0 - (f.fit0.a + f.fit0.b), f.fit1.a, f.fit1.b, f.fit1.p,
        f.fit1.fidelity, 1.0 - (f.fit1.a + f.fit1.b), f.pooled_p,
        f.pooled_fidelity;
    return stats;
  };
  const Eigen::VectorXd hw =
      bootstrap_ci(records, resamples, seed, estimator, stream_offset);
  fits->fit0.ci95 = FitCi{hw(0), hw(1), hw(2), hw(3), hw(4)};
  fits->fit1.ci95 = FitCi{hw(5), hw(6), hw(7), hw(8), hw(9)};
  fits->pooled_p_ci95 = hw(10);
  fits->pooled_fidelity_ci95 = hw(11);
}

ArrayResult run_array(const ArrayScenario& scenario,
                      const std::vector<Circuit>& circuits, int shots,
                      std::uint64_t seed, const FitOptions& opts,
                      int bootstrap_resamples) {
  if (scenario.n_sites < 1) {
    throw ConfigError("array needs at least one site");
  }
  if (scenario.per_site.size() != std::size_t(scenario.n_sites)) {
    throw ConfigError("per-site parameter list does not match n_sites");
  }
  if (!scenario.site_positions.empty() &&
      scenario.site_positions.size() != std::size_t(scenario.n_sites)) {
    throw ConfigError("site position list does not match n_sites");
  }

  ArrayResult result;
  result.sites.resize(std::size_t(scenario.n_sites));
  const std::uint64_t n_circ = circuits.size();
  for (int s = 0; s < scenario.n_sites; ++s) {
    const NoiseParams& params = scenario.per_site[std::size_t(s)];
    const std::vector<ShotRecord> records = simulate_records(
        circuits, params, shots, seed, std::uint64_t(s) * n_circ);
    SiteResult site;
    site.site = s;
    if (!scenario.site_positions.empty()) {
      site.row = scenario.site_positions[std::size_t(s)].first;
      site.col = scenario.site_positions[std::size_t(s)].second;
    }
    site.fits = fit_decay_both(circuits, records, opts);
    drb_bootstrap_ci(circuits, records, bootstrap_resamples, seed, opts,
                     &site.fits,
                     std::uint64_t(s) * std::uint64_t(bootstrap_resamples));
    site.spam = spam_from_fits(site.fits.fit0, site.fits.fit1);
    result.sites[std::size_t(s)] = std::move(site);
  }

  double sum = 0.0;
  for (const SiteResult& s : result.sites) sum += s.fits.pooled_fidelity;
  result.mean_fidelity = sum / double(scenario.n_sites);
  double var = 0.0;
  for (const SiteResult& s : result.sites) {
    var += (s.fits.pooled_fidelity - result.mean_fidelity) *
           (s.fits.pooled_fidelity - result.mean_fidelity);
  }
  var /= double(std::max(scenario.n_sites - 1, 1));
  result.mean_fidelity_ci95 =
      1.96 * std::sqrt(var / double(scenario.n_sites));
  return result;
}

}  // namespace qbench
