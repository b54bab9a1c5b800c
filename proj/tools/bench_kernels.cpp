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

// Times each parallel kernel under the OpenMP policy against the serial
// reference implementation and verifies the outputs are identical. Exits
// nonzero on any mismatch, so it doubles as a determinism smoke test.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qbench/calibrate.hpp"
#include "qbench/drb.hpp"
#include "qbench/gauge.hpp"
#include "qbench/gst.hpp"
#include "qbench/parallel.hpp"

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

bool all_match = true;

template <typename F, typename Eq>
void bench(const std::string& name, F&& kernel, Eq&& equal) {
  qbench::par::set_policy(qbench::par::Policy::Serial);
  auto t0 = std::chrono::steady_clock::now();
  const auto serial = kernel();
  const double serial_ms = ms_since(t0);

  qbench::par::set_policy(qbench::par::Policy::OpenMP);
  t0 = std::chrono::steady_clock::now();
  const auto openmp = kernel();
  const double openmp_ms = ms_since(t0);

  const bool match = equal(serial, openmp);
  all_match = all_match && match;
  std::printf("%-22s serial %9.2f ms   openmp %9.2f ms   x%5.2f   %s\n",
              name.c_str(), serial_ms, openmp_ms,
              openmp_ms > 0.0 ? serial_ms / openmp_ms : 0.0,
              match ? "identical" : "MISMATCH");
}

bool records_equal(const std::vector<qbench::ShotRecord>& a,
                   const std::vector<qbench::ShotRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].circuit_id != b[i].circuit_id || a[i].shots != b[i].shots ||
        a[i].count_target != b[i].count_target) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  qbench::NoiseParams noise;
  noise.p01 = 0.01;
  noise.p10 = 0.25;

  const std::vector<qbench::Circuit> drb_circuits =
      qbench::generate_drb_circuits({0, 16, 32, 64, 128}, 20, 7);
  const std::vector<qbench::ShotRecord> drb_records =
      qbench::simulate_records(drb_circuits, noise, 1000, 7);

  bench(
      "drb_simulate",
      [&] { return qbench::simulate_records(drb_circuits, noise, 1000, 7); },
      records_equal);

  bench(
      "drb_bootstrap",
      [&] {
        qbench::PooledDecayFit fits =
            qbench::fit_decay_both(drb_circuits, drb_records);
        qbench::drb_bootstrap_ci(drb_circuits, drb_records, 100, 7, {}, &fits);
        return fits;
      },
      [](const qbench::PooledDecayFit& a, const qbench::PooledDecayFit& b) {
        return a.fit0.ci95.fidelity == b.fit0.ci95.fidelity &&
               a.fit1.ci95.fidelity == b.fit1.ci95.fidelity &&
               a.pooled_p_ci95 == b.pooled_p_ci95 &&
               a.pooled_fidelity_ci95 == b.pooled_fidelity_ci95;
      });

  const std::vector<qbench::Circuit> cal_circuits =
      qbench::generate_drb_circuits({0, 8, 16}, 10, 11);
  const qbench::MiscalModel injected{1.03, qbench::kPi / 2.0 - 0.04};
  const std::vector<qbench::ShotRecord> cal_records =
      qbench::simulate_miscal_records(cal_circuits, noise, injected, 2000, 11);
  const std::vector<double> k_grid = qbench::make_grid(0.9, 1.1, 0.005);
  const std::vector<double> phi_grid =
      qbench::make_grid(qbench::kPi / 2.0 - 0.1, qbench::kPi / 2.0 + 0.1,
                        0.005);

  bench(
      "calibration_score_map",
      [&] {
        return qbench::score_map(cal_circuits, cal_records, k_grid, phi_grid,
                                 noise);
      },
      [](const qbench::CalibrationMap& a, const qbench::CalibrationMap& b) {
        return a.best_i == b.best_i && a.best_j == b.best_j &&
               (a.scores - b.scores).cwiseAbs().maxCoeff() == 0.0 &&
               (a.log_scores - b.log_scores).cwiseAbs().maxCoeff() == 0.0;
      });

  const qbench::GstDesign design;
  const std::vector<qbench::Circuit> gst_circuits =
      qbench::generate_gst_circuits(design);
  const std::vector<qbench::ShotRecord> gst_records = qbench::simulate_records(
      gst_circuits, noise, 2000, 7, 0, qbench::kStreamGstShots);
  const qbench::GstData gst_data{gst_circuits, gst_records};

  bench(
      "gst_mle",
      [&] {
        qbench::MleOptions opts;
        opts.max_iters = 60;
        qbench::MleDiagnostics diag;
        const qbench::GateSetEstimate est = qbench::mle_refine(
            qbench::linear_inversion(gst_data, design), gst_data, opts, &diag);
        return std::make_pair(est, diag.loglik_trace);
      },
      [](const auto& a, const auto& b) {
        if (a.second != b.second) return false;
        for (const auto& [g, sup] : a.first.gates) {
          if ((sup.mat - b.first.gates.at(g).mat).cwiseAbs().maxCoeff() !=
              0.0) {
            return false;
          }
        }
        return true;
      });

  bench(
      "gauge_fix_delta",
      [&] {
        const qbench::GateSetEstimate truth =
            qbench::truth_estimate(design, noise);
        return qbench::fix_delta(truth).first;
      },
      [](double a, double b) { return a == b; });

  if (!all_match) {
    std::printf("kernel outputs differ between policies\n");
    return 1;
  }
  return 0;
}
