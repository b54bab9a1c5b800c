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

#include <cmath>

#include "doctest.h"

#include "oracles.hpp"
#include "qbench/calibrate.hpp"

using namespace qbench;

namespace {

NoiseParams reference_params() {
  NoiseParams p;
  p.t1_s = 100e-3;
  p.t2_s = 600e-6;
  p.gate_time_s = 10e-6;
  p.p01 = 0.01;
  p.p10 = 0.25;
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("calibrate");

TEST_CASE("model validation") {
  MiscalModel ok;
  CHECK_NOTHROW(validate(ok));
  MiscalModel bad_k{0.0, kPi / 2.0};
  CHECK_THROWS_AS(validate(bad_k), UnphysicalParamsError);
  MiscalModel bad_phi{1.0, -0.1};
  CHECK_THROWS_AS(validate(bad_phi), UnphysicalParamsError);
}

TEST_CASE("the ideal model reproduces the ideal gates") {
  MiscalModel ideal;
  for (int i = 0; i < kNumGates; ++i) {
    Gate g = static_cast<Gate>(i);
    CHECK((miscalibrated_unitary(gate_axis(g), gate_angle(g), ideal) -
           gate_unitary(g)).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK(mean_coherent_fidelity(ideal, generator_set()) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("overrotation and axis offset land where they should") {
  MiscalModel m{1.07, kPi / 2.0 + 0.12};
  // x rotations keep their axis but stretch the angle by k.
  auto ax = qtest::axis_angle(miscalibrated_unitary(Axis::X, kPi / 2.0, m));
  CHECK(ax.phi == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(ax.theta == doctest::Approx(1.07 * kPi / 2.0).epsilon(1e-10));
  CHECK(std::abs(ax.nz) < 1e-12);
  // y rotations move to the azimuth phi.
  auto ay = qtest::axis_angle(miscalibrated_unitary(Axis::Y, kPi / 2.0, m));
  CHECK(ay.phi == doctest::Approx(kPi / 2.0 + 0.12).epsilon(1e-10));
  CHECK(ay.theta == doctest::Approx(1.07 * kPi / 2.0).epsilon(1e-10));
  // Negative angles flip through the antipodal axis.
  auto axm = qtest::axis_angle(miscalibrated_unitary(Axis::X, -kPi / 2.0, m));
  CHECK(axm.phi == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(axm.theta == doctest::Approx(1.07 * kPi / 2.0).epsilon(1e-10));
  // The identity axis ignores the model.
  CHECK((miscalibrated_unitary(Axis::I, 0.0, m) -
         Mat(Mat::Identity(2, 2))).cwiseAbs().maxCoeff() == 0.0);

  CHECK(mean_coherent_fidelity(m, generator_set()) < 1.0 - 1e-4);
}

TEST_CASE("miscalibrated table with noise folds in relaxation") {
  NoiseParams p = reference_params();
  MiscalModel m{1.02, kPi / 2.0 - 0.05};
  GateTable with = miscal_gate_table(p, m, true);
  GateTable without = miscal_gate_table(p, m, false);
  Mat relax = relaxation_superop(p).mat;
  for (int i = 0; i < kNumGates; ++i) {
    Gate g = static_cast<Gate>(i);
    CHECK((with[g] - relax * without[g]).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("grid construction covers both endpoints") {
  auto g = make_grid(0.8, 1.2, 0.005);
  CHECK(g.size() == 81);
  CHECK(g.front() == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(g.back() == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("score map finds an on-grid injected error exactly") {
  NoiseParams p = reference_params();
  MiscalModel injected{1.04, kPi / 2.0 + 0.08};
  auto circuits = generate_drb_circuits({0, 8, 16, 32}, 6, 301);
  auto records = simulate_miscal_records(circuits, p, injected, 20000, 301);

  GridSpec grid;
  grid.k_min = 0.96;
  grid.k_max = 1.08;
  grid.k_step = 0.01;
  grid.phi_min = kPi / 2.0 - 0.12;
  grid.phi_max = kPi / 2.0 + 0.12;
  grid.phi_step = 0.02;
  CalibrationMap map = score_map(circuits, records, make_grid(grid.k_min,
                                 grid.k_max, grid.k_step),
                                 make_grid(grid.phi_min, grid.phi_max,
                                 grid.phi_step), p);
  CHECK(map.argmax.k == doctest::Approx(1.04).epsilon(1e-10));
  CHECK(map.argmax.phi == doctest::Approx(kPi / 2.0 + 0.08).epsilon(1e-10));
  // Scores live in (0, 1] and the log variant agrees at the argmax.
  const double s = map.scores(map.best_i, map.best_j);
  CHECK(s > 0.0);
  CHECK(s <= 1.0);
}

TEST_CASE("refinement zooms in around the coarse winner") {
  NoiseParams p = reference_params();
  MiscalModel injected{0.973, kPi / 2.0 - 0.041};
  // The axis offset only shows up in deep circuits; resolving it to one
  // refined step (5e-4 rad) needs depth-64 sequences and 5e4 shots.
  auto circuits = generate_drb_circuits({0, 16, 32, 64}, 10, 77);
  auto records = simulate_miscal_records(circuits, p, injected, 50000, 77);

  GridSpec grid;  // defaults: step 0.005 over +-0.2 / +-0.3
  CalibrationResult res = run_calibration(circuits, records, grid, p);
  CHECK(std::abs(res.found.k - injected.k) <= 0.0005 + 1e-12);
  CHECK(std::abs(res.found.phi - injected.phi) <= 0.0005 + 1e-12);
}

TEST_CASE("corrections invert the found errors") {
  MiscalModel found{1.05, kPi / 2.0 + 0.07};
  auto [tau, phi] = correct_controls(10e-6, kPi / 2.0, found);
  CHECK(tau == doctest::Approx(10e-6 / 1.05).epsilon(1e-12));
  CHECK(phi == doctest::Approx(kPi / 2.0 - 0.07).epsilon(1e-12));

  // Applying the correction to the true effective model lands on ideal.
  MiscalModel eff = apply_correction(found, found);
  CHECK(eff.k == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eff.phi == doctest::Approx(kPi / 2.0).epsilon(1e-12));

  // Correcting with the ideal finding is a no-op.
  MiscalModel same = apply_correction(found, MiscalModel{});
  CHECK(same.k == found.k);
  CHECK(same.phi == found.phi);
}

TEST_CASE("calibration loop converges on an exact-grid injection") {
  NoiseParams p = reference_params();
  MiscalModel injected{0.98, kPi / 2.0 + 0.06};
  auto circuits = generate_drb_circuits({0, 16, 32, 64}, 8, 909);
  GridSpec grid;
  grid.k_step = 0.01;
  grid.phi_step = 0.02;
  CalibrationLoopResult loop = calibration_loop(injected, circuits, grid, p,
                                                50000, 909, true, 4, 5e-3);
  CHECK(loop.converged);
  REQUIRE(!loop.rounds.empty());
  // Near the resolution floor a one-step argmax jitter can cost ~1e-6 in
  // fidelity, so the monotonicity check carries that allowance.
  for (const CalibrationRound& r : loop.rounds) {
    CHECK(r.fidelity_after >= r.fidelity_before - 1e-5);
  }
  CHECK(std::abs(loop.final_effective.k - 1.0) < 5e-3);
  CHECK(qtest::circ_dist(loop.final_effective.phi, kPi / 2.0) < 5e-3);
}

TEST_CASE("record simulation is deterministic per stream offset") {
  NoiseParams p = reference_params();
  MiscalModel m{1.01, kPi / 2.0};
  auto circuits = generate_drb_circuits({0, 4}, 3, 11);
  auto a = simulate_miscal_records(circuits, p, m, 500, 11, true, 0);
  auto b = simulate_miscal_records(circuits, p, m, 500, 11, true, 0);
  auto c = simulate_miscal_records(circuits, p, m, 500, 11, true, 64);
  REQUIRE(a.size() == b.size());
  bool all_equal = true, any_differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    all_equal &= a[i].count_target == b[i].count_target;
    any_differ |= a[i].count_target != c[i].count_target;
  }
  CHECK(all_equal);
  CHECK(any_differ);
}

TEST_SUITE_END();
