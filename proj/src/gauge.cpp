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

#include "qbench/gauge.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qbench/parallel.hpp"

namespace qbench {

namespace {

double offdiag_sq(const Eigen::Matrix2cd& m) {
  return std::norm(m(0, 1)) + std::norm(m(1, 0));
}

Eigen::Matrix2cd zy_unitary(double alpha, double beta) {
  // Third ZYZ angle omitted: right-multiplying u by a diagonal unitary
  // leaves every |offdiag| in u^dag X u unchanged.
  return rz_unitary(alpha) * rotation_unitary(kPi / 2.0, beta);
}

struct DiagProblem {
  Eigen::Matrix2cd rho;
  std::vector<Eigen::Matrix2cd> povm;

  double objective(double alpha, double beta) const {
    const Eigen::Matrix2cd u = zy_unitary(alpha, beta);
    double f = offdiag_sq(u.adjoint() * rho * u);
    for (const auto& o : povm) f += offdiag_sq(u.adjoint() * o * u);
    return f;
  }
};

// Plain 2-d Nelder-Mead descent. Deterministic: fixed start simplex, fixed
// coefficients, index-stable sorting.
std::pair<Eigen::Vector2d, double> nelder_mead_2d(
    const DiagProblem& prob, const Eigen::Vector2d& start, double scale,
    int max_iters) {
  std::array<Eigen::Vector2d, 3> x = {
      start, start + Eigen::Vector2d(scale, 0.0),
      start + Eigen::Vector2d(0.0, scale)};
  std::array<double, 3> f;
  for (int i = 0; i < 3; ++i) f[std::size_t(i)] = prob.objective(x[std::size_t(i)](0), x[std::size_t(i)](1));

  const auto order = [&] {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return f[std::size_t(a)] < f[std::size_t(b)];
    });
    std::array<Eigen::Vector2d, 3> xs;
    std::array<double, 3> fs;
    for (int i = 0; i < 3; ++i) {
      xs[std::size_t(i)] = x[std::size_t(idx[std::size_t(i)])];
      fs[std::size_t(i)] = f[std::size_t(idx[std::size_t(i)])];
    }
    x = xs;
    f = fs;
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    order();
    const double size = (x[1] - x[0]).norm() + (x[2] - x[0]).norm();
    if (f[2] - f[0] < 1e-15 && size < 1e-9) break;

    const Eigen::Vector2d centroid = (x[0] + x[1]) / 2.0;
    const Eigen::Vector2d refl = centroid + (centroid - x[2]);
    const double f_refl = prob.objective(refl(0), refl(1));
    if (f_refl < f[0]) {
      const Eigen::Vector2d exp_pt = centroid + 2.0 * (centroid - x[2]);
      const double f_exp = prob.objective(exp_pt(0), exp_pt(1));
      if (f_exp < f_refl) {
        x[2] = exp_pt;
        f[2] = f_exp;
      } else {
        x[2] = refl;
        f[2] = f_refl;
      }
      continue;
    }
    if (f_refl < f[1]) {
      x[2] = refl;
      f[2] = f_refl;
      continue;
    }
    const Eigen::Vector2d contr = centroid + 0.5 * (x[2] - centroid);
    const double f_contr = prob.objective(contr(0), contr(1));
    if (f_contr < f[2]) {
      x[2] = contr;
      f[2] = f_contr;
      continue;
    }
    for (int i = 1; i < 3; ++i) {
      x[std::size_t(i)] = x[0] + 0.5 * (x[std::size_t(i)] - x[0]);
      f[std::size_t(i)] =
          prob.objective(x[std::size_t(i)](0), x[std::size_t(i)](1));
    }
  }
  order();
  return {x[0], f[0]};
}

Superoperator rotation_transform(const Eigen::Matrix2cd& w) {
  // Conjugating every object by w is the gauge move T = superop(w^dag):
  // rho -> vec(w^dag rho w), M -> vec(w^dag M w), G -> T G T^-1.
  return superop_from_unitary(w.adjoint());
}

double delta_objective(const GateSetEstimate& est, double delta) {
  const Superoperator rz = superop_from_unitary(rz_unitary(delta));
  double total = 0.0;
  for (const auto& [g, sup] : est.gates) {
    const Superoperator rotated{rz.mat.adjoint() * sup.mat * rz.mat};
    total += avg_fidelity(superop_from_unitary(gate_unitary(g)), rotated);
  }
  return total;
}

}  // namespace

Superoperator GaugeTransform::as_superop() const {
  return rotation_transform(rz_unitary(delta) * u);
}

double offdiag_weight(const GateSetEstimate& est) {
  double f = offdiag_sq(devectorize(est.rho).mat);
  for (const auto& o : est.povm) f += offdiag_sq(devectorize_mat(o.vec));
  return f;
}

std::pair<GaugeTransform, GateSetEstimate> joint_diagonalize(
    const GateSetEstimate& est, double warn_threshold, bool* warning,
    double* achieved_f) {
  DiagProblem prob;
  prob.rho = devectorize(est.rho).mat;
  for (const auto& o : est.povm) prob.povm.push_back(devectorize_mat(o.vec));

  // The identity frame is the baseline; a descent run only wins by strict
  // improvement, so the achieved f never exceeds the input's.
  Eigen::Vector2d best = Eigen::Vector2d::Zero();
  double best_f = prob.objective(0.0, 0.0);
  for (double beta : {kPi / 4.0, 3.0 * kPi / 4.0}) {
    for (double alpha :
         {kPi / 4.0, 3.0 * kPi / 4.0, 5.0 * kPi / 4.0, 7.0 * kPi / 4.0}) {
      const auto [xmin, fmin] =
          nelder_mead_2d(prob, Eigen::Vector2d(alpha, beta), 0.35, 500);
      if (fmin < best_f) {
        best = xmin;
        best_f = fmin;
      }
    }
  }

  Eigen::Matrix2cd u = zy_unitary(best(0), best(1));
  GateSetEstimate rotated = transform_gauge(est, rotation_transform(u).mat);

  // Residual permutation gauge: keep the outcome-0 element |0>-dominant.
  const Eigen::Matrix2cd m0 = devectorize_mat(rotated.povm.at(0).vec);
  if (m0(0, 0).real() < m0(1, 1).real()) {
    u = u * pauli_x();
    rotated = transform_gauge(est, rotation_transform(u).mat);
  }

  if (warning) *warning = best_f > warn_threshold;
  if (achieved_f) *achieved_f = best_f;
  GaugeTransform t;
  t.u = u;
  t.delta = 0.0;
  return {t, std::move(rotated)};
}

std::pair<double, GateSetEstimate> fix_delta(const GateSetEstimate& est,
                                             bool* degenerate) {
  constexpr int kGrid = 3600;
  const double step = 2.0 * kPi / kGrid;

  std::vector<double> score(kGrid);
  par::for_index(std::size_t(kGrid), [&](std::size_t i) {
    score[i] = delta_objective(est, double(i) * step);
  });

  double best = score[0];
  for (double s : score) best = std::max(best, s);

  // Group near-optimal grid points into circularly adjacent clusters.
  constexpr double kTieTol = 1e-9;
  std::vector<char> near_opt(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    near_opt[std::size_t(i)] = score[std::size_t(i)] >= best - kTieTol;
  }
  std::vector<std::pair<int, int>> clusters;  // [first, last] inclusive
  for (int i = 0; i < kGrid; ++i) {
    if (!near_opt[std::size_t(i)]) continue;
    if (!clusters.empty() && clusters.back().second == i - 1) {
      clusters.back().second = i;
    } else {
      clusters.emplace_back(i, i);
    }
  }
  bool wrapped = false;
  if (clusters.size() > 1 && clusters.front().first == 0 &&
      clusters.back().second == kGrid - 1) {
    clusters.front().first = clusters.back().first - kGrid;  // unwrap
    clusters.pop_back();
    wrapped = true;
  }
  const bool degen = clusters.size() > 1 ||
                     (clusters.size() == 1 &&
                      clusters[0].second - clusters[0].first + 1 > 10);
  if (degenerate) *degenerate = degen;

  // Smallest delta >= 0 wins on ties: the first cluster (a wrapped cluster
  // contains delta = 0 and is first by construction).
  int best_idx = 0;
  {
    const auto& [lo, hi] = clusters.front();
    double best_in = -1.0;
    for (int i = lo; i <= hi; ++i) {
      const int wrapped_i = (i % kGrid + kGrid) % kGrid;
      if (score[std::size_t(wrapped_i)] > best_in) {
        best_in = score[std::size_t(wrapped_i)];
        best_idx = i;
      }
    }
    if (wrapped && lo <= 0 && hi >= 0) best_idx = 0;  // prefer delta = 0
  }

  // Golden-section refinement on the bracketing interval.
  double a = double(best_idx - 1) * step;
  double b = double(best_idx + 1) * step;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = delta_objective(est, c);
  double fd = delta_objective(est, d);
  while (b - a > 1e-9) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = delta_objective(est, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = delta_objective(est, d);
    }
  }
  double delta = (a + b) / 2.0;
  if (std::abs(delta) < 1e-10) delta = 0.0;
  if (delta < 0.0) delta += 2.0 * kPi;
  if (delta >= 2.0 * kPi) delta -= 2.0 * kPi;

  GateSetEstimate out = transform_gauge(
      est, rotation_transform(rz_unitary(delta)).mat);
  return {delta, std::move(out)};
}

GaugeFixResult gauge_fix(const GateSetEstimate& est) {
  GaugeFixResult r;
  auto [partial, diag] =
      joint_diagonalize(est, 1e-4, &r.diag_warning, &r.f_min);
  auto [delta, canon] = fix_delta(diag, &r.delta_degenerate);
  r.transform.u = partial.u;
  r.transform.delta = delta;
  r.estimate = std::move(canon);
  r.estimate.gauge_fixed = true;
  r.estimate.loglik = est.loglik;  // probabilities, hence loglik, invariant
  for (const auto& [g, sup] : r.estimate.gates) {
    r.fidelity[g] = avg_fidelity(superop_from_unitary(gate_unitary(g)), sup);
  }
  return r;
}

}  // namespace qbench
