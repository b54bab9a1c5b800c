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

#include "qbench/fit.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include "qbench/parallel.hpp"
#include "qbench/rng.hpp"

namespace qbench {

namespace {

// p^m with the m = 0 case pinned to 1 even at p = 0.
double powm(double p, double m) { return m == 0.0 ? 1.0 : std::pow(p, m); }

// d/dp of p^m.
double dpowm(double p, double m) {
  return m == 0.0 ? 0.0 : m * std::pow(p, m - 1.0);
}

using EvalFn =
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&,
                       Eigen::MatrixXd&)>;
using ProjectFn = std::function<void(Eigen::VectorXd&)>;

struct LmResult {
  Eigen::VectorXd theta;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Projected Levenberg-Marquardt: damped Gauss-Newton steps, each candidate
// projected onto the constraint set before its cost is evaluated.
LmResult lm_fit(Eigen::VectorXd theta, const EvalFn& eval,
                const ProjectFn& project, int max_iters) {
  project(theta);
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  eval(theta, r, jac);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  LmResult result;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    Eigen::MatrixXd damped = jtj;
    for (Eigen::Index i = 0; i < damped.rows(); ++i) {
      damped(i, i) += lambda * std::max(jtj(i, i), 1e-12);
    }
    const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
    Eigen::VectorXd cand = theta + step;
    project(cand);
    Eigen::VectorXd r_cand;
    Eigen::MatrixXd jac_cand;
    eval(cand, r_cand, jac_cand);
    const double cost_cand = r_cand.squaredNorm();
    if (cost_cand < cost) {
      const double moved = (cand - theta).norm();
      const double improved = cost - cost_cand;
      theta = cand;
      r = r_cand;
      jac = jac_cand;
      cost = cost_cand;
      lambda = std::max(lambda / 3.0, 1e-12);
      if (moved < 1e-13 || improved < 1e-17 * (1.0 + cost)) {
        result.converged = true;
        break;
      }
    } else {
      lambda *= 4.0;
      if (lambda > 1e13) {
        result.converged = true;  // stuck at a (projected) stationary point
        break;
      }
    }
  }
  result.theta = theta;
  result.rss = cost;
  result.iterations = iter;
  if (iter >= max_iters) result.converged = false;
  return result;
}

// Project (a, b) onto the boxes intersected with a + b <= 1, then clamp p.
void project_ab(double& a, double& b) {
  for (int pass = 0; pass < 4; ++pass) {
    a = std::clamp(a, -1.0, 1.0);
    b = std::clamp(b, 0.0, 1.0);
    const double excess = a + b - 1.0;
    if (excess <= 0.0) return;
    a -= excess / 2.0;
    b -= excess / 2.0;
  }
  a = std::clamp(a, -1.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  if (a + b > 1.0) a = 1.0 - b;
}

void require_depth_spread(const std::vector<double>& m, std::size_t need) {
  std::set<double> distinct(m.begin(), m.end());
  if (distinct.size() < need) {
    throw InsufficientDataError(
        "decay fit needs at least " + std::to_string(need) +
        " distinct depths, got " + std::to_string(distinct.size()));
  }
}

bool is_constant(const std::vector<double>& y, double* value) {
  const double first = y.front();
  for (double v : y) {
    if (std::abs(v - first) > 1e-12) return false;
  }
  *value = first;
  return true;
}

}  // namespace

ApbFit fit_apb(const std::vector<double>& m, const std::vector<double>& y,
               int max_iters) {
  if (m.size() != y.size() || m.empty()) {
    throw InsufficientDataError("decay fit inputs empty or mismatched");
  }
  require_depth_spread(m, 3);

  double c = 0.0;
  if (is_constant(y, &c)) {
    // Degenerate plateau: any (a, b, p) with a p^m + b = c fits; take the
    // canonical representative with unit decay rate.
    ApbFit fit;
    fit.a = 0.0;
    fit.b = std::clamp(c, 0.0, 1.0);
    fit.p = 1.0;
    fit.rss = 0.0;
    fit.converged = true;
    return fit;
  }

  const auto [min_it, max_it] = std::minmax_element(m.begin(), m.end());
  const double y_first = y[std::size_t(min_it - m.begin())];
  const double y_last = y[std::size_t(max_it - m.begin())];

  Eigen::VectorXd theta(3);
  theta << y_first - y_last, std::min(y_last, 1.0), 0.99;

  auto eval = [&](const Eigen::VectorXd& t, Eigen::VectorXd& r,
                  Eigen::MatrixXd& jac) {
    const double a = t(0), b = t(1), p = t(2);
    r.resize(Eigen::Index(m.size()));
    jac.resize(Eigen::Index(m.size()), 3);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double pm = powm(p, m[i]);
      r(Eigen::Index(i)) = a * pm + b - y[i];
      jac(Eigen::Index(i), 0) = pm;
      jac(Eigen::Index(i), 1) = 1.0;
      jac(Eigen::Index(i), 2) = a * dpowm(p, m[i]);
    }
  };
  auto project = [](Eigen::VectorXd& t) {
    double a = t(0), b = t(1);
    project_ab(a, b);
    t(0) = a;
    t(1) = b;
    t(2) = std::clamp(t(2), 0.0, 1.0);
  };

  const LmResult lm = lm_fit(theta, eval, project, max_iters);
  ApbFit fit;
  fit.a = lm.theta(0);
  fit.b = lm.theta(1);
  fit.p = lm.theta(2);
  fit.rss = lm.rss;
  fit.iterations = lm.iterations;
  fit.converged = lm.converged;
  return fit;
}

PooledApbFit fit_apb_pooled(const std::vector<double>& m0,
                            const std::vector<double>& y0,
                            const std::vector<double>& m1,
                            const std::vector<double>& y1, int max_iters) {
  if (m0.size() != y0.size() || m1.size() != y1.size() || m0.empty() ||
      m1.empty()) {
    throw InsufficientDataError("pooled decay fit inputs empty or mismatched");
  }
  require_depth_spread(m0, 3);
  require_depth_spread(m1, 3);

  double c0 = 0.0, c1 = 0.0;
  if (is_constant(y0, &c0) && is_constant(y1, &c1)) {
    PooledApbFit fit;
    fit.a0 = 0.0;
    fit.b0 = std::clamp(c0, 0.0, 1.0);
    fit.a1 = 0.0;
    fit.b1 = std::clamp(c1, 0.0, 1.0);
    fit.p = 1.0;
    fit.rss = 0.0;
    fit.converged = true;
    return fit;
  }

  const ApbFit init0 = fit_apb(m0, y0, max_iters);
  const ApbFit init1 = fit_apb(m1, y1, max_iters);

  Eigen::VectorXd theta(5);
  theta << init0.a, init0.b, init1.a, init1.b,
      0.5 * (init0.p + init1.p);

  const std::size_t n0 = m0.size();
  const std::size_t n = n0 + m1.size();
  auto eval = [&](const Eigen::VectorXd& t, Eigen::VectorXd& r,
                  Eigen::MatrixXd& jac) {
    const double a0 = t(0), b0 = t(1), a1 = t(2), b1 = t(3), p = t(4);
    r.resize(Eigen::Index(n));
    jac.setZero(Eigen::Index(n), 5);
    for (std::size_t i = 0; i < n0; ++i) {
      const double pm = powm(p, m0[i]);
      r(Eigen::Index(i)) = a0 * pm + b0 - y0[i];
      jac(Eigen::Index(i), 0) = pm;
      jac(Eigen::Index(i), 1) = 1.0;
      jac(Eigen::Index(i), 4) = a0 * dpowm(p, m0[i]);
    }
    for (std::size_t i = 0; i < m1.size(); ++i) {
      const Eigen::Index row = Eigen::Index(n0 + i);
      const double pm = powm(p, m1[i]);
      r(row) = a1 * pm + b1 - y1[i];
      jac(row, 2) = pm;
      jac(row, 3) = 1.0;
      jac(row, 4) = a1 * dpowm(p, m1[i]);
    }
  };
  auto project = [](Eigen::VectorXd& t) {
    double a0 = t(0), b0 = t(1), a1 = t(2), b1 = t(3);
    project_ab(a0, b0);
    project_ab(a1, b1);
    t(0) = a0;
    t(1) = b0;
    t(2) = a1;
    t(3) = b1;
    t(4) = std::clamp(t(4), 0.0, 1.0);
  };

  const LmResult lm = lm_fit(theta, eval, project, max_iters);
  PooledApbFit fit;
  fit.a0 = lm.theta(0);
  fit.b0 = lm.theta(1);
  fit.a1 = lm.theta(2);
  fit.b1 = lm.theta(3);
  fit.p = lm.theta(4);
  fit.rss = lm.rss;
  fit.iterations = lm.iterations;
  fit.converged = lm.converged;
  return fit;
}

Eigen::VectorXd bootstrap_ci(
    const std::vector<ShotRecord>& records, int resamples, std::uint64_t seed,
    const std::function<Eigen::VectorXd(const std::vector<ShotRecord>&)>&
        estimator,
    std::uint64_t stream_offset, Stream stream) {
  if (resamples < 100) {
    throw InsufficientDataError("bootstrap needs at least 100 resamples, got " +
                                std::to_string(resamples));
  }
  if (records.empty()) {
    throw InsufficientDataError("bootstrap over empty record list");
  }

  std::vector<std::optional<Eigen::VectorXd>> slots(
      static_cast<std::size_t>(resamples));
  par::for_index(std::size_t(resamples), [&](std::size_t r) {
    Rng rng(derive_seed(seed, stream, stream_offset + r));
    std::vector<ShotRecord> resampled = records;
    for (ShotRecord& rec : resampled) {
      const double freq = double(rec.count_target) / double(rec.shots);
      rec.count_target = static_cast<int>(rng.binomial(rec.shots, freq));
    }
    try {
      slots[r] = estimator(resampled);
    } catch (const Error&) {
      slots[r] = std::nullopt;
    }
  });

  // Serial reduction in resample order keeps the result thread-independent.
  Eigen::Index dim = -1;
  std::vector<const Eigen::VectorXd*> ok;
  ok.reserve(slots.size());
  for (const auto& s : slots) {
    if (s.has_value()) {
      if (dim < 0) dim = s->size();
      ok.push_back(&s.value());
    }
  }
  const std::size_t failures = slots.size() - ok.size();
  if (failures * 20 > slots.size()) {
    throw BootstrapInstabilityError(
        "estimator failed on " + std::to_string(failures) + " of " +
        std::to_string(slots.size()) + " resamples");
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto* v : ok) mean += *v;
  mean /= double(ok.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (const auto* v : ok) var += (*v - mean).cwiseAbs2();
  var /= double(ok.size() > 1 ? ok.size() - 1 : 1);
  return 1.96 * var.cwiseSqrt();
}

}  // namespace qbench
