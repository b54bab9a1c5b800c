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
#include <vector>

#include "doctest.h"

#include "qbench/fit.hpp"

using namespace qbench;

namespace {

std::vector<double> depths() { return {0, 25, 50, 100, 250, 500, 750, 1000}; }

std::vector<double> curve(double a, double b, double p,
                          const std::vector<double>& m) {
  std::vector<double> y;
  for (double d : m) y.push_back(a * std::pow(p, d) + b);
  return y;
}

}  // namespace

TEST_SUITE_BEGIN("fit");

TEST_CASE("exact data is recovered") {
  auto m = depths();
  auto y = curve(0.47, 0.51, 0.989, m);
  ApbFit f = fit_apb(m, y);
  CHECK(f.converged);
  CHECK(f.a == doctest::Approx(0.47).epsilon(1e-8));
  CHECK(f.b == doctest::Approx(0.51).epsilon(1e-8));
  CHECK(f.p == doctest::Approx(0.989).epsilon(1e-9));
  CHECK(f.rss < 1e-16);
}

TEST_CASE("negative amplitude branch (target 1 curves rise)") {
  auto m = depths();
  auto y = curve(-0.24, 0.74, 0.9905, m);
  ApbFit f = fit_apb(m, y);
  CHECK(f.a == doctest::Approx(-0.24).epsilon(1e-7));
  CHECK(f.b == doctest::Approx(0.74).epsilon(1e-7));
  CHECK(f.p == doctest::Approx(0.9905).epsilon(1e-9));
}

TEST_CASE("noisy fit beats a brute-force grid") {
  auto m = depths();
  auto clean = curve(0.48, 0.5, 0.991, m);
  // Fixed perturbation pattern, no RNG needed.
  std::vector<double> y = clean;
  const double bump[] = {0.004, -0.003, 0.002, -0.004,
                         0.003, -0.002, 0.004, -0.003};
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bump[i];

  ApbFit f = fit_apb(m, y);
  auto rss_of = [&](double a, double b, double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      double r = a * std::pow(p, m[i]) + b - y[i];
      acc += r * r;
    }
    return acc;
  };
  double best = 1e9;
  for (double a = 0.38; a <= 0.58; a += 0.002) {
    for (double b = 0.40; b <= 0.60; b += 0.002) {
      for (double p = 0.985; p <= 0.996; p += 0.0002) {
        best = std::min(best, rss_of(a, b, p));
      }
    }
  }
  CHECK(f.rss <= best + 1e-12);
}

TEST_CASE("box constraints hold on adversarial data") {
  // y(0) > 1 pulls toward a + b > 1, which the simplex face forbids.
  auto m = depths();
  auto y = curve(0.7, 0.4, 0.99, m);
  ApbFit f = fit_apb(m, y);
  CHECK(f.a + f.b <= 1.0 + 1e-9);
  CHECK(f.p >= 0.0);
  CHECK(f.p <= 1.0);
  CHECK(f.b >= 0.0);
}

TEST_CASE("too few distinct depths throws") {
  std::vector<double> m = {0, 0, 100, 100};
  std::vector<double> y = {0.9, 0.91, 0.5, 0.52};
  CHECK_THROWS_AS(fit_apb(m, y), InsufficientDataError);
}

TEST_CASE("pooled fit shares the decay rate") {
  auto m = depths();
  auto y0 = curve(0.46, 0.52, 0.9902, m);
  auto y1 = curve(-0.22, 0.73, 0.9902, m);
  PooledApbFit f = fit_apb_pooled(m, y0, m, y1);
  CHECK(f.converged);
  CHECK(f.p == doctest::Approx(0.9902).epsilon(1e-9));
  CHECK(f.a0 == doctest::Approx(0.46).epsilon(1e-7));
  CHECK(f.b0 == doctest::Approx(0.52).epsilon(1e-7));
  CHECK(f.a1 == doctest::Approx(-0.22).epsilon(1e-7));
  CHECK(f.b1 == doctest::Approx(0.73).epsilon(1e-7));
}

TEST_CASE("bootstrap confidence interval on a frequency estimator") {
  std::vector<ShotRecord> records;
  for (int i = 0; i < 40; ++i) {
    ShotRecord r;
    r.circuit_id = i;
    r.shots = 1000;
    r.count_target = 700 + (i % 7);
    records.push_back(r);
  }
  auto estimator = [](const std::vector<ShotRecord>& recs) {
    double acc = 0.0;
    for (const auto& r : recs) {
      acc += static_cast<double>(r.count_target) / r.shots;
    }
    return Eigen::VectorXd::Constant(1, acc / static_cast<double>(recs.size()));
  };
  Eigen::VectorXd ci = bootstrap_ci(records, 200, 31, estimator);
  // Mean of 40 binomial(1000, ~0.7) frequencies: sigma ~ sqrt(0.21/1000/40).
  const double expect = 1.96 * std::sqrt(0.7 * 0.3 / 1000.0 / 40.0);
  CHECK(ci(0) > 0.3 * expect);
  CHECK(ci(0) < 3.0 * expect);

  // Same seed, same interval.
  Eigen::VectorXd again = bootstrap_ci(records, 200, 31, estimator);
  CHECK(ci(0) == again(0));

  CHECK_THROWS_AS(bootstrap_ci(records, 50, 31, estimator),
                  InsufficientDataError);

  auto fragile = [](const std::vector<ShotRecord>&) -> Eigen::VectorXd {
    throw InsufficientDataError("always fails");
  };
  CHECK_THROWS_AS(bootstrap_ci(records, 200, 31, fragile),
                  BootstrapInstabilityError);
}

TEST_SUITE_END();
