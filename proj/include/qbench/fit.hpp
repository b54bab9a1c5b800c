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

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qbench/circuit.hpp"
#include "qbench/errors.hpp"
#include "qbench/rng.hpp"

namespace qbench {

/// Least-squares fit of y = a * p^m + b with boxes a in [-1,1], b in [0,1],
/// p in [0,1] and the extra face a + b <= 1 (a probability at m = 0).
struct ApbFit {
  double a = 0.0;
  double b = 0.0;
  double p = 0.0;
  double rss = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Same decay rate shared by two curves with independent (a, b).
struct PooledApbFit {
  double a0 = 0.0, b0 = 0.0;
  double a1 = 0.0, b1 = 0.0;
  double p = 0.0;
  double rss = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Throws InsufficientDataError with fewer than 3 distinct depths.
ApbFit fit_apb(const std::vector<double>& m, const std::vector<double>& y,
               int max_iters = 500);

PooledApbFit fit_apb_pooled(const std::vector<double>& m0,
                            const std::vector<double>& y0,
                            const std::vector<double>& m1,
                            const std::vector<double>& y1,
                            int max_iters = 500);

/// Nonparametric bootstrap: per resample, each record's count is redrawn
/// as Binomial(shots, observed frequency) and the estimator is rerun on an
/// otherwise identical dataset. Returns 1.96 * std per statistic. Estimator
/// throws on more than 5% of resamples -> BootstrapInstabilityError;
/// resamples < 100 -> InsufficientDataError.
Eigen::VectorXd bootstrap_ci(
    const std::vector<ShotRecord>& records, int resamples, std::uint64_t seed,
    const std::function<Eigen::VectorXd(const std::vector<ShotRecord>&)>&
        estimator,
    std::uint64_t stream_offset = 0, Stream stream = kStreamBootstrap);

}  // namespace qbench
