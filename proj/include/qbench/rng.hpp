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

#include <cmath>
#include <cstdint>
#include <random>

namespace qbench {

// Deterministic seeding scheme. Every unit of randomized work (one circuit
// generation, one shot batch, one bootstrap resample, one array site) gets
// its own engine seeded from (master seed, stream id, unit index), so results
// never depend on scheduling or thread count.

/// Well-known mixing function (splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derive an independent seed for (stream, index) under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  return mix64(mix64(master ^ stream * 0xd6e8feb86659fd93ULL) ^
               index * 0xa0761d6478bd642fULL);
}

/// Stream ids; never reorder (serialized results depend on them).
enum Stream : std::uint64_t {
  kStreamCircuitGen = 1,
  kStreamShots = 2,
  kStreamBootstrap = 3,
  kStreamJitter = 4,
  kStreamGstShots = 5,
  kStreamGstBootstrap = 6,
};

/// mt19937_64 wrapper with portable derived draws. The standard
/// distributions are implementation-defined, so the draws used for results
/// are spelled out here and never change.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). Modulo bias is < n / 2^64, irrelevant here.
  std::uint64_t bounded(std::uint64_t n) { return engine_() % n; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Binomial draw by explicit Bernoulli summation; exact and portable.
  /// n stays in the thousands in this codebase, so O(n) is fine.
  std::uint64_t binomial(std::uint64_t n, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::uint64_t c = 0;
    for (std::uint64_t i = 0; i < n; ++i) c += bernoulli(p) ? 1 : 0;
    return c;
  }

  /// Standard normal (Box-Muller, both values used in turn).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qbench
