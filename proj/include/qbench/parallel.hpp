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

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qbench::par {

// Parallel kernels write into preallocated indexed slots and reductions run
// serially in index order afterwards, so OpenMP and Serial produce identical
// bytes. The serial path is kept as the reference implementation for tests
// and for the kernel benchmark.

enum class Policy { Serial, OpenMP };

namespace detail {
inline Policy& policy_ref() {
  static Policy p = Policy::OpenMP;
  return p;
}
inline int& threads_ref() {
  static int t = 0;  // 0 = library default
  return t;
}
}  // namespace detail

inline void set_policy(Policy p) { detail::policy_ref() = p; }
inline Policy policy() { return detail::policy_ref(); }

/// 0 means "leave the OpenMP default alone".
inline void set_threads(int n) { detail::threads_ref() = n; }
inline int threads() { return detail::threads_ref(); }

/// Run f(i) for i in [0, n). Under the OpenMP policy iterations are spread
/// across threads; f must only touch slot i of shared state.
template <typename F>
void for_index(std::size_t n, F&& f) {
#ifdef _OPENMP
  if (policy() == Policy::OpenMP) {
    const int nt = threads();
    if (nt > 0) {
#pragma omp parallel for schedule(static) num_threads(nt)
      for (long long i = 0; i < static_cast<long long>(n); ++i) {
        f(static_cast<std::size_t>(i));
      }
    } else {
#pragma omp parallel for schedule(static)
      for (long long i = 0; i < static_cast<long long>(n); ++i) {
        f(static_cast<std::size_t>(i));
      }
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace qbench::par
