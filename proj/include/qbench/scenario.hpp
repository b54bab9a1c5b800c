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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbench/calibrate.hpp"
#include "qbench/gst.hpp"
#include "qbench/noise.hpp"

namespace qbench {

struct DrbConfig {
  std::vector<int> depths = {0, 25, 50, 100, 250, 500, 750, 1000};
  int k_per_depth = 25;
  int shots = 1000;
  bool include_identity = false;
  bool per_circuit = false;
  int bootstrap_resamples = 100;
};

struct GstConfig {
  int shots = 1000;
  int max_reps = 3;
  int bootstrap_resamples = 100;
  std::vector<double> t2_sweep_s;  // empty: single point at noise.t2_s
  MleOptions mle;
};

struct CalibrateConfig {
  GridSpec grids;
  MiscalModel injected;
  bool include_noise = true;
  std::vector<int> depths = {0, 16, 32, 64};
  int k_per_depth = 10;
  int shots = 2000;
  int loop_rounds = 0;  // 0: single scan, >0: iterate correct-and-rescan
  double loop_tol = 1e-4;
};

struct ArrayConfig {
  int rows = 5;
  int cols = 5;
  double t2_jitter = 0.2;   // relative, uniform in [-j, +j]
  double p01_jitter = 0.0;  // relative jitter on readout flips
  double p10_jitter = 0.0;
  std::vector<int> depths = {0, 25, 50, 100, 250, 500};
  int k_per_depth = 10;
  int shots = 500;
  int bootstrap_resamples = 100;
};

/// Full run configuration. A run is determined by (scenario, master seed);
/// sections are optional, and each command requires its own section.
struct Scenario {
  std::uint64_t seed = 1;
  NoiseParams noise;
  std::optional<DrbConfig> drb;
  std::optional<GstConfig> gst;
  std::optional<CalibrateConfig> calibrate;
  std::optional<ArrayConfig> array;
};

/// Parse from JSON text. Unknown or mistyped fields raise ConfigError naming
/// the offending field; syntax errors carry the parser's position info.
Scenario scenario_from_json(const std::string& text);

std::string scenario_to_json(const Scenario& s);

/// Reads and parses a scenario file; missing file raises ConfigError.
Scenario load_scenario(const std::string& path);

/// FNV-1a hash of the canonical serialized scenario, as fixed-width hex.
/// Stable across runs; stamped into every report for provenance.
std::string scenario_hash(const Scenario& s);

/// Per-site noise for the array section: t2 (and optionally readout flips)
/// jittered relative to the base params. Site s draws from the jitter
/// stream at index s; positions fill row-major.
ArrayScenario build_array_sites(const NoiseParams& base, const ArrayConfig& a,
                                std::uint64_t seed);

}  // namespace qbench
