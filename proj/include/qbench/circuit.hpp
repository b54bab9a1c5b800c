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
#include <string>
#include <vector>

#include "qbench/gates.hpp"
#include "qbench/noise.hpp"

namespace qbench {

/// One experiment unit: prep gates, m random layers, measurement gates,
/// and the computational-basis outcome the ideal circuit lands on.
struct Circuit {
  std::vector<Gate> prep;
  std::vector<Gate> layers;
  std::vector<Gate> meas;
  int target = 0;
  int depth = 0;
  std::string tag;  // structured id for tomography circuits, empty otherwise
};

/// prep + layers + meas in application order.
std::vector<Gate> full_sequence(const Circuit& c);

/// Outcome counts for one circuit over N shots.
struct ShotRecord {
  int circuit_id = 0;
  int shots = 0;
  int count_target = 0;
};

/// Exact probability of reporting `target` for the circuit under the noise
/// model (superoperator chain plus readout confusion). No sampling.
double circuit_probability(const Circuit& c, const GateTable& table,
                           const NoiseParams& p);

/// Probability with the gate table built on the fly.
double circuit_probability(const Circuit& c, const NoiseParams& p);

/// Ideal (noiseless) probability of the target outcome.
double ideal_probability(const Circuit& c);

/// Samples count_target ~ Binomial(shots, exact probability).
ShotRecord sample_record(const Circuit& c, int circuit_id,
                         const GateTable& table, const NoiseParams& p,
                         int shots, std::uint64_t seed);

// ---- JSON serialization (see docs in README: circuits.json, records.json).

std::string circuits_to_json(const std::vector<Circuit>& circuits);
std::vector<Circuit> circuits_from_json(const std::string& text);

std::string records_to_json(const std::vector<ShotRecord>& records);
std::vector<ShotRecord> records_from_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace qbench
