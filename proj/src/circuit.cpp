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

#include "qbench/circuit.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qbench/rng.hpp"

namespace qbench {

std::vector<Gate> full_sequence(const Circuit& c) {
  std::vector<Gate> seq;
  seq.reserve(c.prep.size() + c.layers.size() + c.meas.size());
  seq.insert(seq.end(), c.prep.begin(), c.prep.end());
  seq.insert(seq.end(), c.layers.begin(), c.layers.end());
  seq.insert(seq.end(), c.meas.begin(), c.meas.end());
  return seq;
}

double circuit_probability(const Circuit& c, const GateTable& table,
                           const NoiseParams& p) {
  Eigen::Vector4cd state;
  // vec(initial_state) under column stacking: diagonal at slots 0 and 3.
  state << Cplx(1.0 - p.init_excited, 0), 0, 0, Cplx(p.init_excited, 0);
  for (Gate g : c.prep) state = table[g] * state;
  for (Gate g : c.layers) state = table[g] * state;
  for (Gate g : c.meas) state = table[g] * state;
  Eigen::Vector2d probs(state(0).real(), state(3).real());
  probs = apply_readout(probs, readout_model(p));
  return c.target == 0 ? probs(0) : probs(1);
}

double circuit_probability(const Circuit& c, const NoiseParams& p) {
  return circuit_probability(c, GateTable(p), p);
}

double ideal_probability(const Circuit& c) {
  Eigen::Vector2cd psi(1.0, 0.0);
  for (Gate g : full_sequence(c)) psi = gate_unitary(g) * psi;
  return std::norm(psi(c.target));
}

ShotRecord sample_record(const Circuit& c, int circuit_id,
                         const GateTable& table, const NoiseParams& p,
                         int shots, std::uint64_t seed) {
  const double prob = circuit_probability(c, table, p);
  Rng rng(seed);
  ShotRecord r;
  r.circuit_id = circuit_id;
  r.shots = shots;
  r.count_target = static_cast<int>(rng.binomial(shots, prob));
  return r;
}

namespace {

nlohmann::json gates_to_json(const std::vector<Gate>& gates) {
  nlohmann::json arr = nlohmann::json::array();
  for (Gate g : gates) arr.push_back(std::string(gate_name(g)));
  return arr;
}

std::vector<Gate> gates_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) {
    throw DataFormatError("gate list is not an array");
  }
  std::vector<Gate> gates;
  for (const auto& item : arr) {
    if (!item.is_string()) {
      throw DataFormatError("gate label is not a string");
    }
    gates.push_back(gate_from_name(item.get<std::string>()));
  }
  return gates;
}

}  // namespace

std::string circuits_to_json(const std::vector<Circuit>& circuits) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Circuit& c : circuits) {
    nlohmann::json j;
    j["prep"] = gates_to_json(c.prep);
    j["layers"] = gates_to_json(c.layers);
    j["meas"] = gates_to_json(c.meas);
    j["target"] = c.target;
    j["depth"] = c.depth;
    if (!c.tag.empty()) j["tag"] = c.tag;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<Circuit> circuits_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(std::string("circuit JSON parse failure: ") +
                          e.what());
  }
  if (!arr.is_array()) {
    throw DataFormatError("circuit file root is not an array");
  }
  std::vector<Circuit> circuits;
  for (const auto& j : arr) {
    for (const char* field : {"prep", "layers", "meas", "target", "depth"}) {
      if (!j.contains(field)) {
        throw DataFormatError(std::string("circuit missing field '") + field +
                              "'");
      }
    }
    Circuit c;
    c.prep = gates_from_json(j.at("prep"));
    c.layers = gates_from_json(j.at("layers"));
    c.meas = gates_from_json(j.at("meas"));
    c.target = j.at("target").get<int>();
    c.depth = j.at("depth").get<int>();
    if (j.contains("tag")) c.tag = j.at("tag").get<std::string>();
    if (c.target != 0 && c.target != 1) {
      throw DataFormatError("circuit target must be 0 or 1");
    }
    circuits.push_back(std::move(c));
  }
  return circuits;
}

std::string records_to_json(const std::vector<ShotRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ShotRecord& r : records) {
    nlohmann::json j;
    j["circuit_id"] = r.circuit_id;
    j["shots"] = r.shots;
    j["count_target"] = r.count_target;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<ShotRecord> records_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(std::string("record JSON parse failure: ") +
                          e.what());
  }
  if (!arr.is_array()) {
    throw DataFormatError("record file root is not an array");
  }
  std::vector<ShotRecord> records;
  for (const auto& j : arr) {
    for (const char* field : {"circuit_id", "shots", "count_target"}) {
      if (!j.contains(field)) {
        throw DataFormatError(std::string("record missing field '") + field +
                              "'");
      }
    }
    ShotRecord r;
    r.circuit_id = j.at("circuit_id").get<int>();
    r.shots = j.at("shots").get<int>();
    r.count_target = j.at("count_target").get<int>();
    if (r.shots <= 0 || r.count_target < 0 || r.count_target > r.shots) {
      throw DataFormatError("record counts out of range for circuit_id " +
                            std::to_string(r.circuit_id));
    }
    records.push_back(r);
  }
  return records;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataFormatError("cannot open for writing: " + path);
  }
  out << text;
  if (!out) {
    throw DataFormatError("write failure: " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataFormatError("cannot open: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qbench
