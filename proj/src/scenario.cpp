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

#include "qbench/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "qbench/circuit.hpp"
#include "qbench/errors.hpp"
#include "qbench/rng.hpp"

namespace qbench {

namespace {

using nlohmann::json;

/// Checked accessors. `where` is the dotted path used in error messages.
[[noreturn]] void bad_field(const std::string& where, const char* expected) {
  throw ConfigError("field '" + where + "' must be " + expected);
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown field '" + where + item.key() + "'");
    }
  }
}

double get_num(const json& obj, const std::string& where, const char* key,
               double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad_field(where + key, "a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const char* key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad_field(where + key, "an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& where, const char* key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) bad_field(where + key, "a boolean");
  return v.get<bool>();
}

std::vector<int> get_int_list(const json& obj, const std::string& where,
                              const char* key, std::vector<int> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) bad_field(where + key, "an array of integers");
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) bad_field(where + key, "an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

std::vector<double> get_num_list(const json& obj, const std::string& where,
                                 const char* key,
                                 std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) bad_field(where + key, "an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) bad_field(where + key, "an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

NoiseParams parse_noise(const json& obj) {
  check_keys(obj, "noise.",
             {"t1_s", "t2_s", "gate_time_s", "p01", "p10", "init_excited"});
  NoiseParams p;
  p.t1_s = get_num(obj, "noise.", "t1_s", p.t1_s);
  p.t2_s = get_num(obj, "noise.", "t2_s", p.t2_s);
  p.gate_time_s = get_num(obj, "noise.", "gate_time_s", p.gate_time_s);
  p.p01 = get_num(obj, "noise.", "p01", p.p01);
  p.p10 = get_num(obj, "noise.", "p10", p.p10);
  p.init_excited = get_num(obj, "noise.", "init_excited", p.init_excited);
  try {
    validate(p);
  } catch (const UnphysicalParamsError& e) {
    throw ConfigError(std::string("noise section: ") + e.what());
  }
  return p;
}

DrbConfig parse_drb(const json& obj) {
  check_keys(obj, "drb.",
             {"depths", "k_per_depth", "shots", "include_identity",
              "per_circuit", "bootstrap_resamples"});
  DrbConfig c;
  c.depths = get_int_list(obj, "drb.", "depths", c.depths);
  c.k_per_depth = get_int(obj, "drb.", "k_per_depth", c.k_per_depth);
  c.shots = get_int(obj, "drb.", "shots", c.shots);
  c.include_identity =
      get_bool(obj, "drb.", "include_identity", c.include_identity);
  c.per_circuit = get_bool(obj, "drb.", "per_circuit", c.per_circuit);
  c.bootstrap_resamples =
      get_int(obj, "drb.", "bootstrap_resamples", c.bootstrap_resamples);
  if (c.depths.empty()) throw ConfigError("field 'drb.depths' is empty");
  for (int d : c.depths) {
    if (d < 0) throw ConfigError("field 'drb.depths' has a negative entry");
  }
  if (c.k_per_depth <= 0) bad_field("drb.k_per_depth", "a positive integer");
  if (c.shots <= 0) bad_field("drb.shots", "a positive integer");
  return c;
}

GstConfig parse_gst(const json& obj) {
  check_keys(obj, "gst.",
             {"shots", "max_reps", "bootstrap_resamples", "t2_sweep_s", "mle"});
  GstConfig c;
  c.shots = get_int(obj, "gst.", "shots", c.shots);
  c.max_reps = get_int(obj, "gst.", "max_reps", c.max_reps);
  c.bootstrap_resamples =
      get_int(obj, "gst.", "bootstrap_resamples", c.bootstrap_resamples);
  c.t2_sweep_s = get_num_list(obj, "gst.", "t2_sweep_s", c.t2_sweep_s);
  if (obj.contains("mle")) {
    const json& m = obj.at("mle");
    if (!m.is_object()) bad_field("gst.mle", "an object");
    check_keys(m, "gst.mle.",
               {"rank", "max_iters", "grad_tol", "f_tol", "optimize_spam"});
    c.mle.rank = get_int(m, "gst.mle.", "rank", c.mle.rank);
    c.mle.max_iters = get_int(m, "gst.mle.", "max_iters", c.mle.max_iters);
    c.mle.grad_tol = get_num(m, "gst.mle.", "grad_tol", c.mle.grad_tol);
    c.mle.f_tol = get_num(m, "gst.mle.", "f_tol", c.mle.f_tol);
    c.mle.optimize_spam =
        get_bool(m, "gst.mle.", "optimize_spam", c.mle.optimize_spam);
  }
  if (c.shots <= 0) bad_field("gst.shots", "a positive integer");
  if (c.max_reps < 1) bad_field("gst.max_reps", "a positive integer");
  for (double t2 : c.t2_sweep_s) {
    if (!(t2 > 0.0)) bad_field("gst.t2_sweep_s", "positive times");
  }
  return c;
}

CalibrateConfig parse_calibrate(const json& obj) {
  check_keys(obj, "calibrate.",
             {"k_min", "k_max", "k_step", "phi_min_rad", "phi_max_rad",
              "phi_step_rad", "injected_k", "injected_phi_rad",
              "include_noise", "depths", "k_per_depth", "shots", "loop_rounds",
              "loop_tol"});
  CalibrateConfig c;
  c.grids.k_min = get_num(obj, "calibrate.", "k_min", c.grids.k_min);
  c.grids.k_max = get_num(obj, "calibrate.", "k_max", c.grids.k_max);
  c.grids.k_step = get_num(obj, "calibrate.", "k_step", c.grids.k_step);
  c.grids.phi_min = get_num(obj, "calibrate.", "phi_min_rad", c.grids.phi_min);
  c.grids.phi_max = get_num(obj, "calibrate.", "phi_max_rad", c.grids.phi_max);
  c.grids.phi_step =
      get_num(obj, "calibrate.", "phi_step_rad", c.grids.phi_step);
  c.injected.k = get_num(obj, "calibrate.", "injected_k", c.injected.k);
  c.injected.phi =
      get_num(obj, "calibrate.", "injected_phi_rad", c.injected.phi);
  c.include_noise =
      get_bool(obj, "calibrate.", "include_noise", c.include_noise);
  c.depths = get_int_list(obj, "calibrate.", "depths", c.depths);
  c.k_per_depth = get_int(obj, "calibrate.", "k_per_depth", c.k_per_depth);
  c.shots = get_int(obj, "calibrate.", "shots", c.shots);
  c.loop_rounds = get_int(obj, "calibrate.", "loop_rounds", c.loop_rounds);
  c.loop_tol = get_num(obj, "calibrate.", "loop_tol", c.loop_tol);
  try {
    validate(c.injected);
  } catch (const UnphysicalParamsError& e) {
    throw ConfigError(std::string("calibrate section: ") + e.what());
  }
  if (c.depths.empty()) throw ConfigError("field 'calibrate.depths' is empty");
  if (c.k_per_depth <= 0) {
    bad_field("calibrate.k_per_depth", "a positive integer");
  }
  if (c.shots <= 0) bad_field("calibrate.shots", "a positive integer");
  if (c.loop_rounds < 0) {
    bad_field("calibrate.loop_rounds", "a non-negative integer");
  }
  return c;
}

ArrayConfig parse_array(const json& obj) {
  check_keys(obj, "array.",
             {"rows", "cols", "t2_jitter", "p01_jitter", "p10_jitter",
              "depths", "k_per_depth", "shots", "bootstrap_resamples"});
  ArrayConfig c;
  c.rows = get_int(obj, "array.", "rows", c.rows);
  c.cols = get_int(obj, "array.", "cols", c.cols);
  c.t2_jitter = get_num(obj, "array.", "t2_jitter", c.t2_jitter);
  c.p01_jitter = get_num(obj, "array.", "p01_jitter", c.p01_jitter);
  c.p10_jitter = get_num(obj, "array.", "p10_jitter", c.p10_jitter);
  c.depths = get_int_list(obj, "array.", "depths", c.depths);
  c.k_per_depth = get_int(obj, "array.", "k_per_depth", c.k_per_depth);
  c.shots = get_int(obj, "array.", "shots", c.shots);
  c.bootstrap_resamples =
      get_int(obj, "array.", "bootstrap_resamples", c.bootstrap_resamples);
  if (c.rows <= 0 || c.cols <= 0) {
    throw ConfigError("fields 'array.rows'/'array.cols' must be positive");
  }
  if (c.t2_jitter < 0.0 || c.t2_jitter >= 1.0) {
    bad_field("array.t2_jitter", "in [0, 1)");
  }
  if (c.p01_jitter < 0.0 || c.p01_jitter >= 1.0) {
    bad_field("array.p01_jitter", "in [0, 1)");
  }
  if (c.p10_jitter < 0.0 || c.p10_jitter >= 1.0) {
    bad_field("array.p10_jitter", "in [0, 1)");
  }
  if (c.depths.empty()) throw ConfigError("field 'array.depths' is empty");
  if (c.k_per_depth <= 0) bad_field("array.k_per_depth", "a positive integer");
  if (c.shots <= 0) bad_field("array.shots", "a positive integer");
  return c;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("scenario root must be an object");
  check_keys(root, "", {"seed", "noise", "drb", "gst", "calibrate", "array"});
  Scenario s;
  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      bad_field("seed", "a non-negative integer");
    }
    if (v.is_number_integer() && v.get<long long>() < 0) {
      bad_field("seed", "a non-negative integer");
    }
    s.seed = v.get<std::uint64_t>();
  }
  const auto section = [&](const char* key) -> const json* {
    if (!root.contains(key)) return nullptr;
    const json& v = root.at(key);
    if (!v.is_object()) bad_field(key, "an object");
    return &v;
  };
  if (const json* n = section("noise")) s.noise = parse_noise(*n);
  if (const json* d = section("drb")) s.drb = parse_drb(*d);
  if (const json* g = section("gst")) s.gst = parse_gst(*g);
  if (const json* c = section("calibrate")) s.calibrate = parse_calibrate(*c);
  if (const json* a = section("array")) s.array = parse_array(*a);
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json root;
  root["seed"] = s.seed;
  root["noise"] = {{"t1_s", s.noise.t1_s},
                   {"t2_s", s.noise.t2_s},
                   {"gate_time_s", s.noise.gate_time_s},
                   {"p01", s.noise.p01},
                   {"p10", s.noise.p10},
                   {"init_excited", s.noise.init_excited}};
  if (s.drb) {
    root["drb"] = {{"depths", s.drb->depths},
                   {"k_per_depth", s.drb->k_per_depth},
                   {"shots", s.drb->shots},
                   {"include_identity", s.drb->include_identity},
                   {"per_circuit", s.drb->per_circuit},
                   {"bootstrap_resamples", s.drb->bootstrap_resamples}};
  }
  if (s.gst) {
    root["gst"] = {{"shots", s.gst->shots},
                   {"max_reps", s.gst->max_reps},
                   {"bootstrap_resamples", s.gst->bootstrap_resamples},
                   {"t2_sweep_s", s.gst->t2_sweep_s},
                   {"mle",
                    {{"rank", s.gst->mle.rank},
                     {"max_iters", s.gst->mle.max_iters},
                     {"grad_tol", s.gst->mle.grad_tol},
                     {"f_tol", s.gst->mle.f_tol},
                     {"optimize_spam", s.gst->mle.optimize_spam}}}};
  }
  if (s.calibrate) {
    root["calibrate"] = {{"k_min", s.calibrate->grids.k_min},
                         {"k_max", s.calibrate->grids.k_max},
                         {"k_step", s.calibrate->grids.k_step},
                         {"phi_min_rad", s.calibrate->grids.phi_min},
                         {"phi_max_rad", s.calibrate->grids.phi_max},
                         {"phi_step_rad", s.calibrate->grids.phi_step},
                         {"injected_k", s.calibrate->injected.k},
                         {"injected_phi_rad", s.calibrate->injected.phi},
                         {"include_noise", s.calibrate->include_noise},
                         {"depths", s.calibrate->depths},
                         {"k_per_depth", s.calibrate->k_per_depth},
                         {"shots", s.calibrate->shots},
                         {"loop_rounds", s.calibrate->loop_rounds},
                         {"loop_tol", s.calibrate->loop_tol}};
  }
  if (s.array) {
    root["array"] = {{"rows", s.array->rows},
                     {"cols", s.array->cols},
                     {"t2_jitter", s.array->t2_jitter},
                     {"p01_jitter", s.array->p01_jitter},
                     {"p10_jitter", s.array->p10_jitter},
                     {"depths", s.array->depths},
                     {"k_per_depth", s.array->k_per_depth},
                     {"shots", s.array->shots},
                     {"bootstrap_resamples", s.array->bootstrap_resamples}};
  }
  return root.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataFormatError& e) {
    throw ConfigError(std::string("scenario file: ") + e.what());
  }
  return scenario_from_json(text);
}

std::string scenario_hash(const Scenario& s) {
  const std::string canon = scenario_to_json(s);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64-bit offset basis
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

ArrayScenario build_array_sites(const NoiseParams& base, const ArrayConfig& a,
                                std::uint64_t seed) {
  ArrayScenario sc;
  sc.n_sites = a.rows * a.cols;
  sc.per_site.reserve(static_cast<std::size_t>(sc.n_sites));
  sc.site_positions.reserve(static_cast<std::size_t>(sc.n_sites));
  for (int s = 0; s < sc.n_sites; ++s) {
    Rng rng(derive_seed(seed, kStreamJitter, static_cast<std::uint64_t>(s)));
    NoiseParams p = base;
    // Draw order is part of the format: t2, then p01, then p10.
    p.t2_s = base.t2_s * (1.0 + a.t2_jitter * rng.uniform(-1.0, 1.0));
    p.p01 = base.p01 * (1.0 + a.p01_jitter * rng.uniform(-1.0, 1.0));
    p.p10 = base.p10 * (1.0 + a.p10_jitter * rng.uniform(-1.0, 1.0));
    p.t2_s = std::min(p.t2_s, 2.0 * p.t1_s);
    validate(p);
    sc.per_site.push_back(p);
    sc.site_positions.emplace_back(s / a.cols, s % a.cols);
  }
  return sc;
}

}  // namespace qbench
