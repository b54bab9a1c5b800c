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

#include "qbench/gates.hpp"

#include <cmath>
#include <string>

#include "qbench/errors.hpp"

namespace qbench {

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, Cplx(0, -1), Cplx(0, 1), 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd rotation_unitary(double phi, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const Cplx e_m(std::cos(phi), -std::sin(phi));
  const Cplx e_p(std::cos(phi), std::sin(phi));
  Eigen::Matrix2cd u;
  u << Cplx(c, 0), Cplx(0, -1) * e_m * s, Cplx(0, -1) * e_p * s, Cplx(c, 0);
  return u;
}

Eigen::Matrix2cd gate_unitary(Axis axis, double angle) {
  switch (axis) {
    case Axis::I:
      return Eigen::Matrix2cd::Identity();
    case Axis::X:
      return rotation_unitary(0.0, angle);
    case Axis::Y:
      return rotation_unitary(kPi / 2.0, angle);
  }
  throw ConfigError("unknown axis");
}

Eigen::Matrix2cd rz_unitary(double theta) {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
  u(0, 0) = Cplx(std::cos(theta / 2.0), -std::sin(theta / 2.0));
  u(1, 1) = Cplx(std::cos(theta / 2.0), std::sin(theta / 2.0));
  return u;
}

namespace {

struct GateDef {
  const char* name;
  Axis axis;
  double angle;
};

constexpr int kDefCount = kNumGates;

const GateDef kDefs[kDefCount] = {
    {"i", Axis::I, 0.0},
    {"x90", Axis::X, kPi / 2.0},
    {"x90m", Axis::X, -kPi / 2.0},
    {"x180", Axis::X, kPi},
    {"x180m", Axis::X, -kPi},
    {"y90", Axis::Y, kPi / 2.0},
    {"y90m", Axis::Y, -kPi / 2.0},
    {"y180", Axis::Y, kPi},
    {"y180m", Axis::Y, -kPi},
};

}  // namespace

std::string_view gate_name(Gate g) { return kDefs[static_cast<int>(g)].name; }

Gate gate_from_name(std::string_view name) {
  for (int i = 0; i < kDefCount; ++i) {
    if (name == kDefs[i].name) {
      return static_cast<Gate>(i);
    }
  }
  throw DataFormatError("unknown gate label: " + std::string(name));
}

Axis gate_axis(Gate g) { return kDefs[static_cast<int>(g)].axis; }

double gate_angle(Gate g) { return kDefs[static_cast<int>(g)].angle; }

Eigen::Matrix2cd gate_unitary(Gate g) {
  return gate_unitary(gate_axis(g), gate_angle(g));
}

std::vector<Gate> generator_set(bool include_identity) {
  std::vector<Gate> set;
  if (include_identity) {
    set.push_back(Gate::I);
  }
  set.insert(set.end(), {Gate::X90, Gate::X90m, Gate::Y90, Gate::Y90m,
                         Gate::X180, Gate::X180m, Gate::Y180, Gate::Y180m});
  return set;
}

std::vector<Gate> prep_set() {
  return {Gate::I, Gate::Y90, Gate::Y90m, Gate::Y180, Gate::X90, Gate::X90m};
}

}  // namespace qbench
