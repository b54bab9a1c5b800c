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
#include <string_view>
#include <vector>

#include "qbench/core.hpp"

namespace qbench {

inline constexpr double kPi = 3.14159265358979323846;

enum class Axis : std::uint8_t { I, X, Y };

Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();

/// exp(-i*theta*(cos(phi) sx + sin(phi) sy)/2): rotation by theta about the
/// xy-plane axis at azimuth phi. phi = 0 is R_x, phi = pi/2 is R_y.
Eigen::Matrix2cd rotation_unitary(double phi, double theta);

/// Rotation about the given axis; Axis::I ignores the angle and returns I.
Eigen::Matrix2cd gate_unitary(Axis axis, double angle);

/// exp(-i*theta*sz/2).
Eigen::Matrix2cd rz_unitary(double theta);

/// Native gate labels. The order is part of the serialization format and of
/// the deterministic search order in circuit compilation; never reorder.
enum class Gate : std::uint8_t {
  I = 0,
  X90,
  X90m,
  X180,
  X180m,
  Y90,
  Y90m,
  Y180,
  Y180m,
};

inline constexpr int kNumGates = 9;

std::string_view gate_name(Gate g);
Gate gate_from_name(std::string_view name);  // throws DataFormatError
Axis gate_axis(Gate g);
double gate_angle(Gate g);
Eigen::Matrix2cd gate_unitary(Gate g);

/// Clifford-generating layer set: x/y rotations by +-pi/2 and +-pi.
std::vector<Gate> generator_set(bool include_identity = false);

/// Prep gates reaching the six single-qubit stabilizer states from |0>.
std::vector<Gate> prep_set();

}  // namespace qbench
