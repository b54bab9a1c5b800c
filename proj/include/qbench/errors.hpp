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

#include <stdexcept>
#include <string>

namespace qbench {

/// Base class for all qbench errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dimension is not a power of two, or operands have mismatched dimensions.
class InvalidDimensionError : public Error {
 public:
  using Error::Error;
};

/// Input claimed to be unitary fails the unitarity check.
class NonUnitaryError : public Error {
 public:
  using Error::Error;
};

/// A physicality constraint (trace preservation, positivity, simplex
/// membership, ...) is violated beyond tolerance.
class ConstraintViolationError : public Error {
 public:
  using Error::Error;
};

/// Noise parameters outside the physical region (e.g. t2 > 2*t1).
class UnphysicalParamsError : public Error {
 public:
  using Error::Error;
};

/// Not enough data to run an estimator (too few depths, empty records, ...).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Gram matrix singular or ill-conditioned beyond the configured bound.
class GramSingularError : public Error {
 public:
  GramSingularError(const std::string& msg, double cond)
      : Error(msg), condition_number(cond) {}
  double condition_number;
};

/// Bootstrap estimator failed on more than the allowed fraction of resamples.
class BootstrapInstabilityError : public Error {
 public:
  using Error::Error;
};

/// Scenario / config file problems (missing fields, bad types).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed data files (records, circuits, CSV).
class DataFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace qbench
