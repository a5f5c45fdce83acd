// Copyright 2026 The ABLR Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ablr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension or length disagreement between arguments.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf input or an arithmetic breakdown.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Cholesky hit a non-positive pivot.
class FactorizationError : public NumericError {
 public:
  FactorizationError(std::size_t pivot, double value)
      : NumericError("cholesky: non-positive pivot " + std::to_string(value) +
                     " at index " + std::to_string(pivot)),
        pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Invalid user configuration (config files, flags, schema).
class ConfigError : public Error {
 public:
  using Error::Error;
};

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

/// Deterministic 64-bit mixing of two seeds (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace ablr
