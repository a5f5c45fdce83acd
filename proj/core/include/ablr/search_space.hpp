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

#include "ablr/common.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace ablr {

/// A point in the search space, one value per dimension, in declaration order.
using Configuration = std::vector<double>;

struct Dimension {
  enum class Kind { kContinuous, kInteger, kOrdinal };

  std::string name;
  Kind kind = Kind::kContinuous;
  double lo = 0.0;             // continuous / integer
  double hi = 1.0;             // continuous / integer
  std::vector<double> values;  // ordinal, strictly increasing

  static Dimension continuous(std::string name, double lo, double hi);
  static Dimension integer(std::string name, long lo, long hi);
  static Dimension ordinal(std::string name, std::vector<double> values);

  bool is_discrete() const { return kind != Kind::kContinuous; }
  /// Number of representable values; 0 for continuous.
  std::size_t cardinality() const;
  void validate() const;
};

/// Ordered product of dimensions with a [0,1]^P encoding:
/// continuous min-max scaled, integers scaled (rounded on decode), ordinals
/// mapped to index / (count - 1).
class SearchSpace {
 public:
  SearchSpace() = default;
  explicit SearchSpace(std::vector<Dimension> dims);

  std::size_t size() const { return dims_.size(); }
  const std::vector<Dimension>& dimensions() const { return dims_; }
  const Dimension& operator[](std::size_t i) const { return dims_[i]; }
  std::vector<std::string> names() const;

  bool all_discrete() const;
  /// Product of cardinalities, saturating at SIZE_MAX; 0 if any continuous dim.
  std::size_t cardinality() const;

  Vector encode(const Configuration& config) const;
  Matrix encode_all(const std::vector<Configuration>& configs) const;
  /// Snaps integers / ordinals to the nearest representable value.
  Configuration decode(const Vector& encoded) const;
  /// encode(decode(u)), i.e. the nearest representable encoded point.
  Vector snap(const Vector& encoded) const;

  bool contains(const Configuration& config) const;
  /// Throws ConfigError naming the offending dimension.
  void check(const Configuration& config) const;

  /// Every point of an all-discrete space, in lexicographic index order.
  std::vector<Configuration> enumerate() const;

  nlohmann::json to_json() const;
  static SearchSpace from_json(const nlohmann::json& j);

 private:
  std::vector<Dimension> dims_;
};

}  // namespace ablr
