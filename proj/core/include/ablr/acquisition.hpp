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

#include "ablr/blr.hpp"
#include "ablr/search_space.hpp"
#include "ablr/surrogate.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace ablr {

enum class VarianceChoice { kLatent, kObservation };

/// Expected improvement below 'incumbent' (minimization). Falls back to
/// max(incumbent - mean, 0) when the standard deviation is below 1e-12.
double expected_improvement(const PredictiveDistribution& pred, double incumbent,
                            VarianceChoice choice = VarianceChoice::kLatent);

/// Scrambled Sobol points in [0,1)^dim (random digital shift from 'seed').
Matrix scrambled_sobol(std::size_t count, std::size_t dim, std::uint64_t seed);

struct AcquisitionConfig {
  int num_candidates = 5000;
  int num_refine = 10;
  int refine_steps = 20;
  double refine_initial_step = 0.05;
  VarianceChoice variance = VarianceChoice::kLatent;
};

struct Suggestion {
  Configuration configuration;
  Vector encoded;
  double acquisition_value = 0.0;
  PredictiveDistribution predicted;  // raw response units
  bool random = false;               // bootstrap draw, no model involved
};

/// Everything propose_next needs besides the model.
struct ProposalRequest {
  const SearchSpace* space = nullptr;
  /// Best observed raw target value; ignored when the target has no data.
  std::optional<double> incumbent;
  /// Appended to every encoded candidate before it reaches the surrogate.
  Vector context;
  /// Finite candidate set (tabular mode). Empty: search the whole space.
  std::vector<Configuration> candidates;
  /// Encoded points that must not be proposed again (discrete modes).
  std::set<std::vector<double>> exclude;
  std::uint64_t seed = 0;
  AcquisitionConfig config;
};

/// Uniform random valid configuration (or a random allowed candidate).
Suggestion random_suggestion(const ProposalRequest& request);

/// Maximizes EI over quasi-random candidates (or the explicit / enumerated
/// discrete set), refining the best continuous candidates by coordinate
/// search. Ties: lower predicted mean, then lexicographically smaller encoding.
/// With surrogate == nullptr returns random_suggestion().
Suggestion propose_next(const Surrogate* surrogate, const ProposalRequest& request);

/// Canonical key of an encoded point: each coordinate rounded to 12
/// significant digits.
std::vector<double> canonical_key(const Vector& encoded);

}  // namespace ablr
