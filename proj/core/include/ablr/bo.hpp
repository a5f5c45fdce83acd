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

// Sequential Bayesian-optimization loop (minimization).

#pragma once

#include "ablr/acquisition.hpp"
#include "ablr/history.hpp"
#include "ablr/surrogate.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ablr {

/// Raised by a black box whose evaluation failed; the loop retries.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Function being optimized. Maximization problems negate at this boundary.
class BlackBox {
 public:
  virtual ~BlackBox() = default;
  virtual std::vector<std::string> signal_names() const { return {"y"}; }
  /// One value per signal. Throws EvaluationError on failure.
  virtual std::vector<double> evaluate(const Configuration& config) = 0;
  /// Per-task meta-features, used when context augmentation is on.
  virtual Vector context() const { return Vector(); }
};

using SurrogateFactory =
    std::function<std::unique_ptr<Surrogate>(const InputScaler& scaler, std::uint64_t seed)>;

SurrogateFactory ablr_factory(const AblrConfig& config);

struct BoConfig {
  std::size_t budget = 50;
  /// Random configurations before the model is used. Only applied when the
  /// warm start is empty.
  std::size_t initial_random = 3;
  std::size_t target_signal = 0;
  /// Model every signal of the target (and warm-start) tasks as its own head.
  bool use_side_signals = false;
  bool use_context = false;
  /// Finite candidate set (tabular mode); evaluated points are excluded.
  std::vector<Configuration> candidates;
  int max_retries = 3;
  std::string task_id = "target";
  AcquisitionConfig acquisition;
  SurrogateFactory make_surrogate;
};

struct BoStep {
  std::size_t iteration = 0;
  Configuration config;
  std::vector<double> signals;
  double target = 0.0;
  double incumbent = 0.0;
  double acquisition_value = 0.0;
  bool random = false;
  double wall_ms = 0.0;
};

struct BoTrace {
  std::vector<BoStep> steps;
  std::size_t failures = 0;
  std::size_t model_failures = 0;  // refits that fell back to a random proposal
  bool aborted = false;
  std::string message;
  /// Target-task observations in history form (signals as observed).
  TaskHistory observed;
};

/// Input standardization shared by every refit of one run: statistics of the
/// warm-start inputs when there are any, otherwise those of a uniform draw on
/// the encoded box (context columns centred on 'context').
InputScaler choose_input_scaler(const std::vector<TaskDataset>& warm, std::size_t space_dim,
                                const Vector& context);

BoTrace run_bo(BlackBox& problem, const SearchSpace& space, const History& warm_start,
               const BoConfig& config, std::uint64_t seed);

}  // namespace ablr
