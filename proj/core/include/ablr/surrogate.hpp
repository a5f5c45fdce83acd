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
#include "ablr/feature_map.hpp"
#include "ablr/training.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ablr {

/// Per-column affine standardization of inputs, frozen once fitted.
struct InputScaler {
  Vector mean;
  Vector scale;

  static constexpr double kScaleFloor = 1e-8;

  static InputScaler identity(Eigen::Index dim);
  /// Column means / population standard deviations of 'inputs' (floored).
  static InputScaler fit(const Matrix& inputs);

  Eigen::Index dim() const { return mean.size(); }
  Matrix apply(const Matrix& inputs) const;
};

/// Model interface consumed by the BO loop. Inputs are in the encoded search
/// space (see SearchSpace::encode); responses are raw target values.
class Surrogate {
 public:
  virtual ~Surrogate() = default;

  /// Fits on all tasks; tasks[target] is the one being optimized.
  virtual void fit(const std::vector<TaskDataset>& tasks, std::size_t target) = 0;

  /// Predictions for the target task in its standardized response units.
  virtual std::vector<PredictiveDistribution> predict_standardized(const Matrix& inputs) const = 0;

  /// Maps raw target values to the units of predict_standardized().
  virtual Standardization target_standardization() const = 0;

  std::vector<PredictiveDistribution> predict(const Matrix& inputs) const;
};

struct AblrConfig {
  FeatureMapKind kind = FeatureMapKind::kMlp;
  std::vector<Eigen::Index> hidden_layers = {50, 50, 50};
  bool mlp_bias = false;
  Eigen::Index rks_features = 100;
  FitConfig fit;
  std::uint64_t seed = 0;
};

/// Multi-task ABLR: one BLR head per task on a shared learned feature map.
class AblrSurrogate final : public Surrogate {
 public:
  AblrSurrogate(AblrConfig config, InputScaler scaler);

  void fit(const std::vector<TaskDataset>& tasks, std::size_t target) override;
  std::vector<PredictiveDistribution> predict_standardized(const Matrix& inputs) const override;
  Standardization target_standardization() const override;

  /// Predictions for any fitted task, in raw response units.
  std::vector<PredictiveDistribution> predict_task(std::size_t task, const Matrix& inputs) const;

  std::size_t num_tasks() const { return heads_.size(); }
  std::size_t target() const { return target_; }
  const std::vector<std::string>& task_ids() const { return task_ids_; }
  const FeatureMap& feature_map() const { return map_; }
  const std::vector<TaskHead>& heads() const { return heads_; }
  const InputScaler& input_scaler() const { return scaler_; }
  const FitReport& last_report() const { return report_; }
  int fit_count() const { return fit_count_; }

  /// Lossless JSON document (hexfloat numbers) with everything predict needs.
  nlohmann::json to_json() const;
  static AblrSurrogate from_json(const nlohmann::json& j);

  static constexpr int kFormatVersion = 1;

 private:
  AblrSurrogate() = default;
  FeatureMap fresh_map(std::uint64_t salt) const;
  void set_posterior(const std::vector<TaskDataset>& standardized, const JointParams& params);

  AblrConfig config_;
  InputScaler scaler_;
  FeatureMap map_;
  std::vector<TaskHead> heads_;
  std::vector<Standardization> response_scaling_;
  std::vector<PosteriorFactors> factors_;
  std::vector<std::string> task_ids_;
  std::optional<JointParams> previous_;
  std::size_t target_ = 0;
  FitReport report_;
  int fit_count_ = 0;
};

}  // namespace ablr
