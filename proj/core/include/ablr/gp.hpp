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

// Dense Gaussian-process regression baseline: squared-exponential kernel with
// per-dimension lengthscales, evidence-maximized hyperparameters, O(N^3)
// Cholesky of the full kernel matrix.

#pragma once

#include "ablr/blr.hpp"
#include "ablr/lbfgs.hpp"
#include "ablr/surrogate.hpp"

#include <vector>

namespace ablr {

struct GpHyperparameters {
  double log_signal_variance = 0.0;
  Vector log_lengthscales;          // one per input dimension
  double log_noise_variance = std::log(1e-2);

  Vector flatten() const;
  static GpHyperparameters unflatten(const Vector& flat);
};

class GpBaseline {
 public:
  static constexpr double kNoiseFloor = 1e-10;

  explicit GpBaseline(InputScaler scaler);

  /// Stores the data (responses standardized internally) and factorizes the
  /// kernel matrix at 'hyper' without any optimization.
  void condition(const Matrix& inputs, const Vector& responses, const GpHyperparameters& hyper);

  /// Evidence maximization by L-BFGS from the default hyperparameters, then
  /// condition() at the optimum. Returns the optimizer report.
  LbfgsResult fit(const Matrix& inputs, const Vector& responses, const LbfgsConfig& config);

  /// Negative log marginal likelihood (with the N/2 log 2 pi constant) of the
  /// standardized responses, and its gradient in flatten() order.
  double neg_log_evidence(const Vector& flat_hyper, Vector* gradient) const;

  std::vector<PredictiveDistribution> predict(const Matrix& inputs) const;  // raw units
  std::vector<PredictiveDistribution> predict_standardized(const Matrix& inputs) const;

  const GpHyperparameters& hyperparameters() const { return hyper_; }
  const Standardization& response_scaling() const { return scaling_; }
  Eigen::Index num_points() const { return x_.rows(); }

 private:
  Matrix kernel(const Matrix& a, const Matrix& b, const GpHyperparameters& h) const;

  InputScaler scaler_;
  Matrix x_;  // standardized inputs
  Vector y_;  // standardized responses
  Standardization scaling_;
  GpHyperparameters hyper_;
  Matrix chol_;
  Vector weights_;  // K^-1 y
};

/// GP as a BO surrogate. 'stack_all' pools every task's observations into one
/// dataset (transfer by stacking); otherwise only the target task is used.
class GpSurrogate final : public Surrogate {
 public:
  GpSurrogate(InputScaler scaler, bool stack_all, LbfgsConfig config = {});

  void fit(const std::vector<TaskDataset>& tasks, std::size_t target) override;
  std::vector<PredictiveDistribution> predict_standardized(const Matrix& inputs) const override;
  Standardization target_standardization() const override;

 private:
  GpBaseline gp_;
  bool stack_all_;
  LbfgsConfig config_;
  bool empty_ = true;
};

}  // namespace ablr
