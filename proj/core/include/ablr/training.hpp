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

// Joint empirical-Bayes fitting of the shared feature map and all task heads.
//
// The objective is the summed negative log marginal likelihood
//   rho(z, {a_t, b_t}) = sum_t task_nll(t)
// and its gradient is obtained by hand-written reverse mode through the
// feature map, the Gram matrix, the triangular solve and the Cholesky factor.

#pragma once

#include "ablr/blr.hpp"
#include "ablr/feature_map.hpp"
#include "ablr/lbfgs.hpp"

#include <cstdint>
#include <vector>

namespace ablr {

/// Flat layout: feature-map parameters first, then (log_alpha, log_beta) per task.
struct JointParams {
  Vector feature_params;
  std::vector<TaskHead> heads;

  Eigen::Index size() const {
    return feature_params.size() + 2 * static_cast<Eigen::Index>(heads.size());
  }
  Vector flatten() const;
  static JointParams unflatten(const Vector& flat, Eigen::Index num_feature_params,
                               std::size_t num_tasks);

  /// Map parameters from 'arch' with default heads (log alpha = log beta = 0).
  static JointParams initial(const FeatureMap& arch, std::size_t num_tasks);
};

struct FitReport {
  double final_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::vector<double> objective_trace;
};

struct FitConfig {
  LbfgsConfig lbfgs;
  /// Used by the BO loop: every restart_period refits also start from a fresh
  /// map and the better of the two optima is kept.
  int restart_period = 10;
  /// Iteration cap for warm restarts from the previous optimum
  /// (lbfgs.max_iterations applies to fresh starts).
  int warm_max_iterations = 100;
};

/// Gradient of a scalar function of L = chol(K) pulled back to K.
/// Returns the symmetric matrix G with d rho = <G, dK> for symmetric dK.
Matrix cholesky_backward(const Matrix& lower, const Matrix& grad_lower);

/// Objective and gradient evaluator over a fixed set of tasks. Tasks that
/// share a bit-identical input matrix (e.g. several signals of one history)
/// share one feature-map evaluation.
class JointObjective {
 public:
  /// 'arch' provides the architecture (and frozen RKS randomness); its own
  /// trainable parameters are ignored in favour of the ones being optimized.
  JointObjective(std::vector<TaskDataset> datasets, FeatureMap arch);

  std::size_t num_tasks() const { return datasets_.size(); }
  Eigen::Index num_feature_params() const { return arch_.num_params(); }
  Eigen::Index num_params() const { return num_feature_params() + 2 * static_cast<Eigen::Index>(num_tasks()); }
  const FeatureMap& architecture() const { return arch_; }
  const std::vector<TaskDataset>& datasets() const { return datasets_; }

  double value(const JointParams& params) const;
  double value_and_gradient(const JointParams& params, Vector& gradient) const;

  /// Flat-vector form used by L-BFGS. Numeric failures return +inf.
  double operator()(const Vector& flat, Vector& gradient) const;

 private:
  double evaluate(const JointParams& params, Vector* gradient) const;

  std::vector<TaskDataset> datasets_;
  FeatureMap arch_;
  std::vector<std::vector<std::size_t>> groups_;  // tasks sharing inputs
};

double objective(const JointParams& params, const std::vector<TaskDataset>& datasets,
                 const FeatureMap& arch);

Vector gradient(const JointParams& params, const std::vector<TaskDataset>& datasets,
                const FeatureMap& arch);

struct FitResult {
  JointParams params;
  FitReport report;
};

/// Minimizes the joint objective by L-BFGS starting from 'start'.
FitResult fit(const std::vector<TaskDataset>& datasets, const FeatureMap& arch,
              const FitConfig& config, const JointParams& start);

/// Same, starting from JointParams::initial(arch, datasets.size()).
FitResult fit(const std::vector<TaskDataset>& datasets, const FeatureMap& arch,
              const FitConfig& config);

}  // namespace ablr
