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

// Exact Bayesian linear regression on a fixed feature matrix.
//
// Model for one task t with features Phi (N x D):
//   y | w ~ N(Phi w, alpha^-1 I),   w ~ N(0, beta^-1 I).
// Everything is expressed through K = (alpha/beta) Phi^T Phi + I and its
// Cholesky factor L, so no D x D inverse is ever formed.

#pragma once

#include "ablr/common.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace ablr {

/// Inputs and responses of a single task. Zero rows is legal (prior only).
struct TaskDataset {
  std::string task_id;
  Matrix inputs;     // N x P
  Vector responses;  // N

  Eigen::Index size() const { return responses.size(); }
  Eigen::Index input_dim() const { return inputs.cols(); }

  /// Throws ShapeError / NumericError if the invariants do not hold.
  void validate() const;
};

/// Per-task precisions, stored as logs so that both stay positive.
struct TaskHead {
  double log_alpha = 0.0;  // residual precision
  double log_beta = 0.0;   // weight-prior precision

  double alpha() const { return std::exp(log_alpha); }
  double beta() const { return std::exp(log_beta); }
  double ratio() const { return std::exp(log_alpha - log_beta); }
};

struct PosteriorFactors {
  Matrix chol_lower;   // L, D x D, K = L L^T
  Vector projected;    // c = L^-1 Phi^T y
  double jitter = 0.0;  // diagonal shift that was needed on top of K

  Eigen::Index feature_dim() const { return chol_lower.rows(); }
};

struct PredictiveDistribution {
  double mean = 0.0;
  double variance = 0.0;         // includes the 1/alpha observation noise
  double latent_variance = 0.0;  // noise-free
};

/// Affine map used to standardize a response vector.
struct Standardization {
  double mean = 0.0;
  double scale = 1.0;

  static constexpr double kScaleFloor = 1e-8;

  static Standardization fit(const Vector& y);
  Vector apply(const Vector& y) const { return (y.array() - mean) / scale; }
  double apply(double y) const { return (y - mean) / scale; }
  double invert(double z) const { return z * scale + mean; }
  PredictiveDistribution invert(const PredictiveDistribution& p) const;
};

/// K = (alpha/beta) Phi^T Phi + I.
Matrix build_gram(const Matrix& features, const TaskHead& head);

/// Plain Cholesky. Throws FactorizationError carrying the failing pivot.
Matrix factorize(const Matrix& gram);

struct JitteredCholesky {
  Matrix lower;
  double jitter = 0.0;
};

/// Cholesky with the escalating jitter policy: 0, then 1e-6 ... 1e-2 (x10).
/// Rethrows the last FactorizationError if all attempts fail.
JitteredCholesky factorize_with_jitter(const Matrix& gram);

PosteriorFactors posterior_factors(const TaskDataset& dataset, const Matrix& features,
                                   const TaskHead& head);

/// Predictive distribution at one query feature vector (length D).
PredictiveDistribution predict(const Vector& query_features, const PosteriorFactors& factors,
                               const TaskHead& head);

/// Row-wise predict() for an M x D block of query features; one triangular
/// solve for the whole block.
std::vector<PredictiveDistribution> predict_batch(const Matrix& query_features,
                                                  const PosteriorFactors& factors,
                                                  const TaskHead& head);

/// One summand of the summed negative log marginal likelihood:
///   -[ N/2 log a - a/2 (|y|^2 - (a/b)|c|^2) - sum_i log L_ii ].
/// The N/2 log(2 pi) constant is not included.
double task_nll(const TaskDataset& dataset, const PosteriorFactors& factors, const TaskHead& head);

}  // namespace ablr
