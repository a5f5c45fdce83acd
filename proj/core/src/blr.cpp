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

#include "ablr/blr.hpp"

#include <array>

namespace ablr {

void TaskDataset::validate() const {
  if (inputs.rows() != responses.size()) {
    throw ShapeError("task '" + task_id + "': " + std::to_string(inputs.rows()) +
                     " input rows but " + std::to_string(responses.size()) + " responses");
  }
  if (!inputs.allFinite() || !responses.allFinite()) {
    throw NumericError("task '" + task_id + "': non-finite input or response");
  }
}

Standardization Standardization::fit(const Vector& y) {
  Standardization s;
  if (y.size() == 0) return s;
  s.mean = y.mean();
  const double var = (y.array() - s.mean).square().mean();
  s.scale = std::max(std::sqrt(var), kScaleFloor);
  return s;
}

PredictiveDistribution Standardization::invert(const PredictiveDistribution& p) const {
  const double s2 = scale * scale;
  return {invert(p.mean), p.variance * s2, p.latent_variance * s2};
}

Matrix build_gram(const Matrix& features, const TaskHead& head) {
  if (!features.allFinite()) throw NumericError("build_gram: non-finite features");
  const Eigen::Index d = features.cols();
  require(d >= 1, "build_gram: feature dimension must be >= 1");
  // Same operation order as the training objective so both see identical K.
  Matrix gram = Matrix::Zero(d, d);
  if (features.rows() > 0) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose());
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  }
  Matrix k = head.ratio() * gram;
  k.diagonal().array() += 1.0;
  return k;
}

namespace {

// Unblocked pass used only to locate the failing pivot after LLT reports failure.
std::pair<std::size_t, double> find_bad_pivot(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(diag > 0.0)) return {static_cast<std::size_t>(j), diag};
    l(j, j) = std::sqrt(diag);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return {static_cast<std::size_t>(n ? n - 1 : 0), 0.0};
}

}  // namespace

Matrix factorize(const Matrix& gram) {
  require(gram.rows() == gram.cols(), "factorize: matrix must be square");
  if (!gram.allFinite()) throw NumericError("factorize: non-finite matrix");
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    auto [pivot, value] = find_bad_pivot(gram);
    throw FactorizationError(pivot, value);
  }
  Matrix lower = llt.matrixL();
  // LLT can succeed on a zero pivot that underflowed; L_ii must be > 0.
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0)) throw FactorizationError(static_cast<std::size_t>(i), lower(i, i));
  }
  return lower;
}

JitteredCholesky factorize_with_jitter(const Matrix& gram) {
  static constexpr std::array<double, 6> kJitter = {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
  for (std::size_t k = 0; k < kJitter.size(); ++k) {
    try {
      if (kJitter[k] == 0.0) return {factorize(gram), 0.0};
      Matrix shifted = gram;
      shifted.diagonal().array() += kJitter[k];
      return {factorize(shifted), kJitter[k]};
    } catch (const FactorizationError&) {
      if (k + 1 == kJitter.size()) throw;
    }
  }
  throw NumericError("factorize_with_jitter: unreachable");
}

PosteriorFactors posterior_factors(const TaskDataset& dataset, const Matrix& features,
                                   const TaskHead& head) {
  if (features.rows() != dataset.size()) {
    throw ShapeError("posterior_factors: " + std::to_string(features.rows()) +
                     " feature rows for " + std::to_string(dataset.size()) + " responses");
  }
  PosteriorFactors out;
  auto chol = factorize_with_jitter(build_gram(features, head));
  out.chol_lower = std::move(chol.lower);
  out.jitter = chol.jitter;
  Vector rhs = features.transpose() * dataset.responses;
  out.chol_lower.triangularView<Eigen::Lower>().solveInPlace(rhs);
  out.projected = std::move(rhs);
  return out;
}

PredictiveDistribution predict(const Vector& query_features, const PosteriorFactors& factors,
                               const TaskHead& head) {
  if (query_features.size() != factors.feature_dim()) {
    throw ShapeError("predict: query has " + std::to_string(query_features.size()) +
                     " features, model has " + std::to_string(factors.feature_dim()));
  }
  if (!query_features.allFinite()) throw NumericError("predict: non-finite query features");
  const Vector u = factors.chol_lower.triangularView<Eigen::Lower>().solve(query_features);
  PredictiveDistribution p;
  p.mean = head.ratio() * factors.projected.dot(u);
  p.latent_variance = u.squaredNorm() / head.beta();
  p.variance = p.latent_variance + 1.0 / head.alpha();
  return p;
}

std::vector<PredictiveDistribution> predict_batch(const Matrix& query_features,
                                                  const PosteriorFactors& factors,
                                                  const TaskHead& head) {
  if (query_features.cols() != factors.feature_dim()) {
    throw ShapeError("predict_batch: query has " + std::to_string(query_features.cols()) +
                     " features, model has " + std::to_string(factors.feature_dim()));
  }
  if (!query_features.allFinite()) throw NumericError("predict_batch: non-finite query features");
  Matrix u = query_features.transpose();
  factors.chol_lower.triangularView<Eigen::Lower>().solveInPlace(u);
  const Vector means = head.ratio() * (u.transpose() * factors.projected);
  const Vector sq = u.colwise().squaredNorm().transpose();
  const double inv_beta = 1.0 / head.beta();
  const double noise = 1.0 / head.alpha();
  std::vector<PredictiveDistribution> out(static_cast<std::size_t>(query_features.rows()));
  for (Eigen::Index i = 0; i < query_features.rows(); ++i) {
    auto& p = out[static_cast<std::size_t>(i)];
    p.mean = means(i);
    p.latent_variance = sq(i) * inv_beta;
    p.variance = p.latent_variance + noise;
  }
  return out;
}

double task_nll(const TaskDataset& dataset, const PosteriorFactors& factors, const TaskHead& head) {
  const double n = static_cast<double>(dataset.size());
  const double alpha = head.alpha();
  const double fit = dataset.responses.squaredNorm() - head.ratio() * factors.projected.squaredNorm();
  const double log_det_half = factors.chol_lower.diagonal().array().log().sum();
  return -(0.5 * n * head.log_alpha - 0.5 * alpha * fit - log_det_half);
}

}  // namespace ablr
