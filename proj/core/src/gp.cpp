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

#include "ablr/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ablr {

Vector GpHyperparameters::flatten() const {
  Vector flat(log_lengthscales.size() + 2);
  flat(0) = log_signal_variance;
  flat.segment(1, log_lengthscales.size()) = log_lengthscales;
  flat(flat.size() - 1) = log_noise_variance;
  return flat;
}

GpHyperparameters GpHyperparameters::unflatten(const Vector& flat) {
  require(flat.size() >= 3, "GpHyperparameters: need at least 3 entries");
  GpHyperparameters h;
  h.log_signal_variance = flat(0);
  h.log_lengthscales = flat.segment(1, flat.size() - 2);
  h.log_noise_variance = flat(flat.size() - 1);
  return h;
}

GpBaseline::GpBaseline(InputScaler scaler) : scaler_(std::move(scaler)) {
  hyper_.log_lengthscales = Vector::Zero(scaler_.dim());
}

Matrix GpBaseline::kernel(const Matrix& a, const Matrix& b, const GpHyperparameters& h) const {
  const Vector inv_ls = (-h.log_lengthscales.array()).exp();
  const Matrix as = a * inv_ls.asDiagonal();
  const Matrix bs = b * inv_ls.asDiagonal();
  Matrix sq = -2.0 * as * bs.transpose();
  sq.colwise() += as.rowwise().squaredNorm();
  sq.rowwise() += bs.rowwise().squaredNorm().transpose();
  return std::exp(h.log_signal_variance) * (-0.5 * sq.array().max(0.0)).exp().matrix();
}

void GpBaseline::condition(const Matrix& inputs, const Vector& responses, const GpHyperparameters& hyper) {
  require(inputs.rows() >= 1, "GpBaseline: need at least one training point");
  require(inputs.rows() == responses.size(), "GpBaseline: inputs/responses length mismatch");
  require(hyper.log_lengthscales.size() == scaler_.dim(), "GpBaseline: lengthscale count");
  if (!inputs.allFinite() || !responses.allFinite()) throw NumericError("GpBaseline: non-finite data");
  x_ = scaler_.apply(inputs);
  scaling_ = Standardization::fit(responses);
  y_ = scaling_.apply(responses);
  hyper_ = hyper;
  Matrix k = kernel(x_, x_, hyper_);
  k.diagonal().array() += std::exp(hyper_.log_noise_variance) + kNoiseFloor;
  chol_ = factorize_with_jitter(k).lower;
  weights_ = chol_.triangularView<Eigen::Lower>().solve(y_);
  chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(weights_);
}

double GpBaseline::neg_log_evidence(const Vector& flat_hyper, Vector* gradient) const {
  const auto h = GpHyperparameters::unflatten(flat_hyper);
  const Eigen::Index n = x_.rows();
  const Matrix kf = kernel(x_, x_, h);
  const double noise = std::exp(h.log_noise_variance) + kNoiseFloor;
  Matrix k = kf;
  k.diagonal().array() += noise;
  const auto chol = factorize_with_jitter(k);
  const auto tri = chol.lower.triangularView<Eigen::Lower>();
  Vector alpha = tri.solve(y_);
  const double fit_term = 0.5 * alpha.squaredNorm();
  chol.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha);
  const double value = fit_term + chol.lower.diagonal().array().log().sum() +
                       0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!gradient) return value;

  // d nll / d theta = 1/2 tr((K^-1 - a a^T) dK/dtheta)
  Matrix w = Matrix::Identity(n, n);
  tri.solveInPlace(w);
  chol.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(w);
  w.noalias() -= alpha * alpha.transpose();

  const Eigen::Index p = x_.cols();
  gradient->resize(p + 2);
  const Matrix wk = (w.array() * kf.array()).matrix();
  (*gradient)(0) = 0.5 * wk.sum();
  for (Eigen::Index d = 0; d < p; ++d) {
    const double inv_ls2 = std::exp(-2.0 * h.log_lengthscales(d));
    const Vector col = x_.col(d);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += (wk.col(j).array() * (col.array() - col(j)).square()).sum();
    }
    (*gradient)(1 + d) = 0.5 * acc * inv_ls2;
  }
  (*gradient)(p + 1) = 0.5 * std::exp(h.log_noise_variance) * w.trace();
  return value;
}

LbfgsResult GpBaseline::fit(const Matrix& inputs, const Vector& responses, const LbfgsConfig& config) {
  GpHyperparameters start;
  start.log_lengthscales = Vector::Zero(scaler_.dim());
  condition(inputs, responses, start);
  auto f = [this](const Vector& theta, Vector& grad) {
    try {
      return neg_log_evidence(theta, &grad);
    } catch (const NumericError&) {
      grad.setZero(theta.size());
      return std::numeric_limits<double>::infinity();
    }
  };
  auto res = minimize_lbfgs(f, start.flatten(), config);
  condition(inputs, responses, GpHyperparameters::unflatten(res.x));
  return res;
}

std::vector<PredictiveDistribution> GpBaseline::predict_standardized(const Matrix& inputs) const {
  require(chol_.size() > 0, "GpBaseline: predict before fit");
  const Matrix xs = scaler_.apply(inputs);
  const Matrix ks = kernel(x_, xs, hyper_);  // N x M
  const Vector mean = ks.transpose() * weights_;
  Matrix v = ks;
  chol_.triangularView<Eigen::Lower>().solveInPlace(v);
  const double sf2 = std::exp(hyper_.log_signal_variance);
  const double noise = std::exp(hyper_.log_noise_variance) + kNoiseFloor;
  std::vector<PredictiveDistribution> out(static_cast<std::size_t>(inputs.rows()));
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    auto& p = out[static_cast<std::size_t>(i)];
    p.mean = mean(i);
    p.latent_variance = std::max(sf2 - v.col(i).squaredNorm(), 0.0);
    p.variance = p.latent_variance + noise;
  }
  return out;
}

std::vector<PredictiveDistribution> GpBaseline::predict(const Matrix& inputs) const {
  auto out = predict_standardized(inputs);
  for (auto& p : out) p = scaling_.invert(p);
  return out;
}

GpSurrogate::GpSurrogate(InputScaler scaler, bool stack_all, LbfgsConfig config)
    : gp_(std::move(scaler)), stack_all_(stack_all), config_(config) {}

void GpSurrogate::fit(const std::vector<TaskDataset>& tasks, std::size_t target) {
  require(target < tasks.size(), "GpSurrogate: target index out of range");
  Eigen::Index rows = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (stack_all_ || t == target) rows += tasks[t].size();
  }
  empty_ = rows == 0;
  if (empty_) return;
  Matrix x(rows, tasks[target].inputs.cols());
  Vector y(rows);
  Eigen::Index r = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (!(stack_all_ || t == target) || tasks[t].size() == 0) continue;
    x.middleRows(r, tasks[t].size()) = tasks[t].inputs;
    y.segment(r, tasks[t].size()) = tasks[t].responses;
    r += tasks[t].size();
  }
  gp_.fit(x, y, config_);
}

std::vector<PredictiveDistribution> GpSurrogate::predict_standardized(const Matrix& inputs) const {
  if (empty_) {
    // Prior: zero mean, unit signal variance.
    return std::vector<PredictiveDistribution>(static_cast<std::size_t>(inputs.rows()),
                                               PredictiveDistribution{0.0, 1.0 + 1e-2, 1.0});
  }
  return gp_.predict_standardized(inputs);
}

Standardization GpSurrogate::target_standardization() const {
  return empty_ ? Standardization{} : gp_.response_scaling();
}

}  // namespace ablr
