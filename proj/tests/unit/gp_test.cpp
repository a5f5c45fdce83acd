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

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace ablr {
namespace {

using testing::random_matrix;
using testing::random_vector;

Matrix dense_kernel(const Matrix& a, const Matrix& b, const GpHyperparameters& h) {
  Matrix k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (Eigen::Index d = 0; d < a.cols(); ++d) {
        const double z = (a(i, d) - b(j, d)) / std::exp(h.log_lengthscales(d));
        s += z * z;
      }
      k(i, j) = std::exp(h.log_signal_variance - 0.5 * s);
    }
  }
  return k;
}

GpHyperparameters some_hyper(Eigen::Index p) {
  GpHyperparameters h;
  h.log_signal_variance = 0.3;
  h.log_lengthscales = Vector::LinSpaced(p, -0.2, 0.4);
  h.log_noise_variance = std::log(0.05);
  return h;
}

TEST(Gp, EvidenceMatchesDenseOracle) {
  std::mt19937_64 rng(1);
  const Matrix x = random_matrix(15, 3, rng);
  const Vector y = random_vector(15, rng);
  GpBaseline gp(InputScaler::identity(3));
  const auto h = some_hyper(3);
  gp.condition(x, y, h);
  const Vector ys = Standardization::fit(y).apply(y);
  Matrix k = dense_kernel(x, x, h);
  k.diagonal().array() += std::exp(h.log_noise_variance) + GpBaseline::kNoiseFloor;
  const Eigen::PartialPivLU<Matrix> lu(k);
  const double expected = 0.5 * ys.dot(lu.solve(ys)) + 0.5 * lu.matrixLU().diagonal().array().abs().log().sum() +
                          7.5 * std::log(2.0 * std::numbers::pi);
  EXPECT_NEAR(gp.neg_log_evidence(h.flatten(), nullptr), expected, 1e-9);
}

TEST(Gp, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  const Matrix x = random_matrix(12, 2, rng);
  GpBaseline gp(InputScaler::identity(2));
  gp.condition(x, random_vector(12, rng), some_hyper(2));
  const Vector theta = some_hyper(2).flatten();
  Vector g;
  gp.neg_log_evidence(theta, &g);
  const Vector numeric =
      testing::central_difference([&](const Vector& t) { return gp.neg_log_evidence(t, nullptr); }, theta);
  EXPECT_LE(testing::max_relative_error(g, numeric), 1e-5);
}

TEST(Gp, PredictionMatchesDenseOracle) {
  std::mt19937_64 rng(3);
  const Matrix x = random_matrix(10, 2, rng);
  const Vector y = random_vector(10, rng);
  GpBaseline gp(InputScaler::identity(2));
  const auto h = some_hyper(2);
  gp.condition(x, y, h);
  const Matrix q = random_matrix(4, 2, rng);
  const auto preds = gp.predict_standardized(q);
  const double noise = std::exp(h.log_noise_variance) + GpBaseline::kNoiseFloor;
  Matrix k = dense_kernel(x, x, h);
  k.diagonal().array() += noise;
  const Matrix kinv = k.inverse();
  const Vector ys = Standardization::fit(y).apply(y);
  const Matrix ks = dense_kernel(x, q, h);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double mean = ks.col(i).dot(kinv * ys);
    const double var = std::exp(h.log_signal_variance) - ks.col(i).dot(kinv * ks.col(i));
    EXPECT_NEAR(preds[static_cast<std::size_t>(i)].mean, mean, 1e-9);
    EXPECT_NEAR(preds[static_cast<std::size_t>(i)].latent_variance, var, 1e-9);
  }
}

TEST(Gp, FitImprovesEvidence) {
  std::mt19937_64 rng(4);
  const Matrix x = random_matrix(25, 2, rng);
  Vector y(25);
  for (Eigen::Index i = 0; i < 25; ++i) y(i) = std::sin(2.0 * x(i, 0)) + 0.1 * x(i, 1);
  GpBaseline gp(InputScaler::fit(x));
  GpHyperparameters start;
  start.log_lengthscales = Vector::Zero(2);
  gp.condition(x, y, start);
  const double before = gp.neg_log_evidence(start.flatten(), nullptr);
  const auto res = gp.fit(x, y, LbfgsConfig{});
  EXPECT_LT(res.value, before);
  const auto p = gp.predict(x.topRows(3));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p[static_cast<std::size_t>(i)].mean, y(i), 0.05);
}

TEST(GpSurrogate, EmptyTargetGivesPrior) {
  GpSurrogate s(InputScaler::identity(2), false);
  std::vector<TaskDataset> tasks(1);
  tasks[0].inputs = Matrix(0, 2);
  tasks[0].responses = Vector(0);
  s.fit(tasks, 0);
  const auto p = s.predict_standardized(Matrix::Zero(1, 2));
  EXPECT_EQ(p[0].mean, 0.0);
  EXPECT_EQ(p[0].latent_variance, 1.0);
}

TEST(GpSurrogate, StackingUsesAllTasks) {
  std::mt19937_64 rng(5);
  std::vector<TaskDataset> tasks(2);
  for (auto& t : tasks) {
    t.inputs = random_matrix(6, 2, rng);
    t.responses = random_vector(6, rng);
  }
  LbfgsConfig cfg;
  cfg.max_iterations = 20;
  GpSurrogate plain(InputScaler::identity(2), false, cfg), stacked(InputScaler::identity(2), true, cfg);
  plain.fit(tasks, 1);
  stacked.fit(tasks, 1);
  Vector all(12);
  all << tasks[0].responses, tasks[1].responses;
  EXPECT_DOUBLE_EQ(stacked.target_standardization().mean, Standardization::fit(all).mean);
  EXPECT_DOUBLE_EQ(plain.target_standardization().mean, Standardization::fit(tasks[1].responses).mean);
}

}  // namespace
}  // namespace ablr
