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

#include "ablr/training.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace ablr {
namespace {

using testing::central_difference;
using testing::max_relative_error;
using testing::random_head;
using testing::random_matrix;
using testing::random_vector;

std::vector<TaskDataset> random_tasks(std::size_t t, Eigen::Index n, Eigen::Index p, std::mt19937_64& rng) {
  std::vector<TaskDataset> out;
  for (std::size_t i = 0; i < t; ++i) {
    TaskDataset d;
    d.task_id = "t" + std::to_string(i);
    d.inputs = random_matrix(n, p, rng);
    d.responses = random_vector(n, rng);
    out.push_back(std::move(d));
  }
  return out;
}

JointParams random_params(const FeatureMap& arch, std::size_t t, std::mt19937_64& rng) {
  JointParams p = JointParams::initial(arch, t);
  for (auto& h : p.heads) h = random_head(rng);
  return p;
}

Matrix lower_of(const Matrix& k) { return k.llt().matrixL(); }

TEST(CholeskyBackward, ZeroGradient) {
  const Matrix l = lower_of(Matrix::Identity(4, 4) * 3.0);
  EXPECT_TRUE(cholesky_backward(l, Matrix::Zero(4, 4)).isZero(0.0));
}

TEST(CholeskyBackward, Scalar) {
  Matrix l(1, 1), g(1, 1);
  l << std::sqrt(5.0);
  g << 0.8;
  EXPECT_NEAR(cholesky_backward(l, g)(0, 0), 0.8 / (2.0 * std::sqrt(5.0)), 1e-15);
}

TEST(CholeskyBackward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  const Matrix b = random_matrix(6, 6, rng);
  const Matrix k = b * b.transpose() + 6.0 * Matrix::Identity(6, 6);
  const Matrix weights = random_matrix(6, 6, rng).triangularView<Eigen::Lower>();
  const Matrix analytic = cholesky_backward(lower_of(k), weights);
  // Perturb symmetric pairs together; the backward result is the symmetric
  // gradient, so d/dK_ij along (e_ij + e_ji) equals 2 * sym_ij off-diagonal.
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      Matrix e = Matrix::Zero(6, 6);
      e(i, j) = e(j, i) = 1.0;
      const double fp = (lower_of(k + h * e).array() * weights.array()).sum();
      const double fm = (lower_of(k - h * e).array() * weights.array()).sum();
      const double numeric = (fp - fm) / (2.0 * h);
      const double expected = i == j ? analytic(i, i) : analytic(i, j) + analytic(j, i);
      EXPECT_NEAR(expected, numeric, 1e-6) << i << "," << j;
    }
  }
}

TEST(Objective, EmptyTasksGiveZero) {
  const FeatureMap arch(init_mlp({2, 4}, 0));
  std::vector<TaskDataset> tasks(2);
  for (auto& d : tasks) {
    d.inputs = Matrix(0, 2);
    d.responses = Vector(0);
  }
  EXPECT_EQ(objective(JointParams::initial(arch, 2), tasks, arch), 0.0);
}

TEST(Objective, SumsPerTaskEvidence) {
  std::mt19937_64 rng(2);
  const FeatureMap arch(init_mlp({3, 6, 5}, 1, true));
  const auto tasks = random_tasks(3, 9, 3, rng);
  const auto params = random_params(arch, 3, rng);
  const FeatureMap map = arch.with_params(params.feature_params);
  double sum = 0.0;
  for (std::size_t t = 0; t < 3; ++t) {
    const Matrix phi = map.forward(tasks[t].inputs);
    sum += task_nll(tasks[t], posterior_factors(tasks[t], phi, params.heads[t]), params.heads[t]);
  }
  EXPECT_NEAR(objective(params, tasks, arch), sum, 1e-12 * std::abs(sum));
}

TEST(Objective, SingleTaskEqualsTaskNll) {
  std::mt19937_64 rng(3);
  const FeatureMap arch(init_rks(2, 6, 4));
  const auto tasks = random_tasks(1, 7, 2, rng);
  const auto params = random_params(arch, 1, rng);
  const Matrix phi = arch.forward(tasks[0].inputs);
  EXPECT_DOUBLE_EQ(objective(params, tasks, arch),
                   task_nll(tasks[0], posterior_factors(tasks[0], phi, params.heads[0]), params.heads[0]));
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const FeatureMap arch(init_mlp({3, 8, 8}, 2, true));
  const auto tasks = random_tasks(2, 20, 3, rng);
  const auto params = random_params(arch, 2, rng);
  const Vector analytic = gradient(params, tasks, arch);
  const Vector numeric = central_difference(
      [&](const Vector& flat) {
        return objective(JointParams::unflatten(flat, arch.num_params(), 2), tasks, arch);
      },
      params.flatten());
  EXPECT_LE(max_relative_error(analytic, numeric), 1e-4);
}

TEST(Gradient, ZeroResponsesLogAlpha) {
  std::mt19937_64 rng(5);
  const FeatureMap arch(init_mlp({2, 4}, 3));
  auto tasks = random_tasks(1, 6, 2, rng);
  tasks[0].responses.setZero();
  const auto params = random_params(arch, 1, rng);
  const Vector g = gradient(params, tasks, arch);
  const Eigen::Index ia = arch.num_params();
  const Vector numeric = central_difference(
      [&](const Vector& flat) {
        return objective(JointParams::unflatten(flat, arch.num_params(), 1), tasks, arch);
      },
      params.flatten());
  EXPECT_NEAR(g(ia), numeric(ia), 1e-7);
  EXPECT_NEAR(g(ia + 1), numeric(ia + 1), 1e-7);
}

TEST(Gradient, DuplicatedTaskDoublesFeatureGradient) {
  std::mt19937_64 rng(6);
  const FeatureMap arch(init_mlp({3, 5, 4}, 4, true));
  const auto single = random_tasks(1, 10, 3, rng);
  const auto twice = std::vector<TaskDataset>{single[0], single[0]};
  auto p1 = random_params(arch, 1, rng);
  JointParams p2 = p1;
  p2.heads.push_back(p1.heads[0]);
  const Vector g1 = gradient(p1, single, arch);
  const Vector g2 = gradient(p2, twice, arch);
  const Eigen::Index nz = arch.num_params();
  EXPECT_LE((g2.head(nz) - 2.0 * g1.head(nz)).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + g1.head(nz).norm()));
  EXPECT_EQ(g2.segment(nz, 2), g2.segment(nz + 2, 2));
  EXPECT_LE((g2.segment(nz, 2) - g1.segment(nz, 2)).norm(), 1e-12);
}

TEST(Gradient, SharedInputsGroupedLikeSeparate) {
  std::mt19937_64 rng(7);
  const FeatureMap arch(init_mlp({2, 5, 3}, 6, true));
  auto tasks = random_tasks(3, 8, 2, rng);
  tasks[1].inputs = tasks[0].inputs;  // same inputs, different signal
  const auto params = random_params(arch, 3, rng);
  JointObjective joint(tasks, arch);
  Vector g;
  const double v = joint.value_and_gradient(params, g);
  double sum = 0.0;
  Vector sum_g = Vector::Zero(arch.num_params());
  for (std::size_t t = 0; t < 3; ++t) {
    JointParams one;
    one.feature_params = params.feature_params;
    one.heads = {params.heads[t]};
    sum += objective(one, {tasks[t]}, arch);
    sum_g += gradient(one, {tasks[t]}, arch).head(arch.num_params());
  }
  EXPECT_NEAR(v, sum, 1e-10 * std::abs(sum));
  EXPECT_LE((g.head(arch.num_params()) - sum_g).norm(), 1e-10 * (1.0 + sum_g.norm()));
}

TEST(Fit, RksDescends) {
  std::mt19937_64 rng(8);
  const FeatureMap arch(init_rks(2, 20, 5));
  const auto tasks = random_tasks(1, 15, 2, rng);
  const auto start = JointParams::initial(arch, 1);
  const auto result = fit(tasks, arch, FitConfig{}, start);
  EXPECT_LE(result.report.final_objective, objective(start, tasks, arch));
  EXPECT_TRUE(std::isfinite(result.report.final_objective));
}

TEST(Fit, RecoversNoisePrecision) {
  std::mt19937_64 rng(9);
  const FeatureMap arch(init_mlp({2, 6}, 10, true));
  TaskDataset d;
  d.inputs = random_matrix(200, 2, rng);
  const Vector w = random_vector(6, rng);
  const double noise_sd = 0.1;
  d.responses = arch.forward(d.inputs) * w + random_vector(200, rng, noise_sd);
  const auto result = fit({d}, arch, FitConfig{}, JointParams::initial(arch, 1));
  const double alpha = result.params.heads[0].alpha();
  const double truth = 1.0 / (noise_sd * noise_sd);
  EXPECT_GT(alpha, truth / 2.0);
  EXPECT_LT(alpha, truth * 2.0);
}

TEST(Fit, Deterministic) {
  std::mt19937_64 rng(10);
  const FeatureMap arch(init_mlp({3, 6, 6}, 12, true));
  const auto tasks = random_tasks(2, 12, 3, rng);
  FitConfig cfg;
  cfg.lbfgs.max_iterations = 30;
  const auto a = fit(tasks, arch, cfg);
  const auto b = fit(tasks, arch, cfg);
  EXPECT_EQ(a.report.objective_trace, b.report.objective_trace);
  EXPECT_EQ(a.params.flatten(), b.params.flatten());
}

TEST(JointParams, FlattenRoundTrip) {
  const FeatureMap arch(init_mlp({2, 3}, 0));
  JointParams p = JointParams::initial(arch, 2);
  p.heads[1].log_beta = -0.25;
  const auto back = JointParams::unflatten(p.flatten(), arch.num_params(), 2);
  EXPECT_EQ(back.flatten(), p.flatten());
  EXPECT_THROW(JointParams::unflatten(Vector::Zero(3), arch.num_params(), 2), ShapeError);
}

}  // namespace
}  // namespace ablr
