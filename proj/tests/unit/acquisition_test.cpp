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

#include "ablr/acquisition.hpp"

#include "fake_surrogate.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

namespace ablr {
namespace {

using testing::FunctionSurrogate;

PredictiveDistribution normal(double mean, double sd) {
  PredictiveDistribution p;
  p.mean = mean;
  p.latent_variance = sd * sd;
  p.variance = sd * sd + 0.5;
  return p;
}

TEST(ExpectedImprovement, AtIncumbentEqualsPdfAtZero) {
  EXPECT_NEAR(expected_improvement(normal(0.3, 1.0), 0.3), 0.3989422804014327, 1e-15);
}

TEST(ExpectedImprovement, NoVarianceNoImprovement) {
  EXPECT_EQ(expected_improvement(normal(1.0, 0.0), 0.5), 0.0);
  EXPECT_EQ(expected_improvement(normal(0.2, 0.0), 0.5), 0.3);
}

TEST(ExpectedImprovement, VarianceChoice) {
  const auto p = normal(0.0, 1.0);
  const double latent = expected_improvement(p, 0.0, VarianceChoice::kLatent);
  const double obs = expected_improvement(p, 0.0, VarianceChoice::kObservation);
  EXPECT_NEAR(obs, std::sqrt(1.5) / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_LT(latent, obs);
}

TEST(ExpectedImprovement, MonteCarlo) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double mean = u(rng), sd = 0.1 + std::abs(u(rng)), inc = u(rng);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += std::max(inc - (mean + sd * z(rng)), 0.0);
    EXPECT_NEAR(expected_improvement(normal(mean, sd), inc), sum / n, 5e-3 * (1.0 + sd));
  }
}

TEST(ExpectedImprovement, NonNegativeAndMonotone) {
  double prev = std::numeric_limits<double>::infinity();
  for (double m = -3.0; m <= 3.0; m += 0.25) {
    const double ei = expected_improvement(normal(m, 0.7), 0.0);
    EXPECT_GE(ei, 0.0);
    EXPECT_LE(ei, prev);
    prev = ei;
  }
}

TEST(Sobol, UnitCubeAndDeterministic) {
  const Matrix a = scrambled_sobol(256, 3, 7);
  EXPECT_GE(a.minCoeff(), 0.0);
  EXPECT_LT(a.maxCoeff(), 1.0);
  EXPECT_EQ(a, scrambled_sobol(256, 3, 7));
  EXPECT_NE(a, scrambled_sobol(256, 3, 8));
  // Low discrepancy: every half of every axis holds ~half the points.
  for (Eigen::Index d = 0; d < 3; ++d) {
    const auto below = (a.col(d).array() < 0.5).count();
    EXPECT_NEAR(static_cast<double>(below), 128.0, 2.0);
  }
}

TEST(ProposeNext, NoModelIsSeededRandom) {
  const SearchSpace space({Dimension::continuous("x", -1, 1), Dimension::integer("k", 0, 9)});
  ProposalRequest req;
  req.space = &space;
  req.seed = 3;
  const auto a = propose_next(nullptr, req);
  const auto b = propose_next(nullptr, req);
  EXPECT_TRUE(a.random);
  EXPECT_EQ(a.configuration, b.configuration);
  EXPECT_TRUE(space.contains(a.configuration));
}

TEST(ProposeNext, MonotoneMeanPicksLowEnd) {
  const SearchSpace space({Dimension::continuous("x", 0, 10)});
  FunctionSurrogate model([](const Vector& u) { return normal(u(0), 0.3); });
  ProposalRequest req;
  req.space = &space;
  req.incumbent = 0.5;
  req.config.num_candidates = 200;
  const auto s = propose_next(&model, req);
  EXPECT_LT(s.configuration[0], 1e-3);
  EXPECT_FALSE(s.random);
}

TEST(ProposeNext, RefinementFindsInteriorOptimum) {
  const SearchSpace space({Dimension::continuous("x", 0, 1), Dimension::continuous("y", 0, 1)});
  FunctionSurrogate model([](const Vector& u) {
    return normal((u(0) - 0.3141) * (u(0) - 0.3141) + (u(1) - 0.7182) * (u(1) - 0.7182), 0.1);
  });
  ProposalRequest req;
  req.space = &space;
  req.incumbent = 0.0;
  req.config.num_candidates = 64;
  const auto s = propose_next(&model, req);
  EXPECT_NEAR(s.configuration[0], 0.3141, 2e-3);
  EXPECT_NEAR(s.configuration[1], 0.7182, 2e-3);
}

TEST(ProposeNext, DiscreteEqualsExhaustiveArgmax) {
  const SearchSpace space({Dimension::integer("a", 0, 9), Dimension::ordinal("b", {0.1, 0.2, 0.4, 0.8})});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int state = 0; state < 10; ++state) {
    const double w0 = u(rng), w1 = u(rng), c0 = u(rng), c1 = u(rng);
    FunctionSurrogate model([&](const Vector& x) {
      return normal(w0 * std::sin(7 * x(0) + c0) + w1 * std::cos(5 * x(1) + c1), 0.2 + 0.3 * x(0));
    });
    ProposalRequest req;
    req.space = &space;
    req.incumbent = -0.2;
    const auto s = propose_next(&model, req);
    double best = -1.0;
    for (const auto& c : space.enumerate()) {
      const auto p = model.predict_standardized(space.encode(c).transpose())[0];
      best = std::max(best, expected_improvement(p, -0.2));
    }
    EXPECT_EQ(s.acquisition_value, best);
  }
}

TEST(ProposeNext, RespectsExclusions) {
  const SearchSpace space({Dimension::integer("a", 0, 3)});
  FunctionSurrogate model([](const Vector& x) { return normal(x(0), 0.1); });
  ProposalRequest req;
  req.space = &space;
  req.incumbent = 0.0;
  req.exclude.insert(canonical_key(space.encode({0.0})));
  EXPECT_EQ(propose_next(&model, req).configuration, Configuration{1.0});
  for (double v : {1.0, 2.0, 3.0}) req.exclude.insert(canonical_key(space.encode({v})));
  EXPECT_THROW(propose_next(&model, req), ConfigError);
}

TEST(ProposeNext, TieBreakLowerMeanThenLexicographic) {
  const SearchSpace space({Dimension::integer("a", 0, 3)});
  // EI identical (zero variance, no improvement anywhere) -> lowest mean wins.
  FunctionSurrogate model([](const Vector& x) { return normal(5.0 + std::abs(x(0) - 2.0 / 3.0), 0.0); });
  ProposalRequest req;
  req.space = &space;
  req.incumbent = 0.0;
  EXPECT_EQ(propose_next(&model, req).configuration, Configuration{2.0});
  FunctionSurrogate flat([](const Vector&) { return normal(5.0, 0.0); });
  EXPECT_EQ(propose_next(&flat, req).configuration, Configuration{0.0});
}

TEST(ProposeNext, AcquisitionReportedInRawUnits) {
  const SearchSpace space({Dimension::integer("a", 0, 1)});
  Standardization scaling;
  scaling.mean = 10.0;
  scaling.scale = 4.0;
  FunctionSurrogate model([](const Vector&) { return normal(0.0, 1.0); }, scaling);
  ProposalRequest req;
  req.space = &space;
  req.incumbent = 10.0;  // standardized 0
  const auto s = propose_next(&model, req);
  EXPECT_NEAR(s.acquisition_value, 4.0 * 0.3989422804014327, 1e-14);
  EXPECT_NEAR(s.predicted.mean, 10.0, 1e-14);
}

}  // namespace
}  // namespace ablr
