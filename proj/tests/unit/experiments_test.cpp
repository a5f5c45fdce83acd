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

#include "ablr/experiments.hpp"
#include "ablr/results.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <sstream>

namespace ablr {
namespace {

MethodSettings fast_settings() {
  MethodSettings s;
  s.ablr.hidden_layers = {10, 10};
  s.ablr.fit.lbfgs.max_iterations = 30;
  s.ablr.fit.warm_max_iterations = 15;
  s.gp.max_iterations = 20;
  s.acquisition.num_candidates = 200;
  s.acquisition.num_refine = 2;
  s.acquisition.refine_steps = 4;
  return s;
}

TEST(Stats, Quantiles) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_EQ(quantile({0.0, 10.0}, 0.25), 2.5);
  EXPECT_THROW(median({}), ShapeError);
}

TEST(Stats, LogLogSlope) {
  const std::vector<double> n{256, 512, 1024, 2048};
  std::vector<double> cubic, linear;
  for (double v : n) {
    cubic.push_back(3e-9 * v * v * v);
    linear.push_back(0.2 * v);
  }
  EXPECT_NEAR(loglog_slope(n, cubic), 3.0, 1e-12);
  EXPECT_NEAR(loglog_slope(n, linear), 1.0, 1e-12);
}

TEST(Stats, IterationsToWithin) {
  const std::vector<double> inc{10.0, 6.0, 1.4, 1.0};
  EXPECT_EQ(iterations_to_within(inc, 1.0, 11.0, 0.05), 3u);
  EXPECT_EQ(iterations_to_within(inc, 0.0, 10.0, 0.05), 5u);
}

TEST(RunParallel, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(50);
  run_parallel(50, 4, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(run_parallel(5, 2, [](std::size_t i) { if (i == 3) throw Error("x"); }), Error);
}

TEST(Methods, NamesRoundTrip) {
  for (Method m : {Method::kGpPlain, Method::kGpTransfer, Method::kAblrPlain, Method::kAblrTransfer,
                   Method::kAblrTransferContext, Method::kRksTransfer}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_THROW(parse_method("nope"), ConfigError);
  EXPECT_TRUE(uses_context(Method::kGpTransfer));
  EXPECT_FALSE(is_transfer(Method::kGpPlain));
}

TEST(Loto, CurvesHaveBudgetLength) {
  const auto family = sample_family(3, 2);
  LotoConfig cfg;
  cfg.methods = {Method::kAblrPlain, Method::kAblrTransfer, Method::kGpTransfer};
  cfg.budget = 4;
  cfg.warm_per_task = 4;
  cfg.settings = fast_settings();
  const auto res = loto_run(family, cfg);
  EXPECT_EQ(res.runs.size(), 9u);
  EXPECT_EQ(res.failed_runs, 0u);
  for (const auto& [m, c] : res.curves) {
    EXPECT_EQ(c.median.size(), 4u);
    EXPECT_EQ(c.runs, 3u);
  }
  for (const auto& r : res.runs) {
    for (std::size_t i = 1; i < r.regret.size(); ++i) EXPECT_LE(r.regret[i], r.regret[i - 1]);
    EXPECT_GE(r.regret.back(), 0.0);
  }
}

TEST(Loto, WarmStartExcludesHeldOut) {
  const auto family = sample_family(4, 1);
  const auto h = loto_warm_start(family, 2, 10, 0);
  ASSERT_EQ(h.tasks.size(), 3u);
  for (const auto& t : h.tasks) {
    EXPECT_NE(t.task_id, "task2");
    EXPECT_EQ(t.observations.size(), 10u);
    EXPECT_EQ(t.context.size(), 3);
  }
}

TEST(Loto, ParallelEqualsSerial) {
  const auto family = sample_family(3, 9);
  LotoConfig cfg;
  cfg.budget = 4;
  cfg.settings = fast_settings();
  const auto serial = loto_run(family, cfg);
  cfg.jobs = 3;
  const auto parallel = loto_run(family, cfg);
  ASSERT_EQ(serial.runs.size(), parallel.runs.size());
  for (std::size_t i = 0; i < serial.runs.size(); ++i) EXPECT_EQ(serial.runs[i].incumbent, parallel.runs[i].incumbent);
}

TEST(SyntheticFlows, GridTables) {
  const auto tables = synthetic_flows(2, 3, 2, 4);
  ASSERT_EQ(tables.size(), 2u);
  EXPECT_EQ(tables[0].size(), 9u);
  EXPECT_EQ(tables[1].task_id(), "flow1");
  EXPECT_EQ(tables[0].hyperparameter_names(), tables[1].hyperparameter_names());
}

TEST(MultiSignal, ProblemIsDeterministic) {
  MultiSignalProblem a(3, 3), b(3, 3);
  const auto space = classifier_space();
  const Configuration c{2, 20, 0.5, 0.125, 6};
  EXPECT_EQ(a.evaluate(c), b.evaluate(c));
  EXPECT_EQ(a.evaluate(c), a.evaluate(c));
  EXPECT_EQ(a.evaluate(c).size(), 3u);
  MultiSignalProblem one(3, 1);
  EXPECT_EQ(one.evaluate(c)[0], a.evaluate(c)[0]);
  const auto [lo, hi] = one.target_range();
  EXPECT_LT(lo, hi);
  EXPECT_LE(lo, one.target_value(space.encode(c)));
}

TEST(MultiSignal, SideSignalsCorrelate) {
  MultiSignalProblem p(5, 3);
  const auto space = classifier_space();
  std::vector<double> t, s;
  for (const auto& c : {Configuration{1, 1, 0.015625, 0.015625, 3}, Configuration{4, 50, 8, 0.5, 10},
                        Configuration{2, 25, 0.5, 0.125, 6}, Configuration{3, 10, 2, 0.25, 4}}) {
    const auto v = p.evaluate(c);
    t.push_back(v[0]);
    s.push_back(v[1]);
  }
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(s[i], t[i], 0.1);
}

TEST(Results, CsvLayout) {
  ResultSeries s{"ablr_plain", "task0", 7, {3.0, 2.5}, {1.0, 0.5}, {12.0, 13.0}};
  std::ostringstream a, b;
  write_results_csv(a, {s}, false);
  EXPECT_EQ(a.str(), "method,task,seed,iteration,incumbent,regret,wall_time_ms\n"
                     "ablr_plain,task0,7,1,3,1,0\nablr_plain,task0,7,2,2.5,0.5,0\n");
  write_results_csv(b, {s}, true);
  EXPECT_NE(b.str().find(",12\n"), std::string::npos);
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
}

}  // namespace
}  // namespace ablr
