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

#include "ablr/quadratic.hpp"

#include <gtest/gtest.h>

namespace ablr {
namespace {

TEST(Quadratic, Evaluation) {
  const QuadraticTask t{2.0, 0.0, 0.0};
  EXPECT_EQ(quad_eval(t, std::array<double, 3>{1, 1, 1}), 3.0);
  const QuadraticTask u{1.3, 0.7, 4.2};
  EXPECT_EQ(quad_eval(u, std::array<double, 3>{0, 0, 0}), 4.2);
}

TEST(Quadratic, Minimizer) {
  const QuadraticTask t{1.0, 1.0, 1.0};
  EXPECT_EQ(t.minimum(), -0.5);
  EXPECT_EQ(t.minimizer(), (std::array<double, 3>{-1, -1, -1}));
  EXPECT_EQ(quad_eval(t, t.minimizer()), t.minimum());
}

TEST(Quadratic, FamilyIsDeterministicAndInRange) {
  const auto a = sample_family(30, 5);
  const auto b = sample_family(30, 5);
  ASSERT_EQ(a.size(), 30u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].a, b[i].a);
    for (double v : {a[i].a, a[i].b, a[i].c}) {
      EXPECT_GE(v, QuadraticTask::kCoefLo);
      EXPECT_LE(v, QuadraticTask::kCoefHi);
    }
    EXPECT_LE(a[i].b / a[i].a, QuadraticTask::kBox);
  }
}

TEST(Quadratic, UnrejectedCoefficientMean) {
  const auto family = sample_family(10000, 11, false);
  double sum = 0.0;
  for (const auto& t : family) sum += t.a;
  EXPECT_NEAR(sum / 10000.0, 5.05, 0.1);
}

TEST(Quadratic, SpaceAndContext) {
  const auto s = quadratic_space();
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].lo, -10.0);
  const QuadraticTask t{1.5, 2.5, 3.5};
  EXPECT_EQ(t.context().size(), 3);
  QuadraticBlackBox box(t);
  EXPECT_EQ(box.evaluate({0, 0, 0}), std::vector<double>{3.5});
  EXPECT_THROW((QuadraticTask{0.0, 1.0, 1.0}.validate()), ConfigError);
}

}  // namespace
}  // namespace ablr
