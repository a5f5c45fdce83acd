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

#include "ablr/tabular.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace ablr {
namespace {

TabularBlackBox parse(const std::string& text) {
  std::istringstream in(text);
  return TabularBlackBox::read_csv(in, "t");
}

void expect_error(const std::string& text, std::size_t line, const std::string& column, const std::string& fragment) {
  try {
    parse(text);
    FAIL() << "expected TableError";
  } catch (const TableError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.column(), column) << e.what();
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Tabular, ParsesWellFormedTable) {
  auto t = parse("a,b,signal:err,signal:time\n1,0.5,0.3,10\n2,0.5,0.1,20\n1,0.25,0.2,5\n");
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.hyperparameter_names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.signal_names(), (std::vector<std::string>{"err", "time"}));
  EXPECT_EQ(t.evaluate({2.0, 0.5}), (std::vector<double>{0.1, 20.0}));
  EXPECT_EQ(t.minimum(0), 0.1);
  EXPECT_EQ(t.minimum(1), 5.0);
  EXPECT_THROW(t.evaluate({3.0, 0.5}), EvaluationError);
}

TEST(Tabular, LookupToleratesRoundoff) {
  auto t = parse("a,signal:y\n0.1,1\n");
  EXPECT_TRUE(t.contains({0.1 + 1e-15}));
}

TEST(Tabular, Errors) {
  expect_error("a,signal:y\n1,2\n1,3\n", 3, "", "first seen on line 2");
  expect_error("a,signal:y\n1,abc\n", 2, "signal:y", "non-numeric");
  expect_error("a,signal:y\n1,nan\n", 2, "signal:y", "non-finite");
  expect_error("a,signal:y\n1\n", 2, "", "cells");
  expect_error("signal:y,a\n1,2\n", 1, "a", "after a signal");
  expect_error("a,b\n1,2\n", 1, "", "no signal columns");
  expect_error("a,signal:y\n", 1, "", "no data rows");
  expect_error("a,a,signal:y\n1,2,3\n", 1, "", "duplicate column");
}

TEST(Tabular, CsvRoundTrip) {
  auto t = parse("a,signal:y\n0.1,1.5\n0.30000000000000004,2\n");
  std::ostringstream out;
  t.write_csv(out);
  auto back = parse(out.str());
  EXPECT_EQ(back.configurations(), t.configurations());
  EXPECT_EQ(back.signal_rows(), t.signal_rows());
}

TEST(Tabular, SpaceIsUnionOfValues) {
  auto a = parse("x,signal:y\n1,0\n3,0\n");
  auto b = parse("x,signal:y\n2,0\n3,0\n");
  const auto space = tabular_space({&a, &b});
  ASSERT_EQ(space.size(), 1u);
  EXPECT_EQ(space[0].values, (std::vector<double>{1, 2, 3}));
}

TEST(Tabular, ToHistory) {
  auto t = parse("x,signal:y\n1,4\n2,5\n");
  const auto h = t.to_history();
  EXPECT_EQ(h.task_id, "t");
  ASSERT_EQ(h.observations.size(), 2u);
  EXPECT_EQ(h.observations[1].signals, std::vector<double>{5.0});
}

}  // namespace
}  // namespace ablr
