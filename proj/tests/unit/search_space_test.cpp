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

#include "ablr/search_space.hpp"

#include <gtest/gtest.h>

namespace ablr {
namespace {

SearchSpace mixed() {
  return SearchSpace({Dimension::continuous("lr", -3, 1), Dimension::integer("layers", 1, 4),
                      Dimension::ordinal("l2", {0.25, 0.5, 1.0, 2.0, 4.0})});
}

TEST(SearchSpace, EncodeDecodeRoundTrip) {
  const auto s = mixed();
  const Configuration c{-1.0, 3.0, 2.0};
  const Vector u = s.encode(c);
  EXPECT_DOUBLE_EQ(u(0), 0.5);
  EXPECT_DOUBLE_EQ(u(1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(u(2), 0.75);
  EXPECT_EQ(s.decode(u), c);
}

TEST(SearchSpace, DecodeSnapsAndClamps) {
  const auto s = mixed();
  Vector u(3);
  u << 1.7, 0.4, 0.3;
  EXPECT_EQ(s.decode(u), (Configuration{1.0, 2.0, 0.5}));
  const Vector snapped = s.snap(u);
  EXPECT_EQ(s.decode(snapped), s.decode(u));
}

TEST(SearchSpace, CheckNamesDimension) {
  const auto s = mixed();
  try {
    s.check({0.0, 2.5, 1.0});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("layers"), std::string::npos);
  }
  EXPECT_FALSE(s.contains({0.0, 2.0, 3.0}));
  EXPECT_FALSE(s.contains({0.0, 2.0}));
  EXPECT_TRUE(s.contains({0.0, 2.0, 4.0}));
}

TEST(SearchSpace, Enumerate) {
  const SearchSpace s({Dimension::integer("a", 0, 2), Dimension::ordinal("b", {1.0, 5.0})});
  const auto all = s.enumerate();
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(s.cardinality(), 6u);
  EXPECT_EQ(all.front(), (Configuration{0.0, 1.0}));
  EXPECT_EQ(all[1], (Configuration{0.0, 5.0}));
  EXPECT_EQ(all.back(), (Configuration{2.0, 5.0}));
  EXPECT_EQ(mixed().cardinality(), 0u);
}

TEST(SearchSpace, JsonRoundTrip) {
  const auto s = mixed();
  const auto back = SearchSpace::from_json(nlohmann::json::parse(s.to_json().dump()));
  EXPECT_EQ(back.names(), s.names());
  const Configuration c{0.123, 4.0, 0.25};
  EXPECT_EQ(back.encode(c), s.encode(c));
}

TEST(Dimension, Validation) {
  EXPECT_THROW(Dimension::continuous("x", 1.0, 1.0).validate(), ConfigError);
  EXPECT_THROW(Dimension::ordinal("x", {2.0, 1.0}).validate(), ConfigError);
  EXPECT_THROW(SearchSpace({Dimension::integer("x", 0, 1), Dimension::integer("x", 0, 1)}), ConfigError);
}

}  // namespace
}  // namespace ablr
