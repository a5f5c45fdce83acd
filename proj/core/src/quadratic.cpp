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

#include <cmath>
#include <random>

namespace ablr {

void QuadraticTask::validate() const {
  for (double v : {a, b, c}) {
    if (!(v >= kCoefLo && v <= kCoefHi)) {
      throw ConfigError("quadratic task coefficient " + std::to_string(v) + " outside [0.1, 10]");
    }
  }
}

std::array<double, 3> QuadraticTask::minimizer() const {
  const double x = -b / a;
  return {x, x, x};
}

double QuadraticTask::minimum() const { return c - 3.0 * b * b / (2.0 * a); }

Vector QuadraticTask::context() const { return Vector{{a, b, c}}; }

double quad_eval(const QuadraticTask& task, const std::array<double, 3>& x) {
  const double sq = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  const double sum = x[0] + x[1] + x[2];
  return 0.5 * task.a * sq + task.b * sum + task.c;
}

double quad_eval(const QuadraticTask& task, const Configuration& x) {
  require(x.size() == 3, "quad_eval: expected a 3-vector");
  return quad_eval(task, std::array<double, 3>{x[0], x[1], x[2]});
}

std::vector<QuadraticTask> sample_family(std::size_t count, std::uint64_t seed,
                                         bool reject_outside_box) {
  require(count >= 1, "sample_family: need at least one task");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(QuadraticTask::kCoefLo, QuadraticTask::kCoefHi);
  std::vector<QuadraticTask> family;
  while (family.size() < count) {
    QuadraticTask t;
    t.a = coef(rng);
    t.b = coef(rng);
    t.c = coef(rng);
    if (reject_outside_box && std::abs(t.b / t.a) > QuadraticTask::kBox) continue;
    family.push_back(t);
  }
  return family;
}

SearchSpace quadratic_space() {
  const double box = QuadraticTask::kBox;
  return SearchSpace({Dimension::continuous("x0", -box, box), Dimension::continuous("x1", -box, box),
                      Dimension::continuous("x2", -box, box)});
}

std::vector<double> QuadraticBlackBox::evaluate(const Configuration& config) {
  return {quad_eval(task_, config)};
}

}  // namespace ablr
