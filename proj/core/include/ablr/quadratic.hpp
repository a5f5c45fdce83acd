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

// Parametrized 3-d quadratic task family
//   f_t(x) = 1/2 a_t |x|^2 + b_t 1^T x + c_t,   (a_t, b_t, c_t) in [0.1, 10]^3.

#pragma once

#include "ablr/bo.hpp"
#include "ablr/search_space.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace ablr {

struct QuadraticTask {
  static constexpr double kCoefLo = 0.1;
  static constexpr double kCoefHi = 10.0;
  static constexpr int kDim = 3;
  /// Search box is [-kBox, kBox]^3.
  static constexpr double kBox = 10.0;

  double a = 1.0;
  double b = 1.0;
  double c = 1.0;

  void validate() const;
  /// Minimizer is -(b/a) 1.
  std::array<double, 3> minimizer() const;
  /// c - 3 b^2 / (2a).
  double minimum() const;
  Vector context() const;
};

double quad_eval(const QuadraticTask& task, const std::array<double, 3>& x);
double quad_eval(const QuadraticTask& task, const Configuration& x);

/// T tasks with coefficients i.i.d. uniform on [0.1, 10], deterministic in the
/// seed. With 'reject_outside_box' tasks whose minimizer leaves the search box
/// (|b/a| > 10) are redrawn.
std::vector<QuadraticTask> sample_family(std::size_t count, std::uint64_t seed,
                                         bool reject_outside_box = true);

SearchSpace quadratic_space();

class QuadraticBlackBox final : public BlackBox {
 public:
  explicit QuadraticBlackBox(QuadraticTask task) : task_(task) {}
  std::vector<double> evaluate(const Configuration& config) override;
  Vector context() const override { return task_.context(); }
  const QuadraticTask& task() const { return task_; }

 private:
  QuadraticTask task_;
};

}  // namespace ablr
