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

#pragma once

#include "ablr/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ablr {

struct LbfgsConfig {
  int max_iterations = 200;
  /// Number of (s, y) correction pairs kept for the inverse-Hessian estimate.
  int memory = 10;
  /// Stop when ||g||_inf <= gradient_tolerance * max(1, |f|).
  double gradient_tolerance = 1e-5;
  /// Stop when (f_prev - f) <= relative_tolerance * max(1, |f|).
  double relative_tolerance = 1e-10;
  int max_line_search_steps = 25;
  double sufficient_decrease = 1e-4;  // c1
  double curvature = 0.9;             // c2
};

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  Vector gradient;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> trace;  // f at x0, then after every accepted step
  std::string message;
};

/// f(x, grad) returns the objective and writes the gradient. A non-finite
/// return value is treated as a rejected trial point by the line search.
using DifferentiableFunction = std::function<double(const Vector&, Vector&)>;

/// Limited-memory BFGS with a strong-Wolfe line search (bracketing + zoom with
/// cubic interpolation). Every accepted iterate strictly decreases f.
LbfgsResult minimize_lbfgs(const DifferentiableFunction& f, Vector x0, const LbfgsConfig& config);

}  // namespace ablr
