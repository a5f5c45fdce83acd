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

#include "ablr/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace ablr {
namespace {

struct Trial {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative
  Vector x;
  Vector gradient;
  bool finite = false;
};

// Minimizer of the cubic interpolating (a, fa, ga) and (b, fb, gb); falls back
// to bisection when the cubic is degenerate or leaves the interval.
double cubic_step(double a, double fa, double ga, double b, double fb, double gb) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  const double lo = std::min(a, b), hi = std::max(a, b);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double t = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2);
    const double margin = 0.1 * (hi - lo);
    if (std::isfinite(t) && t > lo + margin && t < hi - margin) return t;
  }
  return 0.5 * (a + b);
}

class LineSearch {
 public:
  LineSearch(const DifferentiableFunction& f, const LbfgsConfig& cfg, int& evals)
      : f_(f), cfg_(cfg), evals_(evals) {}

  // Returns true and fills 'out' with a point satisfying the strong Wolfe
  // conditions, or at least sufficient decrease when the budget runs out.
  bool search(const Vector& x, double f0, double g0, const Vector& dir, double step, Trial& out) {
    Trial prev{0.0, f0, g0, x, Vector(), true};
    Trial best_decrease;
    bool have_decrease = false;
    for (int k = 0; k < cfg_.max_line_search_steps; ++k) {
      Trial cur = eval(x, dir, step);
      if (!cur.finite) {
        // Too far: shrink towards the last good point.
        step = 0.5 * (prev.step + step);
        if (step - prev.step < 1e-16) break;
        continue;
      }
      const bool armijo = cur.value <= f0 + cfg_.sufficient_decrease * step * g0;
      if (armijo && cur.value < f0 && (!have_decrease || cur.value < best_decrease.value)) {
        best_decrease = cur;
        have_decrease = true;
      }
      if (!armijo || (k > 0 && cur.value >= prev.value)) {
        return zoom(x, f0, g0, dir, prev, cur, out) || fallback(have_decrease, best_decrease, out);
      }
      if (std::abs(cur.slope) <= -cfg_.curvature * g0) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) {
        return zoom(x, f0, g0, dir, cur, prev, out) || fallback(have_decrease, best_decrease, out);
      }
      const double next = std::min(2.0 * step, step + 4.0 * (step - prev.step));
      prev = std::move(cur);
      step = next;
    }
    return fallback(have_decrease, best_decrease, out);
  }

 private:
  static bool fallback(bool have, Trial& best, Trial& out) {
    if (!have) return false;
    out = std::move(best);
    return true;
  }

  Trial eval(const Vector& x, const Vector& dir, double step) {
    Trial t;
    t.step = step;
    t.x = x + step * dir;
    t.gradient.resize(x.size());
    ++evals_;
    t.value = f_(t.x, t.gradient);
    t.finite = std::isfinite(t.value) && t.gradient.allFinite();
    if (t.finite) t.slope = t.gradient.dot(dir);
    return t;
  }

  bool zoom(const Vector& x, double f0, double g0, const Vector& dir, Trial lo, Trial hi,
            Trial& out) {
    for (int k = 0; k < cfg_.max_line_search_steps; ++k) {
      if (std::abs(hi.step - lo.step) < 1e-14 * std::max(1.0, lo.step)) break;
      const double step = hi.finite
                              ? cubic_step(lo.step, lo.value, lo.slope, hi.step, hi.value, hi.slope)
                              : 0.5 * (lo.step + hi.step);
      Trial cur = eval(x, dir, step);
      if (!cur.finite || cur.value > f0 + cfg_.sufficient_decrease * step * g0 ||
          cur.value >= lo.value) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -cfg_.curvature * g0) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
    if (lo.step > 0.0 && lo.value < f0) {
      out = std::move(lo);
      return true;
    }
    return false;
  }

  const DifferentiableFunction& f_;
  const LbfgsConfig& cfg_;
  int& evals_;
};

}  // namespace

LbfgsResult minimize_lbfgs(const DifferentiableFunction& f, Vector x0, const LbfgsConfig& config) {
  LbfgsResult r;
  r.x = std::move(x0);
  r.gradient.resize(r.x.size());
  r.value = f(r.x, r.gradient);
  r.evaluations = 1;
  if (!std::isfinite(r.value) || !r.gradient.allFinite()) {
    r.message = "objective not finite at the starting point";
    return r;
  }
  r.trace.push_back(r.value);

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  LineSearch ls(f, config, r.evaluations);
  bool restarted = false;

  auto grad_small = [&] {
    return r.gradient.lpNorm<Eigen::Infinity>() <= config.gradient_tolerance * std::max(1.0, std::abs(r.value));
  };

  if (grad_small()) {
    r.converged = true;
    r.message = "gradient tolerance reached";
    return r;
  }

  while (r.iterations < config.max_iterations) {
    // Two-loop recursion.
    Vector q = -r.gradient;
    const std::size_t m = s_hist.size();
    std::vector<double> alpha(m);
    for (std::size_t i = m; i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Vector dir = std::move(q);
    double slope = dir.dot(r.gradient);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -r.gradient;
      slope = -r.gradient.squaredNorm();
    }
    const double step0 = s_hist.empty() ? std::min(1.0, 1.0 / r.gradient.norm()) : 1.0;

    Trial accepted;
    if (!ls.search(r.x, r.value, slope, dir, step0, accepted)) {
      if (!s_hist.empty() && !restarted) {
        // Curvature memory may be stale; retry once from steepest descent.
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        restarted = true;
        continue;
      }
      r.message = "line search failed";
      break;
    }
    restarted = false;
    ++r.iterations;

    Vector s = accepted.x - r.x;
    Vector y = accepted.gradient - r.gradient;
    const double sy = s.dot(y);
    const double f_prev = r.value;
    r.x = std::move(accepted.x);
    r.value = accepted.value;
    r.gradient = std::move(accepted.gradient);
    r.trace.push_back(r.value);

    if (sy > 1e-12 * y.squaredNorm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > config.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    if (grad_small()) {
      r.converged = true;
      r.message = "gradient tolerance reached";
      return r;
    }
    if (f_prev - r.value <= config.relative_tolerance * std::max(1.0, std::abs(r.value))) {
      r.converged = true;
      r.message = "relative decrease below tolerance";
      return r;
    }
  }
  if (r.message.empty()) r.message = "iteration limit reached";
  return r;
}

}  // namespace ablr
