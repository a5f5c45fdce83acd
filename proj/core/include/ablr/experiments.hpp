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

// Benchmark protocols: leave-one-task-out on the quadratic family, tabular
// replay, the synthetic multi-signal problem and the fit-time ladder.

#pragma once

#include "ablr/bo.hpp"
#include "ablr/gp.hpp"
#include "ablr/quadratic.hpp"
#include "ablr/tabular.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ablr {

enum class Method {
  kGpPlain,
  kGpTransfer,             // stacked observations, context-augmented inputs
  kAblrPlain,
  kAblrTransfer,
  kAblrTransferContext,
  kRksTransfer,
};

std::string method_name(Method m);
Method parse_method(const std::string& name);  // throws ConfigError
bool is_transfer(Method m);
bool uses_context(Method m);

struct MethodSettings {
  AblrConfig ablr;  // rks_transfer always uses the RKS kind
  LbfgsConfig gp;
  AcquisitionConfig acquisition;
  std::size_t initial_random = 3;

  MethodSettings();
};

SurrogateFactory make_factory(Method method, const MethodSettings& settings);

/// Runs fn(0..count-1) on 'jobs' worker threads (jobs <= 1: serial, in order).
void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

/// Linear-interpolation quantile (q in [0,1]) of an unsorted sample.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct RunRecord {
  Method method = Method::kAblrPlain;
  std::string task;
  std::uint64_t seed = 0;
  std::vector<double> incumbent;
  std::vector<double> regret;
  std::vector<double> wall_ms;
  bool failed = false;
  std::string error;
};

struct Curve {
  std::vector<double> median, q25, q75, mean;
  std::size_t runs = 0;
  std::size_t failed = 0;
};

/// Per-iteration median / quartiles / mean of the regret of non-failed runs.
Curve aggregate(const std::vector<RunRecord>& runs, Method method, std::size_t budget);

struct LotoConfig {
  std::vector<Method> methods = {Method::kAblrPlain, Method::kAblrTransfer};
  std::vector<std::uint64_t> seeds = {0};
  std::size_t budget = 50;
  std::size_t warm_per_task = 10;
  /// Held-out task indices; empty means every task.
  std::vector<std::size_t> held_out;
  /// Seed i holds out task i mod T (one run per seed) instead of the full
  /// seeds x held-out product.
  bool pair_seeds_with_tasks = false;
  int jobs = 1;
  MethodSettings settings;
};

struct LotoResult {
  std::vector<RunRecord> runs;  // ordered by (held-out, seed, method)
  std::map<Method, Curve> curves;
  std::size_t failed_runs = 0;
};

/// Random warm-start history: 'per_task' uniform draws on every task but
/// 'held_out', with contexts attached.
History loto_warm_start(const std::vector<QuadraticTask>& family, std::size_t held_out,
                        std::size_t per_task, std::uint64_t seed);

LotoResult loto_run(const std::vector<QuadraticTask>& family, const LotoConfig& config);

struct TabularConfig {
  Method method = Method::kAblrPlain;
  std::size_t budget = 0;  // 0: size of the target table
  std::string target_signal;  // empty: first signal
  std::uint64_t seed = 0;
  /// Extra warm-start tasks (e.g. read from JSON lines), same signals as the target.
  std::vector<TaskHistory> extra_warm;
  MethodSettings settings;
};

/// BO restricted to the target table's configurations; sibling tables are
/// ingested as warm-start histories for transfer methods.
BoTrace tabular_bo(TabularBlackBox& target, const std::vector<const TabularBlackBox*>& siblings,
                   const TabularConfig& config);

/// Shifted quadratics on a regular grid, emitted as evaluation tables
/// (one "synthetic flow" per task).
std::vector<TabularBlackBox> synthetic_flows(std::size_t tasks, std::size_t grid_per_dim,
                                             std::size_t dims, std::uint64_t seed);

/// First iteration (1-based) whose incumbent is within 'tolerance' x
/// (max - min) of the minimum; budget + 1 when never reached.
std::size_t iterations_to_within(const std::vector<double>& incumbents, double minimum,
                                 double maximum, double tolerance);

/// Discrete search space modelled on tuning a small feed-forward classifier:
/// layers {1..4}, units {1..50}, l2 in {2^-6..2^3}, learning rate in
/// {2^-6..2^-1}, epochs {3..10}.
SearchSpace classifier_space();

/// Synthetic "validation error" target plus side signals derived from it:
/// side_k = target + smooth distortion_k + Gaussian noise.
class MultiSignalProblem final : public BlackBox {
 public:
  MultiSignalProblem(std::uint64_t instance_seed, std::size_t num_signals, double noise = 0.01);

  std::vector<std::string> signal_names() const override;
  std::vector<double> evaluate(const Configuration& config) override;

  double target_value(const Vector& encoded) const;
  /// Exhaustive min / max of the target over classifier_space().
  std::pair<double, double> target_range() const;

 private:
  SearchSpace space_;
  std::size_t num_signals_;
  double noise_;
  Vector centre_;
  Vector weights_;
  Matrix distortion_freq_;   // one row per side signal
  Vector distortion_phase_;
  std::uint64_t eval_seed_;
};

struct MultiSignalConfig {
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::vector<std::size_t> signal_counts = {1, 3};
  std::size_t budget = 30;
  double tolerance = 0.05;
  int jobs = 1;
  MethodSettings settings;
  /// Fit-time measurement: rows of history used and evaluations timed.
  Eigen::Index timing_points = 100;
  int timing_evaluations = 5;
  int timing_repetitions = 5;
};

struct MultiSignalResult {
  std::map<std::size_t, std::vector<std::size_t>> iterations;  // per S, per seed
  std::map<std::size_t, std::vector<std::vector<double>>> incumbents;
  std::map<std::size_t, double> median_iterations;
  std::map<std::size_t, double> fit_ms;  // median fixed-budget fit time per S
  /// Geometric mean growth of fit time per added signal.
  double fit_growth_per_signal = 0.0;
};

MultiSignalResult multi_signal_run(const MultiSignalConfig& config);

struct TimingConfig {
  std::vector<Eigen::Index> sizes = {256, 512, 1024, 2048};
  std::vector<Eigen::Index> hidden_layers = {50, 50, 50};
  bool mlp_bias = true;
  int evaluations = 3;   // objective + gradient evaluations per timed fit
  int repetitions = 5;
  bool include_gp = true;
  std::uint64_t seed = 0;
};

struct TimingPoint {
  Eigen::Index n = 0;
  double ablr_ms = 0.0;
  double gp_ms = 0.0;
};

struct TimingResult {
  std::vector<TimingPoint> points;
  double ablr_slope = 0.0;
  double gp_slope = 0.0;
};

/// Fixed-budget fit cost (a set number of evidence + gradient evaluations, so
/// optimizer iteration counts do not enter) on the N-doubling ladder.
TimingResult timing_ladder(const TimingConfig& config);

/// Median wall time of 'evaluations' joint objective+gradient evaluations.
double time_ablr_fit(const std::vector<TaskDataset>& tasks, const FeatureMap& map, int evaluations,
                     int repetitions);

}  // namespace ablr
