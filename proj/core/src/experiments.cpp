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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <limits>
#include <mutex>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <thread>

namespace ablr {

std::string method_name(Method m) {
  switch (m) {
    case Method::kGpPlain: return "gp_plain";
    case Method::kGpTransfer: return "gp_transfer";
    case Method::kAblrPlain: return "ablr_plain";
    case Method::kAblrTransfer: return "ablr_transfer";
    case Method::kAblrTransferContext: return "ablr_transfer_context";
    case Method::kRksTransfer: return "rks_transfer";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::kGpPlain, Method::kGpTransfer, Method::kAblrPlain, Method::kAblrTransfer,
                   Method::kAblrTransferContext, Method::kRksTransfer}) {
    if (method_name(m) == name) return m;
  }
  throw ConfigError("unknown method '" + name + "'");
}

bool is_transfer(Method m) { return m != Method::kGpPlain && m != Method::kAblrPlain; }

bool uses_context(Method m) { return m == Method::kGpTransfer || m == Method::kAblrTransferContext; }

MethodSettings::MethodSettings() {
  ablr.mlp_bias = true;
  gp.max_iterations = 100;
}

SurrogateFactory make_factory(Method method, const MethodSettings& settings) {
  switch (method) {
    case Method::kGpPlain:
    case Method::kGpTransfer: {
      const bool stack = method == Method::kGpTransfer;
      const LbfgsConfig cfg = settings.gp;
      return [stack, cfg](const InputScaler& scaler, std::uint64_t) -> std::unique_ptr<Surrogate> {
        return std::make_unique<GpSurrogate>(scaler, stack, cfg);
      };
    }
    case Method::kRksTransfer: {
      AblrConfig c = settings.ablr;
      c.kind = FeatureMapKind::kRks;
      return ablr_factory(c);
    }
    default:
      return ablr_factory(settings.ablr);
  }
}

void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  for (std::size_t w = 0; w < n; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need >= 2 paired points");
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

Curve aggregate(const std::vector<RunRecord>& runs, Method method, std::size_t budget) {
  Curve c;
  std::vector<const RunRecord*> ok;
  for (const auto& r : runs) {
    if (r.method != method) continue;
    ++c.runs;
    if (r.failed || r.regret.size() < budget) {
      ++c.failed;
      continue;
    }
    ok.push_back(&r);
  }
  if (ok.empty()) return c;
  for (std::size_t it = 0; it < budget; ++it) {
    std::vector<double> v;
    for (const auto* r : ok) v.push_back(r->regret[it]);
    double sum = 0;
    for (double x : v) sum += x;
    c.mean.push_back(sum / static_cast<double>(v.size()));
    c.q25.push_back(quantile(v, 0.25));
    c.q75.push_back(quantile(v, 0.75));
    c.median.push_back(median(std::move(v)));
  }
  return c;
}

History loto_warm_start(const std::vector<QuadraticTask>& family, std::size_t held_out,
                        std::size_t per_task, std::uint64_t seed) {
  History h;
  h.signal_names = {"y"};
  const SearchSpace space = quadratic_space();
  std::mt19937_64 rng(mix_seed(seed, 0x5741524DULL));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < family.size(); ++t) {
    if (t == held_out) continue;
    auto& task = h.task("task" + std::to_string(t));
    task.context = family[t].context();
    for (std::size_t i = 0; i < per_task; ++i) {
      Vector u(3);
      for (Eigen::Index d = 0; d < 3; ++d) u(d) = unit(rng);
      auto cfg = space.decode(u);
      task.observations.push_back(Observation{cfg, {quad_eval(family[t], cfg)}, 0, seed});
    }
  }
  return h;
}

LotoResult loto_run(const std::vector<QuadraticTask>& family, const LotoConfig& config) {
  require(family.size() >= 2, "loto_run: need at least two tasks");
  require(!config.seeds.empty() && !config.methods.empty(), "loto_run: need seeds and methods");
  std::vector<std::size_t> held = config.held_out;
  if (held.empty()) {
    for (std::size_t t = 0; t < family.size(); ++t) held.push_back(t);
  }
  struct Job {
    std::size_t task;
    std::uint64_t seed;
    Method method;
  };
  std::vector<Job> jobs;
  if (config.pair_seeds_with_tasks) {
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
      for (Method m : config.methods) jobs.push_back({held[i % held.size()], config.seeds[i], m});
    }
  } else {
    for (std::size_t t : held) {
      for (std::uint64_t s : config.seeds) {
        for (Method m : config.methods) jobs.push_back({t, s, m});
      }
    }
  }
  for (const auto& j : jobs) require(j.task < family.size(), "loto_run: held-out index out of range");

  const SearchSpace space = quadratic_space();
  LotoResult result;
  result.runs.resize(jobs.size());
  run_parallel(jobs.size(), config.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    RunRecord& rec = result.runs[i];
    rec.method = job.method;
    rec.task = "task" + std::to_string(job.task);
    rec.seed = job.seed;
    try {
      QuadraticBlackBox box(family[job.task]);
      History warm;
      if (is_transfer(job.method)) {
        warm = loto_warm_start(family, job.task, config.warm_per_task, mix_seed(job.seed, job.task));
      }
      BoConfig bo;
      bo.budget = config.budget;
      bo.initial_random = config.settings.initial_random;
      bo.use_context = uses_context(job.method);
      bo.acquisition = config.settings.acquisition;
      bo.task_id = rec.task;
      bo.make_surrogate = make_factory(job.method, config.settings);
      const auto trace = run_bo(box, space, warm, bo, mix_seed(job.seed, job.task));
      if (trace.aborted) throw Error(trace.message);
      const double best = family[job.task].minimum();
      for (const auto& s : trace.steps) {
        rec.incumbent.push_back(s.incumbent);
        rec.regret.push_back(s.incumbent - best);
        rec.wall_ms.push_back(s.wall_ms);
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  });
  for (const auto& r : result.runs) result.failed_runs += r.failed ? 1 : 0;
  for (Method m : config.methods) result.curves[m] = aggregate(result.runs, m, config.budget);
  return result;
}

BoTrace tabular_bo(TabularBlackBox& target, const std::vector<const TabularBlackBox*>& siblings,
                   const TabularConfig& config) {
  require(target.size() > 0, "tabular_bo: empty table");
  std::vector<const TabularBlackBox*> all{&target};
  all.insert(all.end(), siblings.begin(), siblings.end());
  const SearchSpace space = tabular_space(all);

  const auto names = target.signal_names();
  std::size_t target_signal = 0;
  if (!config.target_signal.empty()) {
    auto it = std::find(names.begin(), names.end(), config.target_signal);
    if (it == names.end()) throw ConfigError("tabular_bo: unknown signal '" + config.target_signal + "'");
    target_signal = static_cast<std::size_t>(it - names.begin());
  }

  History warm;
  if (is_transfer(config.method)) {
    warm.signal_names = names;
    warm.target_signal = target_signal;
    for (const auto* s : siblings) {
      if (s->signal_names() != names) {
        throw ConfigError("table '" + s->task_id() + "' has different signal columns");
      }
      warm.tasks.push_back(s->to_history());
    }
    warm.tasks.insert(warm.tasks.end(), config.extra_warm.begin(), config.extra_warm.end());
  }
  BoConfig bo;
  bo.budget = config.budget == 0 ? target.size() : std::min(config.budget, target.size());
  bo.initial_random = config.settings.initial_random;
  bo.target_signal = target_signal;
  bo.candidates = target.configurations();
  bo.acquisition = config.settings.acquisition;
  bo.task_id = target.task_id();
  bo.make_surrogate = make_factory(config.method, config.settings);
  return run_bo(target, space, warm, bo, config.seed);
}

std::vector<TabularBlackBox> synthetic_flows(std::size_t tasks, std::size_t grid_per_dim,
                                             std::size_t dims, std::uint64_t seed) {
  require(tasks >= 1 && grid_per_dim >= 2 && dims >= 1, "synthetic_flows: bad sizes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shift(-0.3, 0.3);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  std::vector<std::string> names;
  for (std::size_t d = 0; d < dims; ++d) names.push_back("h" + std::to_string(d));
  std::vector<TabularBlackBox> out;
  for (std::size_t t = 0; t < tasks; ++t) {
    std::vector<double> centre(dims);
    for (auto& c : centre) c = 0.5 + shift(rng);
    const double amp = scale(rng);
    const double offset = shift(rng);
    std::vector<Configuration> configs;
    std::vector<std::vector<double>> signals;
    std::vector<std::size_t> idx(dims, 0);
    while (true) {
      Configuration cfg(dims);
      double v = offset;
      for (std::size_t d = 0; d < dims; ++d) {
        cfg[d] = static_cast<double>(idx[d]) / static_cast<double>(grid_per_dim - 1);
        v += amp * (cfg[d] - centre[d]) * (cfg[d] - centre[d]);
      }
      configs.push_back(cfg);
      signals.push_back({v});
      std::size_t d = dims;
      while (d-- > 0) {
        if (++idx[d] < grid_per_dim) break;
        idx[d] = 0;
      }
      if (d == static_cast<std::size_t>(-1)) break;
    }
    out.emplace_back("flow" + std::to_string(t), names, std::vector<std::string>{"error"},
                     std::move(configs), std::move(signals));
  }
  return out;
}

std::size_t iterations_to_within(const std::vector<double>& incumbents, double minimum, double maximum,
                                 double tolerance) {
  const double range = std::max(maximum - minimum, 1e-300);
  for (std::size_t i = 0; i < incumbents.size(); ++i) {
    if ((incumbents[i] - minimum) / range <= tolerance) return i + 1;
  }
  return incumbents.size() + 1;
}

SearchSpace classifier_space() {
  std::vector<double> l2, lr;
  for (int e = -6; e <= 3; ++e) l2.push_back(std::ldexp(1.0, e));
  for (int e = -6; e <= -1; ++e) lr.push_back(std::ldexp(1.0, e));
  return SearchSpace({Dimension::integer("layers", 1, 4), Dimension::integer("units", 1, 50),
                      Dimension::ordinal("l2", l2), Dimension::ordinal("learning_rate", lr),
                      Dimension::integer("epochs", 3, 10)});
}

MultiSignalProblem::MultiSignalProblem(std::uint64_t instance_seed, std::size_t num_signals, double noise)
    : space_(classifier_space()), num_signals_(num_signals), noise_(noise) {
  require(num_signals >= 1, "MultiSignalProblem: need at least one signal");
  std::mt19937_64 rng(mix_seed(instance_seed, 0x4D53));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto p = static_cast<Eigen::Index>(space_.size());
  centre_.resize(p);
  weights_.resize(p);
  for (Eigen::Index d = 0; d < p; ++d) {
    centre_(d) = 0.2 + 0.6 * unit(rng);
    weights_(d) = 0.5 + 1.5 * unit(rng);
  }
  // Side signals are always generated for two extra outputs so that the
  // target itself does not depend on how many signals are exposed.
  distortion_freq_.resize(2, p);
  distortion_phase_.resize(2);
  for (Eigen::Index k = 0; k < 2; ++k) {
    for (Eigen::Index d = 0; d < p; ++d) distortion_freq_(k, d) = -1.0 + 2.0 * unit(rng);
    distortion_phase_(k) = 2.0 * std::numbers::pi * unit(rng);
  }
  eval_seed_ = rng();
}

std::vector<std::string> MultiSignalProblem::signal_names() const {
  std::vector<std::string> names{"val_error", "train_error", "cpu_time"};
  names.resize(num_signals_ <= 3 ? num_signals_ : 3);
  return names;
}

double MultiSignalProblem::target_value(const Vector& u) const {
  const Vector diff = u - centre_;
  const double bowl = (weights_.array() * diff.array().square()).sum();
  return 0.1 + 0.25 * bowl + 0.05 * std::sin(3.0 * u(0) + 2.0 * u(1));
}

std::pair<double, double> MultiSignalProblem::target_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : space_.enumerate()) {
    const double v = target_value(space_.encode(c));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

std::vector<double> MultiSignalProblem::evaluate(const Configuration& config) {
  const Vector u = space_.encode(config);
  const double y = target_value(u);
  std::vector<double> out{y};
  // Noise keyed on the configuration so repeated evaluations agree.
  std::uint64_t key = eval_seed_;
  for (double v : canonical_config_key(config)) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    key = mix_seed(key, bits);
  }
  std::mt19937_64 rng(key);
  std::normal_distribution<double> gauss(0.0, noise_);
  for (std::size_t k = 1; k < std::min<std::size_t>(num_signals_, 3); ++k) {
    const auto row = static_cast<Eigen::Index>(k - 1);
    const double distortion = 0.05 * std::sin(2.0 * std::numbers::pi * distortion_freq_.row(row).dot(u) +
                                               distortion_phase_(row));
    out.push_back(y + distortion + gauss(rng));
  }
  return out;
}

double time_ablr_fit(const std::vector<TaskDataset>& tasks, const FeatureMap& map, int evaluations,
                     int repetitions) {
  JointObjective obj(tasks, map);
  const JointParams params = JointParams::initial(map, tasks.size());
  std::vector<double> times;
  Vector grad;
  for (int r = 0; r < std::max(1, repetitions); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int e = 0; e < evaluations; ++e) obj.value_and_gradient(params, grad);
    times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return median(times);
}

MultiSignalResult multi_signal_run(const MultiSignalConfig& config) {
  const SearchSpace space = classifier_space();
  MultiSignalResult result;
  struct Job {
    std::size_t signals;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t s : config.signal_counts) {
    for (std::uint64_t seed : config.seeds) jobs.push_back({s, seed});
  }
  std::vector<std::vector<double>> incumbents(jobs.size());
  std::vector<std::size_t> iters(jobs.size());
  run_parallel(jobs.size(), config.jobs, [&](std::size_t i) {
    MultiSignalProblem problem(jobs[i].seed, jobs[i].signals);
    BoConfig bo;
    bo.budget = config.budget;
    bo.initial_random = config.settings.initial_random;
    bo.use_side_signals = jobs[i].signals > 1;
    bo.acquisition = config.settings.acquisition;
    bo.make_surrogate = make_factory(Method::kAblrPlain, config.settings);
    const auto trace = run_bo(problem, space, History{}, bo, jobs[i].seed);
    for (const auto& s : trace.steps) incumbents[i].push_back(s.incumbent);
    const auto [lo, hi] = problem.target_range();
    iters[i] = iterations_to_within(incumbents[i], lo, hi, config.tolerance);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    result.iterations[jobs[i].signals].push_back(iters[i]);
    result.incumbents[jobs[i].signals].push_back(incumbents[i]);
  }
  for (auto& [s, v] : result.iterations) {
    result.median_iterations[s] = median(std::vector<double>(v.begin(), v.end()));
  }

  // Fixed-budget fit time versus the number of modelled signals.
  std::vector<Eigen::Index> sizes{static_cast<Eigen::Index>(space.size())};
  sizes.insert(sizes.end(), config.settings.ablr.hidden_layers.begin(), config.settings.ablr.hidden_layers.end());
  const FeatureMap map(init_mlp(sizes, 7, config.settings.ablr.mlp_bias));
  const std::size_t max_s = *std::max_element(config.signal_counts.begin(), config.signal_counts.end());
  MultiSignalProblem problem(config.seeds.front(), max_s);
  History h;
  h.signal_names = problem.signal_names();
  auto& task = h.task("timing");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index i = 0; i < config.timing_points; ++i) {
    Vector u(static_cast<Eigen::Index>(space.size()));
    for (Eigen::Index d = 0; d < u.size(); ++d) u(d) = unit(rng);
    const auto cfg = space.decode(u);
    task.observations.push_back(Observation{cfg, problem.evaluate(cfg), i, 0});
  }
  const auto all = attach_signals(task, h, space);
  for (std::size_t s : config.signal_counts) {
    std::vector<TaskDataset> subset(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(s));
    for (auto& d : subset) d.responses = Standardization::fit(d.responses).apply(d.responses);
    result.fit_ms[s] = time_ablr_fit(subset, map, config.timing_evaluations, config.timing_repetitions);
  }
  const std::size_t min_s = *std::min_element(config.signal_counts.begin(), config.signal_counts.end());
  if (max_s > min_s) {
    result.fit_growth_per_signal =
        std::pow(result.fit_ms[max_s] / result.fit_ms[min_s], 1.0 / static_cast<double>(max_s - min_s));
  }
  return result;
}

TimingResult timing_ladder(const TimingConfig& config) {
  TimingResult result;
  const auto family = sample_family(1, config.seed);
  std::mt19937_64 rng(mix_seed(config.seed, 0x7157));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::Index> sizes{3};
  sizes.insert(sizes.end(), config.hidden_layers.begin(), config.hidden_layers.end());
  const FeatureMap map(init_mlp(sizes, config.seed, config.mlp_bias));
  std::vector<double> ns, ablr_ms, gp_ms;
  for (Eigen::Index n : config.sizes) {
    TaskDataset d;
    d.task_id = "ladder";
    d.inputs.resize(n, 3);
    d.responses.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Configuration x(3);
      for (int k = 0; k < 3; ++k) {
        d.inputs(i, k) = unit(rng);
        x[static_cast<std::size_t>(k)] = -10.0 + 20.0 * d.inputs(i, k);
      }
      d.responses(i) = quad_eval(family[0], x);
    }
    const InputScaler scaler = InputScaler::fit(d.inputs);
    TaskDataset std_d = d;
    std_d.inputs = scaler.apply(d.inputs);
    std_d.responses = Standardization::fit(d.responses).apply(d.responses);

    TimingPoint pt;
    pt.n = n;
    pt.ablr_ms = time_ablr_fit({std_d}, map, config.evaluations, config.repetitions);
    if (config.include_gp) {
      GpBaseline gp(scaler);
      GpHyperparameters h;
      h.log_lengthscales = Vector::Zero(3);
      gp.condition(d.inputs, d.responses, h);
      const Vector theta = h.flatten();
      std::vector<double> times;
      Vector grad;
      for (int r = 0; r < std::max(1, config.repetitions); ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        for (int e = 0; e < config.evaluations; ++e) gp.neg_log_evidence(theta, &grad);
        times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
      }
      pt.gp_ms = median(times);
    }
    ns.push_back(static_cast<double>(n));
    ablr_ms.push_back(pt.ablr_ms);
    gp_ms.push_back(pt.gp_ms);
    result.points.push_back(pt);
  }
  if (ns.size() >= 2) {
    result.ablr_slope = loglog_slope(ns, ablr_ms);
    if (config.include_gp) result.gp_slope = loglog_slope(ns, gp_ms);
  }
  return result;
}

}  // namespace ablr
