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

#include "ablr/bo.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace ablr {

SurrogateFactory ablr_factory(const AblrConfig& config) {
  return [config](const InputScaler& scaler, std::uint64_t seed) -> std::unique_ptr<Surrogate> {
    AblrConfig c = config;
    c.seed = mix_seed(config.seed, seed);
    return std::make_unique<AblrSurrogate>(c, scaler);
  };
}

InputScaler choose_input_scaler(const std::vector<TaskDataset>& warm, std::size_t space_dim,
                                const Vector& context) {
  Eigen::Index rows = 0;
  for (const auto& d : warm) rows += d.size();
  if (rows > 0) {
    Matrix all(rows, warm.front().inputs.cols());
    Eigen::Index r = 0;
    for (const auto& d : warm) {
      if (d.size() == 0) continue;
      all.middleRows(r, d.size()) = d.inputs;
      r += d.size();
    }
    return InputScaler::fit(all);
  }
  const auto p = static_cast<Eigen::Index>(space_dim);
  InputScaler s;
  s.mean = Vector::Constant(p + context.size(), 0.5);
  s.scale = Vector::Constant(p + context.size(), std::sqrt(1.0 / 12.0));
  if (context.size() > 0) {
    s.mean.tail(context.size()) = context;
    s.scale.tail(context.size()).setOnes();
  }
  return s;
}

BoTrace run_bo(BlackBox& problem, const SearchSpace& space, const History& warm_start,
               const BoConfig& config, std::uint64_t seed) {
  require(config.budget >= 1, "run_bo: budget must be >= 1");
  require(static_cast<bool>(config.make_surrogate), "run_bo: no surrogate factory");
  const auto signal_names = problem.signal_names();
  require(config.target_signal < signal_names.size(), "run_bo: target signal out of range");

  const Vector context = config.use_context ? problem.context() : Vector();
  if (config.use_context && context.size() == 0) {
    throw ConfigError("run_bo: context augmentation requested but task '" + config.task_id +
                      "' has no context");
  }

  std::vector<TaskDataset> warm;
  if (!warm_start.tasks.empty()) {
    warm_start.validate(space);
    if (warm_start.num_signals() != signal_names.size() && config.use_side_signals) {
      throw ShapeError("run_bo: warm start has " + std::to_string(warm_start.num_signals()) +
                       " signals, problem has " + std::to_string(signal_names.size()));
    }
    warm = history_datasets(warm_start, space, config.use_side_signals, config.use_context);
    if (config.use_context && !warm.empty() && warm.front().inputs.cols() != static_cast<Eigen::Index>(space.size()) + context.size()) {
      throw ConfigError("run_bo: warm-start context length differs from the target's");
    }
  }
  const bool transfer = !warm.empty();
  const std::size_t initial_random = transfer ? 0 : config.initial_random;
  const InputScaler scaler = choose_input_scaler(warm, space.size(), context);

  History own;
  own.signal_names = signal_names;
  own.target_signal = config.target_signal;
  TaskHistory& target = own.task(config.task_id);
  target.context = context;

  BoTrace trace;
  std::unique_ptr<Surrogate> model;
  std::set<std::vector<double>> exclude;
  double incumbent = std::numeric_limits<double>::infinity();

  for (std::size_t it = 0; it < config.budget; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    bool use_model = target.observations.size() >= initial_random;
    if (use_model) {
      std::vector<TaskDataset> tasks = warm;
      auto mine = attach_signals(target, own, space);
      std::size_t target_index = tasks.size();
      for (std::size_t s = 0; s < mine.size(); ++s) {
        if (!config.use_side_signals && s != config.target_signal) continue;
        if (s == config.target_signal) target_index = tasks.size();
        if (context.size() > 0) {
          mine[s].inputs = mine[s].size() > 0 ? augment_with_context(mine[s].inputs, context)
                                              : Matrix(0, mine[s].inputs.cols() + context.size());
        }
        tasks.push_back(std::move(mine[s]));
      }
      if (!model) model = config.make_surrogate(scaler, seed);
      try {
        model->fit(tasks, target_index);
      } catch (const NumericError&) {
        // Surrogate unusable this round; fall back to a random proposal.
        ++trace.model_failures;
        use_model = false;
      }
    }

    bool done = false;
    for (int attempt = 0; attempt <= config.max_retries && !done; ++attempt) {
      ProposalRequest req;
      req.space = &space;
      if (std::isfinite(incumbent)) req.incumbent = incumbent;
      req.context = context;
      req.candidates = config.candidates;
      req.exclude = exclude;
      req.seed = mix_seed(mix_seed(seed, it), static_cast<std::uint64_t>(attempt));
      req.config = config.acquisition;
      const Suggestion s = propose_next(use_model ? model.get() : nullptr, req);

      std::vector<double> signals;
      try {
        signals = problem.evaluate(s.configuration);
        if (signals.size() != signal_names.size()) {
          throw EvaluationError("black box returned " + std::to_string(signals.size()) + " signals");
        }
        for (double v : signals) {
          if (!std::isfinite(v)) throw EvaluationError("black box returned a non-finite signal");
        }
      } catch (const EvaluationError&) {
        ++trace.failures;
        exclude.insert(canonical_key(s.encoded));
        continue;
      }
      if (!config.candidates.empty()) exclude.insert(canonical_key(s.encoded));

      BoStep step;
      step.iteration = it;
      step.config = s.configuration;
      step.signals = signals;
      step.target = signals[config.target_signal];
      incumbent = std::min(incumbent, step.target);
      step.incumbent = incumbent;
      step.acquisition_value = s.acquisition_value;
      step.random = s.random;
      step.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      target.observations.push_back(
          Observation{s.configuration, signals, static_cast<std::int64_t>(it), seed});
      trace.steps.push_back(std::move(step));
      done = true;
    }
    if (!done) {
      trace.aborted = true;
      trace.message = "evaluation failed " + std::to_string(config.max_retries + 1) +
                      " times at iteration " + std::to_string(it);
      break;
    }
    if (!config.candidates.empty() && exclude.size() >= config.candidates.size()) break;
  }
  trace.observed = target;
  return trace;
}

}  // namespace ablr
