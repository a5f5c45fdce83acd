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

#include "ablr/experiments.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ablr::cli {

enum class ExperimentKind { kLoto, kTabular, kMultiSignal, kTiming };

std::string experiment_name(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kLoto;
  std::vector<Method> methods = {Method::kAblrPlain, Method::kAblrTransfer};
  std::vector<std::uint64_t> seeds = {0};
  std::size_t budget = 50;
  std::string output_dir = "results";
  bool record_timing = false;
  MethodSettings settings;

  // loto
  std::size_t tasks = 10;
  std::uint64_t family_seed = 0;
  std::size_t warm_per_task = 10;
  std::vector<std::size_t> held_out;
  bool pair_seeds_with_tasks = false;

  // tabular
  std::string target_table;
  std::vector<std::string> warm_start;  // .csv tables or .jsonl histories
  std::string target_signal;

  // multi_signal
  std::vector<std::size_t> signal_counts = {1, 3};
  double tolerance = 0.05;

  // timing
  std::vector<Eigen::Index> sizes = {256, 512, 1024, 2048};
  int timing_evaluations = 3;
  int timing_repetitions = 5;
  bool include_gp = true;

  /// The document as parsed, echoed into the manifest.
  nlohmann::ordered_json raw;
  /// Every file the config refers to, resolved against the config's folder.
  std::vector<std::string> input_files() const;
};

/// Parses and validates a config document. Errors are ConfigError messages
/// naming the offending key and its line in 'text'. Relative paths are
/// resolved against 'base_dir'.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& base_dir = "");

ExperimentConfig load_experiment_config(const std::string& path);

/// Surrogate / fit / acquisition settings only (the 'surrogate' and
/// 'acquisition' sections); used by the fit command.
MethodSettings parse_method_settings(const std::string& text);

}  // namespace ablr::cli
