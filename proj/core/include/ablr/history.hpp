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

// Evaluation histories and their conversion to regression datasets.

#pragma once

#include "ablr/blr.hpp"
#include "ablr/search_space.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ablr {

struct Observation {
  Configuration config;
  std::vector<double> signals;  // one value per signal
  std::int64_t iteration = 0;
  std::uint64_t seed = 0;
};

struct TaskHistory {
  std::string task_id;
  Vector context;  // optional per-task meta-features
  std::vector<Observation> observations;
};

struct History {
  std::vector<std::string> signal_names;
  std::size_t target_signal = 0;
  std::vector<TaskHistory> tasks;

  std::size_t num_signals() const { return signal_names.size(); }
  std::size_t num_observations() const;
  const TaskHistory* find(const std::string& task_id) const;
  TaskHistory& task(const std::string& task_id);  // creates it when missing

  /// Signal counts, target index and configuration membership.
  void validate(const SearchSpace& space) const;
};

/// One regression dataset per signal, all over the same encoded inputs.
/// Dataset ids are "<task_id>/<signal name>".
std::vector<TaskDataset> attach_signals(const TaskHistory& task, const History& history,
                                        const SearchSpace& space);

/// Encoded configurations with the context vector appended to every row.
/// A zero-length context leaves the encoding unchanged.
Matrix augment_with_context(const Matrix& encoded, const Vector& context);

/// Checks that every task carries a context of one common length.
/// Throws ConfigError naming the first task without one.
void check_contexts(const History& history);

/// Target-signal (or all-signal) datasets for every task of a history.
std::vector<TaskDataset> history_datasets(const History& history, const SearchSpace& space,
                                          bool all_signals, bool use_context);

/// JSON-lines interchange: one record per evaluation,
/// {"task_id", "config": {name: value}, "signals": {name: value}, "iteration", "seed"}.
void write_history_jsonl(std::ostream& out, const History& history, const SearchSpace& space);

/// Reads records in file order. 'target_signal' names the optimized signal;
/// when empty the first signal (in name order) is the target.
History read_history_jsonl(std::istream& in, const SearchSpace& space,
                           const std::string& target_signal = "");

}  // namespace ablr
