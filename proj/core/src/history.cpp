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

#include "ablr/history.hpp"

#include "ablr/hexfloat.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

namespace ablr {

std::size_t History::num_observations() const {
  std::size_t n = 0;
  for (const auto& t : tasks) n += t.observations.size();
  return n;
}

const TaskHistory* History::find(const std::string& task_id) const {
  for (const auto& t : tasks) {
    if (t.task_id == task_id) return &t;
  }
  return nullptr;
}

TaskHistory& History::task(const std::string& task_id) {
  for (auto& t : tasks) {
    if (t.task_id == task_id) return t;
  }
  tasks.push_back(TaskHistory{task_id, Vector(), {}});
  return tasks.back();
}

void History::validate(const SearchSpace& space) const {
  if (signal_names.empty()) throw ShapeError("history: no signals declared");
  if (target_signal >= signal_names.size()) {
    throw ShapeError("history: target signal index " + std::to_string(target_signal) +
                     " out of range for " + std::to_string(signal_names.size()) + " signals");
  }
  for (const auto& t : tasks) {
    for (std::size_t i = 0; i < t.observations.size(); ++i) {
      const auto& o = t.observations[i];
      if (o.signals.size() != signal_names.size()) {
        throw ShapeError("history: task '" + t.task_id + "' observation " + std::to_string(i) +
                         " has " + std::to_string(o.signals.size()) + " signals, expected " +
                         std::to_string(signal_names.size()));
      }
      space.check(o.config);
    }
  }
}

Matrix augment_with_context(const Matrix& encoded, const Vector& context) {
  if (context.size() == 0) return encoded;
  Matrix out(encoded.rows(), encoded.cols() + context.size());
  out.leftCols(encoded.cols()) = encoded;
  if (encoded.rows() > 0) out.rightCols(context.size()) = context.transpose().replicate(encoded.rows(), 1);
  return out;
}

void check_contexts(const History& history) {
  Eigen::Index len = -1;
  for (const auto& t : history.tasks) {
    if (t.context.size() == 0) throw ConfigError("context requested but task '" + t.task_id + "' has none");
    if (len >= 0 && t.context.size() != len) {
      throw ConfigError("task '" + t.task_id + "' context has length " + std::to_string(t.context.size()) +
                        ", expected " + std::to_string(len));
    }
    len = t.context.size();
  }
}

std::vector<TaskDataset> attach_signals(const TaskHistory& task, const History& history,
                                        const SearchSpace& space) {
  const std::size_t s_count = history.num_signals();
  std::vector<Configuration> configs;
  for (const auto& o : task.observations) {
    if (o.signals.size() != s_count) {
      throw ShapeError("attach_signals: task '" + task.task_id + "' has an observation with " +
                       std::to_string(o.signals.size()) + " signals, expected " + std::to_string(s_count));
    }
    configs.push_back(o.config);
  }
  const Matrix inputs = configs.empty() ? Matrix(0, static_cast<Eigen::Index>(space.size()))
                                        : space.encode_all(configs);
  std::vector<TaskDataset> out;
  for (std::size_t s = 0; s < s_count; ++s) {
    TaskDataset d;
    d.task_id = task.task_id + "/" + history.signal_names[s];
    d.inputs = inputs;
    d.responses.resize(static_cast<Eigen::Index>(task.observations.size()));
    for (std::size_t i = 0; i < task.observations.size(); ++i) {
      d.responses(static_cast<Eigen::Index>(i)) = task.observations[i].signals[s];
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<TaskDataset> history_datasets(const History& history, const SearchSpace& space,
                                          bool all_signals, bool use_context) {
  if (use_context) check_contexts(history);
  std::vector<TaskDataset> out;
  for (const auto& t : history.tasks) {
    auto per_signal = attach_signals(t, history, space);
    for (std::size_t s = 0; s < per_signal.size(); ++s) {
      if (!all_signals && s != history.target_signal) continue;
      auto& d = per_signal[s];
      if (!all_signals) d.task_id = t.task_id;
      if (use_context) {
        d.inputs = d.size() > 0 ? augment_with_context(d.inputs, t.context)
                                : Matrix(0, d.inputs.cols() + t.context.size());
      }
      out.push_back(std::move(d));
    }
  }
  return out;
}

void write_history_jsonl(std::ostream& out, const History& history, const SearchSpace& space) {
  const auto names = space.names();
  for (const auto& t : history.tasks) {
    for (const auto& o : t.observations) {
      nlohmann::ordered_json rec;
      rec["task_id"] = t.task_id;
      nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < names.size(); ++i) cfg[names[i]] = o.config.at(i);
      rec["config"] = std::move(cfg);
      nlohmann::ordered_json sig = nlohmann::ordered_json::object();
      for (std::size_t s = 0; s < history.signal_names.size(); ++s) {
        sig[history.signal_names[s]] = o.signals.at(s);
      }
      rec["signals"] = std::move(sig);
      rec["iteration"] = o.iteration;
      rec["seed"] = o.seed;
      out << rec.dump() << '\n';
    }
  }
}

History read_history_jsonl(std::istream& in, const SearchSpace& space, const std::string& target_signal) {
  History h;
  const auto names = space.names();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "history line " + std::to_string(line_no) + ": ";
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(where + e.what());
    }
    if (!rec.contains("task_id") || !rec.contains("config") || !rec.contains("signals")) {
      throw ConfigError(where + "record needs task_id, config and signals");
    }
    const auto& sig = rec.at("signals");
    if (!sig.is_object() || sig.empty()) throw ConfigError(where + "signals must be a non-empty object");
    if (h.signal_names.empty()) {
      for (auto it = sig.begin(); it != sig.end(); ++it) h.signal_names.push_back(it.key());
    } else if (sig.size() != h.signal_names.size()) {
      throw ShapeError(where + "record has " + std::to_string(sig.size()) + " signals, expected " +
                       std::to_string(h.signal_names.size()));
    }
    Observation o;
    for (const auto& n : names) {
      if (!rec["config"].contains(n)) throw ConfigError(where + "config lacks '" + n + "'");
      o.config.push_back(rec["config"][n].get<double>());
    }
    space.check(o.config);
    for (const auto& n : h.signal_names) {
      if (!sig.contains(n)) throw ShapeError(where + "signal '" + n + "' missing");
      const auto& v = sig[n];
      if (!v.is_number()) throw ConfigError(where + "signal '" + n + "' is not a number");
      o.signals.push_back(v.get<double>());
    }
    o.iteration = rec.value("iteration", std::int64_t{0});
    o.seed = rec.value("seed", std::uint64_t{0});
    h.task(rec["task_id"].get<std::string>()).observations.push_back(std::move(o));
  }
  if (h.signal_names.empty()) h.signal_names.push_back(target_signal.empty() ? "y" : target_signal);
  if (!target_signal.empty()) {
    auto it = std::find(h.signal_names.begin(), h.signal_names.end(), target_signal);
    if (it == h.signal_names.end()) throw ConfigError("history: unknown target signal '" + target_signal + "'");
    h.target_signal = static_cast<std::size_t>(it - h.signal_names.begin());
  }
  return h;
}

}  // namespace ablr
