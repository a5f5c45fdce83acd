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

// Replay of recorded evaluations ("tabular black boxes").
//
// CSV schema: a header naming the hyperparameter columns, followed by signal
// columns whose names start with "signal:". One row per evaluation, UTF-8,
// '.' as decimal point, no thousands separators.

#pragma once

#include "ablr/bo.hpp"
#include "ablr/history.hpp"
#include "ablr/search_space.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ablr {

/// Schema violation in an evaluation table. 'line' is the 1-based line number
/// in the file (the header is line 1); 'column' is empty when not applicable.
class TableError : public ConfigError {
 public:
  TableError(std::size_t line, std::string column, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

class TabularBlackBox final : public BlackBox {
 public:
  static constexpr const char* kSignalPrefix = "signal:";

  /// Parses and validates a table. Throws TableError.
  static TabularBlackBox read_csv(std::istream& in, std::string task_id = "table");
  static TabularBlackBox read_csv_file(const std::string& path);

  TabularBlackBox(std::string task_id, std::vector<std::string> hyper_names,
                  std::vector<std::string> signal_names, std::vector<Configuration> configs,
                  std::vector<std::vector<double>> signals);

  const std::string& task_id() const { return task_id_; }
  const std::vector<std::string>& hyperparameter_names() const { return hyper_names_; }
  std::vector<std::string> signal_names() const override { return signal_names_; }
  const std::vector<Configuration>& configurations() const { return configs_; }
  const std::vector<std::vector<double>>& signal_rows() const { return signals_; }
  std::size_t size() const { return configs_.size(); }

  /// Exact lookup after canonical rounding. Throws EvaluationError if absent.
  std::vector<double> evaluate(const Configuration& config) override;
  bool contains(const Configuration& config) const;

  /// Smallest value of one signal over the table.
  double minimum(std::size_t signal) const;

  /// All rows as a task history with the table's task id.
  TaskHistory to_history() const;

  void write_csv(std::ostream& out) const;

 private:
  std::string task_id_;
  std::vector<std::string> hyper_names_;
  std::vector<std::string> signal_names_;  // without the prefix
  std::vector<Configuration> configs_;
  std::vector<std::vector<double>> signals_;
  std::map<std::vector<double>, std::size_t> lookup_;
};

/// Ordinal search space over the union of the values each column takes in
/// the given tables (which must share hyperparameter columns).
SearchSpace tabular_space(const std::vector<const TabularBlackBox*>& tables);

/// Canonical key of a raw configuration: 12 significant digits per value.
std::vector<double> canonical_config_key(const Configuration& config);

}  // namespace ablr
