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

#include "ablr/tabular.hpp"

#include "ablr/acquisition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>

namespace ablr {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_number(const std::string& cell, double& value) {
  if (cell.empty()) return false;
  const char* b = cell.data();
  const char* e = b + cell.size();
  if (*b == '+') ++b;
  auto res = std::from_chars(b, e, value);
  return res.ec == std::errc() && res.ptr == e;
}

}  // namespace

TableError::TableError(std::size_t line, std::string column, const std::string& what)
    : ConfigError("line " + std::to_string(line) + (column.empty() ? "" : ", column '" + column + "'") +
                  ": " + what),
      line_(line),
      column_(std::move(column)) {}

std::vector<double> canonical_config_key(const Configuration& config) {
  Vector v = Eigen::Map<const Vector>(config.data(), static_cast<Eigen::Index>(config.size()));
  return canonical_key(v);
}

TabularBlackBox::TabularBlackBox(std::string task_id, std::vector<std::string> hyper_names,
                                 std::vector<std::string> signal_names, std::vector<Configuration> configs,
                                 std::vector<std::vector<double>> signals)
    : task_id_(std::move(task_id)),
      hyper_names_(std::move(hyper_names)),
      signal_names_(std::move(signal_names)),
      configs_(std::move(configs)),
      signals_(std::move(signals)) {
  require(configs_.size() == signals_.size(), "TabularBlackBox: row count mismatch");
  for (std::size_t r = 0; r < configs_.size(); ++r) {
    require(configs_[r].size() == hyper_names_.size(), "TabularBlackBox: configuration width");
    require(signals_[r].size() == signal_names_.size(), "TabularBlackBox: signal width");
    if (!lookup_.emplace(canonical_config_key(configs_[r]), r).second) {
      throw TableError(r + 2, "", "duplicate configuration");
    }
  }
}

TabularBlackBox TabularBlackBox::read_csv(std::istream& in, std::string task_id) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw TableError(1, "", "missing header row");
  if (line_no == 1 && header.front().rfind("\xEF\xBB\xBF", 0) == 0) header.front().erase(0, 3);

  std::vector<std::string> hyper, sig;
  const std::string prefix = kSignalPrefix;
  for (const auto& name : header) {
    if (name.empty()) throw TableError(line_no, "", "empty column name");
    if (name.rfind(prefix, 0) == 0) {
      if (name.size() == prefix.size()) throw TableError(line_no, name, "signal column without a name");
      sig.push_back(name.substr(prefix.size()));
    } else {
      if (!sig.empty()) {
        throw TableError(line_no, name, "hyperparameter column after a signal column");
      }
      hyper.push_back(name);
    }
  }
  if (hyper.empty()) throw TableError(line_no, "", "no hyperparameter columns");
  if (sig.empty()) throw TableError(line_no, "", "no signal columns (prefix \"signal:\")");
  {
    std::set<std::string> seen(header.begin(), header.end());
    if (seen.size() != header.size()) throw TableError(line_no, "", "duplicate column name");
  }

  std::vector<Configuration> configs;
  std::vector<std::vector<double>> signals;
  std::map<std::vector<double>, std::size_t> first_seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw TableError(line_no, "", "expected " + std::to_string(header.size()) + " cells, found " +
                                        std::to_string(cells.size()));
    }
    Configuration cfg;
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v)) throw TableError(line_no, header[c], "non-numeric cell '" + cells[c] + "'");
      if (!std::isfinite(v)) throw TableError(line_no, header[c], "non-finite value");
      (c < hyper.size() ? cfg : row).push_back(v);
    }
    auto key = canonical_config_key(cfg);
    if (auto it = first_seen.find(key); it != first_seen.end()) {
      throw TableError(line_no, "", "duplicate configuration (first seen on line " +
                                        std::to_string(it->second) + ")");
    }
    first_seen.emplace(std::move(key), line_no);
    configs.push_back(std::move(cfg));
    signals.push_back(std::move(row));
  }
  if (configs.empty()) throw TableError(line_no, "", "table has no data rows");
  return TabularBlackBox(std::move(task_id), std::move(hyper), std::move(sig), std::move(configs),
                         std::move(signals));
}

TabularBlackBox TabularBlackBox::read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table '" + path + "'");
  auto stem = path.substr(path.find_last_of('/') + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem.resize(dot);
  return read_csv(in, stem);
}

std::vector<double> TabularBlackBox::evaluate(const Configuration& config) {
  auto it = lookup_.find(canonical_config_key(config));
  if (it == lookup_.end()) throw EvaluationError("configuration not in table '" + task_id_ + "'");
  return signals_[it->second];
}

bool TabularBlackBox::contains(const Configuration& config) const {
  return lookup_.count(canonical_config_key(config)) > 0;
}

double TabularBlackBox::minimum(std::size_t signal) const {
  require(signal < signal_names_.size(), "TabularBlackBox::minimum: signal out of range");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : signals_) best = std::min(best, row[signal]);
  return best;
}

TaskHistory TabularBlackBox::to_history() const {
  TaskHistory h;
  h.task_id = task_id_;
  for (std::size_t r = 0; r < configs_.size(); ++r) {
    h.observations.push_back(Observation{configs_[r], signals_[r], static_cast<std::int64_t>(r), 0});
  }
  return h;
}

void TabularBlackBox::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < hyper_names_.size(); ++c) out << (c ? "," : "") << hyper_names_[c];
  for (const auto& s : signal_names_) out << ',' << kSignalPrefix << s;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t r = 0; r < configs_.size(); ++r) {
    for (std::size_t c = 0; c < configs_[r].size(); ++c) out << (c ? "," : "") << configs_[r][c];
    for (double v : signals_[r]) out << ',' << v;
    out << '\n';
  }
}

SearchSpace tabular_space(const std::vector<const TabularBlackBox*>& tables) {
  require(!tables.empty(), "tabular_space: no tables");
  const auto& names = tables.front()->hyperparameter_names();
  std::vector<std::set<double>> values(names.size());
  for (const auto* t : tables) {
    if (t->hyperparameter_names() != names) {
      throw ConfigError("table '" + t->task_id() + "' has different hyperparameter columns");
    }
    for (const auto& cfg : t->configurations()) {
      for (std::size_t c = 0; c < cfg.size(); ++c) values[c].insert(cfg[c]);
    }
  }
  std::vector<Dimension> dims;
  for (std::size_t c = 0; c < names.size(); ++c) {
    dims.push_back(Dimension::ordinal(names[c], std::vector<double>(values[c].begin(), values[c].end())));
  }
  return SearchSpace(std::move(dims));
}

}  // namespace ablr
