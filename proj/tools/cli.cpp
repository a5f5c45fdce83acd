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

#include "cli.hpp"

#include "ablr/experiments.hpp"
#include "ablr/results.hpp"
#include "config.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <optional>
#include <thread>

#ifndef ABLR_VERSION
#define ABLR_VERSION "0.0.0"
#endif

namespace ablr::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr const char* kModelFormat = "ablr-model";
constexpr int kModelVersion = 1;

/// Errors that map to exit code 1 with a plain message.
class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

int default_jobs() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << bytes;
  if (!out) throw UsageError("failed writing '" + path.string() + "'");
}

bool has_extension(const std::string& path, const std::string& ext) {
  return fs::path(path).extension() == ext;
}

History read_history_file(const std::string& path, const SearchSpace& space, const std::string& signal) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open history '" + path + "'");
  try {
    return read_history_jsonl(in, space, signal);
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::size_t signal_index(const std::vector<std::string>& names, const std::string& wanted) {
  if (wanted.empty()) return 0;
  auto it = std::find(names.begin(), names.end(), wanted);
  if (it == names.end()) throw ConfigError("unknown signal '" + wanted + "'");
  return static_cast<std::size_t>(it - names.begin());
}

// ---------------------------------------------------------------- run

struct Outcome {
  std::vector<ResultSeries> series;
  std::vector<std::string> failures;
  ojson summary = ojson::object();
  std::vector<std::pair<std::string, std::string>> extra_files;  // name, contents
  bool write_results = true;
};

ojson curve_summary(const Curve& c, std::size_t budget) {
  ojson j;
  j["runs"] = c.runs;
  j["failed"] = c.failed;
  if (!c.median.empty()) {
    ojson at = ojson::object();
    for (std::size_t it : {std::size_t{10}, std::size_t{20}, budget}) {
      if (it >= 1 && it <= c.median.size()) at[std::to_string(it)] = c.median[it - 1];
    }
    j["median_regret"] = at;
  }
  return j;
}

Outcome run_loto(const ExperimentConfig& c, int jobs) {
  const auto family = sample_family(c.tasks, c.family_seed);
  LotoConfig lc;
  lc.methods = c.methods;
  lc.seeds = c.seeds;
  lc.budget = c.budget;
  lc.warm_per_task = c.warm_per_task;
  lc.held_out = c.held_out;
  lc.pair_seeds_with_tasks = c.pair_seeds_with_tasks;
  lc.jobs = jobs;
  lc.settings = c.settings;
  const auto result = loto_run(family, lc);
  Outcome o;
  for (const auto& r : result.runs) {
    if (r.failed) {
      o.failures.push_back(method_name(r.method) + " " + r.task + " seed " + std::to_string(r.seed) + ": " + r.error);
    } else {
      o.series.push_back(to_series(r));
    }
  }
  for (const auto& [m, curve] : result.curves) o.summary[method_name(m)] = curve_summary(curve, c.budget);
  return o;
}

Outcome run_tabular(const ExperimentConfig& c, int jobs) {
  auto target = TabularBlackBox::read_csv_file(c.target_table);
  std::vector<TabularBlackBox> tables;
  std::vector<std::string> histories;
  for (const auto& p : c.warm_start) {
    if (has_extension(p, ".jsonl")) {
      histories.push_back(p);
    } else {
      tables.push_back(TabularBlackBox::read_csv_file(p));
    }
  }
  std::vector<const TabularBlackBox*> siblings;
  for (const auto& t : tables) siblings.push_back(&t);
  std::vector<const TabularBlackBox*> all{&target};
  all.insert(all.end(), siblings.begin(), siblings.end());
  const SearchSpace space = tabular_space(all);
  const std::size_t signal = signal_index(target.signal_names(), c.target_signal);

  std::vector<TaskHistory> extra;
  for (const auto& p : histories) {
    History h = read_history_file(p, space, c.target_signal);
    if (h.signal_names != target.signal_names()) {
      throw ConfigError(p + ": signals do not match the target table");
    }
    extra.insert(extra.end(), h.tasks.begin(), h.tasks.end());
  }

  struct Job {
    Method method;
    std::uint64_t seed;
  };
  std::vector<Job> work;
  for (std::uint64_t s : c.seeds) {
    for (Method m : c.methods) work.push_back({m, s});
  }
  std::vector<BoTrace> traces(work.size());
  std::vector<std::string> errors(work.size());
  run_parallel(work.size(), jobs, [&](std::size_t i) {
    TabularBlackBox box = target;
    TabularConfig tc;
    tc.method = work[i].method;
    tc.budget = c.budget;
    tc.target_signal = c.target_signal;
    tc.seed = work[i].seed;
    tc.settings = c.settings;
    tc.extra_warm = extra;
    try {
      traces[i] = tabular_bo(box, siblings, tc);
      if (traces[i].aborted) errors[i] = traces[i].message;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  Outcome o;
  const double best = target.minimum(signal);
  std::vector<RunRecord> records;
  for (std::size_t i = 0; i < work.size(); ++i) {
    RunRecord r;
    r.method = work[i].method;
    r.task = target.task_id();
    r.seed = work[i].seed;
    for (const auto& s : traces[i].steps) {
      r.incumbent.push_back(s.incumbent);
      r.regret.push_back(s.incumbent - best);
      r.wall_ms.push_back(s.wall_ms);
    }
    if (!errors[i].empty()) {
      r.failed = true;
      o.failures.push_back(method_name(r.method) + " " + r.task + " seed " + std::to_string(r.seed) + ": " +
                           errors[i]);
    }
    o.series.push_back(to_series(r));
    records.push_back(std::move(r));
  }
  const std::size_t budget = std::min(c.budget, target.size());
  for (Method m : c.methods) o.summary[method_name(m)] = curve_summary(aggregate(records, m, budget), budget);
  return o;
}

Outcome run_multi_signal(const ExperimentConfig& c, int jobs) {
  MultiSignalConfig mc;
  mc.seeds = c.seeds;
  mc.signal_counts = c.signal_counts;
  mc.budget = c.budget;
  mc.tolerance = c.tolerance;
  mc.jobs = jobs;
  mc.settings = c.settings;
  const auto result = multi_signal_run(mc);
  Outcome o;
  for (const auto& [s, runs] : result.incumbents) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto [lo, hi] = MultiSignalProblem(c.seeds[i], 1).target_range();
      ResultSeries series;
      series.method = "ablr_s" + std::to_string(s);
      series.task = "classifier";
      series.seed = c.seeds[i];
      series.incumbent = runs[i];
      for (double v : runs[i]) series.regret.push_back(v - lo);
      o.series.push_back(std::move(series));
    }
  }
  for (const auto& [s, med] : result.median_iterations) {
    o.summary["median_iterations_to_tolerance"][std::to_string(s)] = med;
  }
  for (const auto& [s, ms] : result.fit_ms) o.summary["fit_ms"][std::to_string(s)] = ms;
  o.summary["fit_growth_per_signal"] = result.fit_growth_per_signal;
  return o;
}

Outcome run_timing(const ExperimentConfig& c) {
  TimingConfig tc;
  tc.sizes = c.sizes;
  tc.hidden_layers = c.settings.ablr.hidden_layers;
  tc.mlp_bias = c.settings.ablr.mlp_bias;
  tc.evaluations = c.timing_evaluations;
  tc.repetitions = c.timing_repetitions;
  tc.include_gp = c.include_gp;
  tc.seed = c.seeds.front();
  const auto result = timing_ladder(tc);
  Outcome o;
  o.write_results = false;
  std::ostringstream csv;
  csv << "n,ablr_ms,gp_ms\n";
  for (const auto& p : result.points) {
    csv << p.n << ',' << format_number(p.ablr_ms) << ',' << format_number(p.gp_ms) << '\n';
  }
  o.extra_files.emplace_back("timing.csv", csv.str());
  o.summary["ablr_slope"] = result.ablr_slope;
  if (c.include_gp) o.summary["gp_slope"] = result.gp_slope;
  return o;
}

int cmd_run(const std::string& config_path, int jobs, std::optional<std::uint64_t> seed_override,
            const std::string& out_dir, const std::vector<std::string>& warm_start, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  Manifest manifest;
  manifest.started_at = utc_timestamp();

  const std::string config_text = read_file(config_path);
  ExperimentConfig c = parse_experiment_config(config_text, fs::path(config_path).parent_path().string());
  if (seed_override) c.seeds = {*seed_override};
  if (!out_dir.empty()) c.output_dir = out_dir;
  for (const auto& w : warm_start) {
    if (!fs::exists(w)) throw UsageError("warm-start file not found: " + w);
    c.warm_start.push_back(w);
  }
  if (!c.warm_start.empty() && c.kind != ExperimentKind::kTabular) {
    throw UsageError("warm-start files are only used by tabular experiments");
  }

  manifest.config = c.raw;
  ojson overrides = ojson::object();
  if (seed_override) overrides["seeds"] = c.seeds;
  if (!out_dir.empty()) overrides["output_dir"] = out_dir;
  if (!warm_start.empty()) overrides["warm_start"] = warm_start;
  overrides["jobs"] = jobs;
  manifest.summary["overrides"] = overrides;
  manifest.input_hashes[config_path] = git_blob_sha1(config_text);
  for (const auto& f : c.input_files()) manifest.input_hashes[f] = git_blob_sha1_file(f);

  Outcome o;
  switch (c.kind) {
    case ExperimentKind::kLoto: o = run_loto(c, jobs); break;
    case ExperimentKind::kTabular: o = run_tabular(c, jobs); break;
    case ExperimentKind::kMultiSignal: o = run_multi_signal(c, jobs); break;
    case ExperimentKind::kTiming: o = run_timing(c); break;
  }

  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory '" + dir.string() + "': " + ec.message());
  if (o.write_results) {
    std::ostringstream csv;
    write_results_csv(csv, o.series, c.record_timing);
    write_file(dir / "results.csv", csv.str());
    manifest.outputs.push_back("results.csv");
  }
  for (const auto& [name, bytes] : o.extra_files) {
    write_file(dir / name, bytes);
    manifest.outputs.push_back(name);
  }
  for (const auto& s : o.series) {
    out << "run experiment=" << experiment_name(c.kind) << " method=" << s.method << " task=" << s.task
        << " seed=" << s.seed << " iterations=" << s.incumbent.size();
    if (!s.regret.empty()) out << " final_regret=" << format_number(s.regret.back());
    out << '\n';
  }
  manifest.failures = o.failures;
  for (const auto& [k, v] : o.summary.items()) manifest.summary[k] = v;
  manifest.finished_at = utc_timestamp();
  manifest.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  out << "wrote " << (dir / "manifest.json").string() << '\n';
  return o.failures.empty() ? kOk : kPartialFailure;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const auto t = TabularBlackBox::read_csv_file(path);
    out << path << ": ok, " << t.size() << " rows, " << t.hyperparameter_names().size() << " hyperparameter columns, "
        << t.signal_names().size() << " signal columns\n";
    return kOk;
  } catch (const TableError& e) {
    err << path << ": row " << e.line();
    if (!e.column().empty()) err << ", column '" << e.column() << "'";
    err << ": " << e.what() << '\n';
    return kConfigError;
  }
}

// ---------------------------------------------------------------- fit / predict

struct LoadedData {
  SearchSpace space;
  History history;
};

LoadedData load_training_data(const std::vector<std::string>& paths, const std::string& space_path,
                              const std::string& signal) {
  LoadedData d;
  std::vector<TabularBlackBox> tables;
  std::vector<std::string> histories;
  for (const auto& p : paths) {
    if (has_extension(p, ".jsonl")) {
      histories.push_back(p);
    } else {
      tables.push_back(TabularBlackBox::read_csv_file(p));
    }
  }
  if (!space_path.empty()) {
    try {
      d.space = SearchSpace::from_json(nlohmann::json::parse(read_file(space_path)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(space_path + ": " + e.what());
    }
  } else if (!tables.empty()) {
    std::vector<const TabularBlackBox*> ptrs;
    for (const auto& t : tables) ptrs.push_back(&t);
    d.space = tabular_space(ptrs);
  } else {
    throw UsageError("--space is required when only JSON-lines histories are given");
  }
  bool first = true;
  auto adopt = [&](const std::vector<std::string>& names, const std::string& source) {
    if (first) {
      d.history.signal_names = names;
      d.history.target_signal = signal_index(names, signal);
      first = false;
    } else if (names != d.history.signal_names) {
      throw ConfigError(source + ": signals differ from the first data file");
    }
  };
  for (const auto& t : tables) {
    if (t.hyperparameter_names() != d.space.names()) {
      throw ConfigError(t.task_id() + ": hyperparameter columns do not match the search space");
    }
    adopt(t.signal_names(), t.task_id());
    d.history.tasks.push_back(t.to_history());
  }
  for (const auto& p : histories) {
    History h = read_history_file(p, d.space, signal);
    adopt(h.signal_names, p);
    for (auto& task : h.tasks) d.history.tasks.push_back(std::move(task));
  }
  d.history.validate(d.space);
  return d;
}

int cmd_fit(const std::vector<std::string>& data, const std::string& space_path, const std::string& config_path,
            const std::string& target_task, const std::string& signal, std::uint64_t seed,
            const std::string& model_path, std::ostream& out) {
  MethodSettings settings;
  if (!config_path.empty()) settings = parse_method_settings(read_file(config_path));
  settings.ablr.seed = seed;
  const LoadedData d = load_training_data(data, space_path, signal);
  if (d.history.tasks.empty()) throw UsageError("no training data");

  std::size_t target = d.history.tasks.size() - 1;
  if (!target_task.empty()) {
    const auto it = std::find_if(d.history.tasks.begin(), d.history.tasks.end(),
                                 [&](const TaskHistory& t) { return t.task_id == target_task; });
    if (it == d.history.tasks.end()) throw UsageError("unknown task '" + target_task + "'");
    target = static_cast<std::size_t>(it - d.history.tasks.begin());
  }
  const auto datasets = history_datasets(d.history, d.space, false, false);
  Eigen::Index rows = 0;
  for (const auto& ds : datasets) rows += ds.size();
  Matrix stacked(rows, static_cast<Eigen::Index>(d.space.size()));
  rows = 0;
  for (const auto& ds : datasets) {
    stacked.middleRows(rows, ds.size()) = ds.inputs;
    rows += ds.size();
  }
  AblrSurrogate surrogate(settings.ablr, InputScaler::fit(stacked));
  surrogate.fit(datasets, target);

  ojson model;
  model["format"] = kModelFormat;
  model["version"] = kModelVersion;
  model["space"] = d.space.to_json();
  model["signal"] = d.history.signal_names[d.history.target_signal];
  model["surrogate"] = surrogate.to_json();
  write_file(model_path, model.dump() + "\n");
  const auto& rep = surrogate.last_report();
  out << "fitted " << datasets.size() << " tasks, " << stacked.rows() << " observations; objective "
      << format_number(rep.final_objective) << " after " << rep.iterations << " iterations; target task '"
      << datasets[target].task_id << "'\n";
  return kOk;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& task,
                const std::string& out_path, std::ostream& out) {
  nlohmann::json model;
  try {
    model = nlohmann::json::parse(read_file(model_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(model_path + ": " + e.what());
  }
  if (model.value("format", std::string()) != kModelFormat) {
    throw ConfigError(model_path + ": not an ablr model file");
  }
  if (model.value("version", -1) != kModelVersion) {
    throw ConfigError(model_path + ": model file version " + std::to_string(model.value("version", -1)) +
                      " is not supported (expected " + std::to_string(kModelVersion) + ")");
  }
  const SearchSpace space = SearchSpace::from_json(model.at("space"));
  const AblrSurrogate surrogate = AblrSurrogate::from_json(model.at("surrogate"));

  std::ifstream in(data_path);
  if (!in) throw UsageError("cannot open '" + data_path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(data_path + ": empty file");
  const auto header = split_csv_line(line);
  std::vector<std::size_t> columns;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].rfind(TabularBlackBox::kSignalPrefix, 0) == 0) continue;
    columns.push_back(i);
    names.push_back(header[i]);
  }
  if (names.size() != space.size()) {
    throw ConfigError(data_path + ": input dimension mismatch: " + std::to_string(names.size()) +
                      " hyperparameter columns, model expects " + std::to_string(space.size()));
  }
  if (names != space.names()) throw ConfigError(data_path + ": hyperparameter columns do not match the model");

  std::vector<Configuration> configs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ConfigError(data_path + ": row " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " cells");
    }
    Configuration c;
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const auto& cell = cells[columns[k]];
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw ConfigError(data_path + ": row " + std::to_string(line_no) + ", column '" + names[k] +
                          "': not a number");
      }
      c.push_back(v);
    }
    try {
      space.check(c);
    } catch (const ConfigError& e) {
      throw ConfigError(data_path + ": row " + std::to_string(line_no) + ": " + e.what());
    }
    configs.push_back(std::move(c));
  }
  const Matrix encoded = space.encode_all(configs);
  std::size_t task_index = surrogate.target();
  if (!task.empty()) {
    const auto& ids = surrogate.task_ids();
    const auto it = std::find(ids.begin(), ids.end(), task);
    if (it == ids.end()) throw UsageError("model has no task '" + task + "'");
    task_index = static_cast<std::size_t>(it - ids.begin());
  }
  const auto preds = surrogate.predict_task(task_index, encoded);

  std::ostringstream csv;
  for (const auto& n : names) csv << n << ',';
  csv << "mean,variance,latent_variance\n";
  for (std::size_t r = 0; r < configs.size(); ++r) {
    for (double v : configs[r]) csv << format_number(v) << ',';
    csv << format_number(preds[r].mean) << ',' << format_number(preds[r].variance) << ','
        << format_number(preds[r].latent_variance) << '\n';
  }
  if (out_path.empty()) {
    out << csv.str();
  } else {
    write_file(out_path, csv.str());
  }
  return kOk;
}

// ---------------------------------------------------------------- generate-flows

int cmd_generate_flows(const std::string& dir, std::size_t tasks, std::size_t grid, std::size_t dims,
                       std::uint64_t seed, std::ostream& out) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create '" + dir + "': " + ec.message());
  for (const auto& t : synthetic_flows(tasks, grid, dims, seed)) {
    std::ostringstream csv;
    t.write_csv(csv);
    const auto path = fs::path(dir) / (t.task_id() + ".csv");
    write_file(path, csv.str());
    out << "wrote " << path.string() << " (" << t.size() << " rows)\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-task Bayesian optimization with learned basis functions"};
  app.name(args.empty() ? "ablr" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int jobs = default_jobs();
  std::optional<std::uint64_t> seed_override;
  std::vector<std::string> warm;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run_cmd->add_option("--jobs", jobs, "Parallel runs; 1 is fully serial")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed-override", seed_override, "Replace the config's seeds with this one");
  run_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run_cmd->add_option("--warm-start", warm, "Extra warm-start tables (.csv) or histories (.jsonl)");

  std::string table;
  auto* validate_cmd = app.add_subcommand("validate", "Check an evaluation-table CSV");
  validate_cmd->add_option("table", table, "Table to check")->required();

  std::vector<std::string> data;
  std::string space_path, fit_config, target_task, signal, model_path;
  std::uint64_t fit_seed = 0;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a multi-task surrogate and save it");
  fit_cmd->add_option("--data", data, "Tables (.csv) or histories (.jsonl)")->required();
  fit_cmd->add_option("--space", space_path, "Search space JSON (default: derived from the tables)");
  fit_cmd->add_option("--config", fit_config, "JSON with 'surrogate' / 'acquisition' sections");
  fit_cmd->add_option("--target", target_task, "Task the model predicts by default (default: last)");
  fit_cmd->add_option("--signal", signal, "Signal to model (default: first)");
  fit_cmd->add_option("--seed", fit_seed, "Initialization seed");
  fit_cmd->add_option("--model", model_path, "Output model file")->required();

  std::string query, pred_out, pred_task;
  auto* predict_cmd = app.add_subcommand("predict", "Predict with a saved model");
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--data", query, "CSV of configurations")->required();
  predict_cmd->add_option("--task", pred_task, "Task head to use (default: the model's target)");
  predict_cmd->add_option("--out", pred_out, "Output CSV (default: stdout)");

  std::string flows_dir;
  std::size_t flow_tasks = 5, flow_grid = 6, flow_dims = 3;
  std::uint64_t flow_seed = 0;
  auto* flows_cmd = app.add_subcommand("generate-flows", "Write synthetic evaluation tables");
  flows_cmd->add_option("--out", flows_dir, "Output directory")->required();
  flows_cmd->add_option("--tasks", flow_tasks, "Number of tables")->check(CLI::PositiveNumber);
  flows_cmd->add_option("--grid", flow_grid, "Grid points per dimension")->check(CLI::Range(2, 1000));
  flows_cmd->add_option("--dims", flow_dims, "Hyperparameters per table")->check(CLI::Range(1, 16));
  flows_cmd->add_option("--seed", flow_seed, "Generator seed");

  auto* version_cmd = app.add_subcommand("version", "Print version information");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("ablr");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, jobs, seed_override, out_dir, warm, out);
    if (validate_cmd->parsed()) return cmd_validate(table, out, err);
    if (fit_cmd->parsed()) {
      return cmd_fit(data, space_path, fit_config, target_task, signal, fit_seed, model_path, out);
    }
    if (predict_cmd->parsed()) return cmd_predict(model_path, query, pred_task, pred_out, out);
    if (flows_cmd->parsed()) return cmd_generate_flows(flows_dir, flow_tasks, flow_grid, flow_dims, flow_seed, out);
    if (version_cmd->parsed()) {
      out << "ablr " << ABLR_VERSION << "\nmodel format " << kModelVersion << "\nsurrogate format "
          << AblrSurrogate::kFormatVersion << "\nresults schema " << kResultsSchemaVersion << '\n';
      return kOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace ablr::cli
