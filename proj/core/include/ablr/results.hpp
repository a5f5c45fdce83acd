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

#include <iosfwd>
#include <string>
#include <vector>

namespace ablr {

inline constexpr int kResultsSchemaVersion = 1;

/// One BO run flattened for the results CSV.
struct ResultSeries {
  std::string method;
  std::string task;
  std::uint64_t seed = 0;
  std::vector<double> incumbent;
  std::vector<double> regret;
  std::vector<double> wall_ms;
};

ResultSeries to_series(const RunRecord& run);

/// Columns: method,task,seed,iteration,incumbent,regret,wall_time_ms.
/// Iterations are 1-based. Wall time is written as 0 unless record_timing is
/// set, so that reruns of the same config produce identical bytes.
void write_results_csv(std::ostream& out, const std::vector<ResultSeries>& series, bool record_timing);

std::string format_number(double v);

/// Sidecar manifest: schema version, the config as given, content hashes of
/// every input, failure details and wall-clock fields.
struct Manifest {
  nlohmann::ordered_json config;
  nlohmann::ordered_json input_hashes = nlohmann::ordered_json::object();
  std::vector<std::string> outputs;
  std::vector<std::string> failures;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::string started_at;
  std::string finished_at;
  double elapsed_seconds = 0.0;

  nlohmann::ordered_json to_json() const;
};

std::string utc_timestamp();

}  // namespace ablr
