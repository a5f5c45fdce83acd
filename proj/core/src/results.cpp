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

#include "ablr/results.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>

namespace ablr {

ResultSeries to_series(const RunRecord& run) {
  return ResultSeries{method_name(run.method), run.task, run.seed, run.incumbent, run.regret, run.wall_ms};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_results_csv(std::ostream& out, const std::vector<ResultSeries>& series, bool record_timing) {
  out << "method,task,seed,iteration,incumbent,regret,wall_time_ms\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.incumbent.size(); ++i) {
      const double wall = record_timing && i < s.wall_ms.size() ? s.wall_ms[i] : 0.0;
      out << s.method << ',' << s.task << ',' << s.seed << ',' << (i + 1) << ',' << format_number(s.incumbent[i])
          << ',' << format_number(i < s.regret.size() ? s.regret[i] : std::nan("")) << ','
          << format_number(wall) << '\n';
    }
  }
}

nlohmann::ordered_json Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kResultsSchemaVersion;
  j["config"] = config;
  j["input_hashes"] = input_hashes;
  j["outputs"] = outputs;
  j["failures"] = failures;
  j["summary"] = summary;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["elapsed_seconds"] = elapsed_seconds;
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ablr
