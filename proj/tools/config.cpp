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

#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace ablr::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Path = std::vector<std::string>;

std::string join(const Path& path) {
  std::string s;
  for (const auto& p : path) {
    if (!p.empty() && p.front() == '[') {
      s += p;
    } else {
      s += (s.empty() ? "" : ".") + p;
    }
  }
  return s;
}

std::size_t line_of(const std::string& text, std::size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  // Best-effort source position: each object key is searched for after the
  // position of its parent, which is exact for the documents we accept.
  std::size_t locate(const Path& path) const {
    std::size_t pos = 0;
    for (const auto& seg : path) {
      if (!seg.empty() && seg.front() == '[') continue;
      const std::string needle = "\"" + seg + "\"";
      std::size_t at = pos;
      while ((at = text_.find(needle, at)) != std::string::npos) {
        std::size_t k = at + needle.size();
        while (k < text_.size() && std::isspace(static_cast<unsigned char>(text_[k]))) ++k;
        if (k < text_.size() && text_[k] == ':') break;
        at += needle.size();
      }
      if (at == std::string::npos) break;
      pos = at;
    }
    return line_of(text_, pos);
  }

  [[noreturn]] void fail(const Path& path, const std::string& msg) const {
    throw ConfigError("config key '" + join(path) + "' (line " + std::to_string(locate(path)) + "): " + msg);
  }

  void keys(const json& j, const Path& path, const std::set<std::string>& allowed) const {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [k, v] : j.items()) {
      if (!allowed.count(k)) {
        auto p = path;
        p.push_back(k);
        fail(p, "unknown key");
      }
    }
  }

  std::uint64_t uint(const json& j, const Path& path, std::uint64_t lo = 0,
                     std::uint64_t hi = std::numeric_limits<std::uint64_t>::max()) const {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
      fail(path, "expected a non-negative integer");
    }
    const auto v = j.get<std::uint64_t>();
    if (v < lo || v > hi) {
      fail(path, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return v;
  }

  double number(const json& j, const Path& path, double lo, double hi) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!(v >= lo && v <= hi)) fail(path, "value out of range");
    return v;
  }

  bool boolean(const json& j, const Path& path) const {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
  }

  std::string string(const json& j, const Path& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  template <typename F>
  void array(const json& j, const Path& path, bool allow_empty, F&& each) const {
    if (!j.is_array()) fail(path, "expected an array");
    if (!allow_empty && j.empty()) fail(path, "must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto p = path;
      p.push_back("[" + std::to_string(i) + "]");
      each(j[i], p);
    }
  }

 private:
  const std::string& text_;
};

Path sub(const Path& p, const std::string& k) {
  auto q = p;
  q.push_back(k);
  return q;
}

void parse_settings(const Reader& r, const json& root, MethodSettings& s) {
  if (root.contains("initial_random")) {
    s.initial_random = r.uint(root["initial_random"], {"initial_random"}, 0, 1000);
  }
  if (root.contains("surrogate")) {
    const Path p{"surrogate"};
    const auto& j = root["surrogate"];
    r.keys(j, p, {"feature_map", "hidden_layers", "bias", "rks_features", "seed", "fit"});
    if (j.contains("feature_map")) {
      const auto kind = r.string(j["feature_map"], sub(p, "feature_map"));
      if (kind == "mlp") {
        s.ablr.kind = FeatureMapKind::kMlp;
      } else if (kind == "rks") {
        s.ablr.kind = FeatureMapKind::kRks;
      } else {
        r.fail(sub(p, "feature_map"), "expected \"mlp\" or \"rks\"");
      }
    }
    if (j.contains("hidden_layers")) {
      s.ablr.hidden_layers.clear();
      r.array(j["hidden_layers"], sub(p, "hidden_layers"), false, [&](const json& v, const Path& q) {
        s.ablr.hidden_layers.push_back(static_cast<Eigen::Index>(r.uint(v, q, 1, 4096)));
      });
    }
    if (j.contains("bias")) s.ablr.mlp_bias = r.boolean(j["bias"], sub(p, "bias"));
    if (j.contains("rks_features")) {
      s.ablr.rks_features = static_cast<Eigen::Index>(r.uint(j["rks_features"], sub(p, "rks_features"), 1, 100000));
    }
    if (j.contains("seed")) s.ablr.seed = r.uint(j["seed"], sub(p, "seed"));
    if (j.contains("fit")) {
      const Path f = sub(p, "fit");
      const auto& fj = j["fit"];
      r.keys(fj, f, {"max_iterations", "memory", "gradient_tolerance", "relative_tolerance", "restart_period",
                     "warm_max_iterations"});
      auto& lb = s.ablr.fit.lbfgs;
      if (fj.contains("max_iterations")) {
        lb.max_iterations = static_cast<int>(r.uint(fj["max_iterations"], sub(f, "max_iterations"), 1, 100000));
      }
      if (fj.contains("memory")) lb.memory = static_cast<int>(r.uint(fj["memory"], sub(f, "memory"), 1, 1000));
      if (fj.contains("gradient_tolerance")) {
        lb.gradient_tolerance = r.number(fj["gradient_tolerance"], sub(f, "gradient_tolerance"), 0.0, 1.0);
      }
      if (fj.contains("relative_tolerance")) {
        lb.relative_tolerance = r.number(fj["relative_tolerance"], sub(f, "relative_tolerance"), 0.0, 1.0);
      }
      if (fj.contains("restart_period")) {
        s.ablr.fit.restart_period = static_cast<int>(r.uint(fj["restart_period"], sub(f, "restart_period"), 1, 100000));
      }
      if (fj.contains("warm_max_iterations")) {
        s.ablr.fit.warm_max_iterations =
            static_cast<int>(r.uint(fj["warm_max_iterations"], sub(f, "warm_max_iterations"), 1, 100000));
      }
    }
  }
  if (root.contains("gp")) {
    const Path p{"gp"};
    r.keys(root["gp"], p, {"max_iterations"});
    if (root["gp"].contains("max_iterations")) {
      s.gp.max_iterations = static_cast<int>(r.uint(root["gp"]["max_iterations"], sub(p, "max_iterations"), 1, 100000));
    }
  }
  if (root.contains("acquisition")) {
    const Path p{"acquisition"};
    const auto& j = root["acquisition"];
    r.keys(j, p, {"candidates", "refine", "refine_steps", "refine_step", "variance"});
    auto& a = s.acquisition;
    if (j.contains("candidates")) a.num_candidates = static_cast<int>(r.uint(j["candidates"], sub(p, "candidates"), 1, 10000000));
    if (j.contains("refine")) a.num_refine = static_cast<int>(r.uint(j["refine"], sub(p, "refine"), 0, 100000));
    if (j.contains("refine_steps")) a.refine_steps = static_cast<int>(r.uint(j["refine_steps"], sub(p, "refine_steps"), 0, 10000));
    if (j.contains("refine_step")) a.refine_initial_step = r.number(j["refine_step"], sub(p, "refine_step"), 1e-12, 1.0);
    if (j.contains("variance")) {
      const auto v = r.string(j["variance"], sub(p, "variance"));
      if (v == "latent") {
        a.variance = VarianceChoice::kLatent;
      } else if (v == "observation") {
        a.variance = VarianceChoice::kObservation;
      } else {
        r.fail(sub(p, "variance"), "expected \"latent\" or \"observation\"");
      }
    }
  }
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON (line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) +
                      "): " + e.what());
  }
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (base_dir.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kLoto: return "loto";
    case ExperimentKind::kTabular: return "tabular";
    case ExperimentKind::kMultiSignal: return "multi_signal";
    case ExperimentKind::kTiming: return "timing";
  }
  return "unknown";
}

std::vector<std::string> ExperimentConfig::input_files() const {
  std::vector<std::string> files;
  if (!target_table.empty()) files.push_back(target_table);
  files.insert(files.end(), warm_start.begin(), warm_start.end());
  return files;
}

MethodSettings parse_method_settings(const std::string& text) {
  const json root = parse_document(text);
  const Reader r(text);
  if (!root.is_object()) r.fail({}, "expected an object");
  MethodSettings s;
  parse_settings(r, root, s);
  return s;
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& base_dir) {
  const json root = parse_document(text);
  const Reader r(text);
  ExperimentConfig c;
  c.raw = root;
  r.keys(root, {}, {"experiment", "methods", "seeds", "budget", "output_dir", "record_timing", "initial_random",
                    "loto", "tabular", "multi_signal", "timing", "surrogate", "gp", "acquisition"});
  if (!root.contains("experiment")) r.fail({"experiment"}, "missing required key");
  const auto kind = r.string(root["experiment"], {"experiment"});
  bool known = false;
  for (auto k : {ExperimentKind::kLoto, ExperimentKind::kTabular, ExperimentKind::kMultiSignal, ExperimentKind::kTiming}) {
    if (experiment_name(k) == kind) {
      c.kind = k;
      known = true;
    }
  }
  if (!known) r.fail({"experiment"}, "expected one of loto, tabular, multi_signal, timing");

  if (root.contains("methods")) {
    c.methods.clear();
    r.array(root["methods"], {"methods"}, false, [&](const json& v, const Path& p) {
      const auto name = r.string(v, p);
      try {
        c.methods.push_back(parse_method(name));
      } catch (const ConfigError&) {
        r.fail(p, "unknown method '" + name + "'");
      }
    });
  }
  if (root.contains("seeds")) {
    c.seeds.clear();
    r.array(root["seeds"], {"seeds"}, false, [&](const json& v, const Path& p) { c.seeds.push_back(r.uint(v, p)); });
  }
  if (root.contains("budget")) c.budget = r.uint(root["budget"], {"budget"}, 1, 1000000);
  if (root.contains("output_dir")) c.output_dir = r.string(root["output_dir"], {"output_dir"});
  if (root.contains("record_timing")) c.record_timing = r.boolean(root["record_timing"], {"record_timing"});
  parse_settings(r, root, c.settings);

  if (root.contains("loto")) {
    const Path p{"loto"};
    const auto& j = root["loto"];
    r.keys(j, p, {"tasks", "family_seed", "warm_per_task", "held_out", "pair_seeds_with_tasks"});
    if (j.contains("tasks")) c.tasks = r.uint(j["tasks"], sub(p, "tasks"), 2, 10000);
    if (j.contains("family_seed")) c.family_seed = r.uint(j["family_seed"], sub(p, "family_seed"));
    if (j.contains("warm_per_task")) c.warm_per_task = r.uint(j["warm_per_task"], sub(p, "warm_per_task"), 0, 100000);
    if (j.contains("pair_seeds_with_tasks")) {
      c.pair_seeds_with_tasks = r.boolean(j["pair_seeds_with_tasks"], sub(p, "pair_seeds_with_tasks"));
    }
    if (j.contains("held_out")) {
      r.array(j["held_out"], sub(p, "held_out"), true, [&](const json& v, const Path& q) {
        c.held_out.push_back(r.uint(v, q, 0, c.tasks - 1));
      });
    }
  }
  if (root.contains("tabular")) {
    const Path p{"tabular"};
    const auto& j = root["tabular"];
    r.keys(j, p, {"target", "warm_start", "target_signal"});
    if (j.contains("target")) c.target_table = resolve(base_dir, r.string(j["target"], sub(p, "target")));
    if (j.contains("target_signal")) c.target_signal = r.string(j["target_signal"], sub(p, "target_signal"));
    if (j.contains("warm_start")) {
      r.array(j["warm_start"], sub(p, "warm_start"), true, [&](const json& v, const Path& q) {
        const auto path = resolve(base_dir, r.string(v, q));
        if (!fs::exists(path)) r.fail(q, "file not found: " + path);
        c.warm_start.push_back(path);
      });
    }
    if (j.contains("target") && !fs::exists(c.target_table)) {
      r.fail(sub(p, "target"), "file not found: " + c.target_table);
    }
  }
  if (c.kind == ExperimentKind::kTabular && c.target_table.empty()) {
    r.fail({"tabular", "target"}, "missing required key for a tabular experiment");
  }
  if (root.contains("multi_signal")) {
    const Path p{"multi_signal"};
    const auto& j = root["multi_signal"];
    r.keys(j, p, {"signal_counts", "tolerance"});
    if (j.contains("signal_counts")) {
      c.signal_counts.clear();
      r.array(j["signal_counts"], sub(p, "signal_counts"), false,
              [&](const json& v, const Path& q) { c.signal_counts.push_back(r.uint(v, q, 1, 3)); });
    }
    if (j.contains("tolerance")) c.tolerance = r.number(j["tolerance"], sub(p, "tolerance"), 0.0, 1.0);
  }
  if (root.contains("timing")) {
    const Path p{"timing"};
    const auto& j = root["timing"];
    r.keys(j, p, {"sizes", "evaluations", "repetitions", "include_gp"});
    if (j.contains("sizes")) {
      c.sizes.clear();
      r.array(j["sizes"], sub(p, "sizes"), false, [&](const json& v, const Path& q) {
        c.sizes.push_back(static_cast<Eigen::Index>(r.uint(v, q, 2, 1000000)));
      });
    }
    if (j.contains("evaluations")) c.timing_evaluations = static_cast<int>(r.uint(j["evaluations"], sub(p, "evaluations"), 1, 1000));
    if (j.contains("repetitions")) c.timing_repetitions = static_cast<int>(r.uint(j["repetitions"], sub(p, "repetitions"), 1, 1000));
    if (j.contains("include_gp")) c.include_gp = r.boolean(j["include_gp"], sub(p, "include_gp"));
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str(), fs::path(path).parent_path().string());
}

}  // namespace ablr::cli
