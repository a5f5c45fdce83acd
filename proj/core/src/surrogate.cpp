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

#include "ablr/surrogate.hpp"

#include "ablr/hexfloat.hpp"

#include <cmath>

namespace ablr {

InputScaler InputScaler::identity(Eigen::Index dim) {
  return {Vector::Zero(dim), Vector::Ones(dim)};
}

InputScaler InputScaler::fit(const Matrix& inputs) {
  require(inputs.rows() > 0, "InputScaler::fit: no rows");
  InputScaler s;
  s.mean = inputs.colwise().mean().transpose();
  s.scale.resize(inputs.cols());
  for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
    const double var = (inputs.col(j).array() - s.mean(j)).square().mean();
    s.scale(j) = std::max(std::sqrt(var), kScaleFloor);
  }
  return s;
}

Matrix InputScaler::apply(const Matrix& inputs) const {
  if (inputs.cols() != dim()) {
    throw ShapeError("input has " + std::to_string(inputs.cols()) + " columns, scaler expects " +
                     std::to_string(dim()));
  }
  Matrix out = inputs;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

std::vector<PredictiveDistribution> Surrogate::predict(const Matrix& inputs) const {
  auto out = predict_standardized(inputs);
  const auto s = target_standardization();
  for (auto& p : out) p = s.invert(p);
  return out;
}

AblrSurrogate::AblrSurrogate(AblrConfig config, InputScaler scaler)
    : config_(std::move(config)), scaler_(std::move(scaler)) {
  require(scaler_.dim() >= 1, "AblrSurrogate: input dimension must be >= 1");
  map_ = fresh_map(0);
}

FeatureMap AblrSurrogate::fresh_map(std::uint64_t salt) const {
  const Eigen::Index p = scaler_.dim();
  if (config_.kind == FeatureMapKind::kRks) {
    return FeatureMap(init_rks(p, config_.rks_features, config_.seed));
  }
  std::vector<Eigen::Index> sizes{p};
  sizes.insert(sizes.end(), config_.hidden_layers.begin(), config_.hidden_layers.end());
  // splitmix-style salt so restarts draw unrelated weights
  const std::uint64_t seed = config_.seed ^ (0x9E3779B97F4A7C15ULL * (salt + 1));
  return FeatureMap(init_mlp(sizes, seed, config_.mlp_bias));
}

void AblrSurrogate::fit(const std::vector<TaskDataset>& tasks, std::size_t target) {
  require(!tasks.empty(), "AblrSurrogate::fit: no tasks");
  require(target < tasks.size(), "AblrSurrogate::fit: target index out of range");

  std::vector<TaskDataset> standardized;
  standardized.reserve(tasks.size());
  response_scaling_.clear();
  task_ids_.clear();
  for (const auto& t : tasks) {
    t.validate();
    TaskDataset s;
    s.task_id = t.task_id;
    s.inputs = t.size() > 0 ? scaler_.apply(t.inputs) : Matrix(0, scaler_.dim());
    const auto st = Standardization::fit(t.responses);
    s.responses = st.apply(t.responses);
    response_scaling_.push_back(st);
    task_ids_.push_back(t.task_id);
    standardized.push_back(std::move(s));
  }

  const int k = fit_count_++;
  std::optional<FitResult> best;
  if (previous_) {
    JointParams start = *previous_;
    start.heads.resize(tasks.size());
    FitConfig warm = config_.fit;
    warm.lbfgs.max_iterations = config_.fit.warm_max_iterations;
    best = ablr::fit(standardized, map_, warm, start);
    if (!std::isfinite(best->report.final_objective)) best.reset();
  }
  const int period = std::max(1, config_.fit.restart_period);
  if (!best || k % period == 0) {
    const FeatureMap arch = fresh_map(static_cast<std::uint64_t>(k));
    auto fresh = ablr::fit(standardized, arch, config_.fit);
    if (!best || fresh.report.final_objective < best->report.final_objective) {
      map_ = arch;
      best = std::move(fresh);
    }
  }
  if (!std::isfinite(best->report.final_objective)) {
    throw NumericError("AblrSurrogate::fit: objective is not finite at any start");
  }
  report_ = best->report;
  previous_ = best->params;
  target_ = target;
  set_posterior(standardized, best->params);
}

void AblrSurrogate::set_posterior(const std::vector<TaskDataset>& standardized,
                                  const JointParams& params) {
  map_ = map_.with_params(params.feature_params);
  heads_ = params.heads;
  factors_.clear();
  for (std::size_t t = 0; t < standardized.size(); ++t) {
    const Matrix phi = standardized[t].size() > 0 ? map_.forward(standardized[t].inputs)
                                                  : Matrix(0, map_.output_dim());
    factors_.push_back(posterior_factors(standardized[t], phi, heads_[t]));
  }
}

std::vector<PredictiveDistribution> AblrSurrogate::predict_standardized(const Matrix& inputs) const {
  require(!factors_.empty(), "AblrSurrogate: predict before fit");
  return predict_batch(map_.forward(scaler_.apply(inputs)), factors_[target_], heads_[target_]);
}

Standardization AblrSurrogate::target_standardization() const {
  require(!response_scaling_.empty(), "AblrSurrogate: not fitted");
  return response_scaling_[target_];
}

std::vector<PredictiveDistribution> AblrSurrogate::predict_task(std::size_t task,
                                                                const Matrix& inputs) const {
  require(task < factors_.size(), "AblrSurrogate: task index out of range");
  auto out = predict_batch(map_.forward(scaler_.apply(inputs)), factors_[task], heads_[task]);
  for (auto& p : out) p = response_scaling_[task].invert(p);
  return out;
}

nlohmann::json AblrSurrogate::to_json() const {
  nlohmann::json j;
  j["format"] = "ablr-surrogate";
  j["version"] = kFormatVersion;
  j["feature_map"] = map_.to_json();
  j["input_scaler"] = {{"mean", vector_to_json(scaler_.mean)},
                       {"scale", vector_to_json(scaler_.scale)}};
  j["target"] = target_;
  auto tasks = nlohmann::json::array();
  for (std::size_t t = 0; t < heads_.size(); ++t) {
    const auto& f = factors_[t];
    const Eigen::Index d = f.feature_dim();
    Vector lower(d * (d + 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index c = 0; c <= i; ++c) lower(k++) = f.chol_lower(i, c);
    }
    tasks.push_back({{"task_id", task_ids_[t]},
                     {"log_alpha", to_hexfloat(heads_[t].log_alpha)},
                     {"log_beta", to_hexfloat(heads_[t].log_beta)},
                     {"response_mean", to_hexfloat(response_scaling_[t].mean)},
                     {"response_scale", to_hexfloat(response_scaling_[t].scale)},
                     {"jitter", to_hexfloat(f.jitter)},
                     {"chol_lower", vector_to_json(lower)},
                     {"projected", vector_to_json(f.projected)}});
  }
  j["tasks"] = std::move(tasks);
  return j;
}

AblrSurrogate AblrSurrogate::from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "ablr-surrogate") {
    throw ConfigError("not an ablr surrogate model file");
  }
  const int version = j.value("version", -1);
  if (version != kFormatVersion) {
    throw ConfigError("model file version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kFormatVersion) + ")");
  }
  AblrSurrogate s;
  s.map_ = FeatureMap::from_json(j.at("feature_map"));
  s.config_.kind = s.map_.kind();
  s.scaler_.mean = vector_from_json(j.at("input_scaler").at("mean"));
  s.scaler_.scale = vector_from_json(j.at("input_scaler").at("scale"));
  require(s.scaler_.scale.size() == s.scaler_.mean.size() && s.scaler_.dim() == s.map_.input_dim(),
          "model file: input scaler does not match feature map");
  s.target_ = j.at("target").get<std::size_t>();
  const Eigen::Index d = s.map_.output_dim();
  for (const auto& t : j.at("tasks")) {
    s.task_ids_.push_back(t.at("task_id").get<std::string>());
    TaskHead h;
    h.log_alpha = from_hexfloat(t.at("log_alpha").get<std::string>());
    h.log_beta = from_hexfloat(t.at("log_beta").get<std::string>());
    s.heads_.push_back(h);
    Standardization st;
    st.mean = from_hexfloat(t.at("response_mean").get<std::string>());
    st.scale = from_hexfloat(t.at("response_scale").get<std::string>());
    s.response_scaling_.push_back(st);
    PosteriorFactors f;
    f.jitter = from_hexfloat(t.at("jitter").get<std::string>());
    const Vector lower = vector_from_json(t.at("chol_lower"));
    require(lower.size() == d * (d + 1) / 2, "model file: cholesky factor size");
    f.chol_lower = Matrix::Zero(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index c = 0; c <= i; ++c) f.chol_lower(i, c) = lower(k++);
    }
    f.projected = vector_from_json(t.at("projected"));
    require(f.projected.size() == d, "model file: projected vector size");
    s.factors_.push_back(std::move(f));
  }
  require(s.target_ < s.heads_.size(), "model file: target index out of range");
  return s;
}

}  // namespace ablr
