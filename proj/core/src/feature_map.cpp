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

#include "ablr/feature_map.hpp"

#include "ablr/hexfloat.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ablr {

std::vector<Eigen::Index> MlpFeatureMap::layer_sizes() const {
  std::vector<Eigen::Index> sizes;
  if (weights.empty()) return sizes;
  sizes.push_back(weights.front().cols());
  for (const auto& w : weights) sizes.push_back(w.rows());
  return sizes;
}

Eigen::Index MlpFeatureMap::num_params() const {
  Eigen::Index n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

void MlpFeatureMap::validate() const {
  require(!weights.empty(), "mlp: at least one layer required");
  require(biases.empty() || biases.size() == weights.size(), "mlp: one bias vector per layer");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    require(weights[l].rows() >= 1 && weights[l].cols() >= 1, "mlp: empty layer");
    if (l > 0) {
      require(weights[l].cols() == weights[l - 1].rows(),
              "mlp: layer " + std::to_string(l) + " expects " +
                  std::to_string(weights[l].cols()) + " inputs, previous layer has " +
                  std::to_string(weights[l - 1].rows()) + " units");
    }
    if (!biases.empty()) require(biases[l].size() == weights[l].rows(), "mlp: bias length");
  }
}

MlpFeatureMap init_mlp(const std::vector<Eigen::Index>& layer_sizes, std::uint64_t seed,
                       bool with_bias) {
  require(layer_sizes.size() >= 2, "init_mlp: need input size and at least one layer");
  for (auto s : layer_sizes) require(s >= 1, "init_mlp: layer sizes must be >= 1");
  std::mt19937_64 rng(seed);
  MlpFeatureMap map;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    const auto fan_in = layer_sizes[l - 1];
    const auto fan_out = layer_sizes[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix w(fan_out, fan_in);
    for (Eigen::Index i = 0; i < fan_out; ++i) {
      for (Eigen::Index j = 0; j < fan_in; ++j) w(i, j) = dist(rng);
    }
    map.weights.push_back(std::move(w));
    if (with_bias) map.biases.push_back(Vector::Zero(fan_out));
  }
  return map;
}

RksFeatureMap init_rks(Eigen::Index input_dim, Eigen::Index output_dim, std::uint64_t seed) {
  require(input_dim >= 1 && output_dim >= 1, "init_rks: dimensions must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  RksFeatureMap map;
  map.projection.resize(output_dim, input_dim);
  for (Eigen::Index i = 0; i < output_dim; ++i) {
    for (Eigen::Index j = 0; j < input_dim; ++j) map.projection(i, j) = normal(rng);
  }
  map.phases.resize(output_dim);
  for (Eigen::Index i = 0; i < output_dim; ++i) map.phases(i) = phase(rng);
  return map;
}

namespace {

void check_inputs(const Matrix& inputs, Eigen::Index expected, const char* who) {
  if (inputs.cols() != expected) {
    throw ShapeError(std::string(who) + ": inputs have " + std::to_string(inputs.cols()) +
                     " columns, map expects " + std::to_string(expected));
  }
  if (!inputs.allFinite()) throw NumericError(std::string(who) + ": non-finite inputs");
}

Matrix mlp_forward_impl(const MlpFeatureMap& map, const Matrix& inputs,
                        std::vector<Matrix>* activations) {
  check_inputs(inputs, map.input_dim(), "mlp_forward");
  Matrix h = inputs;
  if (activations) activations->push_back(h);
  for (std::size_t l = 0; l < map.weights.size(); ++l) {
    Matrix a = h * map.weights[l].transpose();
    if (map.has_bias()) a.rowwise() += map.biases[l].transpose();
    h = a.array().tanh().matrix();
    if (activations) activations->push_back(h);
  }
  return h;
}

Matrix rks_projection(const RksFeatureMap& map, const Matrix& inputs) {
  check_inputs(inputs, map.input_dim(), "rks_forward");
  return inputs * map.projection.transpose();
}

Matrix rks_from_projection(const RksFeatureMap& map, const Matrix& projected) {
  const double inv_bw = std::exp(-map.log_bandwidth);
  const double amp = std::sqrt(2.0 / static_cast<double>(map.output_dim()));
  Matrix arg = inv_bw * projected;
  arg.rowwise() += map.phases.transpose();
  return amp * arg.array().cos().matrix();
}

}  // namespace

Matrix mlp_forward(const MlpFeatureMap& map, const Matrix& inputs) {
  return mlp_forward_impl(map, inputs, nullptr);
}

Matrix rks_forward(const RksFeatureMap& map, const Matrix& inputs) {
  return rks_from_projection(map, rks_projection(map, inputs));
}

Vector pack_params(const MlpFeatureMap& map) {
  Vector flat(map.num_params());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < map.weights.size(); ++l) {
    const auto& w = map.weights[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) flat(k++) = w(i, j);
    }
    if (map.has_bias()) {
      flat.segment(k, map.biases[l].size()) = map.biases[l];
      k += map.biases[l].size();
    }
  }
  return flat;
}

Vector pack_params(const RksFeatureMap& map) { return Vector::Constant(1, map.log_bandwidth); }

MlpFeatureMap unpack_mlp(const Vector& flat, const std::vector<Eigen::Index>& layer_sizes,
                         bool with_bias) {
  require(layer_sizes.size() >= 2, "unpack_mlp: need input size and at least one layer");
  Eigen::Index total = 0;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    total += layer_sizes[l] * layer_sizes[l - 1] + (with_bias ? layer_sizes[l] : 0);
  }
  if (flat.size() != total) {
    throw ShapeError("unpack_mlp: flat vector has " + std::to_string(flat.size()) +
                     " entries, shape needs " + std::to_string(total));
  }
  MlpFeatureMap map;
  Eigen::Index k = 0;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    Matrix w(layer_sizes[l], layer_sizes[l - 1]);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = flat(k++);
    }
    map.weights.push_back(std::move(w));
    if (with_bias) {
      map.biases.push_back(flat.segment(k, layer_sizes[l]));
      k += layer_sizes[l];
    }
  }
  return map;
}

RksFeatureMap unpack_rks(const Vector& flat, const RksFeatureMap& frozen) {
  if (flat.size() != 1) {
    throw ShapeError("unpack_rks: expected 1 parameter, got " + std::to_string(flat.size()));
  }
  RksFeatureMap map = frozen;
  map.log_bandwidth = flat(0);
  return map;
}

FeatureMap::FeatureMap(MlpFeatureMap mlp) : map_(std::move(mlp)) { this->mlp().validate(); }

FeatureMap::FeatureMap(RksFeatureMap rks) : map_(std::move(rks)) {
  require(this->rks().phases.size() == this->rks().projection.rows(), "rks: phases length");
}

FeatureMapKind FeatureMap::kind() const {
  return std::holds_alternative<MlpFeatureMap>(map_) ? FeatureMapKind::kMlp : FeatureMapKind::kRks;
}

Eigen::Index FeatureMap::input_dim() const {
  return std::visit([](const auto& m) { return m.input_dim(); }, map_);
}

Eigen::Index FeatureMap::output_dim() const {
  return std::visit([](const auto& m) { return m.output_dim(); }, map_);
}

Eigen::Index FeatureMap::num_params() const {
  return std::visit([](const auto& m) { return m.num_params(); }, map_);
}

Vector FeatureMap::pack() const {
  return std::visit([](const auto& m) { return pack_params(m); }, map_);
}

FeatureMap FeatureMap::with_params(const Vector& flat) const {
  if (kind() == FeatureMapKind::kMlp) {
    return FeatureMap(unpack_mlp(flat, mlp().layer_sizes(), mlp().has_bias()));
  }
  return FeatureMap(unpack_rks(flat, rks()));
}

Matrix FeatureMap::forward(const Matrix& inputs) const {
  if (kind() == FeatureMapKind::kMlp) return mlp_forward(mlp(), inputs);
  return rks_forward(rks(), inputs);
}

Matrix FeatureMap::forward(const Matrix& inputs, ForwardTape& tape) const {
  tape = ForwardTape{};
  if (kind() == FeatureMapKind::kMlp) {
    return mlp_forward_impl(mlp(), inputs, &tape.activations);
  }
  tape.projected = rks_projection(rks(), inputs);
  tape.output = rks_from_projection(rks(), tape.projected);
  return tape.output;
}

Vector FeatureMap::backward(const ForwardTape& tape, const Matrix& grad_output) const {
  if (kind() == FeatureMapKind::kRks) {
    const auto& m = rks();
    require(grad_output.rows() == tape.output.rows() && grad_output.cols() == tape.output.cols(),
            "rks backward: gradient shape");
    // phi = amp cos(e^{-s} P + b);  d phi / ds = amp sin(e^{-s} P + b) e^{-s} P
    const double inv_bw = std::exp(-m.log_bandwidth);
    const double amp = std::sqrt(2.0 / static_cast<double>(m.output_dim()));
    Matrix arg = inv_bw * tape.projected;
    arg.rowwise() += m.phases.transpose();
    const double g = (grad_output.array() * arg.array().sin() * tape.projected.array()).sum();
    return Vector::Constant(1, amp * inv_bw * g);
  }

  const auto& m = mlp();
  const std::size_t layers = m.weights.size();
  require(tape.activations.size() == layers + 1, "mlp backward: tape does not match map");
  require(grad_output.rows() == tape.activations.back().rows() &&
              grad_output.cols() == tape.activations.back().cols(),
          "mlp backward: gradient shape");

  std::vector<Matrix> grad_w(layers);
  std::vector<Vector> grad_b(m.has_bias() ? layers : 0);
  Matrix grad_h = grad_output;
  for (std::size_t l = layers; l-- > 0;) {
    const Matrix& h = tape.activations[l + 1];
    Matrix grad_a = (grad_h.array() * (1.0 - h.array().square())).matrix();
    grad_w[l] = grad_a.transpose() * tape.activations[l];
    if (m.has_bias()) grad_b[l] = grad_a.colwise().sum().transpose();
    if (l > 0) grad_h = grad_a * m.weights[l];
  }

  Vector flat(m.num_params());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& g = grad_w[l];
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) flat(k++) = g(i, j);
    }
    if (m.has_bias()) {
      flat.segment(k, grad_b[l].size()) = grad_b[l];
      k += grad_b[l].size();
    }
  }
  return flat;
}

nlohmann::json FeatureMap::to_json() const {
  nlohmann::json j;
  if (kind() == FeatureMapKind::kMlp) {
    j["kind"] = "mlp";
    j["layer_sizes"] = mlp().layer_sizes();
    j["bias"] = mlp().has_bias();
    j["params"] = vector_to_json(pack());
    return j;
  }
  const auto& m = rks();
  j["kind"] = "rks";
  j["input_dim"] = m.input_dim();
  j["output_dim"] = m.output_dim();
  Vector u = Eigen::Map<const Vector>(Matrix(m.projection.transpose()).data(), m.projection.size());
  j["projection"] = vector_to_json(u);  // row-major U
  j["phases"] = vector_to_json(m.phases);
  j["params"] = vector_to_json(pack());
  return j;
}

FeatureMap FeatureMap::from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "mlp") {
    auto sizes = j.at("layer_sizes").get<std::vector<Eigen::Index>>();
    return FeatureMap(unpack_mlp(vector_from_json(j.at("params")), sizes, j.value("bias", false)));
  }
  if (kind == "rks") {
    const auto p = j.at("input_dim").get<Eigen::Index>();
    const auto d = j.at("output_dim").get<Eigen::Index>();
    Vector u = vector_from_json(j.at("projection"));
    Vector b = vector_from_json(j.at("phases"));
    if (u.size() != d * p || b.size() != d) throw ShapeError("rks json: inconsistent sizes");
    RksFeatureMap m;
    m.projection = Eigen::Map<Matrix>(u.data(), p, d).transpose();
    m.phases = b;
    return FeatureMap(unpack_rks(vector_from_json(j.at("params")), m));
  }
  throw ConfigError("unknown feature map kind '" + kind + "'");
}

}  // namespace ablr
