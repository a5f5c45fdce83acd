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

// Shared nonlinear feature maps phi_z : R^P -> R^D.
//
// Two flavours are provided:
//   * MlpFeatureMap: tanh on every layer, phi(x) = tanh(Z_L ... tanh(Z_1 x)).
//     Optional per-layer bias vectors (off by default).
//   * RksFeatureMap: random Fourier features sqrt(2/D) cos(U x / sigma + b),
//     with U and b frozen at construction and only log(sigma) trainable.
//
// Flat parameter order (pack/unpack):
//   MLP: layer by layer; within a layer Z_l row-major, then b_l if biased.
//   RKS: [log_bandwidth].

#pragma once

#include "ablr/common.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <variant>
#include <vector>

namespace ablr {

struct MlpFeatureMap {
  std::vector<Matrix> weights;  // Z_l, units_l x units_{l-1}
  std::vector<Vector> biases;   // empty, or one per layer

  Eigen::Index input_dim() const { return weights.front().cols(); }
  Eigen::Index output_dim() const { return weights.back().rows(); }
  bool has_bias() const { return !biases.empty(); }
  std::vector<Eigen::Index> layer_sizes() const;
  Eigen::Index num_params() const;

  /// Checks that adjacent layer shapes chain.
  void validate() const;
};

struct RksFeatureMap {
  Matrix projection;  // U, D x P, standard normal
  Vector phases;      // b, length D, uniform on [0, 2 pi]
  double log_bandwidth = 0.0;

  Eigen::Index input_dim() const { return projection.cols(); }
  Eigen::Index output_dim() const { return projection.rows(); }
  Eigen::Index num_params() const { return 1; }
};

/// Glorot-uniform initialization, deterministic in the seed.
/// layer_sizes = (P, units_1, ..., units_L); D = units_L.
MlpFeatureMap init_mlp(const std::vector<Eigen::Index>& layer_sizes, std::uint64_t seed,
                       bool with_bias = false);

/// Draws U ~ N(0, I), b ~ U[0, 2 pi] from the seed; log_bandwidth = 0.
RksFeatureMap init_rks(Eigen::Index input_dim, Eigen::Index output_dim, std::uint64_t seed);

Matrix mlp_forward(const MlpFeatureMap& map, const Matrix& inputs);
Matrix rks_forward(const RksFeatureMap& map, const Matrix& inputs);

Vector pack_params(const MlpFeatureMap& map);
Vector pack_params(const RksFeatureMap& map);

/// Rebuilds an MLP from flat parameters and its layer sizes.
MlpFeatureMap unpack_mlp(const Vector& flat, const std::vector<Eigen::Index>& layer_sizes,
                         bool with_bias);
/// Replaces the trainable part (log_bandwidth) of an RKS map; U and b are kept.
RksFeatureMap unpack_rks(const Vector& flat, const RksFeatureMap& frozen);

enum class FeatureMapKind { kMlp, kRks };

/// Intermediate values kept by a forward pass for the matching backward pass.
struct ForwardTape {
  std::vector<Matrix> activations;  // MLP: H_0 = X, H_1, ..., H_L
  Matrix projected;                 // RKS: X U^T (before 1/sigma scaling)
  Matrix output;                    // RKS: phi
};

/// Type-erased feature map used by training and the surrogate.
class FeatureMap {
 public:
  FeatureMap() = default;
  explicit FeatureMap(MlpFeatureMap mlp);
  explicit FeatureMap(RksFeatureMap rks);

  FeatureMapKind kind() const;
  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  Eigen::Index num_params() const;

  const MlpFeatureMap& mlp() const { return std::get<MlpFeatureMap>(map_); }
  const RksFeatureMap& rks() const { return std::get<RksFeatureMap>(map_); }

  Vector pack() const;
  /// Same architecture (and frozen randomness), new trainable parameters.
  FeatureMap with_params(const Vector& flat) const;

  Matrix forward(const Matrix& inputs) const;
  Matrix forward(const Matrix& inputs, ForwardTape& tape) const;

  /// Vector-Jacobian product: given dL/dPhi (N x D) returns dL/dz in pack order.
  Vector backward(const ForwardTape& tape, const Matrix& grad_output) const;

  nlohmann::json to_json() const;
  static FeatureMap from_json(const nlohmann::json& j);

 private:
  std::variant<MlpFeatureMap, RksFeatureMap> map_;
};

}  // namespace ablr
