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

#include "ablr/training.hpp"

#include <cmath>
#include <limits>

namespace ablr {

Vector JointParams::flatten() const {
  Vector flat(size());
  flat.head(feature_params.size()) = feature_params;
  Eigen::Index k = feature_params.size();
  for (const auto& h : heads) {
    flat(k++) = h.log_alpha;
    flat(k++) = h.log_beta;
  }
  return flat;
}

JointParams JointParams::unflatten(const Vector& flat, Eigen::Index num_feature_params,
                                   std::size_t num_tasks) {
  const Eigen::Index expected = num_feature_params + 2 * static_cast<Eigen::Index>(num_tasks);
  if (flat.size() != expected) {
    throw ShapeError("JointParams: flat vector has " + std::to_string(flat.size()) +
                     " entries, expected " + std::to_string(expected));
  }
  JointParams p;
  p.feature_params = flat.head(num_feature_params);
  p.heads.resize(num_tasks);
  Eigen::Index k = num_feature_params;
  for (auto& h : p.heads) {
    h.log_alpha = flat(k++);
    h.log_beta = flat(k++);
  }
  return p;
}

JointParams JointParams::initial(const FeatureMap& arch, std::size_t num_tasks) {
  JointParams p;
  p.feature_params = arch.pack();
  p.heads.assign(num_tasks, TaskHead{});
  return p;
}

Matrix cholesky_backward(const Matrix& lower, const Matrix& grad_lower) {
  const Eigen::Index n = lower.rows();
  require(lower.cols() == n && grad_lower.rows() == n && grad_lower.cols() == n,
          "cholesky_backward: shape mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(std::abs(lower(i, i)) > 0.0)) {
      throw NumericError("cholesky_backward: singular diagonal at " + std::to_string(i));
    }
  }
  // P = Phi(L^T Lbar), Phi = lower triangle with halved diagonal;
  // Kbar = L^-T P L^-1, then symmetrized.
  Matrix p = (lower.transpose() * grad_lower.triangularView<Eigen::Lower>()).triangularView<Eigen::Lower>();
  p.diagonal() *= 0.5;
  const auto tri = lower.triangularView<Eigen::Lower>();
  tri.transpose().solveInPlace(p);                       // L^-T P
  Matrix pt = p.transpose();
  tri.transpose().solveInPlace(pt);                      // (L^-T P L^-1)^T
  Matrix out = 0.5 * (pt + pt.transpose());
  return out;
}

JointObjective::JointObjective(std::vector<TaskDataset> datasets, FeatureMap arch)
    : datasets_(std::move(datasets)), arch_(std::move(arch)) {
  for (std::size_t t = 0; t < datasets_.size(); ++t) {
    const auto& d = datasets_[t];
    d.validate();
    if (d.size() > 0 && d.input_dim() != arch_.input_dim()) {
      throw ShapeError("task '" + d.task_id + "' has input dimension " +
                       std::to_string(d.input_dim()) + ", feature map expects " +
                       std::to_string(arch_.input_dim()));
    }
    bool placed = false;
    for (auto& g : groups_) {
      const auto& ref = datasets_[g.front()].inputs;
      if (ref.rows() == d.inputs.rows() && ref.cols() == d.inputs.cols() && ref == d.inputs) {
        g.push_back(t);
        placed = true;
        break;
      }
    }
    if (!placed) groups_.push_back({t});
  }
}

double JointObjective::value(const JointParams& params) const { return evaluate(params, nullptr); }

double JointObjective::value_and_gradient(const JointParams& params, Vector& gradient) const {
  gradient.setZero(num_params());
  return evaluate(params, &gradient);
}

double JointObjective::operator()(const Vector& flat, Vector& gradient) const {
  try {
    const auto params = JointParams::unflatten(flat, num_feature_params(), num_tasks());
    return value_and_gradient(params, gradient);
  } catch (const NumericError&) {
    gradient.setZero(num_params());
    return std::numeric_limits<double>::infinity();
  }
}

double JointObjective::evaluate(const JointParams& params, Vector* gradient) const {
  if (params.heads.size() != datasets_.size()) {
    throw ShapeError("objective: " + std::to_string(params.heads.size()) + " heads for " +
                     std::to_string(datasets_.size()) + " tasks");
  }
  if (params.feature_params.size() != num_feature_params()) {
    throw ShapeError("objective: wrong number of feature-map parameters");
  }
  if (!params.feature_params.allFinite()) throw NumericError("objective: non-finite parameters");
  const FeatureMap map = arch_.with_params(params.feature_params);
  const Eigen::Index d = map.output_dim();
  const Eigen::Index nz = num_feature_params();

  double total = 0.0;
  for (const auto& group : groups_) {
    const Matrix& inputs = datasets_[group.front()].inputs;
    if (inputs.rows() == 0) continue;  // every summand is exactly zero

    ForwardTape tape;
    const Matrix phi = gradient ? map.forward(inputs, tape) : map.forward(inputs);
    Matrix gram = Matrix::Zero(d, d);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

    Matrix grad_gram_weighted;  // sum_t r_t * Kbar_t
    Matrix grad_phi;
    if (gradient) {
      grad_gram_weighted = Matrix::Zero(d, d);
      grad_phi = Matrix::Zero(phi.rows(), d);
    }

    for (std::size_t t : group) {
      const auto& data = datasets_[t];
      const TaskHead& head = params.heads[t];
      if (!std::isfinite(head.log_alpha) || !std::isfinite(head.log_beta)) {
        throw NumericError("objective: non-finite head parameters");
      }
      const double n = static_cast<double>(data.size());
      const double alpha = head.alpha();
      const double r = head.ratio();

      Matrix k = r * gram;
      k.diagonal().array() += 1.0;
      auto chol = factorize_with_jitter(k);
      const auto tri = chol.lower.triangularView<Eigen::Lower>();
      const Vector v = phi.transpose() * data.responses;
      const Vector c = tri.solve(v);
      const double yy = data.responses.squaredNorm();
      const double cc = c.squaredNorm();
      const double log_det_half = chol.lower.diagonal().array().log().sum();
      const double nll = -0.5 * n * head.log_alpha + 0.5 * alpha * (yy - r * cc) + log_det_half;
      if (!std::isfinite(nll)) throw NumericError("objective: non-finite value");
      total += nll;

      if (!gradient) continue;

      // Reverse pass for this head.
      const Vector grad_c = -alpha * r * c;
      const Vector grad_v = chol.lower.transpose().triangularView<Eigen::Upper>().solve(grad_c);
      Matrix grad_l = -(grad_v * c.transpose());
      grad_l.triangularView<Eigen::StrictlyUpper>().setZero();
      grad_l.diagonal().array() += chol.lower.diagonal().array().inverse();
      const Matrix grad_k = cholesky_backward(chol.lower, grad_l);

      const double grad_r = (grad_k.array() * gram.array()).sum() - 0.5 * alpha * cc;
      const double grad_log_alpha = -0.5 * n + 0.5 * alpha * (yy - r * cc) + r * grad_r;
      const double grad_log_beta = -r * grad_r;
      (*gradient)(nz + 2 * static_cast<Eigen::Index>(t)) += grad_log_alpha;
      (*gradient)(nz + 2 * static_cast<Eigen::Index>(t) + 1) += grad_log_beta;

      grad_gram_weighted += r * grad_k;
      grad_phi.noalias() += data.responses * grad_v.transpose();
    }

    if (gradient) {
      grad_phi.noalias() += 2.0 * phi * grad_gram_weighted;
      gradient->head(nz) += map.backward(tape, grad_phi);
    }
  }
  return total;
}

double objective(const JointParams& params, const std::vector<TaskDataset>& datasets,
                 const FeatureMap& arch) {
  return JointObjective(datasets, arch).value(params);
}

Vector gradient(const JointParams& params, const std::vector<TaskDataset>& datasets,
                const FeatureMap& arch) {
  Vector g;
  JointObjective(datasets, arch).value_and_gradient(params, g);
  return g;
}

FitResult fit(const std::vector<TaskDataset>& datasets, const FeatureMap& arch,
              const FitConfig& config, const JointParams& start) {
  JointObjective obj(datasets, arch);
  auto res = minimize_lbfgs(std::cref(obj), start.flatten(), config.lbfgs);
  FitResult out;
  out.params = JointParams::unflatten(res.x, obj.num_feature_params(), obj.num_tasks());
  out.report.final_objective = res.value;
  out.report.iterations = res.iterations;
  out.report.converged = res.converged;
  out.report.gradient_norm = res.gradient.size() ? res.gradient.norm() : 0.0;
  out.report.objective_trace = std::move(res.trace);
  return out;
}

FitResult fit(const std::vector<TaskDataset>& datasets, const FeatureMap& arch,
              const FitConfig& config) {
  return fit(datasets, arch, config, JointParams::initial(arch, datasets.size()));
}

}  // namespace ablr
