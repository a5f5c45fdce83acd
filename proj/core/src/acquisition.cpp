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

#include "ablr/acquisition.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <random>

namespace ablr {

double expected_improvement(const PredictiveDistribution& pred, double incumbent,
                            VarianceChoice choice) {
  const double var = choice == VarianceChoice::kLatent ? pred.latent_variance : pred.variance;
  const double s = std::sqrt(std::max(var, 0.0));
  const double diff = incumbent - pred.mean;
  if (s < 1e-12) return std::max(diff, 0.0);
  const double g = diff / s;
  const double cdf = 0.5 * std::erfc(-g / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * g * g) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(s * (g * cdf + pdf), 0.0);
}

Matrix scrambled_sobol(std::size_t count, std::size_t dim, std::uint64_t seed) {
  require(dim >= 1, "scrambled_sobol: dim must be >= 1");
  boost::random::sobol gen(dim);
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> shift(dim);
  for (auto& s : shift) s = rng();
  // Skip the all-zero first point.
  gen.discard(dim);
  Matrix out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      // 53 leading bits of the 64-bit Sobol integer after the digital shift.
      const std::uint64_t v = (static_cast<std::uint64_t>(gen()) ^ shift[j]) >> 11;
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::ldexp(static_cast<double>(v), -53);
    }
  }
  return out;
}

std::vector<double> canonical_key(const Vector& encoded) {
  std::vector<double> key(static_cast<std::size_t>(encoded.size()));
  char buf[40];
  for (Eigen::Index i = 0; i < encoded.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g", encoded(i));
    key[static_cast<std::size_t>(i)] = std::strtod(buf, nullptr);
  }
  return key;
}

namespace {

struct Scored {
  Vector encoded;  // search-space encoding (no context)
  double ei = 0.0;
  PredictiveDistribution pred;  // standardized units
};

// Strict ordering: higher EI, then lower mean, then lexicographic encoding.
bool better(const Scored& a, const Scored& b) {
  if (a.ei != b.ei) return a.ei > b.ei;
  if (a.pred.mean != b.pred.mean) return a.pred.mean < b.pred.mean;
  return std::lexicographical_compare(a.encoded.data(), a.encoded.data() + a.encoded.size(),
                                      b.encoded.data(), b.encoded.data() + b.encoded.size());
}

Matrix with_context(const Matrix& encoded, const Vector& context) {
  if (context.size() == 0) return encoded;
  Matrix out(encoded.rows(), encoded.cols() + context.size());
  out.leftCols(encoded.cols()) = encoded;
  out.rightCols(context.size()) = context.transpose().replicate(encoded.rows(), 1);
  return out;
}

class Scorer {
 public:
  Scorer(const Surrogate& model, const ProposalRequest& req)
      : model_(model), req_(req), scaling_(model.target_standardization()) {
    // No target observations: compare against the prior mean.
    incumbent_ = req.incumbent ? scaling_.apply(*req.incumbent) : 0.0;
  }

  std::vector<Scored> score(const Matrix& encoded) const {
    const auto preds = model_.predict_standardized(with_context(encoded, req_.context));
    std::vector<Scored> out(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      out[i].encoded = encoded.row(static_cast<Eigen::Index>(i)).transpose();
      out[i].pred = preds[i];
      out[i].ei = expected_improvement(preds[i], incumbent_, req_.config.variance);
    }
    return out;
  }

  const Standardization& scaling() const { return scaling_; }

 private:
  const Surrogate& model_;
  const ProposalRequest& req_;
  Standardization scaling_;
  double incumbent_ = 0.0;
};

Suggestion to_suggestion(const SearchSpace& space, const Scored& s, const Standardization& scaling) {
  Suggestion out;
  out.configuration = space.decode(s.encoded);
  out.encoded = s.encoded;
  out.acquisition_value = s.ei * scaling.scale;
  out.predicted = scaling.invert(s.pred);
  return out;
}

Matrix stack_rows(const std::vector<Vector>& rows, Eigen::Index dim) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

// Coordinate-wise pattern search over the continuous dimensions.
Scored refine(const Scorer& scorer, const SearchSpace& space, Scored start, const AcquisitionConfig& cfg) {
  std::vector<Eigen::Index> cont;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!space[i].is_discrete()) cont.push_back(static_cast<Eigen::Index>(i));
  }
  if (cont.empty()) return start;
  double step = cfg.refine_initial_step;
  for (int it = 0; it < cfg.refine_steps; ++it) {
    std::vector<Vector> trials;
    for (Eigen::Index d : cont) {
      for (double sign : {-1.0, 1.0}) {
        Vector x = start.encoded;
        x(d) = std::clamp(x(d) + sign * step, 0.0, 1.0);
        if (x(d) != start.encoded(d)) trials.push_back(std::move(x));
      }
    }
    bool moved = false;
    if (!trials.empty()) {
      for (auto& s : scorer.score(stack_rows(trials, start.encoded.size()))) {
        if (better(s, start)) {
          start = std::move(s);
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return start;
}

}  // namespace

Suggestion random_suggestion(const ProposalRequest& request) {
  require(request.space != nullptr, "propose_next: no search space");
  const SearchSpace& space = *request.space;
  std::mt19937_64 rng(request.seed);
  Suggestion out;
  out.random = true;
  if (!request.candidates.empty()) {
    std::vector<std::size_t> allowed;
    for (std::size_t i = 0; i < request.candidates.size(); ++i) {
      if (!request.exclude.count(canonical_key(space.encode(request.candidates[i])))) allowed.push_back(i);
    }
    if (allowed.empty()) throw ConfigError("propose_next: every candidate has been evaluated");
    std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
    out.configuration = request.candidates[allowed[pick(rng)]];
    out.encoded = space.encode(out.configuration);
    return out;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector u(static_cast<Eigen::Index>(space.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = unit(rng);
  out.configuration = space.decode(u);
  out.encoded = space.encode(out.configuration);
  return out;
}

Suggestion propose_next(const Surrogate* surrogate, const ProposalRequest& request) {
  require(request.space != nullptr, "propose_next: no search space");
  if (surrogate == nullptr) return random_suggestion(request);
  const SearchSpace& space = *request.space;
  const auto& cfg = request.config;
  const auto dim = static_cast<Eigen::Index>(space.size());
  Scorer scorer(*surrogate, request);

  // Candidate pool.
  bool finite_pool = false;
  Matrix pool;
  if (!request.candidates.empty()) {
    pool = space.encode_all(request.candidates);
    finite_pool = true;
  } else if (space.all_discrete() && space.cardinality() <= static_cast<std::size_t>(cfg.num_candidates)) {
    pool = space.encode_all(space.enumerate());
    finite_pool = true;
  } else {
    pool = scrambled_sobol(static_cast<std::size_t>(cfg.num_candidates), space.size(), request.seed);
    for (Eigen::Index r = 0; r < pool.rows(); ++r) pool.row(r) = space.snap(pool.row(r).transpose()).transpose();
  }
  if (finite_pool && !request.exclude.empty()) {
    std::vector<Vector> kept;
    for (Eigen::Index r = 0; r < pool.rows(); ++r) {
      Vector x = pool.row(r).transpose();
      if (!request.exclude.count(canonical_key(x))) kept.push_back(std::move(x));
    }
    if (kept.empty()) throw ConfigError("propose_next: every candidate has been evaluated");
    pool = stack_rows(kept, dim);
  }

  auto scored = scorer.score(pool);
  std::sort(scored.begin(), scored.end(), better);
  if (finite_pool) return to_suggestion(space, scored.front(), scorer.scaling());

  Scored best = scored.front();
  const std::size_t n_refine = std::min(scored.size(), static_cast<std::size_t>(std::max(cfg.num_refine, 0)));
  for (std::size_t i = 0; i < n_refine; ++i) {
    Scored r = refine(scorer, space, scored[i], cfg);
    if (better(r, best)) best = std::move(r);
  }
  return to_suggestion(space, best, scorer.scaling());
}

}  // namespace ablr
