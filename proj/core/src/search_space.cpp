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

#include "ablr/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ablr {

Dimension Dimension::continuous(std::string name, double lo, double hi) {
  Dimension d;
  d.name = std::move(name);
  d.kind = Kind::kContinuous;
  d.lo = lo;
  d.hi = hi;
  d.validate();
  return d;
}

Dimension Dimension::integer(std::string name, long lo, long hi) {
  Dimension d;
  d.name = std::move(name);
  d.kind = Kind::kInteger;
  d.lo = static_cast<double>(lo);
  d.hi = static_cast<double>(hi);
  d.validate();
  return d;
}

Dimension Dimension::ordinal(std::string name, std::vector<double> values) {
  Dimension d;
  d.name = std::move(name);
  d.kind = Kind::kOrdinal;
  d.values = std::move(values);
  d.validate();
  return d;
}

std::size_t Dimension::cardinality() const {
  switch (kind) {
    case Kind::kContinuous:
      return 0;
    case Kind::kInteger:
      return static_cast<std::size_t>(hi - lo) + 1;
    case Kind::kOrdinal:
      return values.size();
  }
  return 0;
}

void Dimension::validate() const {
  if (kind == Kind::kOrdinal) {
    if (values.empty()) throw ConfigError("dimension '" + name + "': ordinal set is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) throw ConfigError("dimension '" + name + "': non-finite value");
      if (i > 0 && !(values[i] > values[i - 1])) {
        throw ConfigError("dimension '" + name + "': ordinal values must be strictly increasing");
      }
    }
    return;
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ConfigError("dimension '" + name + "': requires lo < hi");
  }
  if (kind == Kind::kInteger && (lo != std::floor(lo) || hi != std::floor(hi))) {
    throw ConfigError("dimension '" + name + "': integer bounds must be whole numbers");
  }
}

SearchSpace::SearchSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ConfigError("search space has no dimensions");
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    dims_[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (dims_[j].name == dims_[i].name) {
        throw ConfigError("search space: duplicate dimension name '" + dims_[i].name + "'");
      }
    }
  }
}

std::vector<std::string> SearchSpace::names() const {
  std::vector<std::string> out;
  for (const auto& d : dims_) out.push_back(d.name);
  return out;
}

bool SearchSpace::all_discrete() const {
  return std::all_of(dims_.begin(), dims_.end(), [](const Dimension& d) { return d.is_discrete(); });
}

std::size_t SearchSpace::cardinality() const {
  std::size_t total = 1;
  for (const auto& d : dims_) {
    const std::size_t c = d.cardinality();
    if (c == 0) return 0;
    if (total > std::numeric_limits<std::size_t>::max() / c) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= c;
  }
  return total;
}

Vector SearchSpace::encode(const Configuration& config) const {
  check(config);
  Vector u(static_cast<Eigen::Index>(dims_.size()));
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    const auto k = static_cast<Eigen::Index>(i);
    if (d.kind == Dimension::Kind::kOrdinal) {
      const auto it = std::lower_bound(d.values.begin(), d.values.end(), config[i]);
      const double idx = static_cast<double>(it - d.values.begin());
      u(k) = d.values.size() > 1 ? idx / static_cast<double>(d.values.size() - 1) : 0.0;
    } else {
      u(k) = (config[i] - d.lo) / (d.hi - d.lo);
    }
  }
  return u;
}

Matrix SearchSpace::encode_all(const std::vector<Configuration>& configs) const {
  Matrix out(static_cast<Eigen::Index>(configs.size()), static_cast<Eigen::Index>(dims_.size()));
  for (std::size_t r = 0; r < configs.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = encode(configs[r]).transpose();
  }
  return out;
}

Configuration SearchSpace::decode(const Vector& encoded) const {
  if (encoded.size() != static_cast<Eigen::Index>(dims_.size())) {
    throw ShapeError("decode: encoded vector has " + std::to_string(encoded.size()) +
                     " entries, space has " + std::to_string(dims_.size()) + " dimensions");
  }
  Configuration c(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    const double u = std::clamp(encoded(static_cast<Eigen::Index>(i)), 0.0, 1.0);
    switch (d.kind) {
      case Dimension::Kind::kContinuous:
        c[i] = u == 1.0 ? d.hi : d.lo + u * (d.hi - d.lo);
        break;
      case Dimension::Kind::kInteger:
        c[i] = d.lo + std::round(u * (d.hi - d.lo));
        break;
      case Dimension::Kind::kOrdinal: {
        const auto n = d.values.size();
        const auto idx = static_cast<std::size_t>(std::round(u * static_cast<double>(n - 1)));
        c[i] = d.values[std::min(idx, n - 1)];
        break;
      }
    }
  }
  return c;
}

Vector SearchSpace::snap(const Vector& encoded) const { return encode(decode(encoded)); }

bool SearchSpace::contains(const Configuration& config) const {
  try {
    check(config);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

void SearchSpace::check(const Configuration& config) const {
  if (config.size() != dims_.size()) {
    throw ConfigError("configuration has " + std::to_string(config.size()) + " values, space has " +
                      std::to_string(dims_.size()) + " dimensions");
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    const double v = config[i];
    bool ok = std::isfinite(v);
    if (ok) {
      switch (d.kind) {
        case Dimension::Kind::kContinuous:
          ok = v >= d.lo && v <= d.hi;
          break;
        case Dimension::Kind::kInteger:
          ok = v >= d.lo && v <= d.hi && v == std::floor(v);
          break;
        case Dimension::Kind::kOrdinal:
          ok = std::binary_search(d.values.begin(), d.values.end(), v);
          break;
      }
    }
    if (!ok) {
      throw ConfigError("value " + std::to_string(v) + " is outside dimension '" + d.name + "'");
    }
  }
}

std::vector<Configuration> SearchSpace::enumerate() const {
  if (!all_discrete()) throw ConfigError("enumerate: space has continuous dimensions");
  std::vector<Configuration> out;
  std::vector<std::size_t> idx(dims_.size(), 0);
  auto value = [&](std::size_t i) {
    const auto& d = dims_[i];
    return d.kind == Dimension::Kind::kOrdinal ? d.values[idx[i]] : d.lo + static_cast<double>(idx[i]);
  };
  while (true) {
    Configuration c(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) c[i] = value(i);
    out.push_back(std::move(c));
    std::size_t i = dims_.size();
    while (i-- > 0) {
      if (++idx[i] < dims_[i].cardinality()) break;
      idx[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

nlohmann::json SearchSpace::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& d : dims_) {
    nlohmann::json j{{"name", d.name}};
    switch (d.kind) {
      case Dimension::Kind::kContinuous:
        j["type"] = "continuous";
        j["lo"] = d.lo;
        j["hi"] = d.hi;
        break;
      case Dimension::Kind::kInteger:
        j["type"] = "integer";
        j["lo"] = static_cast<long>(d.lo);
        j["hi"] = static_cast<long>(d.hi);
        break;
      case Dimension::Kind::kOrdinal:
        j["type"] = "ordinal";
        j["values"] = d.values;
        break;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

SearchSpace SearchSpace::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("search space must be an array of dimensions");
  std::vector<Dimension> dims;
  for (const auto& e : j) {
    const auto name = e.at("name").get<std::string>();
    const auto type = e.at("type").get<std::string>();
    if (type == "continuous") {
      dims.push_back(Dimension::continuous(name, e.at("lo").get<double>(), e.at("hi").get<double>()));
    } else if (type == "integer") {
      dims.push_back(Dimension::integer(name, e.at("lo").get<long>(), e.at("hi").get<long>()));
    } else if (type == "ordinal") {
      dims.push_back(Dimension::ordinal(name, e.at("values").get<std::vector<double>>()));
    } else {
      throw ConfigError("dimension '" + name + "': unknown type '" + type + "'");
    }
  }
  return SearchSpace(std::move(dims));
}

}  // namespace ablr
