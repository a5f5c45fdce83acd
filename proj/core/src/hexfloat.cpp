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

#include "ablr/hexfloat.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace ablr {

std::string to_hexfloat(double value) {
  char buf[64];
  const bool neg = std::signbit(value);
  auto res = std::to_chars(buf, buf + sizeof(buf), neg ? -value : value, std::chars_format::hex);
  if (res.ec != std::errc()) throw NumericError("to_hexfloat: conversion failed");
  std::string out = neg ? "-0x" : "0x";
  out.append(buf, res.ptr);
  return out;
}

double from_hexfloat(std::string_view text) {
  bool neg = false;
  std::string_view s = text;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  double value = 0.0;
  std::from_chars_result res{};
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    res = std::from_chars(s.data(), s.data() + s.size(), value, std::chars_format::hex);
  } else {
    res = std::from_chars(s.data(), s.data() + s.size(), value);
  }
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw NumericError("from_hexfloat: cannot parse '" + std::string(text) + "'");
  }
  return neg ? -value : value;
}

nlohmann::json vector_to_json(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(to_hexfloat(v(i)));
  return arr;
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("expected an array of hexfloat strings");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    v(static_cast<Eigen::Index>(i)) =
        e.is_string() ? from_hexfloat(e.get<std::string>()) : e.get<double>();
  }
  return v;
}

}  // namespace ablr
