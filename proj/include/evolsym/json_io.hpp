#pragma once

#include <cmath>

#include <nlohmann/json.hpp>

#include "evolsym/rational.hpp"

namespace evolsym {

/// Report schema version written into every JSON report.
inline constexpr int report_schema = 1;

/// JSON has no infinities: non-finite values are written as "inf", "-inf" or "nan".
inline nlohmann::json json_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double real_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return NAN;
  }
  return j.get<double>();
}

inline nlohmann::json json_rational(const Rational& r) {
  return {{"num", r.num}, {"den", r.den}, {"text", r.str()}, {"value", r.value()}};
}

}  // namespace evolsym
