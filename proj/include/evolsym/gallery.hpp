#pragma once

// Built-in operators, each stored as an operator-description document.

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evolsym/errors.hpp"
#include "evolsym/operator.hpp"

namespace evolsym::gallery {

namespace detail {

// Document for the scalar operator c * (d_1^2 + ... + d_n^2).
inline nlohmann::json scaled_laplacian(std::size_t n, double re, double im) {
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<unsigned> alpha(n, 0u);
    alpha[j] = 2;
    terms.push_back({{"coeff", {re, im}}, {"alpha", alpha}});
  }
  return {{"m", 1}, {"n", n}, {"entries", {{{"row", 0}, {"col", 0}, {"terms", terms}}}}};
}

inline double parse_param(std::string_view text, std::string_view name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad parameter '" + std::string(text) + "' for gallery operator " + std::string(name));
  }
}

}  // namespace detail

struct Entry {
  std::string name;
  std::string parameter;  ///< description of the optional ":param" suffix
  std::string description;
};

inline std::vector<Entry> entries() {
  return {
      {"heat", "n (default 1)", "heat generator Laplacian"},
      {"backward-heat", "n (default 1)", "minus Laplacian (ill-posed forward in time)"},
      {"schrodinger", "n (default 1)", "free Schroedinger generator i Laplacian"},
      {"transport", "c (default 1)", "transport c d_x (n = 1)"},
      {"wave", "", "wave equation as the system [[0, 1], [d_x^2, 0]] (n = 1)"},
      {"wave-companion", "n (default 2)",
       "u_tt = Laplacian u in Q-form (Q_2 = 1, Q_1 = 0, Q_0 = -|zeta|^2), reduced to a companion system"},
  };
}

/// Document for "name" or "name:param".
inline nlohmann::json document(std::string_view key) {
  const auto colon = key.find(':');
  const std::string_view name = key.substr(0, colon);
  const std::string_view param = colon == std::string_view::npos ? std::string_view{} : key.substr(colon + 1);
  auto dim = [&](std::size_t fallback) {
    if (param.empty()) return fallback;
    const double v = detail::parse_param(param, name);
    if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) throw ParseError("dimension must be a positive integer");
    return static_cast<std::size_t>(v);
  };

  if (name == "heat") return detail::scaled_laplacian(dim(1), 1.0, 0.0);
  if (name == "backward-heat") return detail::scaled_laplacian(dim(1), -1.0, 0.0);
  if (name == "schrodinger") return detail::scaled_laplacian(dim(1), 0.0, 1.0);
  if (name == "transport") {
    const double c = param.empty() ? 1.0 : detail::parse_param(param, name);
    return {{"m", 1},
            {"n", 1},
            {"entries", {{{"row", 0}, {"col", 0}, {"terms", {{{"coeff", {c, 0.0}}, {"alpha", {1}}}}}}}}};
  }
  if (name == "wave") {
    return {{"m", 2},
            {"n", 1},
            {"entries",
             {{{"row", 0}, {"col", 1}, {"terms", {{{"coeff", {1.0, 0.0}}, {"alpha", {0}}}}}},
              {{"row", 1}, {"col", 0}, {"terms", {{{"coeff", {1.0, 0.0}}, {"alpha", {2}}}}}}}}};
  }
  if (name == "wave-companion") {
    const std::size_t n = dim(2);
    nlohmann::json q0 = detail::scaled_laplacian(n, -1.0, 0.0)["entries"][0]["terms"];
    nlohmann::json one = {{{"coeff", {1.0, 0.0}}, {"alpha", std::vector<unsigned>(n, 0u)}}};
    return {{"n", n}, {"Q", {{{"terms", q0}}, {{"terms", nlohmann::json::array()}}, {{"terms", one}}}}};
  }
  throw ParseError("unknown gallery operator '" + std::string(name) + "'");
}

inline PolyMatrixOperator make(std::string_view key) { return operator_from_json(document(key)); }

}  // namespace evolsym::gallery
