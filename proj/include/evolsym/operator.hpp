#pragma once

// Constant-coefficient matrix differential operators G(d_1, ..., d_n) and their symbols.

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "evolsym/errors.hpp"
#include "evolsym/polynomial.hpp"
#include "evolsym/rational.hpp"

namespace evolsym {

using ComplexMatrix = Eigen::MatrixXcd;

/// Largest system size accepted by the exact characteristic polynomial.
inline constexpr std::size_t max_char_poly_size = 8;

/// m x m matrix whose entries are polynomials in d_1..d_n with complex coefficients.
class PolyMatrixOperator {
 public:
  PolyMatrixOperator(std::size_t m, std::size_t n) : m_(m), n_(n), entries_(m * m, Polynomial(n)) {
    if (m == 0 || n == 0) throw DimensionError("operator needs m >= 1 and n >= 1");
  }

  PolyMatrixOperator(std::size_t m, std::size_t n, std::vector<Polynomial> entries)
      : m_(m), n_(n), entries_(std::move(entries)) {
    if (m == 0 || n == 0) throw DimensionError("operator needs m >= 1 and n >= 1");
    if (entries_.size() != m * m) throw DimensionError("operator needs m*m entries");
    for (const auto& e : entries_)
      if (e.nvars() != n) throw DimensionError("entry variable count does not match n");
  }

  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }

  const Polynomial& entry(std::size_t row, std::size_t col) const { return entries_.at(row * m_ + col); }
  void set_entry(std::size_t row, std::size_t col, Polynomial p) {
    if (p.nvars() != n_) throw DimensionError("entry variable count does not match n");
    entries_.at(row * m_ + col) = std::move(p);
  }

  /// Maximal order |alpha| over all entries; the zero operator has order 0.
  unsigned order() const noexcept {
    int d = 0;
    for (const auto& e : entries_) d = std::max(d, e.degree());
    return static_cast<unsigned>(d);
  }

  /// G + c * identity (zero-order shift on the diagonal).
  PolyMatrixOperator shifted(complex c) const {
    PolyMatrixOperator r = *this;
    for (std::size_t i = 0; i < m_; ++i) r.entries_[i * m_ + i] += Polynomial::constant(n_, c);
    return r;
  }

  /// Spatial axis relabeling: axis j becomes axis perm[j].
  PolyMatrixOperator permuted_axes(std::span<const std::size_t> perm) const {
    if (perm.size() != n_) throw DimensionError("permutation length does not match n");
    PolyMatrixOperator r = *this;
    for (auto& e : r.entries_) e = e.permuted(perm);
    return r;
  }

  friend PolyMatrixOperator operator+(const PolyMatrixOperator& a, const PolyMatrixOperator& b) {
    a.check_compatible(b);
    PolyMatrixOperator r = a;
    for (std::size_t k = 0; k < r.entries_.size(); ++k) r.entries_[k] += b.entries_[k];
    return r;
  }

  /// Operator composition (matrix product with polynomial entries).
  friend PolyMatrixOperator operator*(const PolyMatrixOperator& a, const PolyMatrixOperator& b) {
    a.check_compatible(b);
    PolyMatrixOperator r(a.m_, a.n_);
    for (std::size_t i = 0; i < a.m_; ++i)
      for (std::size_t j = 0; j < a.m_; ++j) {
        Polynomial s(a.n_);
        for (std::size_t k = 0; k < a.m_; ++k) {
          const auto& x = a.entry(i, k);
          const auto& y = b.entry(k, j);
          if (!x.is_zero() && !y.is_zero()) s += x * y;
        }
        r.entries_[i * a.m_ + j] = std::move(s);
      }
    return r;
  }

  friend bool operator==(const PolyMatrixOperator&, const PolyMatrixOperator&) = default;

 private:
  void check_compatible(const PolyMatrixOperator& o) const {
    if (o.m_ != m_ || o.n_ != n_) throw DimensionError("operators of different shapes");
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<Polynomial> entries_;
};

/// A(xi) = G(i xi_1, ..., i xi_n).
inline ComplexMatrix symbol_at(const PolyMatrixOperator& g, std::span<const double> xi) {
  if (xi.size() != g.n())
    throw DimensionError("xi has " + std::to_string(xi.size()) + " components, operator has n = " +
                         std::to_string(g.n()));
  std::vector<complex> z(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) z[j] = complex(0.0, xi[j]);
  ComplexMatrix a(g.m(), g.m());
  for (std::size_t r = 0; r < g.m(); ++r)
    for (std::size_t c = 0; c < g.m(); ++c) a(r, c) = g.entry(r, c).evaluate(z);
  return a;
}

namespace detail {

// Determinant of a square polynomial matrix by Laplace expansion along rows,
// memoized over column subsets: 2^m minors instead of m! products.
inline Polynomial polynomial_determinant(const std::vector<Polynomial>& mat, std::size_t m, std::size_t nvars) {
  const std::size_t full = std::size_t{1} << m;
  std::vector<Polynomial> minor(full, Polynomial(nvars));
  minor[0] = Polynomial::constant(nvars, 1.0);
  for (std::size_t mask = 1; mask < full; ++mask) {
    const std::size_t k = static_cast<std::size_t>(std::popcount(mask));
    const std::size_t row = k - 1;
    Polynomial acc(nvars);
    std::size_t pos = 0;
    for (std::size_t c = 0; c < m; ++c) {
      if (!(mask & (std::size_t{1} << c))) continue;
      const Polynomial& e = mat[row * m + c];
      const Polynomial& sub = minor[mask & ~(std::size_t{1} << c)];
      if (!e.is_zero() && !sub.is_zero()) {
        Polynomial prod = e * sub;
        if ((row + pos) % 2 == 0)
          acc += prod;
        else
          acc -= prod;
      }
      ++pos;
    }
    minor[mask] = std::move(acc);
  }
  return minor[full - 1];
}

}  // namespace detail

/// Coefficients of P(lambda, zeta) = det(lambda 1 - G(zeta)) = sum_k Q_k(zeta) lambda^k.
///
/// Returns the m + 1 polynomials Q_0, ..., Q_m in zeta; Q_m is the constant 1.
inline std::vector<Polynomial> char_poly_in_lambda(const PolyMatrixOperator& g) {
  const std::size_t m = g.m(), n = g.n();
  if (m > max_char_poly_size)
    throw SizeCapError("characteristic polynomial limited to m <= " + std::to_string(max_char_poly_size) +
                       ", got m = " + std::to_string(m));
  std::vector<Polynomial> mat;
  mat.reserve(m * m);
  const Polynomial lambda = Polynomial::variable(n + 1, 0);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) {
      Polynomial e = -g.entry(r, c).with_leading_variables(1);
      if (r == c) e += lambda;
      mat.push_back(std::move(e));
    }
  std::vector<Polynomial> q = detail::polynomial_determinant(mat, m, n + 1).coefficients_in_first_variable();
  q.resize(m + 1, Polynomial(n));
  return q;
}

/// Degree of P as a polynomial in 1 + n variables: max_k (k + deg Q_k).
inline int total_degree(std::span<const Polynomial> q) {
  int d = -1;
  for (std::size_t k = 0; k < q.size(); ++k)
    if (!q[k].is_zero()) d = std::max(d, static_cast<int>(k) + q[k].degree());
  return d;
}

/// Reduced order p0 = max_{k < m} deg Q_k / (m - k) for monic P (Q_m constant).
inline Rational reduced_order(std::span<const Polynomial> q) {
  if (q.empty()) throw DimensionError("empty coefficient list");
  const std::size_t m = q.size() - 1;
  if (q[m].degree() != 0) throw PreconditionError("reduced order needs a constant, nonzero leading coefficient Q_m");
  Rational best(0);
  for (std::size_t k = 0; k < m; ++k) {
    if (q[k].is_zero()) continue;
    const Rational r(q[k].degree(), static_cast<std::int64_t>(m - k));
    if (r > best) best = r;
  }
  return best;
}

/// Companion matrix of sum_k Q_k(i xi) lambda^k at a single frequency.
inline ComplexMatrix companion_symbol(std::span<const Polynomial> q, std::span<const double> xi) {
  if (q.size() < 2) throw DimensionError("companion reduction needs Q_0..Q_m with m >= 1");
  const std::size_t m = q.size() - 1;
  std::vector<complex> z(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) z[j] = complex(0.0, xi[j]);
  const complex lead = q[m].evaluate(z);
  double scale = 1.0;
  for (double x : xi) scale = std::max(scale, std::abs(x));
  const double cut = Polynomial::drop_tolerance * q[m].max_abs_coeff() * std::pow(scale, std::max(0, q[m].degree()));
  if (q[m].is_zero() || std::abs(lead) <= cut)
    throw DegenerateLeadingCoefficient("leading coefficient Q_m(i xi) vanishes at the requested xi");
  ComplexMatrix c = ComplexMatrix::Zero(m, m);
  for (std::size_t r = 0; r + 1 < m; ++r) c(r, r + 1) = 1.0;
  for (std::size_t k = 0; k < m; ++k) c(m - 1, k) = -q[k].evaluate(z) / lead;
  return c;
}

/// First-order system [[0,1,...],[...],[-Q_0/Q_m, ..., -Q_{m-1}/Q_m]] for a constant Q_m.
inline PolyMatrixOperator companion_operator(std::span<const Polynomial> q) {
  if (q.size() < 2) throw DimensionError("companion reduction needs Q_0..Q_m with m >= 1");
  const std::size_t m = q.size() - 1, n = q[0].nvars();
  if (q[m].degree() != 0)
    throw DegenerateLeadingCoefficient(
        "companion operator needs a constant nonzero Q_m; use companion_symbol for rational symbols");
  const complex lead = q[m].terms().front().coeff;
  PolyMatrixOperator g(m, n);
  for (std::size_t r = 0; r + 1 < m; ++r) g.set_entry(r, r + 1, Polynomial::constant(n, 1.0));
  for (std::size_t k = 0; k < m; ++k) g.set_entry(m - 1, k, q[k] * (-1.0 / lead));
  return g;
}

// ---------------------------------------------------------------------------
// Operator-description documents
//
//   {"m": 1, "n": 1, "entries": [{"row": 0, "col": 0,
//                                 "terms": [{"coeff": [0, 1], "alpha": [2]}]}]}
//
// or, for a scalar equation sum_k Q_k(d) d_t^k u = 0 with constant Q_m,
//
//   {"n": 1, "Q": [{"terms": [...]}, ...]}   (Q[k] holds Q_k)
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t require_index(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0)
    throw ParseError(std::string("field \"") + key + "\" must be a non-negative integer");
  return j.at(key).get<std::size_t>();
}

inline Polynomial parse_terms(const nlohmann::json& terms, std::size_t n) {
  if (!terms.is_array()) throw ParseError("\"terms\" must be an array");
  std::vector<Term> out;
  std::vector<MultiIndex> seen;
  for (const auto& t : terms) {
    if (!t.is_object() || !t.contains("coeff") || !t.contains("alpha")) throw ParseError("term needs coeff and alpha");
    const auto& c = t.at("coeff");
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
      throw ParseError("coeff must be [re, im]");
    const complex coeff(c[0].get<double>(), c[1].get<double>());
    if (!std::isfinite(coeff.real()) || !std::isfinite(coeff.imag())) throw ParseError("non-finite coefficient");
    const auto& a = t.at("alpha");
    if (!a.is_array()) throw ParseError("alpha must be an array");
    if (a.size() != n)
      throw ParseError("alpha of length " + std::to_string(a.size()) + " in an operator with n = " + std::to_string(n));
    MultiIndex alpha(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (!a[j].is_number_integer() || a[j].get<long long>() < 0)
        throw ParseError("alpha entries must be non-negative integers");
      alpha[j] = a[j].get<unsigned>();
    }
    if (std::find(seen.begin(), seen.end(), alpha) != seen.end()) throw ParseError("duplicate alpha within one entry");
    seen.push_back(alpha);
    out.push_back({coeff, std::move(alpha)});
  }
  return Polynomial(n, std::move(out));
}

inline nlohmann::json terms_to_json(const Polynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms()) terms.push_back({{"coeff", {t.coeff.real(), t.coeff.imag()}}, {"alpha", t.alpha.orders}});
  return terms;
}

}  // namespace detail

inline PolyMatrixOperator operator_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("operator document must be a JSON object");
  const std::size_t n = detail::require_index(doc, "n");
  if (n == 0) throw ParseError("n must be positive");

  if (doc.contains("Q")) {
    const auto& qs = doc.at("Q");
    if (!qs.is_array() || qs.size() < 2) throw ParseError("\"Q\" must list Q_0..Q_m with m >= 1");
    std::vector<Polynomial> q;
    for (const auto& e : qs) {
      if (!e.is_object() || !e.contains("terms")) throw ParseError("each Q entry needs \"terms\"");
      q.push_back(detail::parse_terms(e.at("terms"), n));
    }
    if (doc.contains("m") && detail::require_index(doc, "m") != q.size() - 1)
      throw ParseError("\"m\" disagrees with the length of \"Q\"");
    return companion_operator(q);
  }

  const std::size_t m = detail::require_index(doc, "m");
  if (m == 0) throw ParseError("m must be positive");
  PolyMatrixOperator g(m, n);
  if (!doc.contains("entries") || !doc.at("entries").is_array()) throw ParseError("\"entries\" must be an array");
  std::vector<bool> given(m * m, false);
  for (const auto& e : doc.at("entries")) {
    if (!e.is_object()) throw ParseError("entry must be an object");
    const std::size_t r = detail::require_index(e, "row"), c = detail::require_index(e, "col");
    if (r >= m || c >= m) throw ParseError("entry index out of range");
    if (given[r * m + c]) throw ParseError("entry (" + std::to_string(r) + "," + std::to_string(c) + ") given twice");
    given[r * m + c] = true;
    if (!e.contains("terms")) throw ParseError("entry needs \"terms\"");
    g.set_entry(r, c, detail::parse_terms(e.at("terms"), n));
  }
  return g;
}

inline PolyMatrixOperator parse_operator(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return operator_from_json(doc);
}

/// Canonical document: nonzero entries in row-major order, terms in graded lexicographic order.
inline nlohmann::json serialize_operator(const PolyMatrixOperator& g) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t r = 0; r < g.m(); ++r)
    for (std::size_t c = 0; c < g.m(); ++c) {
      const auto& p = g.entry(r, c);
      if (p.is_zero()) continue;
      entries.push_back({{"row", r}, {"col", c}, {"terms", detail::terms_to_json(p)}});
    }
  return {{"m", g.m()}, {"n", g.n()}, {"entries", std::move(entries)}};
}

}  // namespace evolsym
