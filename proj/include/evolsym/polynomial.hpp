#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "evolsym/errors.hpp"

namespace evolsym {

using complex = std::complex<double>;

/// Exponent vector alpha of a monomial d_1^{alpha_1} ... d_n^{alpha_n}.
struct MultiIndex {
  std::vector<unsigned> orders;

  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : orders(n, 0u) {}
  explicit MultiIndex(std::vector<unsigned> a) : orders(std::move(a)) {}

  std::size_t size() const noexcept { return orders.size(); }
  unsigned operator[](std::size_t j) const { return orders[j]; }
  unsigned& operator[](std::size_t j) { return orders[j]; }

  /// |alpha|
  unsigned total() const noexcept { return std::accumulate(orders.begin(), orders.end(), 0u); }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] + b[j];
    return r;
  }
};

/// Graded lexicographic order: total degree first, then lexicographic on the exponents.
struct GradedLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const unsigned ta = a.total(), tb = b.total();
    if (ta != tb) return ta < tb;
    return a.orders < b.orders;
  }
};

struct Term {
  complex coeff;
  MultiIndex alpha;
};

/// Polynomial in a fixed number of complex variables with complex floating coefficients.
///
/// Always kept canonical: terms sorted in graded lexicographic order, no repeated
/// exponent, and no coefficient at or below `drop_tolerance` times the largest
/// coefficient magnitude.
class Polynomial {
 public:
  static constexpr double drop_tolerance = 1e-13;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  /// Builds from arbitrary terms; repeated exponents are summed.
  Polynomial(std::size_t nvars, std::vector<Term> terms) : nvars_(nvars), terms_(std::move(terms)) {
    for (const auto& t : terms_)
      if (t.alpha.size() != nvars_)
        throw DimensionError("multi-index length " + std::to_string(t.alpha.size()) +
                             " does not match variable count " + std::to_string(nvars_));
    canonicalize();
  }

  static Polynomial constant(std::size_t nvars, complex c) {
    return Polynomial(nvars, {Term{c, MultiIndex(nvars)}});
  }

  static Polynomial variable(std::size_t nvars, std::size_t j, complex c = 1.0) {
    MultiIndex a(nvars);
    a[j] = 1;
    return Polynomial(nvars, {Term{c, a}});
  }

  std::size_t nvars() const noexcept { return nvars_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const noexcept {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.alpha.total()));
    return d;
  }

  /// Largest exponent of variable j appearing in any term.
  unsigned max_order_in(std::size_t j) const noexcept {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, t.alpha[j]);
    return d;
  }

  double max_abs_coeff() const noexcept {
    double mx = 0.0;
    for (const auto& t : terms_) mx = std::max(mx, std::abs(t.coeff));
    return mx;
  }

  /// Coefficient of the monomial z^alpha (zero if absent).
  complex coefficient(const MultiIndex& alpha) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), alpha,
                               [](const Term& t, const MultiIndex& a) { return GradedLex{}(t.alpha, a); });
    return (it != terms_.end() && it->alpha == alpha) ? it->coeff : complex{};
  }

  complex evaluate(std::span<const complex> z) const {
    if (z.size() != nvars_)
      throw DimensionError("evaluation point has " + std::to_string(z.size()) + " coordinates, expected " +
                           std::to_string(nvars_));
    std::vector<std::vector<complex>> powers(nvars_);
    for (std::size_t j = 0; j < nvars_; ++j) {
      const unsigned dj = max_order_in(j);
      powers[j].resize(dj + 1);
      powers[j][0] = 1.0;
      for (unsigned p = 1; p <= dj; ++p) powers[j][p] = powers[j][p - 1] * z[j];
    }
    complex sum{};
    for (const auto& t : terms_) {
      complex v = t.coeff;
      for (std::size_t j = 0; j < nvars_; ++j) v *= powers[j][t.alpha[j]];
      sum += v;
    }
    return sum;
  }

  /// Relabels variables: variable j of *this becomes variable perm[j] of the result.
  Polynomial permuted(std::span<const std::size_t> perm) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      MultiIndex a(nvars_);
      for (std::size_t j = 0; j < nvars_; ++j) a[perm[j]] = t.alpha[j];
      out.push_back({t.coeff, a});
    }
    return Polynomial(nvars_, std::move(out));
  }

  /// Prepends `count` new variables (with exponent 0) in front of the existing ones.
  Polynomial with_leading_variables(std::size_t count) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      std::vector<unsigned> a(count, 0u);
      a.insert(a.end(), t.alpha.orders.begin(), t.alpha.orders.end());
      out.push_back({t.coeff, MultiIndex(std::move(a))});
    }
    return Polynomial(nvars_ + count, std::move(out));
  }

  /// Writes *this as sum_k c_k(z_2..z_n) z_1^k and returns [c_0, c_1, ...].
  std::vector<Polynomial> coefficients_in_first_variable() const {
    if (nvars_ == 0) throw DimensionError("polynomial has no variables");
    const unsigned top = max_order_in(0);
    std::vector<std::vector<Term>> parts(top + 1);
    for (const auto& t : terms_) {
      MultiIndex rest(std::vector<unsigned>(t.alpha.orders.begin() + 1, t.alpha.orders.end()));
      parts[t.alpha[0]].push_back({t.coeff, std::move(rest)});
    }
    std::vector<Polynomial> out;
    out.reserve(parts.size());
    for (auto& p : parts) out.emplace_back(nvars_ - 1, std::move(p));
    return out;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_same_arity(o);
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    canonicalize();
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) { return *this += -o; }

  Polynomial& operator*=(complex c) {
    for (auto& t : terms_) t.coeff *= c;
    canonicalize();
    return *this;
  }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, complex c) { return a *= c; }
  friend Polynomial operator*(complex c, Polynomial a) { return a *= c; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_same_arity(b);
    std::vector<Term> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_)
      for (const auto& t : b.terms_) out.push_back({s.coeff * t.coeff, s.alpha + t.alpha});
    return Polynomial(a.nvars_, std::move(out));
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.nvars_ != b.nvars_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (a.terms_[i].alpha != b.terms_[i].alpha || a.terms_[i].coeff != b.terms_[i].coeff) return false;
    return true;
  }

 private:
  void check_same_arity(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw DimensionError("polynomials in different numbers of variables");
  }

  void canonicalize() {
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const Term& a, const Term& b) { return GradedLex{}(a.alpha, b.alpha); });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!merged.empty() && merged.back().alpha == t.alpha)
        merged.back().coeff += t.coeff;
      else
        merged.push_back(std::move(t));
    }
    double mx = 0.0;
    for (const auto& t : merged) mx = std::max(mx, std::abs(t.coeff));
    const double cut = drop_tolerance * mx;
    std::erase_if(merged, [cut](const Term& t) { return t.coeff == complex{} || std::abs(t.coeff) <= cut; });
    terms_ = std::move(merged);
  }

  std::size_t nvars_ = 0;
  std::vector<Term> terms_;
};

}  // namespace evolsym
