#pragma once

// Test-only oracles and generators. Nothing here calls into the code paths it checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "evolsym/evolsym.hpp"

namespace evolsym::testing {

using cvec = std::vector<complex>;

inline complex random_complex(NormalStream& rng) {
  const double re = rng.next();
  return {re, rng.next()};
}

inline ComplexMatrix random_matrix(NormalStream& rng, Eigen::Index dim) {
  ComplexMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = random_complex(rng);
  return a;
}

/// Random polynomial in n variables with up to `max_terms` terms of degree <= max_degree.
inline Polynomial random_polynomial(NormalStream& rng, std::size_t n, unsigned max_degree, std::size_t max_terms) {
  std::vector<Term> terms;
  const auto count = static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_terms + 1));
  for (std::size_t k = 0; k < count; ++k) {
    MultiIndex a(n);
    unsigned budget = static_cast<unsigned>(rng.uniform() * (max_degree + 1));
    for (std::size_t j = 0; j < n && budget > 0; ++j) {
      const unsigned take = static_cast<unsigned>(rng.uniform() * (budget + 1));
      a[j] = take;
      budget -= take;
    }
    terms.push_back({random_complex(rng), a});
  }
  return Polynomial(n, std::move(terms));
}

inline PolyMatrixOperator random_operator(NormalStream& rng, std::size_t m, std::size_t n, unsigned max_degree = 2,
                                          std::size_t max_terms = 3) {
  PolyMatrixOperator g(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) g.set_entry(r, c, random_polynomial(rng, n, max_degree, max_terms));
  return g;
}

/// Entries of G evaluated at an arbitrary complex point zeta (no i xi substitution).
inline ComplexMatrix operator_at(const PolyMatrixOperator& g, const cvec& zeta) {
  ComplexMatrix a(g.m(), g.m());
  for (std::size_t r = 0; r < g.m(); ++r)
    for (std::size_t c = 0; c < g.m(); ++c) a(r, c) = g.entry(r, c).evaluate(zeta);
  return a;
}

/// Roots of sum_k c_k z^k (c.back() != 0) by Aberth-Ehrlich iteration followed by Newton polishing.
inline cvec polynomial_roots(cvec c) {
  while (c.size() > 1 && c.back() == complex{}) c.pop_back();
  const std::size_t deg = c.size() - 1;
  if (deg == 0) return {};
  const complex lead = c.back();
  for (auto& v : c) v /= lead;
  auto eval = [&](complex z, complex& dp) {
    complex p = c[deg];
    dp = 0.0;
    for (std::size_t k = deg; k-- > 0;) {
      dp = dp * z + p;
      p = p * z + c[k];
    }
    return p;
  };
  double bound = 0.0;
  for (std::size_t k = 0; k < deg; ++k) bound = std::max(bound, std::abs(c[k]));
  bound = 1.0 + bound;
  cvec z(deg);
  for (std::size_t k = 0; k < deg; ++k)
    z[k] = std::polar(0.5 * bound, 2.0 * M_PI * (static_cast<double>(k) + 0.25) / static_cast<double>(deg));
  for (int it = 0; it < 500; ++it) {
    double move = 0.0;
    for (std::size_t k = 0; k < deg; ++k) {
      complex dp;
      const complex p = eval(z[k], dp);
      if (p == complex{}) continue;
      const complex ratio = p / dp;
      complex s{};
      for (std::size_t j = 0; j < deg; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      const complex w = ratio / (1.0 - ratio * s);
      z[k] -= w;
      move = std::max(move, std::abs(w) / std::max(1.0, std::abs(z[k])));
    }
    if (move < 1e-15) break;
  }
  for (auto& r : z)
    for (int it = 0; it < 3; ++it) {
      complex dp;
      const complex p = eval(r, dp);
      if (dp != complex{}) r -= p / dp;
    }
  return z;
}

/// Bottleneck matching of two equal-size multisets: minimal over permutations of the max distance.
inline double multiset_distance(const cvec& a, cvec b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size() && worst < best; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline double relative_difference(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double scale = std::max(1e-300, b.norm());
  return (a - b).norm() / scale;
}

/// Diagonalizable A = V D V^{-1} with V = 1 + small perturbation (well conditioned).
struct Diagonalizable {
  ComplexMatrix a, v, v_inv;
  Eigen::VectorXcd d;

  ComplexMatrix exp_oracle(double t = 1.0) const {
    Eigen::VectorXcd e(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) e(i) = std::exp(t * d(i));
    return v * e.asDiagonal() * v_inv;
  }
};

inline Diagonalizable random_diagonalizable(NormalStream& rng, Eigen::Index dim, double norm_target) {
  Diagonalizable r;
  const ComplexMatrix p = random_matrix(rng, dim);
  r.v = ComplexMatrix::Identity(dim, dim) + 0.3 * p / p.norm();
  r.v_inv = r.v.inverse();
  r.d.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) r.d(i) = random_complex(rng);
  r.a = r.v * r.d.asDiagonal() * r.v_inv;
  const double s = norm_target / norm2(r.a);
  r.a *= s;
  r.d *= s;
  return r;
}

/// Direct O(N^2) periodic convolution  (K * u)(x) = cell_volume * sum_y K(x - y) u(y).
inline FieldState direct_convolution(const KernelField& k, const FieldState& u) {
  const GridSpec& grid = u.grid;
  FieldState out(grid, u.m);
  const std::size_t n = grid.n(), total = grid.total_points();
  const double vol = grid.cell_volume();
  for (std::size_t px = 0; px < total; ++px) {
    const auto ix = grid.unflatten(px);
    for (std::size_t py = 0; py < total; ++py) {
      const auto iy = grid.unflatten(py);
      std::vector<std::size_t> d(n);
      for (std::size_t a = 0; a < n; ++a)
        d[a] = (ix[a] + grid.points_per_axis[a] - iy[a]) % grid.points_per_axis[a];
      const std::size_t pd = grid.flatten(d);
      for (std::size_t r = 0; r < u.m; ++r)
        for (std::size_t c = 0; c < u.m; ++c) out.at(px, r) += vol * k.at(pd, r, c) * u.at(py, c);
    }
  }
  out.time_label = u.time_label + k.time_label;
  return out;
}

inline double relative_l2(const FieldState& a, const FieldState& b) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    diff += std::norm(a.data[i] - b.data[i]);
    ref += std::norm(b.data[i]);
  }
  return std::sqrt(diff / std::max(ref, 1e-300));
}

}  // namespace evolsym::testing
