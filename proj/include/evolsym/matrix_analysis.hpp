#pragma once

// Dense complex spectral utilities: eigenvalues, spectral abscissa and radius,
// the matrix exponential, and the Shilov growth bound for exp(tA).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "evolsym/errors.hpp"
#include "evolsym/operator.hpp"

namespace evolsym {

/// Eigenvalues with algebraic multiplicity.
struct Spectrum {
  std::vector<complex> eigenvalues;

  std::size_t size() const noexcept { return eigenvalues.size(); }
};

namespace detail {

inline bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

}  // namespace detail

inline Spectrum eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("eigenvalues of a non-square matrix");
  if (!detail::all_finite(a)) throw NumericalFailure("eigenvalues of a matrix with non-finite entries");
  Spectrum s;
  if (a.rows() == 1) {
    s.eigenvalues = {a(0, 0)};
    return s;
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalFailure("complex Schur iteration did not converge");
  const auto& ev = solver.eigenvalues();
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  return s;
}

inline double spectral_abscissa(const Spectrum& s) {
  if (s.eigenvalues.empty()) return 0.0;
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& l : s.eigenvalues) r = std::max(r, l.real());
  return r;
}

inline double spectral_radius(const Spectrum& s) {
  double r = 0.0;
  for (const auto& l : s.eigenvalues) r = std::max(r, std::abs(l));
  return r;
}

/// max Re sigma(A)
inline double spectral_abscissa(const ComplexMatrix& a) { return spectral_abscissa(eigenvalues(a)); }

/// max |sigma(A)|
inline double spectral_radius(const ComplexMatrix& a) { return spectral_radius(eigenvalues(a)); }

/// Operator 2-norm (largest singular value).
inline double norm2(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

namespace detail {

// Pade scaling-and-squaring (Higham 2005): degree chosen from the 1-norm.
inline constexpr std::array<double, 4> pade_theta = {1.495585217958292e-2, 2.539398330063230e-1,
                                                     9.504178996162932e-1, 2.097847961257068e0};
inline constexpr double pade_theta13 = 5.371920351148152e0;

inline double norm1(const ComplexMatrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

inline ComplexMatrix pade_low(const ComplexMatrix& a, int degree) {
  static const std::vector<double> b3 = {120., 60., 12., 1.};
  static const std::vector<double> b5 = {30240., 15120., 3360., 420., 30., 1.};
  static const std::vector<double> b7 = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
  static const std::vector<double> b9 = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                         2162160.,     110880.,      3960.,        90.,         1.};
  const std::vector<double>& b = degree == 3 ? b3 : degree == 5 ? b5 : degree == 7 ? b7 : b9;
  const Eigen::Index m = a.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(m, m);
  const ComplexMatrix a2 = a * a;
  ComplexMatrix pw = id;
  ComplexMatrix u = b[1] * id;
  ComplexMatrix v = b[0] * id;
  for (int k = 2; k <= degree; k += 2) {
    pw = pw * a2;
    v += b[k] * pw;
    u += b[k + 1] * pw;
  }
  u = a * u;
  return (v - u).partialPivLu().solve(v + u);
}

inline ComplexMatrix pade13(const ComplexMatrix& a) {
  static constexpr double b[] = {64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
                                 129060195264000.,   10559470521600.,    670442572800.,    33522128640.,
                                 1323241920.,        40840800.,          960960.,          16380.,
                                 182.,               1.};
  const Eigen::Index m = a.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(m, m);
  const ComplexMatrix a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  ComplexMatrix u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  u += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  u = a * u;
  ComplexMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// exp(A) by scaling and squaring with diagonal Pade approximants.
///
/// Throws OverflowError (carrying the 2-norm of A) when the result leaves the
/// floating range.
inline ComplexMatrix matrix_exp(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("matrix_exp of a non-square matrix");
  if (!detail::all_finite(a)) throw OverflowError("matrix_exp of a matrix with non-finite entries", norm2(a));
  ComplexMatrix r;
  if (a.rows() == 1) {
    r = ComplexMatrix::Constant(1, 1, std::exp(a(0, 0)));
  } else if (a.isDiagonal(0.0)) {
    r = ComplexMatrix::Zero(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) r(i, i) = std::exp(a(i, i));
  } else {
    const double nrm = detail::norm1(a);
    bool done = false;
    for (int i = 0; i < 4 && !done; ++i)
      if (nrm <= detail::pade_theta[i]) {
        r = detail::pade_low(a, 3 + 2 * i);
        done = true;
      }
    if (!done) {
      const int s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / detail::pade_theta13))));
      r = detail::pade13(a / std::ldexp(1.0, s));
      for (int k = 0; k < s; ++k) r = r * r;
    }
  }
  if (!detail::all_finite(r)) throw OverflowError("matrix exponential overflows", norm2(a));
  return r;
}

/// Shilov bound  e^{t max Re sigma(A)} (1 + sum_{k=1}^{m-1} (2t)^k / k! ||A||^k)  with the operator 2-norm.
///
/// May return +inf when the bound itself overflows.
inline double shilov_bound(const ComplexMatrix& a, double t) {
  if (t < 0.0) throw PreconditionError("shilov_bound needs t >= 0");
  const auto m = a.rows();
  const double growth = std::exp(t * spectral_abscissa(a));
  const double x = 2.0 * t * norm2(a);
  double term = 1.0, sum = 1.0;
  for (Eigen::Index k = 1; k < m; ++k) {
    term *= x / static_cast<double>(k);
    sum += term;
  }
  return growth * sum;
}

}  // namespace evolsym
