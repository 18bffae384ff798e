#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evolsym {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed operator document or field file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Sizes of operands do not agree (alpha length vs n, xi length vs n, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented size limit was exceeded.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

/// Companion reduction requested where the leading coefficient vanishes.
class DegenerateLeadingCoefficient : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine did not converge.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Floating-point overflow while exponentiating.
class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, double norm, std::vector<double> xi = {})
      : Error(what), norm_(norm), xi_(std::move(xi)) {}

  double norm() const noexcept { return norm_; }
  /// The offending frequency, empty when not raised from a grid sweep.
  const std::vector<double>& xi() const noexcept { return xi_; }

 private:
  double norm_;
  std::vector<double> xi_;
};

/// Caller violated a documented precondition (unforced ill-posed solve, non-hyperbolic cone, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace evolsym
