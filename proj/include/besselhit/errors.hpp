#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace besselhit {

using Complex = std::complex<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (e.g. b >= c, re(z) <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: something was computed but cannot be trusted.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A finite double cannot represent the result.
class OverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Adaptive quadrature ran out of subdivisions before meeting its target.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, Complex best_estimate,
                  double achieved_error)
      : NumericalError(what + " (estimate " + format(best_estimate) +
                       ", error bound " + std::to_string(achieved_error) + ")"),
        best_estimate_(best_estimate),
        achieved_error_(achieved_error) {}

  Complex best_estimate() const noexcept { return best_estimate_; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  static std::string format(Complex z) {
    return std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
           std::to_string(z.imag()) + "i";
  }

  Complex best_estimate_;
  double achieved_error_;
};

/// Kummer connection formula hit an integer second parameter.
class NearIntegerParameterError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Contour integral was truncated while the transform was still too large.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Density does not integrate to one.
class NormalizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyInputError : public DomainError {
 public:
  using DomainError::DomainError;
};

namespace detail {

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline Complex require_finite(Complex z, const char* what) {
  if (!is_finite(z)) {
    throw OverflowError(std::string(what) + ": result is not representable");
  }
  return z;
}

inline double require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw OverflowError(std::string(what) + ": result is not representable");
  }
  return x;
}

}  // namespace detail
}  // namespace besselhit
