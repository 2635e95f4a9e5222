#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "besselhit/errors.hpp"

namespace besselhit {

namespace detail {

// Lanczos approximation, g = 7, nine coefficients.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Valid for re(z) >= 0.5.
inline Complex lanczos_log_gamma(Complex z) {
  z -= 1.0;
  Complex series = kLanczosCoefficients[0];
  for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i) {
    series += kLanczosCoefficients[i] / (z + static_cast<double>(i));
  }
  const Complex t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(series);
}

}  // namespace detail

/// Principal branch of log Gamma(z) for re(z) > 0.
///
/// Arguments with re(z) < 0.5 are lifted by one step of the recurrence
/// log Gamma(z) = log Gamma(z + 1) - log z, so no reflection is involved.
inline Complex log_gamma(Complex z) {
  if (!(z.real() > 0.0) || !detail::is_finite(z)) {
    throw DomainError("log_gamma: requires re(z) > 0");
  }
  if (z.real() < 0.5) {
    return detail::lanczos_log_gamma(z + 1.0) - std::log(z);
  }
  return detail::lanczos_log_gamma(z);
}

inline double log_gamma(double x) { return log_gamma(Complex(x, 0.0)).real(); }

/// 1 / Gamma(z) on the whole complex plane (zero at the poles of Gamma).
///
/// Uses reflection for re(z) < 0.5; this is only needed by the
/// hypergeometric series route, which evaluates Gamma at shifted arguments.
inline Complex reciprocal_gamma(Complex z) {
  if (z.real() >= 0.5) {
    return std::exp(-log_gamma(z));
  }
  if (z.imag() == 0.0 && z.real() == std::floor(z.real())) {
    return 0.0;
  }
  // 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
  const Complex value =
      std::sin(std::numbers::pi * z) * std::exp(log_gamma(1.0 - z)) / std::numbers::pi;
  return detail::require_finite(value, "reciprocal_gamma");
}

/// Gamma(z) for any z that is not a pole.
inline Complex gamma_function(Complex z) {
  const Complex r = reciprocal_gamma(z);
  if (std::abs(r) == 0.0) {
    throw DomainError("gamma_function: pole at a non-positive integer");
  }
  return detail::require_finite(1.0 / r, "gamma_function");
}

namespace detail {

inline constexpr int kIncompleteGammaMaxIterations = 10000;

// exp(a log x - x - log Gamma(a)), the common prefactor of P and Q.
inline double incomplete_gamma_prefactor(double a, double x) {
  return std::exp(a * std::log(x) - x - log_gamma(a));
}

// P(a, x) by its power series; converges for all x but is used for x < a + 1.
inline double gamma_p_series(double a, double x) {
  if (x == 0.0) return 0.0;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kIncompleteGammaMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * incomplete_gamma_prefactor(a, x);
}

// Q(a, x) by the Legendre continued fraction (modified Lentz).
inline double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kIncompleteGammaMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return incomplete_gamma_prefactor(a, x) * h;
}

inline void check_incomplete_gamma_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("incomplete gamma: requires a > 0");
  }
  if (!(x >= 0.0)) {
    throw DomainError("incomplete gamma: requires x >= 0");
  }
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
inline double regularized_incomplete_gamma_lower(double a, double x) {
  detail::check_incomplete_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double p = x < a + 1.0 ? detail::gamma_p_series(a, x)
                               : 1.0 - detail::gamma_q_fraction(a, x);
  return std::clamp(p, 0.0, 1.0);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double regularized_incomplete_gamma_upper(double a, double x) {
  detail::check_incomplete_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double q = x < a + 1.0 ? 1.0 - detail::gamma_p_series(a, x)
                               : detail::gamma_q_fraction(a, x);
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace besselhit
