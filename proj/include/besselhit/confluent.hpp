#pragma once

#include <cmath>
#include <complex>

#include "besselhit/errors.hpp"
#include "besselhit/numerics/quadrature.hpp"
#include "besselhit/numerics/special.hpp"
#include "besselhit/transforms.hpp"

namespace besselhit {

// Confluent hypergeometric functions used as an independent route to the
// gamma expectations:
//   E[(1 + 2 beta gamma_alpha)^(-p)] = (2 beta)^(-alpha) U(alpha, alpha+1-p, 1/(2 beta)).
// With t = 2 beta x the expectation integral becomes the integral
// representation of U, so the identity is exact; the oracle value comes from
// the Kummer series, which shares no code with the quadrature.

enum class UMethod { automatic, integral, series };

/// Distance below which a real second parameter counts as an integer for
/// the Kummer connection formula.
inline constexpr double kNearIntegerTolerance = 1e-6;

/// Kummer's M(a, b, z) = sum_k (a)_k / (b)_k z^k / k!.
inline Complex kummer_m(Complex a, Complex b, Complex z) {
  if (b.imag() == 0.0 && b.real() <= 0.0 && b.real() == std::floor(b.real())) {
    throw DomainError("kummer_m: b is a non-positive integer");
  }
  Complex term = 1.0;
  Complex sum = 1.0;
  double peak = 1.0;
  for (int k = 0; k < 20000; ++k) {
    term *= (a + static_cast<double>(k)) / (b + static_cast<double>(k)) * z /
            static_cast<double>(k + 1);
    sum += term;
    peak = std::max(peak, std::abs(term));
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > std::abs(a) + std::abs(z)) {
      break;
    }
    if (term == Complex(0.0, 0.0)) break;
  }
  if (peak > 1e12 * std::abs(sum)) {
    throw NumericalError("kummer_m: cancellation in the series");
  }
  return detail::require_finite(sum, "kummer_m");
}

namespace detail {

// Real Kummer series in extended precision.
inline long double kummer_m_real(long double a, long double b, long double z) {
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 0; k < 20000; ++k) {
    term *= (a + k) / (b + k) * z / (k + 1);
    sum += term;
    if (std::fabs(term) <= 1e-21L * std::fabs(sum) && k > std::fabs(a) + z) break;
    if (term == 0.0L) break;
  }
  return sum;
}

inline long double gamma_real(long double x) {
  const long double g = std::tgamma(x);
  if (!std::isfinite(g)) throw NumericalError("tricomi_u: gamma overflow");
  return g;
}

inline bool near_integer(Complex b) {
  return std::abs(b.imag()) < kNearIntegerTolerance &&
         std::abs(b.real() - std::round(b.real())) < kNearIntegerTolerance;
}

// U(a, b, z) from the Kummer connection formula. The two terms cancel
// heavily once z is a few units, so real parameters go through long double.
inline Complex tricomi_u_series(Complex a, Complex b, double z) {
  if (near_integer(b)) {
    throw NearIntegerParameterError(
        "tricomi_u: second parameter within 1e-6 of an integer; the series "
        "route needs the logarithmic case");
  }
  if (a.imag() == 0.0 && b.imag() == 0.0) {
    const long double ar = a.real();
    const long double br = b.real();
    const long double zr = z;
    const long double da = ar - br + 1.0L;
    long double t1 = 0.0L;
    if (!(da <= 0.0L && da == std::floor(da))) {
      t1 = gamma_real(1.0L - br) / gamma_real(da) * kummer_m_real(ar, br, zr);
    }
    long double t2 = 0.0L;
    if (!(ar <= 0.0L && ar == std::floor(ar))) {
      t2 = gamma_real(br - 1.0L) / gamma_real(ar) * std::pow(zr, 1.0L - br) *
           kummer_m_real(da, 2.0L - br, zr);
    }
    return require_finite(Complex(static_cast<double>(t1 + t2), 0.0), "tricomi_u");
  }
  const Complex t1 = gamma_function(1.0 - b) * reciprocal_gamma(a - b + 1.0) *
                     kummer_m(a, b, z);
  const Complex t2 = gamma_function(b - 1.0) * reciprocal_gamma(a) *
                     std::pow(Complex(z, 0.0), 1.0 - b) *
                     kummer_m(a - b + 1.0, 2.0 - b, z);
  return require_finite(t1 + t2, "tricomi_u");
}

// U(a, b, z) = (1 / Gamma(a)) int_0^inf e^(-z t) t^(a-1) (1 + t)^(b-a-1) dt
//            = z^(-a) E[(1 + gamma_a / z)^(a+1-b)]   (t = x / z).
inline Complex tricomi_u_integral(Complex a, Complex b, double z,
                                  const QuadratureConfig& cfg) {
  if (!(a.real() > 0.0)) {
    throw DomainError("tricomi_u: integral route requires re(a) > 0");
  }
  const Complex log_value =
      -a * std::log(z) + log_gamma_expectation(a, 0.5 / z, a + 1.0 - b, cfg);
  return require_finite(std::exp(log_value), "tricomi_u");
}

}  // namespace detail

/// Tricomi's confluent hypergeometric function U(a, b, z), z > 0.
///
/// automatic uses the integral representation when re(a) > 0 and the Kummer
/// connection formula otherwise.
inline Complex tricomi_u(Complex a, Complex b, double z,
                         UMethod method = UMethod::automatic,
                         const QuadratureConfig& cfg = {}) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw DomainError("tricomi_u: requires z > 0");
  }
  switch (method) {
    case UMethod::integral:
      return detail::tricomi_u_integral(a, b, z, cfg);
    case UMethod::series:
      return detail::tricomi_u_series(a, b, z);
    case UMethod::automatic:
      break;
  }
  if (a.real() > 0.0) return detail::tricomi_u_integral(a, b, z, cfg);
  return detail::tricomi_u_series(a, b, z);
}

struct TricomiDual {
  Complex integral;
  Complex series;

  double relative_gap() const {
    return std::abs(integral - series) / std::abs(integral);
  }
};

/// Both routes to U(a, b, z); requires re(a) > 0 and b not near an integer.
inline TricomiDual tricomi_u_dual(Complex a, Complex b, double z,
                                  const QuadratureConfig& cfg = {}) {
  return {tricomi_u(a, b, z, UMethod::integral, cfg),
          tricomi_u(a, b, z, UMethod::series, cfg)};
}

/// E[(1 + 2 beta gamma_alpha)^(-p)] through the Kummer series for U.
/// Throws NearIntegerParameterError when alpha + 1 - p is within 1e-6 of an
/// integer; callers may perturb p by 1e-6 and retry.
inline double gamma_expectation_via_u(double alpha, double beta, double p,
                                      const QuadratureConfig& /*cfg*/ = {}) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw DomainError("gamma_expectation_via_u: requires alpha > 0, beta > 0");
  }
  const double z = 0.5 / beta;
  const Complex u = tricomi_u(alpha, alpha + 1.0 - p, z, UMethod::series);
  return detail::require_finite(std::pow(2.0 * beta, -alpha) * u.real(),
                                "gamma_expectation_via_u");
}

/// Whittaker W_{kappa,mu}(z) = e^(-z/2) z^(mu+1/2) U(mu - kappa + 1/2, 1 + 2mu, z).
inline double whittaker_w(double kappa, double mu, double z,
                          UMethod method = UMethod::automatic,
                          const QuadratureConfig& cfg = {}) {
  if (!(z > 0.0)) throw DomainError("whittaker_w: requires z > 0");
  const Complex u = tricomi_u(mu - kappa + 0.5, 1.0 + 2.0 * mu, z, method, cfg);
  return detail::require_finite(std::exp(-0.5 * z) * std::pow(z, mu + 0.5) * u.real(),
                                "whittaker_w");
}

}  // namespace besselhit
