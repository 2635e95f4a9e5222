#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "besselhit/errors.hpp"
#include "besselhit/numerics/quadrature.hpp"
#include "besselhit/numerics/special.hpp"

namespace besselhit {

enum class IndexSign { negative, positive };

inline std::string to_string(IndexSign sign) {
  return sign == IndexSign::negative ? "neg" : "pos";
}

/// Bessel process of index -nu or +nu, started at 1.
class BesselSpec {
 public:
  BesselSpec(double nu, IndexSign sign) : nu_(nu), sign_(sign) {
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      throw DomainError("BesselSpec: nu must be positive");
    }
  }

  static BesselSpec negative(double nu) { return {nu, IndexSign::negative}; }
  static BesselSpec positive(double nu) { return {nu, IndexSign::positive}; }

  double nu() const noexcept { return nu_; }
  IndexSign sign() const noexcept { return sign_; }
  /// Signed index, -nu or +nu.
  double index() const noexcept {
    return sign_ == IndexSign::negative ? -nu_ : nu_;
  }
  /// delta = 2 (1 + index).
  double dimension() const noexcept { return 2.0 * (1.0 + index()); }

 private:
  double nu_;
  IndexSign sign_;
};

/// Square-root boundary R_u^2 = (b + u) / c.
class Boundary {
 public:
  /// Requires 0 < b < c.
  Boundary(double b, double c) : b_(b), c_(c) {
    if (!(b > 0.0) || !(b < c) || !std::isfinite(c)) {
      throw DomainError("Boundary: requires 0 < b < c");
    }
  }

  /// The b = c limit, in which the process starts on the boundary and
  /// sigma = 0. Only meant for limit checks.
  static Boundary degenerate(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw DomainError("Boundary::degenerate: requires c > 0");
    }
    return Boundary(c, c, Tag{});
  }

  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  bool is_degenerate() const noexcept { return b_ == c_; }

 private:
  struct Tag {};
  Boundary(double b, double c, Tag) : b_(b), c_(c) {}

  double b_;
  double c_;
};

/// A Mellin evaluation point.
struct TransformQuery {
  Complex s;

  /// True where the transform is a probabilistic statement (real s >= 0).
  bool closed_form_regime() const noexcept {
    return s.imag() == 0.0 && s.real() >= 0.0;
  }
};

namespace detail {

// Stationary point of x^(alpha-1) (1 + 2 beta x)^(-p) e^(-x); its argument is
// the ray along which the integrand oscillates least.
inline double expectation_ray_angle(Complex alpha, double beta, Complex p) {
  if (alpha.imag() == 0.0 && p.imag() == 0.0) return 0.0;
  const double qa = 2.0 * beta;
  const Complex qb = 1.0 + 2.0 * beta * (p - alpha + 1.0);
  const Complex qc = -(alpha - 1.0);
  const Complex disc = std::sqrt(qb * qb - 4.0 * qa * qc);
  const Complex r1 = (-qb + disc) / (2.0 * qa);
  const Complex r2 = (-qb - disc) / (2.0 * qa);
  const Complex root = r1.real() >= r2.real() ? r1 : r2;
  if (root.real() > 0.0) return clamp_ray_angle(std::arg(root));
  return default_ray_angle(alpha);
}

// log of the unnormalised integral
//   int_0^inf (1 + 2 beta x)^(-p) x^(alpha-1) e^(-x) dx.
inline Complex log_expectation_integral(Complex alpha, double beta, Complex p,
                                        const QuadratureConfig& cfg) {
  cfg.validate();
  if (!(alpha.real() > 0.0) || !is_finite(alpha)) {
    throw DomainError("gamma_expectation: requires re(alpha) > 0");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("gamma_expectation: requires beta > 0");
  }
  if (!is_finite(p)) throw DomainError("gamma_expectation: p must be finite");
  const double two_beta = 2.0 * beta;
  auto log_f = [&](Complex x) { return -p * std::log(1.0 + two_beta * x) - x; };
  const double theta = expectation_ray_angle(alpha, beta, p);
  const double log_unit = log_gamma(alpha).real();
  const RayIntegral ray = integrate_power_ray(log_f, Complex(1.0, 0.0), alpha,
                                              theta, cfg, log_unit);
  return ray.value.log();
}

}  // namespace detail

/// log E[(1 + 2 beta gamma_alpha)^(-p)], analytically continued in alpha, p.
inline Complex log_gamma_expectation(Complex alpha, double beta, Complex p,
                                     const QuadratureConfig& cfg = {}) {
  if (p == Complex(0.0, 0.0)) {
    if (!(alpha.real() > 0.0)) {
      throw DomainError("gamma_expectation: requires re(alpha) > 0");
    }
    return 0.0;
  }
  return detail::log_expectation_integral(alpha, beta, p, cfg) - log_gamma(alpha);
}

/// E[(1 + 2 beta gamma_alpha)^(-p)] with gamma_alpha ~ Gamma(alpha, 1):
///   (1 / Gamma(alpha)) int_0^inf (1 + 2 beta x)^(-p) x^(alpha-1) e^(-x) dx.
/// Throws OverflowError when the value is outside the double range.
inline Complex gamma_expectation(Complex alpha, double beta, Complex p,
                                 const QuadratureConfig& cfg = {}) {
  return detail::require_finite(std::exp(log_gamma_expectation(alpha, beta, p, cfg)),
                                "gamma_expectation");
}

/// E[(b + sigma)^(-s)] for the index -nu process started at 1:
///   c^(-s) E[(1 + 2b gamma_{nu+s})^(-s)] / E[(1 + 2c gamma_{nu+s})^(-s)].
/// Holds as a probabilistic identity for real s >= 0; elsewhere in
/// re(nu + s) > 0 it is the analytic continuation.
inline Complex mellin_neg_index(double nu, const Boundary& bnd, Complex s,
                                const QuadratureConfig& cfg = {}) {
  if (!(nu > 0.0)) throw DomainError("mellin_neg_index: requires nu > 0");
  const Complex alpha = nu + s;
  if (!(alpha.real() > 0.0) || !detail::is_finite(s)) {
    throw DomainError("mellin_neg_index: requires re(nu + s) > 0");
  }
  if (s == Complex(0.0, 0.0)) return 1.0;
  const double log_c = std::log(bnd.c());
  if (bnd.is_degenerate()) {
    return detail::require_finite(std::exp(-s * log_c), "mellin_neg_index");
  }
  // Gamma(alpha) cancels in the ratio.
  const Complex log_value = -s * log_c +
                            detail::log_expectation_integral(alpha, bnd.b(), s, cfg) -
                            detail::log_expectation_integral(alpha, bnd.c(), s, cfg);
  return detail::require_finite(std::exp(log_value), "mellin_neg_index");
}

/// Below this modulus mellin_pos_index returns the s -> 0 limit, 1.
inline constexpr double kPosIndexZeroCutoff = 1e-8;

/// E[(b + sigma)^(-s)] for the index +nu process started at 1:
///   c^(-s) E[(1 + 2b gamma_s)^(nu-s)] / E[(1 + 2c gamma_s)^(nu-s)].
/// Requires re(s) > 0; s = 0 returns the limit value 1.
inline Complex mellin_pos_index(double nu, const Boundary& bnd, Complex s,
                                const QuadratureConfig& cfg = {}) {
  if (!(nu > 0.0)) throw DomainError("mellin_pos_index: requires nu > 0");
  if (!detail::is_finite(s)) throw DomainError("mellin_pos_index: s must be finite");
  if (std::abs(s) < kPosIndexZeroCutoff) return 1.0;
  if (!(s.real() > 0.0)) {
    throw DomainError("mellin_pos_index: requires re(s) > 0");
  }
  const double log_c = std::log(bnd.c());
  if (bnd.is_degenerate()) {
    return detail::require_finite(std::exp(-s * log_c), "mellin_pos_index");
  }
  const Complex p = s - nu;
  const Complex log_value = -s * log_c +
                            detail::log_expectation_integral(s, bnd.b(), p, cfg) -
                            detail::log_expectation_integral(s, bnd.c(), p, cfg);
  return detail::require_finite(std::exp(log_value), "mellin_pos_index");
}

/// Dispatches on the sign of the index.
inline Complex mellin_transform(const BesselSpec& spec, const Boundary& bnd,
                                Complex s, const QuadratureConfig& cfg = {}) {
  return spec.sign() == IndexSign::negative
             ? mellin_neg_index(spec.nu(), bnd, s, cfg)
             : mellin_pos_index(spec.nu(), bnd, s, cfg);
}

/// Left edge of the strip in which mellin_transform is computable.
inline double mellin_strip_lower(const BesselSpec& spec) {
  return spec.sign() == IndexSign::negative ? -spec.nu() : 0.0;
}

/// |M_{+nu}(s) - c^(-nu) M_{-nu}(s - nu)|, the change-of-measure identity
/// between the two indices. Requires real s >= nu.
inline double duality_residual(double nu, const Boundary& bnd, double s,
                               const QuadratureConfig& cfg = {}) {
  if (!(s >= nu)) throw DomainError("duality_residual: requires s >= nu");
  const Complex lhs = mellin_pos_index(nu, bnd, s, cfg);
  const Complex rhs =
      std::pow(bnd.c(), -nu) * mellin_neg_index(nu, bnd, s - nu, cfg);
  return std::abs(lhs - rhs);
}

}  // namespace besselhit
