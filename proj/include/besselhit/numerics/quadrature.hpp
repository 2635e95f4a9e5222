#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

#include <Eigen/Eigenvalues>

#include "besselhit/errors.hpp"
#include "besselhit/numerics/special.hpp"

namespace besselhit {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  /// Order of the Gauss-Laguerre consistency check (0 disables it).
  int laguerre_order = 200;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw DomainError("QuadratureConfig: tolerances must be positive");
    }
    if (max_subdivisions < 8) {
      throw DomainError("QuadratureConfig: max_subdivisions must be >= 8");
    }
    if (laguerre_order != 0 && laguerre_order < 8) {
      throw DomainError("QuadratureConfig: laguerre_order must be 0 or >= 8");
    }
  }
};

struct QuadratureResult {
  Complex value;
  double error = 0.0;
  int evaluations = 0;
  /// Fixed-order generalized Gauss-Laguerre estimate; set only for real
  /// alpha integrated along the real axis.
  std::optional<Complex> laguerre_estimate;
};

/// A complex number stored as mantissa * exp(log_scale), for integrals whose
/// magnitude leaves the double range.
struct ScaledComplex {
  Complex mantissa;
  double log_scale = 0.0;

  Complex log() const { return std::log(mantissa) + log_scale; }

  Complex value(const char* what = "ScaledComplex") const {
    return detail::require_finite(mantissa * std::exp(log_scale), what);
  }
};

namespace detail {

// Gauss-Kronrod 15/7 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkSegment {
  double lo = 0.0;
  double hi = 0.0;
  Complex value;
  double error = 0.0;
  double resabs = 0.0;
};

template <class F>
GkSegment gauss_kronrod_15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::array<Complex, 15> fv;
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }
  Complex kronrod = fv[7] * kKronrodWeights[7];
  Complex gauss = fv[7] * kGaussWeights[3];
  double resabs = std::abs(fv[7]) * kKronrodWeights[7];
  for (int j = 0; j < 7; ++j) {
    const Complex pair = fv[j] + fv[14 - j];
    kronrod += kKronrodWeights[j] * pair;
    resabs += kKronrodWeights[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const Complex mean = 0.5 * kronrod;
  double resasc = kKronrodWeights[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kKronrodWeights[j] *
              (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  }
  const double scale = std::abs(half);
  resabs *= scale;
  resasc *= scale;
  double err = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  return {lo, hi, kronrod * half, err, resabs};
}

struct AdaptiveResult {
  Complex value;
  double error = 0.0;
  double resabs = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Globally adaptive bisection: always splits the segment with the largest
// error. Stops once error <= max(abs_target, rel_tol * |value|).
template <class F>
AdaptiveResult adaptive_gauss_kronrod(F& f, double lo, double hi,
                                      double abs_target, double rel_tol,
                                      int max_subdivisions) {
  auto by_error = [](const GkSegment& a, const GkSegment& b) {
    return a.error < b.error;
  };
  std::priority_queue<GkSegment, std::vector<GkSegment>, decltype(by_error)>
      heap(by_error);
  GkSegment first = gauss_kronrod_15(f, lo, hi);
  Complex total = first.value;
  double total_err = first.error;
  heap.push(first);
  int evaluations = 15;
  bool converged = false;
  while (true) {
    if (total_err <= std::max(abs_target, rel_tol * std::abs(total))) {
      converged = true;
      break;
    }
    if (static_cast<int>(heap.size()) >= max_subdivisions) break;
    const GkSegment worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;
    heap.pop();
    const GkSegment left = gauss_kronrod_15(f, worst.lo, mid);
    const GkSegment right = gauss_kronrod_15(f, mid, worst.hi);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum in interval order so the result does not carry update drift.
  std::vector<GkSegment> segments;
  segments.reserve(heap.size());
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const GkSegment& a, const GkSegment& b) { return a.lo < b.lo; });
  AdaptiveResult out;
  for (const auto& s : segments) {
    out.value += s.value;
    out.error += s.error;
    out.resabs += s.resabs;
  }
  out.evaluations = evaluations;
  out.converged = converged;
  return out;
}

inline constexpr double kMaxRayAngle = 1.35;

inline double clamp_ray_angle(double theta) {
  return std::clamp(theta, -kMaxRayAngle, kMaxRayAngle);
}

struct RayIntegral {
  ScaledComplex value;
  /// Error estimate in units of exp(value.log_scale).
  double error = 0.0;
  int evaluations = 0;
};

// Integrates x^(alpha - 1) F(x) over the ray x = r e^{i theta}, r in (0, inf),
// where F = exp(log_f). The ray must lie in a sector where F is holomorphic
// and decays; for theta = 0 this is the ordinary integral over (0, inf).
//
// The integrand is rescaled by its peak mass so that magnitudes far outside
// the double range are handled; the result comes back as a ScaledComplex.
// When f_at_zero is given, F(0) / alpha is integrated analytically on (0, 1]
// and only F(x) - F(0) is left to the quadrature.
//
// abs_tol is interpreted relative to exp(log_abs_unit); refinement targets
// rel_tol, failure is declared only against max(abs_tol, rel_tol |I|).
template <class LogF>
RayIntegral integrate_power_ray(LogF&& log_f, std::optional<Complex> f_at_zero,
                                Complex alpha, double theta,
                                const QuadratureConfig& cfg,
                                double log_abs_unit = 0.0) {
  if (!(alpha.real() > 0.0)) {
    throw DomainError("integrate_power_ray: requires re(alpha) > 0");
  }
  const Complex w = std::polar(1.0, theta);
  const Complex alpha_m1 = alpha - 1.0;
  auto log_integrand = [&](double r) {
    return alpha_m1 * std::log(r) + log_f(r * w);
  };

  // Peak of the mass density per unit log r.
  double shift = -std::numeric_limits<double>::infinity();
  double peak_r = 1.0;
  int evaluations = 0;
  for (int k = -96; k <= 40; ++k) {
    const double r = std::pow(10.0, k / 8.0);
    const double m = log_integrand(r).real() + std::log(r);
    ++evaluations;
    if (std::isfinite(m) && m > shift) {
      shift = m;
      peak_r = r;
    }
  }
  if (!std::isfinite(shift)) {
    throw NumericalError("integrate_power_ray: integrand vanishes on the probe grid");
  }

  const double threshold = 1e-6 * std::min(cfg.abs_tol, cfg.rel_tol);
  const Complex f0 = f_at_zero.value_or(0.0);
  const bool subtract = f_at_zero.has_value();

  // Left piece, u = log r on (-inf, 0].
  auto left = [&](double u) -> Complex {
    const Complex au = alpha * u;
    Complex v = std::exp(au + log_f(std::exp(u) * w) - shift);
    if (subtract) v -= f0 * std::exp(au - shift);
    return v;
  };
  const double left_decay = alpha.real() + (subtract ? 1.0 : 0.0);
  double u_min = 0.0;
  {
    int quiet = 0;
    for (int step = 1; step <= 4000 && quiet < 2; ++step) {
      u_min = -0.5 * step;
      const double m = std::abs(left(u_min)) / left_decay;
      ++evaluations;
      quiet = (m < threshold || !std::isfinite(m)) ? quiet + 1 : 0;
    }
  }

  // Right piece on [1, r_max].
  auto right = [&](double r) -> Complex {
    return std::exp(log_integrand(r) - shift);
  };
  const double decay_len = 1.0 / std::max(std::cos(theta), 1e-3);
  double r_max = 1.0;
  {
    int quiet = 0;
    double r = 1.0;
    for (int step = 0; step < 2000 && quiet < 2 && r < 1e12; ++step) {
      r *= 1.2;
      const double m = std::abs(right(r)) * (r + decay_len);
      ++evaluations;
      const bool small = m < threshold || !std::isfinite(m);
      quiet = (small && r > peak_r) ? quiet + 1 : 0;
      r_max = r;
    }
  }

  Complex analytic = 0.0;
  if (subtract) {
    analytic = require_finite(f0 * std::exp(-shift) / alpha,
                              "integrate_power_ray");
  }
  // Refinement aims at rel_tol; the failure test also admits abs_tol.
  const double abs_in_scaled_units = cfg.abs_tol * std::exp(log_abs_unit - shift);
  constexpr double eps = std::numeric_limits<double>::epsilon();

  const int budget = std::max(cfg.max_subdivisions / 2, 4);
  const AdaptiveResult lp =
      adaptive_gauss_kronrod(left, u_min, 0.0, 0.0, 0.5 * cfg.rel_tol, budget);
  const AdaptiveResult rp =
      adaptive_gauss_kronrod(right, 1.0, r_max, 0.0, 0.5 * cfg.rel_tol, budget);
  evaluations += lp.evaluations + rp.evaluations;

  const Complex sum = analytic + lp.value + rp.value;
  const double err = lp.error + rp.error;
  const double roundoff = 100.0 * eps * (lp.resabs + rp.resabs + std::abs(analytic));
  const double allowed =
      std::max({abs_in_scaled_units, cfg.rel_tol * std::abs(sum), roundoff});
  const Complex w_alpha = std::exp(alpha * Complex(0.0, theta));
  if (err > allowed) {
    const ScaledComplex best{w_alpha * sum, shift};
    Complex shown = best.mantissa;
    if (std::abs(shift) < 700.0) shown = best.mantissa * std::exp(shift);
    throw QuadratureError("integrate_power_ray: tolerance not met", shown,
                          err * std::exp(std::min(shift, 700.0)));
  }
  return {{w_alpha * sum, shift}, err, evaluations};
}

inline double default_ray_angle(Complex alpha) {
  if (alpha.imag() == 0.0) return 0.0;
  return clamp_ray_angle(std::arg(alpha));
}

struct LaguerreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Generalized Gauss-Laguerre rule for the weight x^lambda e^{-x}
// (Golub-Welsch). Weights include Gamma(lambda + 1).
inline LaguerreRule gauss_laguerre_rule(double lambda, int n) {
  if (!(lambda > -1.0) || n < 1) {
    throw DomainError("gauss_laguerre_rule: requires lambda > -1, n >= 1");
  }
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + lambda + 1.0;
  for (int k = 0; k + 1 < n; ++k) {
    sub[k] = std::sqrt((k + 1.0) * (k + 1.0 + lambda));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("gauss_laguerre_rule: eigensolver failed");
  }
  const double mu0 = std::exp(log_gamma(lambda + 1.0));
  LaguerreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()[i];
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace detail

/// Integral of f(x) x^(alpha - 1) e^(-x) over (0, inf).
///
/// The integral is taken along a ray from the origin. For real alpha and the
/// default angle this is the real half-line; for complex alpha the default
/// ray follows arg(alpha) (clamped), which removes most of the cancellation
/// from the oscillating factor x^(i im(alpha)). A nonzero angle requires f to
/// be holomorphic and polynomially bounded in the sector it sweeps.
///
/// For real alpha on the real axis a fixed-order generalized Gauss-Laguerre
/// estimate is attached to the result as a consistency check.
template <class F>
QuadratureResult integrate_gamma_weighted(F&& f, Complex alpha,
                                          const QuadratureConfig& cfg = {},
                                          std::optional<double> ray_angle = {}) {
  cfg.validate();
  if (!(alpha.real() > 0.0) || !detail::is_finite(alpha)) {
    throw DomainError("integrate_gamma_weighted: requires re(alpha) > 0");
  }
  const double theta = detail::clamp_ray_angle(
      ray_angle.value_or(detail::default_ray_angle(alpha)));
  auto log_f = [&](Complex x) -> Complex {
    const Complex fx = f(x);
    if (fx == Complex(0.0, 0.0)) {
      return {-std::numeric_limits<double>::infinity(), 0.0};
    }
    return std::log(fx) - x;
  };
  std::optional<Complex> f0;
  {
    const Complex at_zero = f(Complex(0.0, 0.0));
    if (detail::is_finite(at_zero)) f0 = at_zero;
  }
  const detail::RayIntegral ray =
      detail::integrate_power_ray(log_f, f0, alpha, theta, cfg);
  QuadratureResult out;
  out.value = ray.value.value("integrate_gamma_weighted");
  out.error = ray.error * std::exp(ray.value.log_scale);
  out.evaluations = ray.evaluations;
  if (alpha.imag() == 0.0 && theta == 0.0 && cfg.laguerre_order > 0 &&
      alpha.real() < 170.0) {
    const auto rule =
        detail::gauss_laguerre_rule(alpha.real() - 1.0, cfg.laguerre_order);
    Complex sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (rule.weights[i] == 0.0) continue;
      sum += rule.weights[i] * f(Complex(rule.nodes[i], 0.0));
    }
    out.laguerre_estimate = sum;
  }
  return out;
}

}  // namespace besselhit
