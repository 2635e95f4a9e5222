#pragma once

#include <cmath>

#include <boost/random/normal_distribution.hpp>

#include "besselhit/errors.hpp"
#include "besselhit/simulate/rng.hpp"

namespace besselhit {

/// Standard normal draw.
template <class Rng>
double normal_sample(Rng& rng) {
  boost::random::normal_distribution<double> dist;
  return dist(rng);
}

/// Gamma(alpha, 1) draw. Marsaglia-Tsang with squeeze; alpha < 1 goes
/// through gamma_{alpha+1} * U^(1/alpha).
template <class Rng>
double gamma_sample(double alpha, Rng& rng) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("gamma_sample: requires alpha > 0");
  }
  if (alpha < 1.0) {
    const double g = gamma_sample(alpha + 1.0, rng);
    return g * std::exp(std::log(uniform_open(rng)) / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = normal_sample(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform_open(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Exact draw of the perpetuity int_0^inf exp(2(B_s - nu s)) ds = 1 / (2 gamma_nu).
template <class Rng>
double sample_dufresne(double nu, Rng& rng) {
  if (!(nu > 0.0)) throw DomainError("sample_dufresne: requires nu > 0");
  return 0.5 / gamma_sample(nu, rng);
}

}  // namespace besselhit
