#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "besselhit/errors.hpp"

namespace besselhit {

/*
 * Kolmogorov-Smirnov statistics and the asymptotic Kolmogorov law.
 *
 * Both statistics take plain value spans; SampleSet exposes its values as
 * one, so these stay independent of the simulation layer.
 */

/// sup_x |F_emp(x) - cdf(x)| for a continuous reference cdf.
template <class Cdf>
double ks_one_sample(std::span<const double> xs, Cdf&& cdf) {
  if (xs.empty()) throw EmptyInputError("ks_one_sample: empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n;
    d = std::max({d, above - f, f - below});
  }
  return std::clamp(d, 0.0, 1.0);
}

/// sup_x |F_xs(x) - F_ys(x)| between two empirical distribution functions.
inline double ks_two_sample(std::span<const double> xs,
                            std::span<const double> ys) {
  if (xs.empty() || ys.empty()) {
    throw EmptyInputError("ks_two_sample: empty sample");
  }
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    // Step past every tie at x in both samples before comparing.
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

/// P(K > x) for the Kolmogorov distribution, first 100 terms of
/// 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 x^2).
inline double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // series is useless here; the survival is 1 - 1e-26
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// x such that P(K <= x) = level, by bisection.
inline double kolmogorov_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("kolmogorov_quantile: level must lie in (0, 1)");
  }
  double lo = 0.2;
  double hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 - kolmogorov_survival(mid) < level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Asymptotic one-sample critical value at the given confidence level.
inline double ks_critical_one_sample(std::size_t n, double level = 0.99) {
  if (n == 0) throw EmptyInputError("ks_critical_one_sample: n = 0");
  return kolmogorov_quantile(level) / std::sqrt(static_cast<double>(n));
}

/// Asymptotic two-sample critical value at the given confidence level.
inline double ks_critical_two_sample(std::size_t n, std::size_t m,
                                     double level = 0.99) {
  if (n == 0 || m == 0) throw EmptyInputError("ks_critical_two_sample: empty");
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return kolmogorov_quantile(level) * std::sqrt((nn + mm) / (nn * mm));
}

/// Asymptotic p-value for a one-sample statistic d over n points.
inline double ks_p_value_one_sample(double d, std::size_t n) {
  return kolmogorov_survival(d * std::sqrt(static_cast<double>(n)));
}

/// Asymptotic p-value for a two-sample statistic d.
inline double ks_p_value_two_sample(double d, std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return kolmogorov_survival(d * std::sqrt(nn * mm / (nn + mm)));
}

}  // namespace besselhit
