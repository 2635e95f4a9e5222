#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "besselhit/errors.hpp"
#include "besselhit/numerics/quadrature.hpp"
#include "besselhit/parallel.hpp"
#include "besselhit/transforms.hpp"

namespace besselhit {

// Law of Y = b + sigma from its Mellin-Stieltjes transform M(s) = E[Y^(-s)].
//
// M(s) is the Mellin transform of the density of Y at 1 - s, so on a vertical
// line s = a + it inside the strip of analyticity
//   f(y)  = (1 / 2 pi) int M(a + it) y^(a + it - 1) dt,
//   F(y)  = (1 / 2 pi) int M(a + it) y^(a + it) / (a + it) dt     (a > 0).
// Both are evaluated with the trapezoid rule on t in [-H, H]. Since
// M(conj s) = conj M(s), only t >= 0 is computed. The step only controls
// aliasing, which enters as exp(-2 pi a / h) for F and is smaller for f.

struct InversionConfig {
  double abscissa = 1.0;
  double half_height = 500.0;
  double step = 0.2;
  double tail_tol = 1e-8;
  /// Evaluates the density with t -> -t. Diagnostic only: a correct
  /// inversion must reject the result.
  bool flip_orientation = false;

  void validate() const {
    if (!(abscissa > 0.0)) throw DomainError("InversionConfig: abscissa must be > 0");
    if (!(half_height > 0.0)) throw DomainError("InversionConfig: half_height must be > 0");
    if (!(step > 0.0) || step > half_height / 50.0) {
      throw DomainError("InversionConfig: requires 0 < step <= half_height / 50");
    }
    if (!(tail_tol > 0.0)) throw DomainError("InversionConfig: tail_tol must be > 0");
  }
};

/// M(a + i k h), k = 0..K, on one contour.
class MellinContour {
 public:
  MellinContour(const BesselSpec& spec, const Boundary& bnd,
                const InversionConfig& cfg, const QuadratureConfig& qcfg = {},
                unsigned threads = 0)
      : spec_(spec), bnd_(bnd), cfg_(cfg) {
    cfg.validate();
    if (!(cfg.abscissa > mellin_strip_lower(spec))) {
      throw DomainError("MellinContour: abscissa outside the strip of analyticity");
    }
    const auto count =
        static_cast<std::size_t>(std::floor(cfg.half_height / cfg.step + 1e-9)) + 1;
    values_.resize(count);
    parallel_for(count, threads, [&](std::size_t k) {
      values_[k] = mellin_transform(spec, bnd, s_at(k), qcfg);
    });
  }

  const BesselSpec& spec() const noexcept { return spec_; }
  const Boundary& boundary() const noexcept { return bnd_; }
  const InversionConfig& config() const noexcept { return cfg_; }
  const std::vector<Complex>& values() const noexcept { return values_; }

  Complex s_at(std::size_t k) const {
    return {cfg_.abscissa, cfg_.step * static_cast<double>(k)};
  }

  /// |M| at the truncation height.
  double tail_magnitude() const { return std::abs(values_.back()); }

  /// Bound on the density error from truncating the contour.
  double density_truncation_error(double y) const {
    return tail_magnitude() * std::pow(y, cfg_.abscissa - 1.0) / std::numbers::pi;
  }

  struct Point {
    double value;
    double imag_residue;
  };

  /// Density of Y at y (unclipped). Throws TruncationError when the
  /// truncated tail of the contour could exceed tail_tol.
  Point density(double y) const {
    if (!(y > 0.0)) throw DomainError("density: requires y > 0");
    if (density_truncation_error(y) > cfg_.tail_tol) {
      throw TruncationError("density: |M(a + iH)| too large for tail_tol at y = " +
                            std::to_string(y));
    }
    const double log_y = std::log(y);
    const double direction = cfg_.flip_orientation ? -1.0 : 1.0;
    const Complex sum = symmetric_sum([&](std::size_t k) {
      const double t = direction * cfg_.step * static_cast<double>(k);
      return values_[k] * std::polar(1.0, t * log_y);
    }, [&](std::size_t k) {
      const double t = direction * cfg_.step * static_cast<double>(k);
      return std::conj(values_[k]) * std::polar(1.0, -t * log_y);
    });
    const double scale =
        cfg_.step / (2.0 * std::numbers::pi) * std::pow(y, cfg_.abscissa - 1.0);
    return {scale * sum.real(), scale * sum.imag()};
  }

  /// P(Y <= y) from the contour directly (no density involved).
  double cdf(double y) const {
    if (!(y > 0.0)) throw DomainError("cdf: requires y > 0");
    const double log_y = std::log(y);
    const Complex sum = symmetric_sum([&](std::size_t k) {
      const Complex s = s_at(k);
      return values_[k] * std::polar(1.0, s.imag() * log_y) / s;
    }, [&](std::size_t k) {
      const Complex s = std::conj(s_at(k));
      return std::conj(values_[k]) * std::polar(1.0, s.imag() * log_y) / s;
    });
    const double scale =
        cfg_.step / (2.0 * std::numbers::pi) * std::pow(y, cfg_.abscissa);
    return std::clamp(scale * sum.real(), 0.0, 1.0);
  }

 private:
  // Trapezoid over k = -K..K with halved end weights; fixed summation order.
  template <class Pos, class Neg>
  Complex symmetric_sum(Pos&& pos, Neg&& neg) const {
    const std::size_t last = values_.size() - 1;
    Complex sum = pos(0);
    for (std::size_t k = 1; k <= last; ++k) {
      const double w = (k == last) ? 0.5 : 1.0;
      sum += w * (pos(k) + neg(k));
    }
    return sum;
  }

  BesselSpec spec_;
  Boundary bnd_;
  InversionConfig cfg_;
  std::vector<Complex> values_;
};

/// Density estimates of Y = b + sigma on a grid.
struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> pdf;
  InversionConfig config;
  /// Largest truncation bound over the grid.
  double truncation_error = 0.0;
  /// P(Y < grid.front()) and P(Y > grid.back()), from the direct CDF route.
  double left_mass = 0.0;
  double right_mass = 0.0;
  /// Most negative value before clipping (0 if none).
  double min_before_clip = 0.0;
  double max_imag_residue = 0.0;
};

inline void check_grid(const std::vector<double>& grid, double b) {
  if (grid.size() < 2) throw DomainError("density grid needs at least two points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > b)) throw DomainError("density grid points must exceed b");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError("density grid must be strictly increasing");
    }
  }
}

/// Ringing below this level is clipped silently; anything more negative is
/// reported through DensityCurve::min_before_clip.
inline constexpr double kNegativeDensityTolerance = 1e-6;

inline DensityCurve density_curve(const MellinContour& contour,
                                  const std::vector<double>& grid,
                                  unsigned threads = 0) {
  check_grid(grid, contour.boundary().b());
  DensityCurve curve;
  curve.grid = grid;
  curve.config = contour.config();
  curve.pdf.resize(grid.size());
  std::vector<double> residues(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const auto point = contour.density(grid[i]);
    curve.pdf[i] = point.value;
    residues[i] = std::abs(point.imag_residue);
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    curve.truncation_error =
        std::max(curve.truncation_error, contour.density_truncation_error(grid[i]));
    curve.max_imag_residue = std::max(curve.max_imag_residue, residues[i]);
    if (curve.pdf[i] < 0.0) {
      curve.min_before_clip = std::min(curve.min_before_clip, curve.pdf[i]);
      curve.pdf[i] = 0.0;
    }
  }
  if (curve.max_imag_residue > 1e-6) {
    throw NumericalError("density: imaginary residue exceeds 1e-6");
  }
  curve.left_mass = contour.cdf(grid.front());
  curve.right_mass = 1.0 - contour.cdf(grid.back());
  return curve;
}

/// Convenience overload that builds the contour first.
inline DensityCurve density_curve(const BesselSpec& spec, const Boundary& bnd,
                                  const std::vector<double>& grid,
                                  const InversionConfig& cfg = {},
                                  const QuadratureConfig& qcfg = {},
                                  unsigned threads = 0) {
  const MellinContour contour(spec, bnd, cfg, qcfg, threads);
  return density_curve(contour, grid, threads);
}

/// Density of Y = b + sigma at a single point y > b.
inline double density_at(const BesselSpec& spec, const Boundary& bnd, double y,
                         const InversionConfig& cfg = {},
                         const QuadratureConfig& qcfg = {}) {
  if (!(y > bnd.b())) throw DomainError("density_at: requires y > b");
  const MellinContour contour(spec, bnd, cfg, qcfg);
  return std::max(contour.density(y).value, 0.0);
}

/// Monotone CDF table on the density grid.
struct CdfTable {
  std::vector<double> grid;
  std::vector<double> cdf;
  /// left mass + grid integral + right mass.
  double total_mass = 1.0;

  /// Linear interpolation, constant beyond the table.
  double operator()(double y) const {
    if (y <= grid.front()) return cdf.front();
    if (y >= grid.back()) return cdf.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), y);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double w = (y - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return cdf[i - 1] + w * (cdf[i] - cdf[i - 1]);
  }
};

/// Cumulative trapezoid of the density, anchored at the probability mass
/// to the left of the grid. Throws NormalizationError if the total mass
/// (including both tails) is outside [0.99, 1.01].
inline CdfTable cdf_from_density(const DensityCurve& curve) {
  if (curve.grid.size() != curve.pdf.size() || curve.grid.size() < 2) {
    throw DomainError("cdf_from_density: malformed curve");
  }
  CdfTable table;
  table.grid = curve.grid;
  table.cdf.resize(curve.grid.size());
  double acc = curve.left_mass;
  table.cdf[0] = acc;
  for (std::size_t i = 1; i < curve.grid.size(); ++i) {
    acc += 0.5 * (curve.pdf[i] + curve.pdf[i - 1]) * (curve.grid[i] - curve.grid[i - 1]);
    table.cdf[i] = acc;
  }
  table.total_mass = acc + curve.right_mass;
  if (!(table.total_mass >= 0.99 && table.total_mass <= 1.01)) {
    throw NormalizationError("cdf_from_density: total mass " +
                             std::to_string(table.total_mass) +
                             " outside [0.99, 1.01]");
  }
  double running = 0.0;
  for (double& v : table.cdf) {
    running = std::max(running, std::clamp(v, 0.0, 1.0));
    v = running;
  }
  return table;
}

/// Inverse of the tabulated CDF by linear interpolation.
inline double quantile(const CdfTable& table, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile: q must lie in (0, 1)");
  if (q < table.cdf.front() || q > table.cdf.back()) {
    throw DomainError("quantile: q outside the range covered by the table");
  }
  const auto it = std::lower_bound(table.cdf.begin(), table.cdf.end(), q);
  const std::size_t i = static_cast<std::size_t>(it - table.cdf.begin());
  if (table.cdf[i] == q || i == 0) return table.grid[i];
  const double w = (q - table.cdf[i - 1]) / (table.cdf[i] - table.cdf[i - 1]);
  return table.grid[i - 1] + w * (table.grid[i] - table.grid[i - 1]);
}

/// Numeric Mellin transform of a curve, int y^(-s) f(y) dy over its grid.
inline double mellin_of_curve(const DensityCurve& curve, double s) {
  double acc = 0.0;
  for (std::size_t i = 1; i < curve.grid.size(); ++i) {
    const double y0 = curve.grid[i - 1];
    const double y1 = curve.grid[i];
    acc += 0.5 * (std::pow(y0, -s) * curve.pdf[i - 1] + std::pow(y1, -s) * curve.pdf[i]) *
           (y1 - y0);
  }
  return acc;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw DomainError("linear_grid: requires n >= 2, hi > lo");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

/// n points with log(y - offset) equally spaced.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n,
                                    double offset = 0.0) {
  if (n < 2 || !(hi > lo) || !(lo > offset)) {
    throw DomainError("log_grid: requires n >= 2, hi > lo > offset");
  }
  const double u0 = std::log(lo - offset);
  const double u1 = std::log(hi - offset);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = offset + std::exp(u0 + (u1 - u0) * static_cast<double>(i) /
                                      static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// y with P(Y <= y) = p from the direct CDF route, by bisection in log(y - b).
inline double contour_quantile(const MellinContour& contour, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("contour_quantile: p in (0, 1)");
  const double b = contour.boundary().b();
  double lo = std::log(b) - 40.0;
  double hi = std::log(b) + 4.0;
  while (contour.cdf(b + std::exp(hi)) < p) {
    hi += 4.0;
    if (hi > 80.0) throw NumericalError("contour_quantile: upper tail not found");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (contour.cdf(b + std::exp(mid)) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return b + std::exp(0.5 * (lo + hi));
}

/// Grid in log(y - b) between the lower_mass and 1 - upper_mass quantiles.
inline std::vector<double> tail_grid(const MellinContour& contour, std::size_t n,
                                     double lower_mass = 1e-7,
                                     double upper_mass = 1e-4) {
  const double lo = contour_quantile(contour, lower_mass);
  const double hi = contour_quantile(contour, 1.0 - upper_mass);
  return log_grid(lo, hi, n, contour.boundary().b());
}

}  // namespace besselhit
