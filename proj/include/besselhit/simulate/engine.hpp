#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "besselhit/errors.hpp"
#include "besselhit/parallel.hpp"
#include "besselhit/simulate/rng.hpp"
#include "besselhit/simulate/samplers.hpp"
#include "besselhit/transforms.hpp"

namespace besselhit {

struct SimConfig {
  double dt = 1e-4;
  double max_bm_time = 50.0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  /// Worker threads (0 = all cores). Never changes the output.
  unsigned threads = 0;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("SimConfig: dt must be > 0");
    if (n_paths < 1) throw DomainError("SimConfig: n_paths must be >= 1");
    if (!(max_bm_time >= 100.0 * dt)) {
      throw DomainError("SimConfig: max_bm_time must be >= 100 dt");
    }
  }
};

// RNG lanes within one path.
namespace lane {
inline constexpr std::uint64_t normals = 0;
inline constexpr std::uint64_t bridge = 1;
inline constexpr std::uint64_t dufresne_lhs = 2;
inline constexpr std::uint64_t dufresne_rhs = 3;
inline constexpr std::uint64_t bridge_coarse = 4;
}  // namespace lane

/// E = exp(B - nu t) (index -nu) or exp(B + nu t) (index +nu) and its clock.
struct GbmState {
  double t = 0.0;
  double B = 0.0;
  double E = 1.0;
  double A = 0.0;
};

/// Advances by h given a standard normal z; A by the trapezoid rule.
inline void gbm_advance(GbmState& state, double drift, double h, double z) {
  const double e2_prev = state.E * state.E;
  state.B += std::sqrt(h) * z;
  state.t += h;
  state.E = std::exp(state.B + drift * state.t);
  state.A += 0.5 * h * (e2_prev + state.E * state.E);
}

inline double drift_of(const BesselSpec& spec) { return spec.index(); }

template <class Rng>
GbmState simulate_gbm(const BesselSpec& spec, double t_end, double dt, Rng& rng) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw DomainError("simulate_gbm: bad times");
  GbmState state;
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  for (std::size_t k = 0; k < steps; ++k) {
    gbm_advance(state, drift_of(spec), dt, normal_sample(rng));
  }
  return state;
}

struct HittingSample {
  double sigma = 0.0;
  bool crossed = false;
  double bm_time_at_cross = 0.0;
};

namespace detail {

// First time E^2 <= (b + A) / c on a grid of step dt. Each step consumes
// `substeps` normals whose scaled sum is the increment, so a path run with
// (dt, 2) sees the same Brownian motion as one run with (dt / 2, 1).
//
// Between grid points the log-distance to the boundary is treated as a
// Brownian bridge: a step that ends above the boundary still counts as a
// crossing with probability exp(-2 d0 d1 / dt).
template <class NormalRng, class BridgeRng>
HittingSample hitting_kernel(double drift, const Boundary& bnd, double dt,
                             double max_bm_time, int substeps, NormalRng& normals,
                             BridgeRng& bridge) {
  const double b = bnd.b();
  const double c = bnd.c();
  HittingSample out;
  if (1.0 <= b / c) {
    out.crossed = true;
    return out;
  }
  const double sqrt_dt = std::sqrt(dt);
  const double inv_sqrt_sub = 1.0 / std::sqrt(static_cast<double>(substeps));
  const double near = 1.0 + 2.0 * std::sqrt(20.0 * dt) + 20.0 * dt;
  const auto max_steps = static_cast<std::size_t>(std::ceil(max_bm_time / dt - 1e-9));

  double x = 0.0;
  double a = 0.0;
  double e2 = 1.0;
  for (std::size_t k = 0; k < max_steps; ++k) {
    double z = 0.0;
    for (int j = 0; j < substeps; ++j) z += normal_sample(normals);
    z *= inv_sqrt_sub;
    const double x_next = x + drift * dt + sqrt_dt * z;
    const double e2_next = std::exp(2.0 * x_next);
    const double a_next = a + 0.5 * dt * (e2 + e2_next);
    const double level = (b + a) / c;
    const double level_next = (b + a_next) / c;
    const double t = static_cast<double>(k) * dt;
    if (e2_next <= level_next) {
      const double g0 = e2 - level;
      const double g1 = e2_next - level_next;
      const double w = g0 / (g0 - g1);
      out.sigma = a + w * (a_next - a);
      out.crossed = true;
      out.bm_time_at_cross = t + w * dt;
      return out;
    }
    if (e2_next < near * level_next && e2 < near * level) {
      const double d0 = 0.5 * std::log(e2 / level);
      const double d1 = 0.5 * std::log(e2_next / level_next);
      if (uniform_open(bridge) < std::exp(-2.0 * d0 * d1 / dt)) {
        out.sigma = 0.5 * (a + a_next);
        out.crossed = true;
        out.bm_time_at_cross = t + 0.5 * dt;
        return out;
      }
    }
    x = x_next;
    a = a_next;
    e2 = e2_next;
  }
  out.sigma = a;
  out.bm_time_at_cross = static_cast<double>(max_steps) * dt;
  return out;
}

}  // namespace detail

/// sigma = A at the first BM-clock time tau with E_tau^2 = (b + A_tau) / c.
template <class NormalRng, class BridgeRng>
HittingSample sample_hitting_time(const BesselSpec& spec, const Boundary& bnd,
                                  const SimConfig& cfg, NormalRng& normals,
                                  BridgeRng& bridge) {
  cfg.validate();
  return detail::hitting_kernel(drift_of(spec), bnd, cfg.dt, cfg.max_bm_time, 1,
                                normals, bridge);
}

/// Path `path` of the batch described by cfg.
inline HittingSample sample_hitting_time(const BesselSpec& spec, const Boundary& bnd,
                                         const SimConfig& cfg, std::size_t path) {
  Xoshiro256 normals(cfg.seed, cfg.stream_id, path, lane::normals);
  Xoshiro256 bridge(cfg.seed, cfg.stream_id, path, lane::bridge);
  return sample_hitting_time(spec, bnd, cfg, normals, bridge);
}

inline std::vector<HittingSample> simulate_hitting_times(const BesselSpec& spec,
                                                         const Boundary& bnd,
                                                         const SimConfig& cfg) {
  cfg.validate();
  std::vector<HittingSample> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t i) {
    out[i] = sample_hitting_time(spec, bnd, cfg, i);
  });
  return out;
}

/// The same Brownian path monitored at dt (coarse) and dt / 2 (fine).
struct CoupledHitting {
  HittingSample coarse;
  HittingSample fine;
};

inline std::vector<CoupledHitting> simulate_coupled_hitting_times(
    const BesselSpec& spec, const Boundary& bnd, const SimConfig& cfg) {
  cfg.validate();
  std::vector<CoupledHitting> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t i) {
    {
      Xoshiro256 normals(cfg.seed, cfg.stream_id, i, lane::normals);
      Xoshiro256 bridge(cfg.seed, cfg.stream_id, i, lane::bridge_coarse);
      out[i].coarse = detail::hitting_kernel(drift_of(spec), bnd, cfg.dt,
                                             cfg.max_bm_time, 2, normals, bridge);
    }
    Xoshiro256 normals(cfg.seed, cfg.stream_id, i, lane::normals);
    Xoshiro256 bridge(cfg.seed, cfg.stream_id, i, lane::bridge);
    out[i].fine = detail::hitting_kernel(drift_of(spec), bnd, 0.5 * cfg.dt,
                                         cfg.max_bm_time, 1, normals, bridge);
  });
  return out;
}

/// Crossed sigmas in path order.
inline std::vector<double> crossed_sigmas(std::span<const HittingSample> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.crossed) out.push_back(s.sigma);
  }
  return out;
}

inline double excluded_fraction(std::span<const HittingSample> samples) {
  if (samples.empty()) return 0.0;
  std::size_t missed = 0;
  for (const auto& s : samples) missed += s.crossed ? 0 : 1;
  return static_cast<double>(missed) / static_cast<double>(samples.size());
}

struct MomentEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean and standard error of (b + sigma)^(-s).
inline MomentEstimate inverse_power_moment(std::span<const double> sigmas, double b,
                                           double s) {
  if (sigmas.size() < 2) throw EmptyInputError("inverse_power_moment: need 2 samples");
  double sum = 0.0;
  for (double x : sigmas) sum += std::pow(b + x, -s);
  const double n = static_cast<double>(sigmas.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : sigmas) {
    const double d = std::pow(b + x, -s) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / (n - 1.0) / n), sigmas.size()};
}

struct PerpetuitySample {
  double value = 0.0;
  /// Increase of A over the last unit of BM time before stopping.
  double last_unit_increment = 0.0;
  double bm_time = 0.0;
  bool converged = false;
};

/// Largest step of the perpetuity sampler, in BM time.
inline constexpr double kPerpetuityMaxStep = 0.5;

/// int_0^T exp(2(B_s - nu s)) ds, stopped once A grew by less than
/// 1e-10 A over the last unit of BM time, or at max_bm_time.
///
/// Steps are dt * A / E^2 (between dt and kPerpetuityMaxStep), so each step
/// adds about a fraction dt to A.
template <class Rng>
PerpetuitySample sample_perpetuity_truncated(double nu, const SimConfig& cfg, Rng& rng) {
  if (!(nu > 0.0)) throw DomainError("sample_perpetuity_truncated: requires nu > 0");
  cfg.validate();
  const double h_max = std::max(cfg.dt, kPerpetuityMaxStep);
  double x = 0.0;
  double t = 0.0;
  double a = 0.0;
  double e2 = 1.0;
  double next_mark = 1.0;
  double a_at_mark = 0.0;
  PerpetuitySample out;
  while (t < cfg.max_bm_time) {
    double h = cfg.dt;
    if (a > 0.0) h = std::clamp(cfg.dt * a / e2, cfg.dt, h_max);
    h = std::min(h, cfg.max_bm_time - t);
    x += -nu * h + std::sqrt(h) * normal_sample(rng);
    const double e2_next = std::exp(2.0 * x);
    a += 0.5 * h * (e2 + e2_next);
    e2 = e2_next;
    t += h;
    if (t >= next_mark) {
      out.last_unit_increment = a - a_at_mark;
      if (out.last_unit_increment < 1e-10 * a) {
        out.converged = true;
        break;
      }
      a_at_mark = a;
      while (next_mark <= t) next_mark += 1.0;
    }
  }
  out.value = a;
  out.bm_time = t;
  return out;
}

inline std::vector<PerpetuitySample> simulate_perpetuities(double nu,
                                                           const SimConfig& cfg) {
  cfg.validate();
  std::vector<PerpetuitySample> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t i) {
    Xoshiro256 rng(cfg.seed, cfg.stream_id, i, lane::normals);
    out[i] = sample_perpetuity_truncated(nu, cfg, rng);
  });
  return out;
}

inline std::vector<double> simulate_dufresne(double nu, std::size_t n,
                                             std::uint64_t seed, std::uint64_t stream_id,
                                             unsigned threads = 0) {
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    Xoshiro256 rng(seed, stream_id, i, lane::dufresne_lhs);
    out[i] = sample_dufresne(nu, rng);
  });
  return out;
}

/// b + Z1 and (b + sigma)(1 + Z2 / c), drawn from independent substreams.
struct AffinePair {
  double lhs = 0.0;
  double rhs = 0.0;
  double sigma = 0.0;
  double z_rhs = 0.0;
  bool crossed = false;
};

inline AffinePair sample_affine_pair(double nu, const Boundary& bnd, const SimConfig& cfg,
                                     std::size_t path) {
  const auto spec = BesselSpec::negative(nu);
  Xoshiro256 rng_lhs(cfg.seed, cfg.stream_id, path, lane::dufresne_lhs);
  Xoshiro256 rng_rhs(cfg.seed, cfg.stream_id, path, lane::dufresne_rhs);
  AffinePair out;
  out.lhs = bnd.b() + sample_dufresne(nu, rng_lhs);
  const HittingSample hit = sample_hitting_time(spec, bnd, cfg, path);
  out.crossed = hit.crossed;
  out.sigma = hit.sigma;
  out.z_rhs = sample_dufresne(nu, rng_rhs);
  out.rhs = (bnd.b() + hit.sigma) * (1.0 + out.z_rhs / bnd.c());
  return out;
}

inline std::vector<AffinePair> simulate_affine_pairs(double nu, const Boundary& bnd,
                                                     const SimConfig& cfg) {
  cfg.validate();
  std::vector<AffinePair> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t i) {
    out[i] = sample_affine_pair(nu, bnd, cfg, i);
  });
  return out;
}

}  // namespace besselhit
