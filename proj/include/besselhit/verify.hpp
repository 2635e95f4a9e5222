#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "besselhit/confluent.hpp"
#include "besselhit/inversion.hpp"
#include "besselhit/numerics/ks.hpp"
#include "besselhit/numerics/special.hpp"
#include "besselhit/simulate.hpp"
#include "besselhit/transforms.hpp"

namespace besselhit {

using Json = nlohmann::ordered_json;

struct VerificationReport {
  std::string name;
  Json params = Json::object();
  double statistic = 0.0;
  double threshold = 0.0;
  bool passed = false;
  /// False for negative controls, which are supposed to fail.
  bool expect_pass = true;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  Json notes = Json::object();

  bool as_expected() const noexcept { return passed == expect_pass; }

  Json to_json() const {
    Json j;
    j["name"] = name;
    j["params"] = params;
    j["statistic"] = statistic;
    j["threshold"] = threshold;
    j["passed"] = passed;
    j["expect"] = expect_pass ? "pass" : "fail";
    j["n_samples"] = n_samples;
    j["seed"] = seed;
    j["notes"] = notes;
    return j;
  }
};

inline VerificationReport make_report(std::string name, Json params, double statistic,
                                      double threshold, std::size_t n, std::uint64_t seed,
                                      Json notes = Json::object()) {
  VerificationReport r;
  r.name = std::move(name);
  r.params = std::move(params);
  r.statistic = statistic;
  r.threshold = threshold;
  r.passed = statistic <= threshold;
  r.n_samples = n;
  r.seed = seed;
  r.notes = std::move(notes);
  return r;
}

inline VerificationReport as_control(VerificationReport r) {
  r.name += "/control";
  r.expect_pass = false;
  return r;
}

/// A positive check and, where one exists, its negative control.
struct CheckResult {
  VerificationReport check;
  std::optional<VerificationReport> control;
};

// Fixed stream ids keep the checks independent under a shared seed.
namespace streams {
inline constexpr std::uint64_t dufresne = 100;
inline constexpr std::uint64_t affine = 200;
inline constexpr std::uint64_t transform_mc = 300;
inline constexpr std::uint64_t inversion = 400;
inline constexpr std::uint64_t bias = 500;
inline constexpr std::uint64_t whittaker = 600;
}  // namespace streams

inline constexpr double kZThreshold = 3.5;
inline constexpr double kKsLevel = 0.99;

inline Json boundary_json(const Boundary& bnd) {
  return Json{{"b", bnd.b()}, {"c", bnd.c()}};
}

/// Truncated perpetuity draws against the inverse-gamma law of 1 / (2 gamma_nu).
/// The control compares the same draws with the law at nu + 0.2.
inline CheckResult verify_dufresne(double nu, std::size_t n, std::uint64_t seed,
                                   unsigned threads = 0, std::uint64_t stream = 0) {
  if (!(nu > 0.0)) throw DomainError("verify_dufresne: requires nu > 0");
  if (n < 10000) throw DomainError("verify_dufresne: requires N >= 1e4");
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.max_bm_time = 200.0;
  cfg.n_paths = n;
  cfg.seed = seed;
  cfg.stream_id = streams::dufresne + stream;
  cfg.threads = threads;
  const auto draws = simulate_perpetuities(nu, cfg);
  std::vector<double> values(draws.size());
  std::size_t unconverged = 0;
  double worst_increment = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    values[i] = draws[i].value;
    unconverged += draws[i].converged ? 0 : 1;
    worst_increment =
        std::max(worst_increment, draws[i].last_unit_increment / draws[i].value);
  }
  auto ks_against = [&](double shape) {
    return ks_one_sample(values, [shape](double y) {
      return regularized_incomplete_gamma_upper(shape, 0.5 / y);
    });
  };
  const Json params{{"nu", nu}, {"dt", cfg.dt}, {"max_bm_time", cfg.max_bm_time}};
  const double crit = ks_critical_one_sample(n, kKsLevel);
  Json notes{{"unconverged_paths", unconverged},
             {"max_relative_last_increment", worst_increment}};
  CheckResult out{make_report("dufresne", params, ks_against(nu), crit, n, seed, notes),
                  std::nullopt};
  Json control_params = params;
  control_params["reference_nu"] = nu + 0.2;
  out.control = as_control(
      make_report("dufresne", control_params, ks_against(nu + 0.2), crit, n, seed));
  return out;
}

/// Two-sample KS between b + Z1 and (b + sigma)(1 + Z2 / c). The control
/// rebuilds the right side with b + 0.1 in place of b.
inline CheckResult verify_affine(double nu, const Boundary& bnd, std::size_t n, double dt,
                                 std::uint64_t seed, unsigned threads = 0,
                                 std::uint64_t stream = 0) {
  if (n < 10000) throw DomainError("verify_affine: requires N >= 1e4");
  SimConfig cfg;
  cfg.dt = dt;
  cfg.n_paths = n;
  cfg.seed = seed;
  cfg.stream_id = streams::affine + stream;
  cfg.threads = threads;
  const auto pairs = simulate_affine_pairs(nu, bnd, cfg);
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> rhs_shifted;
  const double b_shifted = bnd.b() + 0.1;
  for (const auto& p : pairs) {
    lhs.push_back(p.lhs);
    if (!p.crossed) continue;
    rhs.push_back(p.rhs);
    rhs_shifted.push_back((b_shifted + p.sigma) * (1.0 + p.z_rhs / bnd.c()));
  }
  if (rhs.empty()) throw NumericalError("verify_affine: no path crossed");
  const double excluded =
      static_cast<double>(n - rhs.size()) / static_cast<double>(n);
  Json params{{"nu", nu}, {"index", "neg"}, {"dt", dt}, {"max_bm_time", cfg.max_bm_time}};
  params.update(boundary_json(bnd));
  Json notes{{"excluded_fraction", excluded}};
  if (excluded > 1e-3) notes["warning"] = "excluded fraction above 1e-3";
  const double crit = ks_critical_two_sample(lhs.size(), rhs.size(), kKsLevel);
  CheckResult out{make_report("affine", params, ks_two_sample(lhs, rhs), crit, n, seed, notes),
                  std::nullopt};
  Json control_params = params;
  control_params["rhs_b"] = b_shifted;
  out.control = as_control(make_report("affine", control_params,
                                       ks_two_sample(lhs, rhs_shifted), crit, n, seed));
  return out;
}

/// Largest z-score of the MC moments E[(b + sigma)^(-s)] against the closed
/// form. The control scales the closed form by 1.01.
inline CheckResult verify_transform_mc(const BesselSpec& spec, const Boundary& bnd,
                                       const std::vector<double>& s_grid, std::size_t n,
                                       double dt, std::uint64_t seed, unsigned threads = 0,
                                       const QuadratureConfig& qcfg = {}) {
  if (s_grid.empty()) throw EmptyInputError("verify_transform_mc: empty s grid");
  SimConfig cfg;
  cfg.dt = dt;
  cfg.n_paths = n;
  cfg.seed = seed;
  cfg.stream_id = streams::transform_mc + (spec.sign() == IndexSign::negative ? 0 : 1);
  cfg.threads = threads;
  const auto hits = simulate_hitting_times(spec, bnd, cfg);
  const auto sigmas = crossed_sigmas(hits);
  const double excluded = excluded_fraction(hits);
  double z_max = 0.0;
  double z_max_control = 0.0;
  Json per_s = Json::array();
  for (double s : s_grid) {
    if (!(s >= 0.0)) throw DomainError("verify_transform_mc: s must be >= 0");
    const auto est = inverse_power_moment(sigmas, bnd.b(), s);
    const double exact = mellin_transform(spec, bnd, s, qcfg).real();
    const double z = std::abs(est.mean - exact) / est.standard_error;
    const double z_control = std::abs(est.mean - 1.01 * exact) / est.standard_error;
    z_max = std::max(z_max, z);
    z_max_control = std::max(z_max_control, z_control);
    per_s.push_back(Json{{"s", s},
                         {"closed_form", exact},
                         {"mc_mean", est.mean},
                         {"mc_se", est.standard_error},
                         {"z", z}});
  }
  Json params{{"nu", spec.nu()},
              {"index", to_string(spec.sign())},
              {"s", s_grid},
              {"dt", dt},
              {"max_bm_time", cfg.max_bm_time}};
  params.update(boundary_json(bnd));
  Json notes{{"excluded_fraction", excluded}, {"moments", per_s}};
  if (excluded > 1e-3) notes["warning"] = "excluded fraction above 1e-3";
  CheckResult out{make_report("transform-mc/" + to_string(spec.sign()), params, z_max,
                              kZThreshold, n, seed, notes),
                  std::nullopt};
  Json control_params = params;
  control_params["closed_form_scale"] = 1.01;
  out.control = as_control(make_report("transform-mc/" + to_string(spec.sign()),
                                       control_params, z_max_control, kZThreshold, n, seed));
  return out;
}

/// Coupled dt / dt/2 estimates of E[(b + sigma)^(-s)]; the statistic is the
/// shift in units of the coarse standard error.
inline VerificationReport verify_discretization_bias(const BesselSpec& spec,
                                                     const Boundary& bnd, double s,
                                                     std::size_t n, double dt,
                                                     std::uint64_t seed,
                                                     unsigned threads = 0) {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.n_paths = n;
  cfg.seed = seed;
  cfg.stream_id = streams::bias;
  cfg.threads = threads;
  const auto pairs = simulate_coupled_hitting_times(spec, bnd, cfg);
  std::vector<double> coarse;
  std::vector<double> fine;
  for (const auto& p : pairs) {
    if (!p.coarse.crossed || !p.fine.crossed) continue;
    coarse.push_back(p.coarse.sigma);
    fine.push_back(p.fine.sigma);
  }
  const auto est_coarse = inverse_power_moment(coarse, bnd.b(), s);
  const auto est_fine = inverse_power_moment(fine, bnd.b(), s);
  const double shift = std::abs(est_fine.mean - est_coarse.mean);
  Json params{{"nu", spec.nu()}, {"index", to_string(spec.sign())}, {"s", s},
              {"dt", dt},        {"dt_fine", 0.5 * dt},            {"max_bm_time", cfg.max_bm_time}};
  params.update(boundary_json(bnd));
  Json notes{{"mean_dt", est_coarse.mean},
             {"mean_dt_fine", est_fine.mean},
             {"mc_se", est_coarse.standard_error},
             {"excluded_pairs", n - coarse.size()}};
  return make_report("transform-mc/bias", params, shift / est_coarse.standard_error, 1.0,
                     n, seed, notes);
}

struct DualityPoint {
  double nu;
  double b;
  double c;
  double s;
};

/// 3 x 3 x 3 grid over nu, (b, c) and s >= nu.
inline std::vector<DualityPoint> default_duality_grid() {
  std::vector<DualityPoint> grid;
  for (double nu : {0.5, 1.2, 2.0}) {
    for (auto [b, c] : {std::pair{0.25, 1.0}, std::pair{0.1, 0.4}, std::pair{0.5, 2.0}}) {
      for (double s : {nu, 2.5, 3.0}) grid.push_back({nu, b, c, s});
    }
  }
  return grid;
}

inline VerificationReport verify_duality(const std::vector<DualityPoint>& grid,
                                         const QuadratureConfig& qcfg = {}) {
  if (grid.empty()) throw EmptyInputError("verify_duality: empty grid");
  double worst = 0.0;
  Json worst_point;
  for (const auto& p : grid) {
    const double r = duality_residual(p.nu, Boundary(p.b, p.c), p.s, qcfg);
    if (!(r <= worst)) {
      worst = r;
      worst_point = Json{{"nu", p.nu}, {"b", p.b}, {"c", p.c}, {"s", p.s}};
    }
  }
  Json params{{"points", grid.size()}};
  return make_report("duality", params, worst, 1e-10, grid.size(), 0,
                     Json{{"worst_point", worst_point}});
}

struct ExpectationPoint {
  double alpha;
  double beta;
  double p;
};

/// Seeded points with alpha in [0.3, 4], beta in [0.05, 2], p in [-1, 3], and
/// alpha + 1 - p at least 0.05 away from an integer.
inline std::vector<ExpectationPoint> whittaker_grid(std::uint64_t seed,
                                                    std::size_t count = 20) {
  std::vector<ExpectationPoint> grid;
  Xoshiro256 rng(seed, streams::whittaker, 0, 0);
  while (grid.size() < count) {
    const double alpha = 0.3 + 3.7 * uniform_open(rng);
    const double beta = 0.05 + 1.95 * uniform_open(rng);
    const double p = -1.0 + 4.0 * uniform_open(rng);
    const double second = alpha + 1.0 - p;
    if (std::abs(second - std::round(second)) < 0.05) continue;
    grid.push_back({alpha, beta, p});
  }
  return grid;
}

inline VerificationReport verify_whittaker(const std::vector<ExpectationPoint>& grid,
                                           std::uint64_t seed,
                                           const QuadratureConfig& qcfg = {}) {
  if (grid.empty()) throw EmptyInputError("verify_whittaker: empty grid");
  double worst = 0.0;
  Json worst_point;
  for (const auto& q : grid) {
    const double by_quadrature = gamma_expectation(q.alpha, q.beta, q.p, qcfg).real();
    const double by_u = gamma_expectation_via_u(q.alpha, q.beta, q.p);
    const double rel = std::abs(by_quadrature - by_u) / std::abs(by_quadrature);
    if (!(rel <= worst)) {
      worst = rel;
      worst_point = Json{{"alpha", q.alpha}, {"beta", q.beta}, {"p", q.p},
                         {"quadrature", by_quadrature}, {"u_series", by_u}};
    }
  }
  Json params{{"points", grid.size()}};
  return make_report("whittaker", params, worst, 1e-7, grid.size(), seed,
                     Json{{"worst_point", worst_point}});
}

/// Points on the inversion density grid.
inline constexpr std::size_t kInversionGridPoints = 2000;

inline Json inversion_params(const BesselSpec& spec, const Boundary& bnd,
                             const InversionConfig& cfg) {
  Json params{{"nu", spec.nu()},
              {"index", to_string(spec.sign())},
              {"abscissa", cfg.abscissa},
              {"half_height", cfg.half_height},
              {"step", cfg.step},
              {"grid_points", kInversionGridPoints}};
  params.update(boundary_json(bnd));
  return params;
}

/// One-sample KS of simulated b + sigma against the CDF obtained from the
/// inverted density. The control inverts with the contour orientation flipped.
inline CheckResult verify_inversion(const BesselSpec& spec, const Boundary& bnd,
                                    std::size_t n, const InversionConfig& cfg,
                                    std::uint64_t seed, double dt = 1e-4,
                                    unsigned threads = 0) {
  SimConfig sim;
  sim.dt = dt;
  sim.n_paths = n;
  sim.seed = seed;
  sim.stream_id = streams::inversion;
  sim.threads = threads;
  const auto hits = simulate_hitting_times(spec, bnd, sim);
  auto ys = crossed_sigmas(hits);
  for (double& y : ys) y += bnd.b();
  const double crit = ks_critical_one_sample(ys.size(), kKsLevel) + 0.01;

  auto run = [&](const InversionConfig& c, Json params) {
    params["dt"] = dt;
    try {
      const MellinContour contour(spec, bnd, c, {}, threads);
      const auto grid = tail_grid(contour, kInversionGridPoints);
      const auto curve = density_curve(contour, grid, threads);
      const auto table = cdf_from_density(curve);
      const double d = ks_one_sample(ys, [&](double y) { return table(y); });
      return make_report("inversion", params, d, crit, n, seed,
                         Json{{"total_mass", table.total_mass},
                              {"truncation_error", curve.truncation_error},
                              {"min_before_clip", curve.min_before_clip},
                              {"excluded_fraction", excluded_fraction(hits)}});
    } catch (const NumericalError& e) {
      return make_report("inversion", params, 1.0, crit, n, seed,
                         Json{{"error", e.what()}});
    }
  };
  CheckResult out{run(cfg, inversion_params(spec, bnd, cfg)), std::nullopt};
  InversionConfig flipped = cfg;
  flipped.flip_orientation = true;
  Json control_params = inversion_params(spec, bnd, flipped);
  control_params["flip_orientation"] = true;
  out.control = as_control(run(flipped, control_params));
  return out;
}

/// Deterministic properties of the inverted density: normalization,
/// independence of the contour abscissa, and recovery of M(s) from the curve.
inline std::vector<VerificationReport> verify_inversion_properties(
    const BesselSpec& spec, const Boundary& bnd, const InversionConfig& cfg,
    double shift_low = 0.8, double shift_high = 1.5, unsigned threads = 0) {
  std::vector<VerificationReport> out;
  const Json params = inversion_params(spec, bnd, cfg);
  const MellinContour contour(spec, bnd, cfg, {}, threads);
  const auto grid = tail_grid(contour, kInversionGridPoints);
  const auto curve = density_curve(contour, grid, threads);

  double total_mass = curve.left_mass + curve.right_mass;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    total_mass += 0.5 * (curve.pdf[i] + curve.pdf[i - 1]) * (grid[i] - grid[i - 1]);
  }
  out.push_back(make_report("inversion/normalization", params,
                            std::abs(total_mass - 1.0), 1e-3, grid.size(), 0,
                            Json{{"total_mass", total_mass},
                                 {"left_mass", curve.left_mass},
                                 {"right_mass", curve.right_mass}}));

  InversionConfig low = cfg;
  low.abscissa = shift_low;
  InversionConfig high = cfg;
  high.abscissa = shift_high;
  const MellinContour c_low(spec, bnd, low, {}, threads);
  const MellinContour c_high(spec, bnd, high, {}, threads);
  const auto probe = log_grid(bnd.b() + 0.01, bnd.b() + 5.0, 200, bnd.b());
  double worst_shift = 0.0;
  for (double y : probe) {
    worst_shift = std::max(worst_shift,
                           std::abs(c_low.density(y).value - c_high.density(y).value));
  }
  Json shift_params = params;
  shift_params["abscissa_low"] = shift_low;
  shift_params["abscissa_high"] = shift_high;
  shift_params["probe"] = Json{{"from", probe.front()}, {"to", probe.back()},
                               {"points", probe.size()}};
  out.push_back(make_report("inversion/contour-shift", shift_params, worst_shift, 1e-5,
                            probe.size(), 0));

  double worst_rel = 0.0;
  Json per_s = Json::array();
  for (double s : {0.5, 1.0, 2.0}) {
    const double exact = mellin_transform(spec, bnd, s).real();
    const double recovered = mellin_of_curve(curve, s);
    const double rel = std::abs(recovered - exact) / exact;
    worst_rel = std::max(worst_rel, rel);
    per_s.push_back(Json{{"s", s}, {"closed_form", exact}, {"from_density", recovered}});
  }
  out.push_back(make_report("inversion/round-trip", params, worst_rel, 5e-3, grid.size(), 0,
                            Json{{"moments", per_s}}));
  return out;
}

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"dufresne", "affine",    "transform-mc",
                                              "duality",  "whittaker", "inversion"};
  return names;
}

struct SuiteOptions {
  std::set<std::string> checks{check_names().begin(), check_names().end()};
  std::uint64_t seed = 42;
  unsigned threads = 0;
  bool include_controls = true;
  bool controls_only = false;
};

/// Runs the selected checks in a fixed order.
inline std::vector<VerificationReport> run_suite(const SuiteOptions& opt) {
  for (const auto& c : opt.checks) {
    if (std::find(check_names().begin(), check_names().end(), c) == check_names().end()) {
      throw DomainError("unknown check: " + c);
    }
  }
  std::vector<VerificationReport> out;
  auto add = [&](const CheckResult& r) {
    if (!opt.controls_only) out.push_back(r.check);
    if (r.control && (opt.include_controls || opt.controls_only)) out.push_back(*r.control);
  };
  auto add_plain = [&](const VerificationReport& r) {
    if (!opt.controls_only) out.push_back(r);
  };
  const auto& sel = opt.checks;
  const Boundary desk(0.25, 1.0);
  if (sel.count("transform-mc")) {
    add(verify_transform_mc(BesselSpec::negative(0.5), desk, {0.5, 1.0, 2.0}, 200000, 1e-4,
                            opt.seed, opt.threads));
    add(verify_transform_mc(BesselSpec::positive(0.5), desk, {0.75, 1.5, 3.0}, 200000,
                            1e-4, opt.seed, opt.threads));
    if (!opt.controls_only) {
      add_plain(verify_discretization_bias(BesselSpec::negative(0.5), desk, 1.0, 100000,
                                           1e-4, opt.seed, opt.threads));
    }
  }
  if (sel.count("dufresne")) {
    const double nus[] = {0.3, 1.0, 2.0};
    for (std::uint64_t i = 0; i < 3; ++i) {
      CheckResult r = verify_dufresne(nus[i], 100000, opt.seed, opt.threads, i);
      if (nus[i] != 1.0) r.control.reset();
      add(r);
    }
  }
  if (sel.count("affine")) {
    add(verify_affine(0.5, desk, 50000, 1e-4, opt.seed, opt.threads, 0));
    CheckResult second = verify_affine(1.5, Boundary(0.1, 0.5), 50000, 1e-4, opt.seed,
                                       opt.threads, 1);
    second.control.reset();
    add(second);
  }
  if (sel.count("duality") && !opt.controls_only) {
    add_plain(verify_duality(default_duality_grid()));
  }
  if (sel.count("whittaker") && !opt.controls_only) {
    add_plain(verify_whittaker(whittaker_grid(opt.seed), opt.seed));
  }
  if (sel.count("inversion")) {
    const InversionConfig cfg;
    add(verify_inversion(BesselSpec::negative(0.5), desk, 100000, cfg, opt.seed, 1e-4,
                         opt.threads));
    if (!opt.controls_only) {
      for (auto& r : verify_inversion_properties(BesselSpec::negative(0.5), desk, cfg,
                                                 0.8, 1.5, opt.threads)) {
        add_plain(r);
      }
    }
  }
  return out;
}

/// True when every check passed and every control failed.
inline bool suite_as_expected(const std::vector<VerificationReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const auto& r) { return r.as_expected(); });
}

/// True when every report passed, controls included.
inline bool suite_all_passed(const std::vector<VerificationReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const auto& r) { return r.passed; });
}

inline Json reports_to_json(const std::vector<VerificationReport>& reports,
                            const SuiteOptions& opt) {
  Json j;
  j["config"] = Json{{"checks", opt.checks},
                     {"seed", opt.seed},
                     {"include_controls", opt.include_controls},
                     {"controls_only", opt.controls_only}};
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  j["reports"] = arr;
  return j;
}

inline void write_table(std::ostream& os, const std::vector<VerificationReport>& reports) {
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %14s %14s  %-6s %-6s\n", "check", "statistic",
                "threshold", "result", "expect");
  os << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-28s %14.6g %14.6g  %-6s %-6s\n", r.name.c_str(),
                  r.statistic, r.threshold, r.passed ? "pass" : "FAIL",
                  r.expect_pass ? "pass" : "fail");
    os << line;
  }
}

}  // namespace besselhit
