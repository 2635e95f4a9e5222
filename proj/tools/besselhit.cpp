// besselhit: transforms, densities, simulation and verification of the
// hitting time sigma of a Bessel process at a square-root boundary.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "besselhit/inversion.hpp"
#include "besselhit/simulate.hpp"
#include "besselhit/transforms.hpp"
#include "besselhit/verify.hpp"

namespace bh = besselhit;
using bh::Json;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kNumerical = 3 };

struct ProcessFlags {
  std::string index = "neg";
  double nu = 0.5;
  double b = 0.25;
  double c = 1.0;

  bh::BesselSpec spec() const {
    return {nu, index == "neg" ? bh::IndexSign::negative : bh::IndexSign::positive};
  }
  bh::Boundary boundary() const { return {b, c}; }
  Json echo() const { return Json{{"index", index}, {"nu", nu}, {"b", b}, {"c", c}}; }
};

void add_process_flags(CLI::App* app, ProcessFlags& p) {
  app->add_option("--index", p.index, "neg or pos")
      ->check(CLI::IsMember({"neg", "pos"}))
      ->capture_default_str();
  app->add_option("--nu", p.nu, "index magnitude (> 0)")->capture_default_str();
  app->add_option("--b", p.b, "boundary offset, 0 < b < c")->capture_default_str();
  app->add_option("--c", p.c, "boundary scale")->capture_default_str();
}

struct Output {
  std::string path;
  std::string format = "csv";
};

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw bh::DomainError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_metadata(std::ostream& os, const Json& config) {
  for (const auto& [k, v] : config.items()) {
    os << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
}

struct TransformFlags {
  ProcessFlags process;
  std::vector<double> s;
  Output out;
};

int cmd_transform(const TransformFlags& f) {
  const auto spec = f.process.spec();
  const auto bnd = f.process.boundary();
  Json config = f.process.echo();
  config["command"] = "transform";
  config["s"] = f.s;
  std::vector<double> values;
  for (double s : f.s) {
    if (!(s >= 0.0)) throw bh::DomainError("--s must be >= 0");
    values.push_back(bh::mellin_transform(spec, bnd, s).real());
  }
  Sink sink(f.out.path);
  auto& os = sink.stream();
  if (f.out.format == "json") {
    Json j;
    j["config"] = config;
    Json rows = Json::array();
    for (std::size_t i = 0; i < f.s.size(); ++i) {
      rows.push_back(Json{{"s", f.s[i]}, {"value", values[i]}});
    }
    j["values"] = rows;
    os << j.dump(2) << '\n';
  } else {
    write_metadata(os, config);
    os << "s,value\n";
    for (std::size_t i = 0; i < f.s.size(); ++i) {
      os << bh::format_double(f.s[i]) << ',' << bh::format_double(values[i]) << '\n';
    }
  }
  return kOk;
}

struct DensityFlags {
  ProcessFlags process;
  double ymin = 0.3;
  double ymax = 5.0;
  std::size_t points = 200;
  std::string grid = "log";
  bh::InversionConfig inversion;
  unsigned threads = 0;
  Output out;
};

int cmd_density(const DensityFlags& f) {
  const auto spec = f.process.spec();
  const auto bnd = f.process.boundary();
  if (!(f.ymin > bnd.b())) throw bh::DomainError("--ymin must exceed b");
  if (!(f.ymax > f.ymin)) throw bh::DomainError("--ymax must exceed --ymin");
  f.inversion.validate();
  const auto grid = f.grid == "log" ? bh::log_grid(f.ymin, f.ymax, f.points, bnd.b())
                                    : bh::linear_grid(f.ymin, f.ymax, f.points);
  const bh::MellinContour contour(spec, bnd, f.inversion, {}, f.threads);
  const auto curve = bh::density_curve(contour, grid, f.threads);
  const auto table = bh::cdf_from_density(curve);
  if (curve.min_before_clip < -bh::kNegativeDensityTolerance) {
    std::cerr << "warning: negative density " << curve.min_before_clip
              << " clipped to 0\n";
  }

  Json config = f.process.echo();
  config["command"] = "density";
  config["ymin"] = f.ymin;
  config["ymax"] = f.ymax;
  config["points"] = f.points;
  config["grid"] = f.grid;
  config["abscissa"] = f.inversion.abscissa;
  config["half_height"] = f.inversion.half_height;
  config["step"] = f.inversion.step;
  config["tail_tol"] = f.inversion.tail_tol;
  Json diagnostics{{"mass_below_grid", curve.left_mass},
                   {"mass_above_grid", curve.right_mass},
                   {"total_mass", table.total_mass},
                   {"truncation_error", curve.truncation_error},
                   {"min_before_clip", curve.min_before_clip}};

  Sink sink(f.out.path);
  auto& os = sink.stream();
  if (f.out.format == "json") {
    Json j;
    j["config"] = config;
    j["diagnostics"] = diagnostics;
    j["y"] = grid;
    j["pdf"] = curve.pdf;
    j["cdf"] = table.cdf;
    os << j.dump(2) << '\n';
  } else {
    write_metadata(os, config);
    write_metadata(os, diagnostics);
    os << "y,pdf,cdf\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      os << bh::format_double(grid[i]) << ',' << bh::format_double(curve.pdf[i]) << ','
         << bh::format_double(table.cdf[i]) << '\n';
    }
  }
  return kOk;
}

struct SimulateFlags {
  ProcessFlags process;
  bh::SimConfig sim;
  std::vector<double> moments{0.5, 1.0, 2.0};
  std::string summary_path;
  Output out;
};

int cmd_simulate(SimulateFlags f) {
  const auto spec = f.process.spec();
  const auto bnd = f.process.boundary();
  f.sim.validate();
  const auto hits = bh::simulate_hitting_times(spec, bnd, f.sim);
  bh::SampleSet set(bh::crossed_sigmas(hits), "sigma", f.sim.seed, f.sim.n_paths);

  Json config = f.process.echo();
  config["command"] = "simulate";
  config["paths"] = f.sim.n_paths;
  config["dt"] = f.sim.dt;
  config["max_bm_time"] = f.sim.max_bm_time;
  config["seed"] = f.sim.seed;
  config["stream_id"] = f.sim.stream_id;
  config["moment_s"] = f.moments;

  Json summary;
  summary["config"] = config;
  summary["n_valid"] = set.n_valid;
  summary["excluded_fraction"] = bh::excluded_fraction(hits);
  Json moments = Json::array();
  if (set.n_valid >= 2) {
    for (double s : f.moments) {
      const auto est = bh::inverse_power_moment(set.values, bnd.b(), s);
      moments.push_back(Json{{"s", s}, {"mean", est.mean}, {"se", est.standard_error}});
    }
  }
  summary["moments"] = moments;

  for (const auto& [k, v] : config.items()) {
    if (k != "seed") set.metadata[k] = v;
  }
  Sink sink(f.out.path);
  auto& os = sink.stream();
  if (f.out.format == "json") {
    Json j = set.to_json();
    j["summary"] = summary;
    os << j.dump(2) << '\n';
    return kOk;
  }
  bh::write_csv(os, set);
  if (f.summary_path.empty()) {
    std::cerr << summary.dump(2) << '\n';
  } else {
    Sink summary_sink(f.summary_path);
    summary_sink.stream() << summary.dump(2) << '\n';
  }
  return kOk;
}

struct VerifyFlags {
  std::vector<std::string> checks{"all"};
  std::uint64_t seed = 42;
  unsigned threads = 0;
  bool controls_only = false;
  bool no_controls = false;
  std::string format = "json";
  std::string path;
};

int cmd_verify(const VerifyFlags& f) {
  bh::SuiteOptions opt;
  opt.seed = f.seed;
  opt.threads = f.threads;
  opt.controls_only = f.controls_only;
  opt.include_controls = !f.no_controls;
  opt.checks.clear();
  for (const auto& c : f.checks) {
    if (c == "all") {
      opt.checks.insert(bh::check_names().begin(), bh::check_names().end());
    } else {
      opt.checks.insert(c);
    }
  }
  const auto reports = bh::run_suite(opt);
  if (reports.empty()) throw bh::DomainError("selected checks have no negative control");
  Sink sink(f.path);
  auto& os = sink.stream();
  if (f.format == "table") {
    bh::write_table(os, reports);
  } else {
    os << bh::reports_to_json(reports, opt).dump(2) << '\n';
  }
  const bool ok =
      f.controls_only ? bh::suite_all_passed(reports) : bh::suite_as_expected(reports);
  return ok ? kOk : kVerifyFailed;
}

void add_output(CLI::App* app, Output& out) {
  app->add_option("--out", out.path, "output file (default stdout)");
  app->add_option("--format", out.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bessel process hitting times at square-root boundaries"};
  app.require_subcommand(1);

  TransformFlags tf;
  auto* transform = app.add_subcommand("transform", "Mellin transform E[(b + sigma)^(-s)]");
  add_process_flags(transform, tf.process);
  transform->add_option("--s", tf.s, "evaluation point (repeatable)")->required();
  add_output(transform, tf.out);

  DensityFlags df;
  auto* density = app.add_subcommand("density", "density and CDF of b + sigma");
  add_process_flags(density, df.process);
  density->add_option("--ymin", df.ymin, "first grid point (> b)")->capture_default_str();
  density->add_option("--ymax", df.ymax, "last grid point")->capture_default_str();
  density->add_option("--points", df.points, "grid size")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  density->add_option("--grid", df.grid, "log (in y - b) or linear")
      ->check(CLI::IsMember({"log", "linear"}))
      ->capture_default_str();
  density->add_option("--abscissa", df.inversion.abscissa, "contour abscissa")
      ->capture_default_str();
  density->add_option("--half-height", df.inversion.half_height, "contour half height")
      ->capture_default_str();
  density->add_option("--step", df.inversion.step, "contour step")->capture_default_str();
  density->add_option("--threads", df.threads, "worker threads (0 = all cores)");
  add_output(density, df.out);

  SimulateFlags sf;
  sf.sim.n_paths = 10000;
  sf.sim.seed = 42;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo samples of sigma");
  add_process_flags(simulate, sf.process);
  simulate->add_option("--paths", sf.sim.n_paths, "number of paths")->capture_default_str();
  simulate->add_option("--dt", sf.sim.dt, "BM time step")->capture_default_str();
  simulate->add_option("--max-bm-time", sf.sim.max_bm_time, "BM time horizon")
      ->capture_default_str();
  simulate->add_option("--seed", sf.sim.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--stream-id", sf.sim.stream_id, "RNG stream")->capture_default_str();
  simulate->add_option("--moment-s", sf.moments, "s for E[(b + sigma)^(-s)] in the summary");
  simulate->add_option("--summary", sf.summary_path, "JSON summary file (default stderr)");
  simulate->add_option("--threads", sf.sim.threads, "worker threads (0 = all cores)");
  add_output(simulate, sf.out);

  VerifyFlags vf;
  auto* verify = app.add_subcommand("verify", "run the identity checks");
  std::vector<std::string> allowed = bh::check_names();
  allowed.push_back("all");
  verify->add_option("--check", vf.checks, "check name or all (repeatable)")
      ->check(CLI::IsMember(allowed))
      ->capture_default_str();
  verify->add_option("--seed", vf.seed, "RNG seed")->capture_default_str();
  verify->add_option("--threads", vf.threads, "worker threads (0 = all cores)");
  verify->add_flag("--control", vf.controls_only, "run only the negative controls");
  verify->add_flag("--no-controls", vf.no_controls, "skip the negative controls");
  verify->add_option("--format", vf.format, "json or table")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  verify->add_option("--out", vf.path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*transform) return cmd_transform(tf);
    if (*density) return cmd_density(df);
    if (*simulate) return cmd_simulate(sf);
    if (*verify) return cmd_verify(vf);
  } catch (const bh::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
