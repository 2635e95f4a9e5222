// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "besselhit/verify.hpp"

using namespace besselhit;

namespace {

struct Group {
  std::vector<VerificationReport> reports;
  double seconds = 0.0;
};

Group run_group(const std::string& check, unsigned threads) {
  SuiteOptions opt;
  opt.checks = {check};
  opt.seed = 42;
  opt.threads = threads;
  const auto t0 = std::chrono::steady_clock::now();
  Group g;
  g.reports = run_suite(opt);
  g.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return g;
}

const VerificationReport& find(const std::vector<VerificationReport>& rs,
                               const std::string& name, int occurrence = 0) {
  for (const auto& r : rs) {
    if (r.name == name && occurrence-- == 0) return r;
  }
  std::fprintf(stderr, "missing report %s\n", name.c_str());
  std::exit(2);
}

int failures = 0;

void criterion(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace

int main() {
  std::map<std::string, Group> groups;
  std::vector<VerificationReport> serial;
  // Same order as run_suite, so the concatenation is comparable.
  for (const char* check :
       {"transform-mc", "dufresne", "affine", "duality", "whittaker", "inversion"}) {
    groups[check] = run_group(check, 1);
    for (const auto& r : groups[check].reports) serial.push_back(r);
    std::fprintf(stderr, "%s: %.1f s\n", check, groups[check].seconds);
  }

  const auto& tm = groups["transform-mc"].reports;
  const auto& neg = find(tm, "transform-mc/neg");
  criterion(1,
            neg.passed && !find(tm, "transform-mc/neg/control").passed &&
                groups["transform-mc"].seconds <= 120.0,
            fmt("max z = %.3f (<= 3.5) over s in {0.5, 1, 2}, N = 2e5, dt = 1e-4; "
                "transform-mc group %.1f s",
                neg.statistic, groups["transform-mc"].seconds));

  const auto& pos = find(tm, "transform-mc/pos");
  const double excluded = pos.notes["excluded_fraction"].get<double>();
  criterion(2, pos.passed && excluded < 1e-3,
            fmt("max z = %.3f (<= 3.5) over s in {0.75, 1.5, 3}; excluded fraction %.2g (< 1e-3)",
                pos.statistic, excluded));

  const auto& du = groups["dufresne"].reports;
  bool dufresne_ok = true;
  std::string dufresne_detail = "KS/critical:";
  for (int i = 0; i < 3; ++i) {
    const auto& r = find(du, "dufresne", i);
    dufresne_ok = dufresne_ok && r.passed;
    dufresne_detail += fmt(" nu=%.1f %.4f/%.4f", r.params["nu"].get<double>(), r.statistic,
                           r.threshold);
  }
  criterion(3, dufresne_ok && !find(du, "dufresne/control").passed, dufresne_detail);

  const auto& af = groups["affine"].reports;
  const auto& a1 = find(af, "affine", 0);
  const auto& a2 = find(af, "affine", 1);
  const auto& ac = find(af, "affine/control");
  criterion(4, a1.passed && a2.passed && !ac.passed,
            fmt("KS %.4f and %.4f (<= %.4f);", a1.statistic, a2.statistic, a1.threshold) +
                fmt(" b-perturbed control KS %.4f fails", ac.statistic));

  const auto& dual = find(groups["duality"].reports, "duality");
  criterion(5, dual.passed && groups["duality"].seconds < 10.0,
            fmt("max residual %.3g (<= 1e-10) over 27 points in %.2f s", dual.statistic,
                groups["duality"].seconds));

  const auto& wh = find(groups["whittaker"].reports, "whittaker");
  criterion(6, wh.passed, fmt("max relative gap %.3g (<= 1e-7) over 20 points", wh.statistic));

  const auto& inv = groups["inversion"].reports;
  const auto& ks = find(inv, "inversion");
  const auto& norm = find(inv, "inversion/normalization");
  const auto& shift = find(inv, "inversion/contour-shift");
  const auto& trip = find(inv, "inversion/round-trip");
  criterion(7,
            ks.passed && norm.passed && shift.passed && trip.passed &&
                !find(inv, "inversion/control").passed,
            fmt("KS %.4f (<= %.4f); |mass - 1| %.2g (<= 1e-3); ", ks.statistic, ks.threshold,
                norm.statistic) +
                fmt("contour shift %.2g (<= 1e-5); round trip %.2g (<= 5e-3)", shift.statistic,
                    trip.statistic));

  const auto& bias = find(tm, "transform-mc/bias");
  criterion(8, bias.passed,
            fmt("|mean(dt/2) - mean(dt)| = %.3g SE (< 1) at N = 1e5", bias.statistic));

  SuiteOptions all;
  all.seed = 42;
  all.threads = 8;
  const auto parallel = run_suite(all);
  Json a = Json::array();
  Json b = Json::array();
  for (const auto& r : serial) a.push_back(r.to_json());
  for (const auto& r : parallel) b.push_back(r.to_json());
  const bool same = a.dump() == b.dump();
  criterion(9, same && suite_as_expected(parallel),
            std::string("reports from 1-thread and 8-thread runs ") +
                (same ? "byte-identical" : "differ"));

  return failures == 0 ? 0 : 1;
}
