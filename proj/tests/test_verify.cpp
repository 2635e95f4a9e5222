#include <gtest/gtest.h>

#include <sstream>

#include "besselhit/verify.hpp"

using namespace besselhit;

TEST(Report, PassedIffStatisticBelowThreshold) {
  EXPECT_TRUE(make_report("x", Json::object(), 1.0, 1.0, 1, 0).passed);
  EXPECT_FALSE(make_report("x", Json::object(), 1.5, 1.0, 1, 0).passed);
  EXPECT_FALSE(make_report("x", Json::object(), std::nan(""), 1.0, 1, 0).passed);
  const auto control = as_control(make_report("x", Json::object(), 2.0, 1.0, 1, 0));
  EXPECT_EQ(control.name, "x/control");
  EXPECT_TRUE(control.as_expected());
}

TEST(Report, JsonSchema) {
  const auto j = make_report("duality", Json{{"k", 1}}, 0.5, 1.0, 3, 42).to_json();
  for (const char* key :
       {"name", "params", "statistic", "threshold", "passed", "expect", "n_samples", "seed", "notes"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Duality, DefaultGrid) {
  const auto grid = default_duality_grid();
  EXPECT_EQ(grid.size(), 27u);
  for (const auto& p : grid) EXPECT_GE(p.s, p.nu);
  const auto r = verify_duality(grid);
  EXPECT_TRUE(r.passed) << r.statistic;
}

TEST(Whittaker, SeededGrid) {
  const auto a = whittaker_grid(42);
  const auto b = whittaker_grid(42);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].alpha, b[i].alpha);
  const auto r = verify_whittaker(a, 42);
  EXPECT_TRUE(r.passed) << r.statistic;
  EXPECT_NE(whittaker_grid(43)[0].alpha, a[0].alpha);
}

TEST(Dufresne, PassesAndControlFails) {
  const auto r = verify_dufresne(1.0, 20000, 5, 0);
  EXPECT_TRUE(r.check.passed) << r.check.statistic;
  ASSERT_TRUE(r.control.has_value());
  EXPECT_FALSE(r.control->passed);
  EXPECT_THROW(verify_dufresne(1.0, 100, 5), DomainError);
}

TEST(Affine, PassesAndControlFails) {
  const auto r = verify_affine(0.5, Boundary(0.25, 1.0), 10000, 1e-4, 6);
  EXPECT_TRUE(r.check.passed) << r.check.statistic;
  ASSERT_TRUE(r.control.has_value());
  EXPECT_FALSE(r.control->passed);
}

TEST(Suite, RejectsUnknownCheck) {
  SuiteOptions opt;
  opt.checks = {"nonsense"};
  EXPECT_THROW(run_suite(opt), DomainError);
}

TEST(Suite, DeterministicOutput) {
  SuiteOptions opt;
  opt.checks = {"duality", "whittaker"};
  const auto a = reports_to_json(run_suite(opt), opt).dump();
  opt.threads = 3;
  const auto b = reports_to_json(run_suite(opt), opt).dump();
  EXPECT_EQ(a, b);
}

TEST(Suite, Table) {
  SuiteOptions opt;
  opt.checks = {"duality"};
  std::ostringstream os;
  write_table(os, run_suite(opt));
  EXPECT_NE(os.str().find("duality"), std::string::npos);
  EXPECT_NE(os.str().find("pass"), std::string::npos);
}
