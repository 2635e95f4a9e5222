#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "besselhit/numerics.hpp"
#include "besselhit/simulate.hpp"

using namespace besselhit;

namespace {

const Boundary kDesk(0.25, 1.0);

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

std::vector<double> gamma_draws(double alpha, std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = gamma_sample(alpha, rng);
  return xs;
}

}  // namespace

TEST(Rng, DistinctStreams) {
  Xoshiro256 a(1, 0, 0, 0);
  Xoshiro256 b(1, 0, 1, 0);
  Xoshiro256 c(1, 0, 0, 1);
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_NE(x, c());
  Xoshiro256 again(1, 0, 0, 0);
  EXPECT_EQ(x, again());
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform_open(a);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(GammaSampler, Mean) {
  const auto xs = gamma_draws(2.5, 1000000, 3);
  EXPECT_NEAR(mean_se(xs).mean, 2.5, 3.0 * std::sqrt(2.5 / 1e6));
}

TEST(GammaSampler, KsSmallShape) {
  const auto xs = gamma_draws(0.3, 100000, 4);
  const double d =
      ks_one_sample(xs, [](double x) { return regularized_incomplete_gamma_lower(0.3, x); });
  EXPECT_LT(d, ks_critical_one_sample(xs.size()));
}

TEST(GammaSampler, ExponentialCase) {
  const auto xs = gamma_draws(1.0, 100000, 5);
  const double d = ks_one_sample(xs, [](double x) { return 1.0 - std::exp(-x); });
  EXPECT_LT(d, ks_critical_one_sample(xs.size()));
  Xoshiro256 rng(1);
  EXPECT_THROW(gamma_sample(0.0, rng), DomainError);
}

TEST(Dufresne, MedianAndReciprocalMean) {
  auto zs = simulate_dufresne(1.0, 1000000, 6, 0, 1);
  for (double z : zs) ASSERT_GT(z, 0.0);
  std::nth_element(zs.begin(), zs.begin() + zs.size() / 2, zs.end());
  const double median = zs[zs.size() / 2];
  EXPECT_NEAR(median / (0.5 / std::log(2.0)), 1.0, 0.01);

  const auto half = simulate_dufresne(0.5, 1000000, 7, 0, 1);
  std::vector<double> inv(half.size());
  for (std::size_t i = 0; i < half.size(); ++i) inv[i] = 1.0 / half[i];
  const auto m = mean_se(inv);
  EXPECT_NEAR(m.mean, 1.0, 3.0 * m.se);
}

TEST(Perpetuity, MatchesExactSampler) {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.max_bm_time = 200.0;
  cfg.n_paths = 100000;
  cfg.seed = 8;
  const auto draws = simulate_perpetuities(1.0, cfg);
  std::vector<double> truncated;
  for (const auto& d : draws) {
    ASSERT_GT(d.value, 0.0);
    truncated.push_back(d.value);
  }
  const auto exact = simulate_dufresne(1.0, 100000, 8, 1);
  EXPECT_LT(ks_two_sample(truncated, exact),
            ks_critical_two_sample(truncated.size(), exact.size()));
}

TEST(Perpetuity, MeanAtFiniteVarianceShape) {
  // nu = 2.5: E[Z] = 1 / (2 (nu - 1)) = 1/3, finite variance.
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.max_bm_time = 200.0;
  cfg.n_paths = 100000;
  cfg.seed = 9;
  const auto draws = simulate_perpetuities(2.5, cfg);
  std::vector<double> values;
  for (const auto& d : draws) values.push_back(d.value);
  const auto m = mean_se(values);
  EXPECT_NEAR(m.mean, 1.0 / 3.0, 3.0 * m.se);
}

TEST(Gbm, ExponentialMartingale) {
  // exp(B_t - t / 2) has mean 1.
  std::vector<double> es(100000);
  for (std::size_t i = 0; i < es.size(); ++i) {
    Xoshiro256 rng(10, 0, i, 0);
    es[i] = simulate_gbm(BesselSpec::negative(0.5), 1.0, 1e-2, rng).E;
  }
  const auto m = mean_se(es);
  EXPECT_NEAR(m.mean, 1.0, 3.0 * m.se);
}

TEST(Gbm, ClockIsConsistent) {
  Xoshiro256 rng(11);
  GbmState st;
  const double h = 1e-3;
  for (int k = 0; k < 5000; ++k) {
    const double e2_prev = st.E * st.E;
    const double a_prev = st.A;
    gbm_advance(st, -0.5, h, normal_sample(rng));
    EXPECT_GE(st.A, a_prev);
    EXPECT_LE(st.A - a_prev, h * std::max(e2_prev, st.E * st.E) * (1.0 + 1e-12));
    EXPECT_GT(st.E, 0.0);
  }
}

TEST(Hitting, DegenerateBoundary) {
  SimConfig cfg;
  Xoshiro256 n(1);
  Xoshiro256 b(2);
  const auto hit =
      sample_hitting_time(BesselSpec::negative(0.5), Boundary::degenerate(1.0), cfg, n, b);
  EXPECT_TRUE(hit.crossed);
  EXPECT_EQ(hit.sigma, 0.0);
  EXPECT_EQ(hit.bm_time_at_cross, 0.0);
}

TEST(Hitting, CrossingCondition) {
  SimConfig cfg;
  cfg.n_paths = 200;
  cfg.seed = 12;
  const auto hits = simulate_hitting_times(BesselSpec::negative(0.5), kDesk, cfg);
  for (const auto& h : hits) {
    ASSERT_TRUE(h.crossed);
    EXPECT_GE(h.sigma, 0.0);
    EXPECT_GT(h.bm_time_at_cross, 0.0);
  }
}

TEST(Hitting, NonCrossingIsFlagged) {
  SimConfig cfg;
  cfg.max_bm_time = 100.0 * cfg.dt;
  cfg.n_paths = 50;
  cfg.seed = 13;
  const auto hits = simulate_hitting_times(BesselSpec::positive(0.5), Boundary(0.01, 1.0), cfg);
  EXPECT_GT(excluded_fraction(hits), 0.5);
  EXPECT_EQ(crossed_sigmas(hits).size(),
            static_cast<std::size_t>(std::count_if(hits.begin(), hits.end(),
                                                   [](const auto& h) { return h.crossed; })));
}

TEST(Hitting, IndependentOfThreadCount) {
  SimConfig cfg;
  cfg.n_paths = 400;
  cfg.seed = 14;
  cfg.threads = 1;
  const auto one = simulate_hitting_times(BesselSpec::positive(0.5), kDesk, cfg);
  cfg.threads = 8;
  const auto eight = simulate_hitting_times(BesselSpec::positive(0.5), kDesk, cfg);
  ASSERT_EQ(one.size(), eight.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].sigma, eight[i].sigma);
    EXPECT_EQ(one[i].crossed, eight[i].crossed);
  }
}

TEST(Hitting, CoupledFinePathSharesBrownianMotion) {
  SimConfig cfg;
  cfg.n_paths = 300;
  cfg.seed = 15;
  const auto pairs = simulate_coupled_hitting_times(BesselSpec::negative(0.5), kDesk, cfg);
  double mean_gap = 0.0;
  double mean_sigma = 0.0;
  for (const auto& p : pairs) {
    mean_gap += std::abs(p.fine.sigma - p.coarse.sigma);
    mean_sigma += p.coarse.sigma;
  }
  EXPECT_LT(mean_gap, 0.05 * mean_sigma);
}

TEST(Affine, ComponentsExceedB) {
  SimConfig cfg;
  cfg.n_paths = 300;
  cfg.seed = 16;
  for (const auto& p : simulate_affine_pairs(0.5, kDesk, cfg)) {
    EXPECT_GT(p.lhs, kDesk.b());
    if (p.crossed) EXPECT_GT(p.rhs, kDesk.b());
  }
}

TEST(Affine, FirstMoment) {
  SimConfig cfg;
  cfg.n_paths = 20000;
  cfg.seed = 17;
  const auto pairs = simulate_affine_pairs(0.5, kDesk, cfg);
  std::vector<double> l;
  std::vector<double> r;
  for (const auto& p : pairs) {
    l.push_back(1.0 / p.lhs);
    if (p.crossed) r.push_back(1.0 / p.rhs);
  }
  const auto ml = mean_se(l);
  const auto mr = mean_se(r);
  EXPECT_NEAR(ml.mean, mr.mean, 3.0 * std::hypot(ml.se, mr.se));
}

TEST(SimConfigTest, Validation) {
  SimConfig cfg;
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.n_paths = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.max_bm_time = 50.0 * cfg.dt;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(SampleSetTest, Serialization) {
  SampleSet set({0.1, 2.5, 1.0 / 3.0}, "sigma", 42, 4);
  set.metadata["nu"] = 0.5;
  std::ostringstream csv;
  write_csv(csv, set);
  const std::string text = csv.str();
  EXPECT_NE(text.find("# label: sigma\n"), std::string::npos);
  EXPECT_NE(text.find("# n_valid: 3\n"), std::string::npos);
  EXPECT_NE(text.find("value\n0.1\n2.5\n0.3333333333333333\n"), std::string::npos);
  const auto j = set.to_json();
  EXPECT_EQ(j["n_requested"], 4);
  EXPECT_EQ(j["values"].size(), 3u);
  EXPECT_EQ(j["values"][2].get<double>(), 1.0 / 3.0);
  EXPECT_THROW(SampleSet({std::nan("")}, "x", 0, 1), DomainError);
  EXPECT_THROW(SampleSet({1.0, 2.0}, "x", 0, 1), DomainError);
}
