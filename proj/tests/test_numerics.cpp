#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "besselhit/numerics.hpp"
#include "besselhit/simulate/rng.hpp"

using namespace besselhit;

namespace {

// Gamma(z) = int exp(z u - e^u) du; the trapezoid rule on a smooth,
// doubly-exponentially decaying integrand converges geometrically.
Complex brute_force_gamma(Complex z) {
  const double h = 1e-3;
  Complex sum = 0.0;
  for (int i = 0; i <= 66000; ++i) {
    const double u = -60.0 + h * i;
    sum += std::exp(z * u - std::exp(u));
  }
  return sum * h;
}

}  // namespace

TEST(LogGamma, RealAxisMatchesLibm) {
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.3, 30.0, 150.0}) {
    EXPECT_NEAR(log_gamma(x), std::lgamma(x), 1e-13 * std::max(1.0, std::abs(std::lgamma(x))))
        << x;
  }
}

TEST(LogGamma, ComplexArgumentMatchesIntegral) {
  for (Complex z : {Complex(3.0, 4.0), Complex(0.7, -2.0), Complex(5.0, 10.0)}) {
    // The oscillating sum carries rounding on the scale of Gamma(re z).
    const Complex expected = brute_force_gamma(z);
    const Complex got = std::exp(log_gamma(z));
    EXPECT_LT(std::abs(got - expected), 1e-12 * std::tgamma(z.real())) << z;
  }
}

TEST(LogGamma, LargeImaginaryPart) {
  // |Gamma(1/2 + i t)|^2 = pi / cosh(pi t)
  for (double t : {10.0, 50.0, 200.0}) {
    const double lhs = 2.0 * log_gamma(Complex(0.5, t)).real();
    const double rhs = std::log(std::numbers::pi) - std::log(std::cosh(std::numbers::pi * t));
    EXPECT_NEAR(lhs, rhs, 1e-11 * std::abs(rhs));
  }
}

TEST(Gamma, Reflection) {
  const double x = 0.3;
  const Complex prod = gamma_function(x) * gamma_function(1.0 - x);
  EXPECT_NEAR(prod.real(), std::numbers::pi / std::sin(std::numbers::pi * x), 1e-12);
}

TEST(Gamma, ReciprocalVanishesAtPoles) {
  for (double n : {0.0, -1.0, -2.0, -7.0}) {
    EXPECT_EQ(reciprocal_gamma(Complex(n, 0.0)), Complex(0.0, 0.0));
  }
  EXPECT_NEAR(reciprocal_gamma(Complex(-0.5, 0.0)).real(), -0.5 / std::sqrt(std::numbers::pi),
              1e-13);
}

TEST(IncompleteGamma, KnownValues) {
  EXPECT_NEAR(regularized_incomplete_gamma_lower(0.5, 2.0), std::erf(std::sqrt(2.0)), 1e-14);
  for (double x : {0.1, 1.0, 5.0, 30.0}) {
    EXPECT_NEAR(regularized_incomplete_gamma_upper(1.0, x), std::exp(-x), 1e-14);
  }
  for (double a : {0.3, 2.0, 12.0}) {
    for (double x : {0.05, 1.0, 4.0, 20.0}) {
      EXPECT_NEAR(regularized_incomplete_gamma_lower(a, x) +
                      regularized_incomplete_gamma_upper(a, x),
                  1.0, 1e-14);
    }
  }
}

TEST(IncompleteGamma, DomainErrors) {
  EXPECT_THROW(regularized_incomplete_gamma_lower(0.0, 1.0), DomainError);
  EXPECT_THROW(regularized_incomplete_gamma_upper(1.0, -1.0), DomainError);
}

TEST(GaussKronrod, SmoothIntegral) {
  auto f = [](double x) { return Complex(std::sin(x), 0.0); };
  const auto r = detail::adaptive_gauss_kronrod(f, 0.0, 1.0, 1e-14, 1e-14, 100);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value.real(), 1.0 - std::cos(1.0), 1e-14);
}

TEST(GammaWeighted, ReproducesGamma) {
  for (Complex a : {Complex(0.1, 0.0), Complex(2.5, 0.0), Complex(1.0, 20.0), Complex(0.3, -50.0)}) {
    const auto r = integrate_gamma_weighted([](Complex) { return Complex(1.0, 0.0); }, a);
    const Complex expected = gamma_function(a);
    EXPECT_LT(std::abs(r.value - expected) / std::abs(expected), 1e-9) << a;
  }
}

TEST(GammaWeighted, ExponentialIntegralOracle) {
  // int e^-x / (1 + x) dx by a fine midpoint rule in t = x / (1 + x).
  double oracle = 0.0;
  const int n = 2000000;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    const double x = t / (1.0 - t);
    oracle += std::exp(-x) / (1.0 + x) / ((1.0 - t) * (1.0 - t));
  }
  oracle /= n;
  const auto r = integrate_gamma_weighted([](Complex x) { return 1.0 / (1.0 + x); }, 1.0);
  EXPECT_NEAR(r.value.real(), oracle, 1e-10);
  ASSERT_TRUE(r.laguerre_estimate.has_value());
  EXPECT_NEAR(r.laguerre_estimate->real(), oracle, 1e-6);
}

TEST(GammaWeighted, RejectsBadAlpha) {
  auto one = [](Complex) { return Complex(1.0, 0.0); };
  EXPECT_THROW(integrate_gamma_weighted(one, Complex(0.0, 1.0)), DomainError);
  QuadratureConfig bad;
  bad.rel_tol = -1.0;
  EXPECT_THROW(integrate_gamma_weighted(one, 1.0, bad), DomainError);
}

TEST(Kolmogorov, Quantile) {
  EXPECT_NEAR(kolmogorov_quantile(0.99), 1.62762, 1e-4);
  EXPECT_NEAR(kolmogorov_quantile(0.95), 1.35810, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(kolmogorov_quantile(0.9)), 0.1, 1e-10);
}

TEST(KsOneSample, StratifiedSample) {
  const std::size_t n = 1000;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = (i + 0.5) / n;
  EXPECT_NEAR(ks_one_sample(xs, [](double x) { return x; }), 0.5 / n, 1e-15);
}

TEST(KsOneSample, SampleFromReferencePasses) {
  Xoshiro256 rng(7);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = uniform_open(rng);
  const double d = ks_one_sample(xs, [](double x) { return x; });
  EXPECT_LT(d, ks_critical_one_sample(xs.size()));
  EXPECT_THROW(ks_one_sample(std::vector<double>{}, [](double x) { return x; }),
               EmptyInputError);
}

TEST(KsTwoSample, TiesAndShift) {
  const std::vector<double> a{1, 2, 2, 3};
  EXPECT_EQ(ks_two_sample(a, a), 0.0);
  const std::vector<double> b{1, 1, 2, 3};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b), 0.25);
  const std::vector<double> c{10, 11};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, c), 1.0);
  EXPECT_THROW(ks_two_sample(a, std::vector<double>{}), EmptyInputError);
}

TEST(KsTwoSample, CriticalValue) {
  EXPECT_NEAR(ks_critical_two_sample(10000, 10000), 1.62762 * std::sqrt(2.0 / 10000), 1e-6);
  EXPECT_NEAR(ks_p_value_two_sample(ks_critical_two_sample(500, 800), 500, 800), 0.01, 1e-9);
}
