#include <gtest/gtest.h>

#include <numbers>

#include "contactnet/powerlaw.hpp"
#include "oracles.hpp"

using namespace contactnet;

TEST(HurwitzZeta, ClosedForms) {
  EXPECT_NEAR(hurwitz_zeta(2.0, 1.0), std::numbers::pi * std::numbers::pi / 6.0, 1e-13);
  EXPECT_NEAR(hurwitz_zeta(4.0, 1.0), std::pow(std::numbers::pi, 4) / 90.0, 1e-13);
  // zeta(2, 1/2) = (2^2 - 1) zeta(2)
  EXPECT_NEAR(hurwitz_zeta(2.0, 0.5), 3.0 * std::numbers::pi * std::numbers::pi / 6.0, 1e-12);
}

TEST(HurwitzZeta, MatchesDirectSummation) {
  for (double s : {1.2, 1.5, 2.0, 2.5, 3.7})
    for (double q : {1.0, 2.0, 5.0, 37.0}) {
      const double brute = oracle::zeta_brute(s, q);
      EXPECT_NEAR(hurwitz_zeta(s, q) / brute, 1.0, 1e-9) << "s=" << s << " q=" << q;
    }
}

TEST(HurwitzZeta, RejectsOutsideDomain) {
  EXPECT_THROW(hurwitz_zeta(1.0, 1.0), DataError);
  EXPECT_THROW(hurwitz_zeta(2.0, 0.0), DataError);
}

namespace {

std::vector<double> oracle_draws(double alpha, std::int64_t xmin, std::size_t n, std::uint64_t seed) {
  oracle::PowerLawSampler sampler(alpha, xmin);
  std::mt19937_64 rng(seed);
  std::vector<double> xs(n);
  for (auto &x : xs)
    x = static_cast<double>(sampler(rng));
  return xs;
}

} // namespace

TEST(FitPowerLaw, RecoversExponentTwo) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto xs = oracle_draws(2.0, 1, 10'000, seed);
    const auto fit = fit_power_law(xs, 1.0);
    EXPECT_GE(fit.exponent, 1.95);
    EXPECT_LE(fit.exponent, 2.05);
    EXPECT_EQ(fit.n_tail, 10'000u);
    EXPECT_NEAR(fit.std_err, (fit.exponent - 1.0) / 100.0, 1e-12);
  }
}

TEST(FitPowerLaw, RecoversExponentTwoAndAHalf) {
  for (std::uint64_t seed : {4, 5, 6}) {
    const auto fit = fit_power_law(oracle_draws(2.5, 1, 10'000, seed), 1.0);
    EXPECT_GE(fit.exponent, 2.43);
    EXPECT_LE(fit.exponent, 2.57);
  }
}

TEST(FitPowerLaw, HigherCutoffUsesOnlyTheTail) {
  const auto xs = oracle_draws(2.2, 3, 20'000, 9);
  const auto fit = fit_power_law(xs, 3.0);
  EXPECT_NEAR(fit.exponent, 2.2, 0.05);
  std::vector<double> mixed = xs;
  mixed.insert(mixed.end(), 5000, 1.0); // below xmin, ignored
  EXPECT_DOUBLE_EQ(fit_power_law(mixed, 3.0).exponent, fit.exponent);
}

TEST(FitPowerLaw, LatticeUnitScalesSamples) {
  const auto xs = oracle_draws(2.0, 1, 5000, 12);
  std::vector<double> seconds;
  for (double x : xs)
    seconds.push_back(20.0 * x);
  const auto a = fit_power_law(xs, 1.0);
  const auto b = fit_power_law(seconds, 20.0, 20.0);
  EXPECT_DOUBLE_EQ(a.exponent, b.exponent);
  EXPECT_DOUBLE_EQ(b.xmin, 20.0);
}

TEST(FitPowerLaw, AgreesWithContinuousApproximation) {
  // For xmin well above 1, the discrete MLE is close to
  // 1 + n / sum ln(x / (xmin - 1/2)).
  const auto xs = oracle_draws(2.0, 6, 20'000, 21);
  double s = 0.0;
  for (double x : xs)
    s += std::log(x / 5.5);
  const double approx = 1.0 + static_cast<double>(xs.size()) / s;
  EXPECT_NEAR(fit_power_law(xs, 6.0).exponent, approx, 0.02);
}

TEST(FitPowerLaw, ErrorPaths) {
  EXPECT_THROW(fit_power_law(std::vector<double>(50, 7.0), 1.0), DegenerateDataError);
  EXPECT_THROW(fit_power_law(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9}, 1.0),
               InsufficientDataError);
  const std::vector<double> few{1, 1, 1, 1, 1, 2, 50, 60, 70};
  EXPECT_THROW(fit_power_law(few, 40.0), InsufficientDataError);
  EXPECT_THROW(fit_power_law(std::vector<double>(20, 3.0), 0.1), ConfigError);
}

TEST(BoundedPowerLaw, DegenerateSupport) {
  BoundedPowerLaw d(2.0, 3, 3);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i)
    EXPECT_EQ(d(rng), 3);
}

TEST(BoundedPowerLaw, StaysInBounds) {
  BoundedPowerLaw d(1.5, 2, 40);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10'000; ++i) {
    const auto x = d(rng);
    ASSERT_GE(x, 2);
    ASSERT_LE(x, 40);
  }
}

TEST(BoundedPowerLaw, RejectsBadConfiguration) {
  EXPECT_THROW(BoundedPowerLaw(2.0, 0, 5), ConfigError);
  EXPECT_THROW(BoundedPowerLaw(2.0, 5, 4), ConfigError);
  EXPECT_THROW(BoundedPowerLaw(1.0, 1, 4), ConfigError);
}

TEST(LogHistogram, CountsEverySample) {
  const auto xs = oracle_draws(2.0, 1, 5000, 3);
  const auto bins = log_histogram(xs, 5);
  std::size_t total = 0;
  double mass = 0.0;
  for (const auto &b : bins) {
    total += b.count;
    mass += b.density * (b.hi - b.lo);
    EXPECT_NEAR(b.hi / b.lo, std::pow(10.0, 0.2), 1e-12);
  }
  EXPECT_EQ(total, xs.size());
  EXPECT_NEAR(mass, 1.0, 1e-9);
}

TEST(LogHistogram, EmptyAndNonPositive) {
  EXPECT_TRUE(log_histogram(std::vector<double>{}).empty());
  EXPECT_TRUE(log_histogram(std::vector<double>{0.0, -1.0}).empty());
}
