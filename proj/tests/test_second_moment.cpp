#include "graphdep/second_moment.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "graphdep/errors.hpp"
#include "graphdep/rng.hpp"

using namespace graphdep;

namespace {

DistributionPair random_two_letter_pair(RngStream& rng) {
  Eigen::MatrixXd joint(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) joint(i, j) = 0.05 + rng.uniform01();
  joint = (0.5 * (joint + joint.transpose())).eval();
  joint /= joint.sum();
  return DistributionPair::tabular(joint);
}

}  // namespace

TEST(SecondMoment, SingleEdgeCase) {
  // n=2: both sigma fix the unique edge, so E[L_2^2] = sum lambda_i^2 = 1+rho^2
  const auto pair = DistributionPair::bernoulli(0.5, 0.5);
  const double rho = pair.corr();
  const auto spec = build_spectrum(pair);
  const auto report = second_moment_exact(spec, 2);
  EXPECT_NEAR(report.value_formula, 1.0 + rho * rho, 1e-14);
  EXPECT_EQ(report.per_cycle_type.size(), 2u);  // partitions of 2
}

TEST(SecondMoment, ClosedFormAtN3) {
  // (1/6)[s2^3 + 3 s2 s4 + 2 s6] from the cycle census of S_3
  const auto pair = DistributionPair::bernoulli(0.3, 0.6);
  const auto spec = build_spectrum(pair);
  const double s2 = spec.orbit_moment(1);
  const double s4 = spec.orbit_moment(2);
  const double s6 = spec.orbit_moment(3);
  const auto report = second_moment_exact(spec, 3);
  EXPECT_NEAR(report.value_formula,
              (s2 * s2 * s2 + 3.0 * s2 * s4 + 2.0 * s6) / 6.0, 1e-14);
}

TEST(SecondMoment, ProductPairIsOneForAllN) {
  Eigen::VectorXd marginal(2);
  marginal << 0.35, 0.65;
  const auto spec = build_spectrum(DistributionPair::tabular_product(marginal));
  for (int n = 2; n <= 8; ++n)
    EXPECT_NEAR(second_moment_exact(spec, n).value_formula, 1.0, 1e-12);
}

TEST(SecondMoment, CycleTypeMethodEqualsExhaustiveEnumeration) {
  RngStream rng(61);
  const auto pair = random_two_letter_pair(rng);
  const auto spec = build_spectrum(pair);
  for (int n = 2; n <= 6; ++n) {
    EXPECT_NEAR(second_moment_exact(spec, n).value_formula,
                second_moment_exact_exhaustive(spec, n), 1e-12)
        << "n=" << n;
  }
}

TEST(SecondMoment, FormulaMatchesBruteForceOracle) {
  RngStream rng(67);
  for (int rep = 0; rep < 20; ++rep) {
    const auto pair = random_two_letter_pair(rng);
    const auto spec = build_spectrum(pair);
    for (int n = 2; n <= 4; ++n) {
      const double formula = second_moment_exact(spec, n).value_formula;
      const double oracle = second_moment_oracle(pair, n);
      EXPECT_NEAR(formula, oracle, 1e-9) << "rep=" << rep << " n=" << n;
    }
  }
}

TEST(SecondMoment, OracleHandlesThreeLetterAlphabet) {
  RngStream rng(71);
  Eigen::MatrixXd joint(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) joint(i, j) = 0.2 + rng.uniform01();
  joint = (0.5 * (joint + joint.transpose())).eval();
  joint /= joint.sum();
  const auto pair = DistributionPair::tabular(joint);
  const auto spec = build_spectrum(pair);
  EXPECT_NEAR(second_moment_exact(spec, 3).value_formula,
              second_moment_oracle(pair, 3), 1e-10);
}

TEST(SecondMoment, ValueIsAtLeastOne) {
  RngStream rng(73);
  for (int rep = 0; rep < 5; ++rep) {
    const auto spec = build_spectrum(random_two_letter_pair(rng));
    for (int n = 2; n <= 8; ++n)
      EXPECT_GE(second_moment_exact(spec, n).value_formula, 1.0 - 1e-12);
  }
}

TEST(SecondMoment, MonotoneInChi2OverBernoulliSweep) {
  // at fixed n the formula value grows with chi^2 = rho^2 along a tau sweep
  const int n = 5;
  double prev_value = -1.0;
  double prev_chi2 = -1.0;
  for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto pair = DistributionPair::bernoulli(0.5, tau);
    const auto spec = build_spectrum(pair);
    const double chi2 = spec.chi2_from_spectrum();
    const double value = second_moment_exact(spec, n).value_formula;
    ASSERT_GT(chi2, prev_chi2);
    EXPECT_GT(value, prev_value);
    prev_chi2 = chi2;
    prev_value = value;
  }
}

TEST(SecondMoment, CapacityGuards) {
  const auto pair = DistributionPair::bernoulli(0.5, 0.5);
  const auto spec = build_spectrum(pair);
  EXPECT_THROW(second_moment_exact(spec, 9), capacity_error);
  EXPECT_THROW(second_moment_oracle(pair, 5), capacity_error);
  // 5 letters at n=4 needs 5^12 > 1e8 states
  Eigen::VectorXd marginal(5);
  marginal << 0.2, 0.2, 0.2, 0.2, 0.2;
  EXPECT_THROW(
      second_moment_oracle(DistributionPair::tabular_product(marginal), 4),
      capacity_error);
}

TEST(Truncation, ZeroLevelCollapsesToKl) {
  // alpha = 1/(2e) makes log(2 alpha e) vanish, so zeta_bar = KL(P||Q)
  const ExponentProfile profile(DistributionPair::gaussian(0.3));
  const auto rep = truncation_level(profile, 100, 10, 1.0 / (2.0 * std::exp(1.0)));
  EXPECT_NEAR(rep.level_bar, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(rep.zeta_bar, profile.kl_pq());
}

TEST(Truncation, MatchesDenseGridInversionOracle) {
  const ExponentProfile profile(DistributionPair::gaussian(0.3));
  const int n = 100, k = 10;
  const auto rep = truncation_level(profile, n, k, 0.5);
  // invert E_P on a dense theta grid
  const double level = 2.0 * std::log(2.0 * std::exp(1.0) * n / k) / (k - 1.0);
  EXPECT_NEAR(rep.level_k, level, 1e-14);
  double lo = profile.kl_pq(), hi = lo + 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (profile.exponent(WhichExponent::P, mid).value < level ? lo : hi) = mid;
  }
  EXPECT_NEAR(rep.zeta_k, 0.5 * k * (k - 1.0) * 0.5 * (lo + hi), 1e-6 * rep.zeta_k);
}

TEST(Truncation, LevelsDecreaseInK) {
  const ExponentProfile profile(DistributionPair::gaussian(0.4));
  const int n = 60;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= n; k += 7) {
    const auto rep = truncation_level(profile, n, k, 0.5);
    const double normalized = rep.zeta_k / (0.5 * k * (k - 1.0));
    EXPECT_LT(normalized, prev + 1e-12);
    prev = normalized;
  }
}

TEST(Truncation, Condition5Reported) {
  const ExponentProfile profile(DistributionPair::gaussian(0.1));
  const auto rep = truncation_level(profile, 1000, 50, 0.5);
  EXPECT_NEAR(rep.condition5.rhs, (2.0 * std::log(1000.0) - 4.0) / 1000.0, 1e-15);
  EXPECT_EQ(rep.condition5.holds, rep.zeta_bar <= rep.condition5.rhs);
  EXPECT_GT(rep.second_order_correction, 0.0);
  EXPECT_GT(rep.first_order, profile.kl_pq());
}
