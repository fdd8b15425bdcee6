#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kschemo/kernel_checks.hpp"
#include "kschemo/kernels.hpp"

using namespace kschemo::kernels;

TEST(Recursion, ThresholdExamples) {
  EXPECT_DOUBLE_EQ(recursion_threshold(1.0, 2.0, 1.0), 0.5);
  EXPECT_NEAR(recursion_threshold(1.0, std::exp(1.0), 1.0), std::exp(-1.0), 1e-15);
  const long double ref = 0.5L * std::pow(2.0L, -0.25L);
  EXPECT_NEAR(recursion_threshold(4.0, 2.0, 2.0), static_cast<double>(ref), 1e-15);
  EXPECT_NEAR(recursion_threshold(4.0, 2.0, 2.0), 0.420448, 1e-6);
  EXPECT_THROW(recursion_threshold(1.0, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(recursion_threshold(0.0, 2.0, 1.0), std::domain_error);
}

TEST(Recursion, HandIteratedSequences) {
  const RecursionSequence conv = iterate_recursion({1.0, 2.0, 1.0, 0.5}, 3);
  ASSERT_EQ(conv.y.size(), 4u);
  EXPECT_NEAR(conv.y[1], 0.25, 1e-15);
  EXPECT_NEAR(conv.y[2], 0.125, 1e-15);
  EXPECT_NEAR(conv.y[3], 0.0625, 1e-15);
  EXPECT_FALSE(conv.diverged);

  const RecursionSequence div = iterate_recursion({1.0, 2.0, 1.0, 4.0}, 50);
  EXPECT_NEAR(div.y[1], 16.0, 1e-12);
  EXPECT_NEAR(div.y[2], 512.0, 1e-9);
  EXPECT_TRUE(div.diverged);

  const RecursionSequence zero = iterate_recursion({1.0, 2.0, 1.0, 0.0}, 10);
  for (double y : zero.y) EXPECT_EQ(y, 0.0);
}

// Direct iteration in extended precision agrees with the normalized form on
// short horizons.
TEST(Recursion, MatchesDirectIteration) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const RecursionParams p{0.1 + 9.9 * U(rng), 1.1 + 6.9 * U(rng), 0.2 + 2.8 * U(rng), 0.0};
    const double y0 = recursion_threshold(p.c, p.b, p.alpha) * (0.2 + 0.7 * U(rng));
    const RecursionSequence s = iterate_recursion({p.c, p.b, p.alpha, y0}, 8);
    long double y = y0;
    for (int n = 0; n < 8; ++n) {
      y = p.c * std::pow(static_cast<long double>(p.b), n) * std::pow(y, 1.0L + p.alpha);
      if (y < 1e-300L) break;
      EXPECT_NEAR(s.y[n + 1] / static_cast<double>(y), 1.0, 1e-11);
    }
  }
}

// At the threshold the extremal sequence is y0 * b^{-n/alpha}: it converges for
// every admissible tuple, at a geometric rate.
TEST(Recursion, ThresholdSequenceIsGeometricAndNonincreasing) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double c = std::exp(std::log(0.1) + U(rng) * std::log(100.0));
    const double b = 8.0 - 7.0 * U(rng);
    const double alpha = 0.2 + 2.8 * U(rng);
    const double y0 = recursion_threshold(c, b, alpha);
    const RecursionSequence s = iterate_recursion({c, b, alpha, y0}, 200);
    ASSERT_FALSE(s.diverged);
    for (int n = 1; n <= 200; ++n) EXPECT_LE(s.y[n], s.y[n - 1]);
    const double expected_log = -200.0 / alpha * std::log(b);
    if (expected_log > -700.0) {  // otherwise y_200 underflows to 0
      EXPECT_NEAR(std::log(s.y[200] / y0), expected_log, 1e-9 * (1.0 + std::abs(expected_log)));
    }
  }
}

TEST(Recursion, BelowThresholdDecaysSuperGeometrically) {
  const double y_star = recursion_threshold(2.0, 1.5, 1.0);
  const RecursionSequence s = iterate_recursion({2.0, 1.5, 1.0, 0.9 * y_star}, 200);
  EXPECT_LT(s.y[200], 1e-12 * s.y[0]);
}

TEST(Absorption, Examples) {
  const AbsorptionBound a = absorption_bound({0.25, 1.0, 3.0});
  EXPECT_DOUBLE_EQ(a.s0, 2.0);

  const double eps = absorption_eps_bound(1.0, 1.0);
  EXPECT_DOUBLE_EQ(eps, 0.125);
  const AbsorptionBound b = absorption_bound({eps, 1.0, 1.0});
  EXPECT_TRUE(b.condition_f1_holds);
  EXPECT_NEAR(b.f_at_s0, -1.0, 1e-14);
  ASSERT_TRUE(b.roots.has_value());
  EXPECT_LE(b.roots->first, b.s0);
  EXPECT_GE(b.roots->second, b.s0);
  const AbsorptionParams p{eps, 1.0, 1.0};
  EXPECT_LE(std::abs(absorption_f(p, b.roots->first)), 1e-12 * 2.0);
  EXPECT_LE(std::abs(absorption_f(p, b.roots->second)), 1e-12 * 2.0);

  const AbsorptionBound big = absorption_bound({10.0, 1.0, 1.0});
  EXPECT_FALSE(big.condition_f1_holds);
  EXPECT_FALSE(big.roots.has_value());
}

TEST(Absorption, ClosedFormMinimumMatchesEvaluation) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const AbsorptionParams p{0.01 + U(rng), 0.1 + 3.0 * U(rng), 0.1 + 5.0 * U(rng)};
    const AbsorptionBound bd = absorption_bound(p);
    EXPECT_NEAR(bd.f_at_s0, absorption_f(p, bd.s0), 1e-10 * (1.0 + std::abs(bd.f_at_s0) + bd.s0));
  }
}

TEST(AbsorptionCheck, Cases) {
  const AbsorptionParams p{absorption_eps_bound(1.0, 1.0), 1.0, 1.0};
  const AbsorptionBound bd = absorption_bound(p);
  const double s1 = bd.roots->first;
  const double s2 = bd.roots->second;

  const AbsorptionVerdict zero = absorption_check({{0.0, 0.0}, {1.0, 0.0}}, p);
  EXPECT_TRUE(zero.passed());

  const AbsorptionVerdict tight = absorption_check({{0.0, s1}, {0.5, s1}, {1.0, s1}}, p);
  EXPECT_TRUE(tight.passed());

  const AbsorptionVerdict jump = absorption_check({{0.0, 0.5 * s1}, {1.0, 1.5 * s2}}, p);
  EXPECT_FALSE(jump.passed());
  EXPECT_EQ(jump.failure, "intermediate_inequality");

  const AbsorptionVerdict start = absorption_check({{0.0, 2.0 * s2}}, p);
  EXPECT_EQ(start.failure, "initial_value");

  const AbsorptionVerdict inside = absorption_check({{0.0, 0.5 * (s1 + s2)}}, p);
  EXPECT_EQ(inside.failure, "pointwise_inequality");

  const AbsorptionVerdict cond = absorption_check({{0.0, 0.0}}, {1.0, 1.0, 1.0});
  EXPECT_EQ(cond.failure, "condition_f1");

  EXPECT_THROW(absorption_check({{1.0, 0.0}, {0.5, 0.0}}, p), std::invalid_argument);
}

TEST(Exponents, MsQsExamples) {
  const MsQs a = exponent_ms_qs({1.0, 0.7, 0.7, 2});
  EXPECT_NEAR(a.m_s, 3.7, 1e-15);
  EXPECT_NEAR(a.q_s, 2.0, 1e-15);
  const MsQs b = exponent_ms_qs({10.0, 2.0, 1.0, 3});
  EXPECT_NEAR(b.m_s, 58.0 / 3.0, 1e-14);
  EXPECT_NEAR(b.q_s, 28.0 / 3.0, 1e-14);
  const MsQs c = exponent_ms_qs({4.0, 1.3, 1.3, 5});
  EXPECT_NEAR((5 + 2.0) * c.q_s, 2.0 * (4.0 + 1.0) + 2.0 * c.q_s, 1e-13);
}

TEST(Exponents, GammaExamples) {
  EXPECT_NEAR(gamma_exponent({10.0, 2.0, 1.0, 3}), 861.0 / 671.0, 1e-15);
  EXPECT_NEAR(gamma_exponent({1e6, 2.0, 1.0, 3}), 1.0, 1e-4);
  EXPECT_NEAR(gamma_exponent({1e6, 3.0, 1.0, 3}), 0.5, 1e-3);
  EXPECT_THROW(gamma_exponent({10.0, 1.0, 1.0, 3}), std::domain_error);
  EXPECT_FALSE(gamma_excess({1e6, 3.0, 1.0, 3}).has_value());
  const auto beta = gamma_excess({10.0, 2.0, 1.0, 3});
  ASSERT_TRUE(beta.has_value());
  EXPECT_NEAR(*beta, 190.0 / 671.0, 1e-14);
}

TEST(Exponents, H4Equivalence) {
  for (double s : {0.5, 3.0, 70.0}) {
    const H4Equivalence e = h4_equivalence(0.5, 0.5, 3, s);
    EXPECT_TRUE(e.lhs);
    EXPECT_TRUE(e.s_free);
    EXPECT_TRUE(e.rhs);
  }
  const H4Equivalence edge = h4_equivalence(0.375, 0.5, 3, 2.0);
  EXPECT_FALSE(edge.lhs);
  EXPECT_FALSE(edge.s_free);
  EXPECT_FALSE(h4_equivalence(1.2, 1.0, 3, 2.0).rhs);
  EXPECT_TRUE(h4_equivalence(1.2, 1.0, 3, 2.0).lhs);
}

TEST(Exponents, H4BoundAndMu) {
  EXPECT_THROW(h4_bound_exponent(1.0, 1.0, 3), std::domain_error);
  EXPECT_DOUBLE_EQ(h4_bound_exponent(1.0, 0.5, 3), 2.0);
  EXPECT_GT(h4_bound_exponent(1.0 + 1e-9, 1.0, 3), 1e8);
  EXPECT_NEAR(interpolation_mu(3.0, 1.0, 1.0), 2.0, 1e-15);
  for (double m : {0.5, 1.0, 2.5}) EXPECT_NEAR(interpolation_mu(2.0, m, m), m, 1e-14);
  EXPECT_THROW(interpolation_mu(3.0 * 2.0 - 4.0 * 1.0, 2.0, 1.0), std::domain_error);
}

TEST(Suite, AbsorptionGammaH4QsChecksPass) {
  EXPECT_TRUE(check_absorption().passed);
  EXPECT_TRUE(check_gamma_limit().passed);
  EXPECT_TRUE(check_h4_equivalence().passed);
  EXPECT_TRUE(check_qs_identity().passed);
}
