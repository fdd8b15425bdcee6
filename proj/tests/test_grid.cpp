#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kschemo/grid.hpp"

using namespace kschemo;

TEST(GridSpec, RejectsBadShapes) {
  EXPECT_THROW(GridSpec(3, {4, 4}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(GridSpec::line(2, 1.0), std::invalid_argument);
  EXPECT_THROW(GridSpec::line(8, 0.0), std::invalid_argument);
  EXPECT_THROW(GridSpec::rect(8, 8, 1.0, -1.0), std::invalid_argument);
}

TEST(GridSpec, Geometry) {
  const GridSpec g = GridSpec::rect(4, 5, 2.0, 1.0);
  EXPECT_EQ(g.size(), 20u);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.5);
  EXPECT_DOUBLE_EQ(g.spacing(1), 0.2);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.1);
  EXPECT_DOUBLE_EQ(g.domain_volume(), 2.0);
  EXPECT_EQ(g.index(1, 2), 1u + 4u * 2u);
  EXPECT_EQ(g.face_count(0), 5u * 5u);
  EXPECT_EQ(g.face_count(1), 4u * 6u);
}

TEST(Operators, GradientOfLinearFieldIsConstantInside) {
  const GridSpec g = GridSpec::line(10, 1.0);
  Field f(g);
  for (int i = 0; i < 10; ++i) f.at(i) = 3.0 * g.center(0, i);
  const FaceValues grad = face_gradient(f, 0);
  EXPECT_EQ(grad.values.front(), 0.0);
  EXPECT_EQ(grad.values.back(), 0.0);
  for (std::size_t k = 1; k + 1 < grad.values.size(); ++k) EXPECT_NEAR(grad.values[k], 3.0, 1e-12);
}

TEST(Operators, LaplacianOfConstantIsZero) {
  const GridSpec g = GridSpec::rect(6, 7, 1.0, 2.0);
  const Field f(g, 2.5);
  const Field lap = laplacian(f);
  for (double x : lap.values()) EXPECT_EQ(x, 0.0);
}

// The discrete divergence of any face flux with zero boundary values sums to zero.
TEST(Operators, DivergenceTelescopesProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const GridSpec g = GridSpec::rect(3 + trial % 9, 3 + (trial * 5) % 11, 1.0 + trial % 3, 1.0);
    Field f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = U(rng);
    std::vector<FaceValues> grads{face_gradient(f, 0), face_gradient(f, 1)};
    EXPECT_NEAR(integrate(divergence(g, grads)), 0.0, 1e-12);
  }
}

TEST(Operators, Norms) {
  const GridSpec g = GridSpec::line(4, 2.0);
  const Field f(g, std::vector<double>{1.0, -2.0, 0.0, 3.0});
  EXPECT_DOUBLE_EQ(integrate(f), 2.0 * 0.5);
  EXPECT_DOUBLE_EQ(lp_norm(f, 1.0), 6.0 * 0.5);
  EXPECT_NEAR(lp_norm(f, 2.0), std::sqrt(14.0 * 0.5), 1e-14);
  EXPECT_DOUBLE_EQ(lp_norm(f, INFINITY), 3.0);
  EXPECT_THROW(lp_norm(f, 0.5), std::invalid_argument);
}

TEST(Operators, LaplacianMatchesSecondDifference) {
  const GridSpec g = GridSpec::line(5, 1.0);
  const Field f(g, std::vector<double>{1.0, 4.0, 9.0, 16.0, 25.0});
  const Field lap = laplacian(f);
  const double h2 = 0.04;
  EXPECT_NEAR(lap[0], (4.0 - 1.0) / h2, 1e-9);
  EXPECT_NEAR(lap[2], (4.0 - 18.0 + 16.0) / h2, 1e-9);
  EXPECT_NEAR(lap[4], (16.0 - 25.0) / h2, 1e-9);
}
