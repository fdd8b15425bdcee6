#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "kschemo/model.hpp"

using namespace kschemo;

TEST(ModelParams, Validation) {
  EXPECT_NO_THROW((ModelParams{2.0, 1.0, 0.0}.validate()));
  EXPECT_THROW((ModelParams{-1.0, 1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ModelParams{1.0, 0.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ModelParams{1.0, 1.0, 1.0}.validate()), std::invalid_argument);
}

TEST(Regime, Examples) {
  EXPECT_EQ(classify_regime({2.0, 1.0}, 3), RegimeLabel::H3);
  EXPECT_EQ(classify_regime({1.0, 1.0}, 3), RegimeLabel::CriticalClassical);
  EXPECT_TRUE(regime_flags(1.0, 1.0, 3).h4);
  EXPECT_EQ(classify_regime({0.4, 0.5}, 3), RegimeLabel::H4);
  EXPECT_EQ(classify_regime({0.3, 0.5}, 3), RegimeLabel::Outside);
  EXPECT_EQ(classify_regime({1.0, 1.5}, 3), RegimeLabel::Outside);
}

TEST(Regime, H3ExactlyWhenMGreaterThanQ) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.01, 4.0);
  for (int k = 0; k < 10000; ++k) {
    const double m = U(rng);
    const double q = k % 10 == 0 ? m : U(rng);
    const RegimeFlags f = regime_flags(m, q, 2 + k % 3);
    EXPECT_EQ(f.h3, m > q);
  }
}

TEST(InitialData, ConstantPreset) {
  const GridSpec g = GridSpec::rect(8, 8, 2.0, 1.0);
  InitialSpec s;
  s.u = {Preset::Constant, 1.0};
  const InitialData d = make_initial_data(s, g, 0);
  EXPECT_EQ(d.u0.min(), 1.0);
  EXPECT_EQ(d.u0.max(), 1.0);
  EXPECT_NEAR(integrate(d.u0), 2.0, 1e-14);
  EXPECT_EQ(d.v0.max(), 0.0);
}

TEST(InitialData, GaussianMassIsExact) {
  const GridSpec g = GridSpec::rect(64, 64, 1.0, 1.0);
  for (double mass : {1.0, 12.0 * M_PI, 1e-3}) {
    InitialSpec s;
    s.u.kind = Preset::Gaussian;
    s.u.mass = mass;
    s.u.width = 0.1;
    const InitialData d = make_initial_data(s, g, 0);
    EXPECT_NEAR(integrate(d.u0), mass, 1e-10 * mass);
    EXPECT_GE(d.u0.min(), 0.0);
  }
}

TEST(InitialData, TwoBumpsMassAndSymmetry) {
  const GridSpec g = GridSpec::line(100, 1.0);
  InitialSpec s;
  s.u.kind = Preset::TwoBumps;
  s.u.mass = 3.0;
  s.u.width = 0.05;
  const InitialData d = make_initial_data(s, g, 0);
  EXPECT_NEAR(integrate(d.u0), 3.0, 3e-10);
  EXPECT_NEAR(d.u0.at(29), d.u0.at(70), 1e-12);
}

TEST(InitialData, RejectsBadPresets) {
  const GridSpec g = GridSpec::line(20, 1.0);
  InitialSpec s;
  s.u.kind = Preset::Gaussian;
  s.u.mass = 0.0;
  EXPECT_THROW(make_initial_data(s, g, 0), std::invalid_argument);
  s.u.mass = 1.0;
  s.u.width = 0.05;  // 1 cell
  EXPECT_THROW(make_initial_data(s, g, 0), std::invalid_argument);
  s.u = {Preset::Constant, -1.0};
  EXPECT_THROW(make_initial_data(s, g, 0), std::invalid_argument);
}

TEST(InitialData, RandomIsSeededAndNonnegative) {
  const GridSpec g = GridSpec::rect(16, 16, 1.0, 1.0);
  InitialSpec s;
  s.u.kind = Preset::RandomNonneg;
  s.u.amplitude = 2.0;
  s.v.kind = Preset::RandomNonneg;
  const InitialData a = make_initial_data(s, g, 42);
  const InitialData b = make_initial_data(s, g, 42);
  const InitialData c = make_initial_data(s, g, 43);
  EXPECT_EQ(a.u0.data(), b.u0.data());
  EXPECT_EQ(a.v0.data(), b.v0.data());
  EXPECT_NE(a.u0.data(), c.u0.data());
  EXPECT_NE(a.u0.data(), a.v0.data());
  EXPECT_GE(a.u0.min(), 0.0);
  EXPECT_LT(a.u0.max(), 2.0);
  s.u.seed = 5;
  EXPECT_EQ(make_initial_data(s, g, 1).u0.data(), make_initial_data(s, g, 2).u0.data());
}

TEST(Preset, Names) {
  EXPECT_EQ(preset_from_string("gaussian-bump"), Preset::Gaussian);
  EXPECT_EQ(preset_from_string("two-bumps"), Preset::TwoBumps);
  EXPECT_FALSE(preset_from_string("square").has_value());
}
