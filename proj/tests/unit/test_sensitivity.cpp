#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "ppcm/error.hpp"
#include "ppcm/sensitivity.hpp"

using namespace ppcm;

TEST(EvalBound, ConstantPrior) {
  const auto b = eval_bound(TriangularPrior::constant(0.0, 0.15, 0.15), 63.0);
  EXPECT_DOUBLE_EQ(b.min, 0.0);
  EXPECT_DOUBLE_EQ(b.mode, 0.15);
  EXPECT_DOUBLE_EQ(b.max, 0.15);
}

TEST(EvalBound, QuadraticPracticeUpperBound) {
  const QuadraticBound upper{4.8, -0.1, 5.2e-4};
  const TriangularPrior prior{QuadraticBound::constant(0.0), upper, upper};
  EXPECT_NEAR(eval_bound(prior, 35.0).max, 1.937, 1e-12);
}

TEST(EvalBound, QuadraticDropoutLowerBound) {
  const QuadraticBound lower{-8.0, -0.3, 3.9e-3};
  const TriangularPrior prior{lower, lower, QuadraticBound::constant(0.0)};
  EXPECT_NEAR(eval_bound(prior, 80.0).min, -7.04, 1e-12);
  EXPECT_NEAR(eval_bound(prior, 50.0).min, -13.25, 1e-12);
}

TEST(EvalBound, ScaleMultipliesEveryBound) {
  const auto b = eval_bound(TriangularPrior::constant(-1.0, -1.0, 0.0), 0.0, 2.0);
  EXPECT_DOUBLE_EQ(b.min, -2.0);
  EXPECT_DOUBLE_EQ(b.max, 0.0);
}

TEST(EvalBound, DisorderedBoundsNameWaveAndAge) {
  try {
    eval_bound(TriangularPrior::constant(1.0, 0.0, 2.0), 70.0, 1.0, 3);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("wave 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("70"), std::string::npos) << msg;
  }
}

TEST(TriangularQuantile, EndpointsAndMedian) {
  const TriangularBounds sym{0.0, 1.0, 2.0};
  EXPECT_DOUBLE_EQ(triangular_quantile(sym, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(triangular_quantile(sym, 1.0), 2.0);
  EXPECT_NEAR(triangular_quantile(sym, 0.5), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(triangular_quantile(TriangularBounds{0.3, 0.3, 0.3}, 0.7), 0.3);
}

TEST(SampleSensitivity, ZeroPriorsGiveExactZeros) {
  const auto pop = fixtures::population(fixtures::all_alive(5, 3), {1, 2, 3, 4, 5});
  const auto d = sample_sensitivity(SensitivityConfig::zeros(3), pop, 1, 0);
  for (double v : d.dropout) EXPECT_EQ(v, 0.0);
  for (double v : d.practice) EXPECT_EQ(v, 0.0);
}

TEST(SampleSensitivity, PracticeTriangularMomentsAndSupport) {
  const std::size_t n = 1000;
  std::vector<double> x(n, 0.0);
  const auto pop = fixtures::population(fixtures::all_alive(n, 2), x);
  auto cfg = SensitivityConfig::zeros(2);
  cfg.practice[0] = TriangularPrior::constant(0.0, 0.15, 0.15);
  double sum = 0.0, lo = 1.0, hi = -1.0;
  std::size_t count = 0;
  for (std::size_t d = 0; d < 100; ++d) {
    const auto s = sample_sensitivity(cfg, pop, 5, d);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(s.practice_at(i, 0), 0.0);
      const double v = s.practice_at(i, 1);
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++count;
    }
  }
  EXPECT_NEAR(sum / static_cast<double>(count), 0.1, 0.005);
  EXPECT_GE(lo, 0.0);
  EXPECT_LE(hi, 0.15);
}

TEST(SampleSensitivity, DeadUnitWavesHoldZero) {
  const auto pop = fixtures::population({{1, 1}, {1, 0}}, {0, 0});
  auto cfg = SensitivityConfig::zeros(2);
  cfg.dropout[0] = TriangularPrior::constant(-1.0, -1.0, -0.5);
  const auto s = sample_sensitivity(cfg, pop, 5, 0);
  EXPECT_LT(s.dropout_at(0, 1), 0.0);
  EXPECT_EQ(s.dropout_at(1, 1), 0.0);
}

TEST(SampleSensitivity, SharedUniformsMakeDrawsMonotoneInBounds) {
  const auto pop = fixtures::population(fixtures::all_alive(50, 3), std::vector<double>(50, 0.0));
  auto a = SensitivityConfig::zeros(3);
  for (auto& p : a.practice) p = TriangularPrior::constant(0.0, 0.1, 0.1);
  const auto b = a.scaled(2.0);
  for (std::size_t d = 0; d < 10; ++d) {
    const auto sa = sample_sensitivity(a, pop, 9, d), sb = sample_sensitivity(b, pop, 9, d);
    for (std::size_t k = 0; k < sa.practice.size(); ++k) EXPECT_NEAR(sb.practice[k], 2.0 * sa.practice[k], 1e-15);
  }
}

TEST(SampleSensitivity, AgeDependentPriorNeedsAges) {
  const auto pop = fixtures::population(fixtures::all_alive(2, 2), {0, 0});
  auto cfg = SensitivityConfig::zeros(2);
  cfg.practice[0] = TriangularPrior{QuadraticBound::constant(0.0), {0.0, 0.01, 0.0}, {0.0, 0.01, 0.0}};
  EXPECT_THROW(sample_sensitivity(cfg, pop, 1, 0), ConfigError);
  const auto aged = fixtures::population(fixtures::all_alive(2, 2), {0, 0}, {{60, 65}, {70, 75}});
  const auto s = sample_sensitivity(cfg, aged, 1, 0);
  EXPECT_LE(s.practice_at(0, 1), 0.65);
  EXPECT_LE(s.practice_at(1, 1), 0.75);
}

TEST(SensitivityConfigTest, JsonRoundTripAndForms) {
  const std::string text = R"({"scale_k": 2, "waves": [
    {"wave": 1, "dropout": [-1, -1, 0], "practice": {"min": 0, "mode": [4.8, -0.1, 5.2e-4], "max": [4.8, -0.1, 5.2e-4]}}
  ]})";
  const auto cfg = SensitivityConfig::from_json(text, 2);
  EXPECT_DOUBLE_EQ(cfg.scale_k, 2.0);
  EXPECT_EQ(cfg.dropout[0], TriangularPrior::constant(-1, -1, 0));
  EXPECT_TRUE(cfg.age_dependent());
  EXPECT_EQ(SensitivityConfig::from_json(cfg.to_json(), 2), cfg);
  EXPECT_THROW(SensitivityConfig::from_json(R"({"waves": [{"wave": 5}]})", 2), ConfigError);
  EXPECT_THROW(SensitivityConfig::from_json("{", 2), ParseError);
  EXPECT_THROW(SensitivityConfig::from_json(R"({"waves": [{"wave": 1, "dropout": [0, 1, -1]}]})", 2), ConfigError);
}

TEST(SensitivityConfigTest, ZeroingHelpers) {
  auto cfg = SensitivityConfig::zeros(3);
  EXPECT_TRUE(cfg.all_zero());
  cfg.dropout[1] = TriangularPrior::constant(-2, -2, 0);
  cfg.practice[0] = TriangularPrior::constant(0, 0.1, 0.1);
  EXPECT_FALSE(cfg.dropout_zero());
  EXPECT_TRUE(cfg.with_dropout_zeroed().dropout_zero());
  EXPECT_FALSE(cfg.with_dropout_zeroed().practice_zero());
  EXPECT_TRUE(cfg.with_practice_zeroed().practice_zero());
  EXPECT_THROW(cfg.validate(4), ConfigError);
  auto neg = cfg;
  neg.scale_k = -1;
  EXPECT_THROW(neg.validate(3), ConfigError);
}
