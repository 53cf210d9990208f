#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ppcm/error.hpp"
#include "ppcm/numeric.hpp"
#include "ppcm/random.hpp"
#include "ppcm/simgen.hpp"

using namespace ppcm::sim;

namespace {

ScenarioSpec spec(int id, std::uint64_t seed, std::size_t rep = 0) {
  ScenarioSpec s;
  s.id = id;
  s.seed = seed;
  s.replicate = rep;
  return s;
}

double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Expected wave-1 response among the sampled units from the stated
// non-response formulas, evaluated on the realized covariates and y0.
double expected_response(const SimReplicate& r, int id) {
  double sum = 0.0;
  const auto& c = r.cohort;
  for (std::size_t i = 0; i < c.units(); ++i) {
    const double x1 = c.covariate(i, 0, 0), x2 = c.covariate(i, 0, 1), x3 = c.covariate(i, 0, 2),
                 x4 = c.covariate(i, 0, 3), y0 = c.outcome(i, 0);
    const double eta = id == 1 ? -2.7 + 1.2 * (x1 + x2 + x3 + x4) - 1.2 * y0
                               : -2.7 - x1 + x2 + x3 + x4 + y0 + x3 * x4 + x3 * x1 + y0 * x1;
    sum += c.alive(i, 1) ? 1.0 - expit(eta) : 0.0;
  }
  return sum / static_cast<double>(c.units());
}

double response_rate(const SimReplicate& r) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < r.cohort.units(); ++i) k += r.cohort.responded(i, 1) ? 1 : 0;
  return static_cast<double>(k) / static_cast<double>(r.cohort.units());
}

}  // namespace

TEST(Simgen, DeterministicGivenSeed) {
  const auto a = gen_replicate(spec(3, 11)), b = gen_replicate(spec(3, 11));
  EXPECT_EQ(a.population, b.population);
  EXPECT_EQ(a.cohort, b.cohort);
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_EQ(a.y1, b.y1);
  const auto c = gen_replicate(spec(3, 11, 1));
  EXPECT_NE(a.truth, c.truth);
}

TEST(Simgen, ScenariosOneAndTwoShareOutcomesAndSelection) {
  const auto a = gen_replicate(spec(1, 12)), b = gen_replicate(spec(2, 12));
  EXPECT_EQ(a.y0, b.y0);
  EXPECT_EQ(a.y1, b.y1);
  EXPECT_EQ(a.sampled, b.sampled);
  EXPECT_EQ(a.truth, b.truth);
}

TEST(Simgen, SampleSizeAndSchema) {
  const auto r = gen_replicate(spec(1, 13));
  EXPECT_EQ(r.population.units(), 10000u);
  EXPECT_NEAR(static_cast<double>(r.cohort.units()), 1000.0, 100.0);
  EXPECT_EQ(r.cohort.schema().covariates[0], covariate_names());
  EXPECT_FALSE(r.population.has_age());
  EXPECT_TRUE(std::is_sorted(r.sampled.begin(), r.sampled.end()));
}

TEST(Simgen, ResponseRateMatchesStatedFormula) {
  for (int id : {1, 2, 3, 5}) {
    double realized = 0.0, expected = 0.0;
    const int reps = 10;
    for (int k = 0; k < reps; ++k) {
      const auto r = gen_replicate(spec(id, 14, k));
      realized += response_rate(r) / reps;
      expected += expected_response(r, id) / reps;
    }
    // binomial SE over 10^4 units is below 0.005
    EXPECT_NEAR(realized, expected, 0.015) << "scenario " << id;
  }
}

TEST(Simgen, ScenarioOneTruthMatchesAnalyticMean) {
  double sum = 0.0;
  for (int k = 0; k < 200; ++k) sum += gen_replicate(spec(1, 15, k)).truth;
  EXPECT_NEAR(sum / 200.0, -0.7, 0.01);
}

TEST(Simgen, ScenarioFiveDeathRate) {
  const auto r = gen_replicate(spec(5, 16));
  const double death = 1.0 - static_cast<double>(r.population.survivors(1)) / 10000.0;
  EXPECT_NEAR(death, 0.12, 0.02);
  for (std::size_t i = 0; i < r.cohort.units(); ++i) {
    if (!r.cohort.alive(i, 1)) EXPECT_FALSE(r.cohort.responded(i, 1));
  }
}

TEST(Simgen, ScenarioFourAddsPracticeEffectToObservedOutcome) {
  const auto s3 = gen_replicate(spec(3, 17)), s4 = gen_replicate(spec(4, 17));
  EXPECT_EQ(s3.y1, s4.y1);
  EXPECT_EQ(s3.truth, s4.truth);
  for (std::size_t i = 0; i < s4.cohort.units(); ++i) {
    if (s4.cohort.responded(i, 1)) EXPECT_DOUBLE_EQ(s4.cohort.outcome(i, 1), s4.y1[s4.sampled[i]] + 0.1);
  }
}

TEST(Simgen, UniformCovariateMoments) {
  ScenarioSpec s = spec(1, 18);
  s.population_size = 100000;
  s.sample_size = 10;
  const auto r = gen_replicate(s);
  for (std::size_t j = 2; j < 8; ++j) {
    std::vector<double> v(r.population.units());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = r.population.covariate(i, 0, j);
    EXPECT_NEAR(ppcm::mean(v), 0.0, 0.01) << "x" << j + 1;
    EXPECT_NEAR(ppcm::sample_variance(v), 1.0 / 3.0, 0.01) << "x" << j + 1;
  }
}

TEST(Simgen, InvalidScenario) {
  try {
    gen_replicate(spec(9, 1));
    FAIL();
  } catch (const ppcm::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown scenario"), std::string::npos);
  }
}

TEST(SkewNormalTest, ShapeZeroIsNormal) {
  ppcm::Rng rng(19, 0);
  std::vector<double> v(100000);
  for (auto& x : v) x = sample_skew_normal(1.0, 2.0, 0.0, rng);
  std::sort(v.begin(), v.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = ppcm::normal_cdf((v[i] - 1.0) / 2.0);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / v.size()), std::abs(f - (i + 1.0) / v.size())});
  }
  EXPECT_LT(ks, 0.02);
}

TEST(SkewNormalTest, ScenarioErrorMoments) {
  const auto sn = SkewNormal::scenario_errors();
  EXPECT_NEAR(sn.mean(), 0.0, 1e-12);
  EXPECT_NEAR(sn.variance(), 0.993, 0.001);
  EXPECT_NEAR(sn.skewness(), 0.85, 0.01);
  ppcm::Rng rng(20, 0);
  std::vector<double> v(100000);
  for (auto& x : v) x = sample_skew_normal(sn.location, sn.scale, sn.shape, rng);
  const double m = ppcm::mean(v), var = ppcm::sample_variance(v);
  double m3 = 0.0;
  for (double x : v) m3 += std::pow(x - m, 3) / static_cast<double>(v.size());
  EXPECT_NEAR(m, 0.0, 0.02);
  EXPECT_NEAR(var, 0.99, 0.03);
  EXPECT_NEAR(m3 / std::pow(var, 1.5), 0.85, 0.05);
}
