#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "ppcm/dart.hpp"

using namespace ppcm::bart;

TEST(Dart, SymmetricPriorHasEqualExpectedWeights) {
  ppcm::Rng rng(11, 0);
  const std::size_t p = 5;
  std::vector<std::size_t> counts(p, 0);
  std::vector<double> mean(p, 0.0);
  const int draws = 20000;
  for (int d = 0; d < draws; ++d) {
    const auto logs = draw_log_split_probs(counts, 1.0, rng);
    double total = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      mean[j] += std::exp(logs[j]) / draws;
      total += std::exp(logs[j]);
    }
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
  // Dir(0.2,...) weight variance (1/5)(4/5)/2 gives SE about 0.002
  for (double m : mean) EXPECT_NEAR(m, 0.2, 0.01);
}

TEST(Dart, DominantPredictorGetsMostWeight) {
  ppcm::Rng rng(12, 0);
  const std::size_t p = 10;
  std::vector<std::size_t> counts(p, 0);
  counts[0] = 100;
  const double theta = 0.5;
  double mean = 0.0;
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) mean += std::exp(draw_log_split_probs(counts, theta, rng)[0]) / draws;
  // oracle: posterior mean (theta/p + 100) / (theta + 100)
  EXPECT_GT(mean, 0.9);
  EXPECT_NEAR(mean, (theta / p + 100.0) / (theta + 100.0), 0.003);
}

TEST(Dart, SinglePredictorWeightIsOne) {
  ppcm::Rng rng(13, 0);
  DartState s = DartState::uniform(1);
  const std::vector<std::size_t> counts{7};
  for (int i = 0; i < 10; ++i) {
    update_dart_split_probs(s, counts, DartPrior{}, rng);
    EXPECT_DOUBLE_EQ(s.split_probs[0], 1.0);
  }
}

TEST(Dart, UpdateKeepsSimplexAndTheta) {
  ppcm::Rng rng(14, 0);
  DartState s = DartState::uniform(8);
  const std::vector<std::size_t> counts{30, 20, 0, 0, 0, 0, 0, 1};
  for (int i = 0; i < 200; ++i) {
    update_dart_split_probs(s, counts, DartPrior{}, rng);
    EXPECT_NEAR(std::accumulate(s.split_probs.begin(), s.split_probs.end(), 0.0), 1.0, 1e-12);
    EXPECT_GT(s.theta, 0.0);
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(std::log(s.split_probs[j]), s.log_split_probs[j], 1e-9);
  }
}

TEST(Dart, ThetaGridPosteriorFavoursSparsityForSparseWeights) {
  ppcm::Rng rng(15, 0);
  // one predictor holds almost all mass: small theta should dominate
  std::vector<double> logs(20, std::log(1e-30));
  logs[0] = std::log(1.0 - 19e-30);
  double mean = 0.0;
  for (int i = 0; i < 2000; ++i) mean += draw_theta(logs, DartPrior{}, rng) / 2000;
  std::vector<double> flat(20, std::log(1.0 / 20));
  double mean_flat = 0.0;
  for (int i = 0; i < 2000; ++i) mean_flat += draw_theta(flat, DartPrior{}, rng) / 2000;
  EXPECT_LT(mean, mean_flat);
}
