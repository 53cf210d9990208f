#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ppcm/numeric.hpp"

TEST(Numeric, NormalCdfAndQuantile) {
  EXPECT_DOUBLE_EQ(ppcm::normal_cdf(0.0), 0.5);
  EXPECT_NEAR(ppcm::normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(ppcm::normal_quantile(0.975), 1.959963984540054, 1e-10);
  EXPECT_NEAR(ppcm::normal_quantile(ppcm::normal_cdf(-2.3)), -2.3, 1e-10);
}

TEST(Numeric, ChiSquaredQuantile) {
  // qchisq(0.1, 3) = 0.5843744
  EXPECT_NEAR(ppcm::chi_squared_quantile(0.1, 3.0), 0.5843744, 1e-6);
}

TEST(Numeric, CompensatedSumRecoversCancellation) {
  std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
  EXPECT_DOUBLE_EQ(ppcm::compensated_sum(xs), 2.0);
}

TEST(Numeric, MeanAndVariance) {
  std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(ppcm::mean(xs), 2.5);
  EXPECT_DOUBLE_EQ(ppcm::sample_variance(xs), 5.0 / 3.0);
}

TEST(Numeric, QuantileSortedLinearInterpolation) {
  std::vector<double> xs;
  for (int i = 1; i <= 100; ++i) xs.push_back(i);
  EXPECT_NEAR(ppcm::quantile_sorted(xs, 0.025), 3.475, 1e-12);
  EXPECT_NEAR(ppcm::quantile_sorted(xs, 0.975), 97.525, 1e-12);
  EXPECT_DOUBLE_EQ(ppcm::quantile_sorted(xs, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(ppcm::quantile_sorted(xs, 1.0), 100.0);
}
