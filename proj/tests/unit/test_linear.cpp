#include <gtest/gtest.h>

#include <cmath>

#include "ppcm/error.hpp"
#include "ppcm/linear_model.hpp"
#include "ppcm/numeric.hpp"
#include "ppcm/random.hpp"

using namespace ppcm::alt;

TEST(Mblm, NoiselessLineIsRecoveredExactly) {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(i * 0.25);
    y.push_back(2.0 * x.back() + 1.0);
  }
  const auto post = fit_mblm(x, 20, 1, y, 200, 3);
  for (std::size_t d = 0; d < post.draws; ++d) {
    EXPECT_NEAR(post.coefficient(d, 0), 1.0, 1e-9);
    EXPECT_NEAR(post.coefficient(d, 1), 2.0, 1e-9);
    EXPECT_LT(post.sigma[d], 1e-6);
  }
}

TEST(Mblm, PosteriorMomentsMatchConjugateForm) {
  ppcm::Rng rng(5, 0);
  const std::size_t n = 30;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = 0.5 - 1.5 * x[i] + 0.7 * rng.normal();
  }
  const auto b = ols(x, n, 1, y);
  double ssr = 0.0, sxx = 0.0;
  const double xbar = ppcm::mean(x);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - b[0] - b[1] * x[i];
    ssr += e * e;
    sxx += (x[i] - xbar) * (x[i] - xbar);
  }
  const auto post = fit_mblm(x, n, 1, y, 40000, 6);
  std::vector<double> slope(post.draws), s2(post.draws);
  for (std::size_t d = 0; d < post.draws; ++d) {
    slope[d] = post.coefficient(d, 1);
    s2[d] = post.sigma[d] * post.sigma[d];
  }
  // marginal slope ~ t_{n-2}(b1, s^2 / Sxx); sigma^2 ~ SSR / chi2_{n-2}
  const double dof = static_cast<double>(n - 2);
  const double slope_var = ssr / dof / sxx * dof / (dof - 2.0);
  EXPECT_NEAR(ppcm::mean(slope), b[1], 4.0 * std::sqrt(slope_var / 40000));
  EXPECT_NEAR(ppcm::sample_variance(slope) / slope_var, 1.0, 0.03);
  EXPECT_NEAR(ppcm::mean(s2) / (ssr / (dof - 2.0)), 1.0, 0.02);
}

TEST(Mblm, RankDeficiencyNamesColumns) {
  std::vector<double> x;
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    x.push_back(2.0 * i);
    y.push_back(i % 3);
  }
  try {
    fit_mblm(x, 10, 2, y, 5, 1, {"age", "age_doubled"});
    FAIL() << "expected EstimationError";
  } catch (const ppcm::EstimationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("collinear"), std::string::npos);
    EXPECT_TRUE(msg.find("age") != std::string::npos) << msg;
  }
  EXPECT_THROW(fit_mblm(std::vector<double>{1, 2}, 2, 1, std::vector<double>{1, 2}, 5, 1), ppcm::EstimationError);
}

TEST(Mblm, Deterministic) {
  std::vector<double> x{0, 1, 2, 3, 4, 5}, y{1, 0, 3, 2, 5, 4};
  const auto a = fit_mblm(x, 6, 1, y, 50, 9), b = fit_mblm(x, 6, 1, y, 50, 9);
  EXPECT_EQ(a.coefficients, b.coefficients);
  EXPECT_EQ(a.sigma, b.sigma);
}
