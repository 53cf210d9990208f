#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ppcm/error.hpp"
#include "ppcm/mrp.hpp"
#include "ppcm/numeric.hpp"
#include "ppcm/random.hpp"

using namespace ppcm::alt;

TEST(MrpGibbs, InterceptOnlyRecoversSampleMean) {
  ppcm::Rng rng(1, 0);
  const std::size_t n = 200;
  std::vector<double> x(n, 1.0), y(n);
  for (auto& v : y) v = 3.0 + rng.normal();
  MrpConfig cfg;
  cfg.n_keep = 4000;
  cfg.seed = 2;
  const auto post = fit_mrp_gibbs(x, n, 1, {}, {}, y, cfg);
  // posterior of the mean is centred on ybar with sd about 1 / sqrt(n)
  EXPECT_NEAR(ppcm::mean(post.beta), ppcm::mean(y), 0.01);
}

TEST(MrpGibbs, HugeRandomEffectVarianceApproachesFixedEffects) {
  ppcm::Rng rng(3, 0);
  const std::size_t per = 25, L = 4, n = per * L;
  std::vector<double> x(n, 1.0), y(n);
  std::vector<std::size_t> lv(n);
  std::vector<double> level_mean(L, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    lv[i] = i % L;
    y[i] = 10.0 * static_cast<double>(lv[i] + 1) + 0.5 * rng.normal();
    level_mean[lv[i]] += y[i] / static_cast<double>(per);
  }
  MrpConfig cfg;
  cfg.n_burn = 500;
  cfg.n_keep = 2000;
  cfg.fixed_tau2 = 1e6;
  cfg.seed = 4;
  const auto post = fit_mrp_gibbs(x, n, 1, lv, {L}, y, cfg);
  const std::size_t total = post.total_levels();
  for (std::size_t l = 0; l < L; ++l) {
    double m = 0.0;
    for (std::size_t d = 0; d < post.draws; ++d) m += (post.beta[d] + post.u[d * total + l]) / post.draws;
    EXPECT_NEAR(m / level_mean[l], 1.0, 0.01) << "level " << l;
  }
}

TEST(MrpGibbs, SampledVarianceShrinksNoisyLevels) {
  ppcm::Rng rng(5, 0);
  const std::size_t n = 80;
  std::vector<double> x(n, 1.0), y(n);
  std::vector<std::size_t> lv(n);
  for (std::size_t i = 0; i < n; ++i) {
    lv[i] = i % 8;
    y[i] = rng.normal();
  }
  MrpConfig cfg;
  cfg.seed = 6;
  const auto post = fit_mrp_gibbs(x, n, 1, lv, {8}, y, cfg);
  EXPECT_EQ(post.draws, cfg.n_keep);
  for (double t : post.tau) EXPECT_GT(t, 0.0);
  for (auto c : post.level_counts) EXPECT_EQ(c, 10u);
}

TEST(Binning, QuartilesAndZeroLevel) {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  const auto b = make_binning(v, 0.1);
  EXPECT_FALSE(b.zero_level);
  EXPECT_EQ(b.levels(), 4u);
  EXPECT_EQ(b.level(1.0), 0u);
  EXPECT_EQ(b.level(100.0), 3u);

  std::vector<double> z(30, 0.0);
  z.insert(z.end(), v.begin(), v.end());
  const auto bz = make_binning(z, 0.1);
  EXPECT_TRUE(bz.zero_level);
  EXPECT_EQ(bz.levels(), 5u);
  EXPECT_EQ(bz.level(0.0), 0u);
  EXPECT_EQ(bz.level(1.0), 1u);
}

TEST(MrpSpecTest, CovariateInTwoRolesRejected) {
  MrpSpec s{{"x1"}, {"x1"}};
  EXPECT_THROW(s.validate(), ppcm::ConfigError);
}

TEST(MrpWaveModels, EmptyLevelIsPredictedAtGroupMeanAndLogged) {
  const std::size_t n = 40;
  std::vector<double> x(n);
  std::vector<std::vector<int>> resp;
  std::vector<std::vector<double>> y;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i);
    resp.push_back({1, i >= 30 ? 0 : 1});
    y.push_back({0.1 * x[i], 0.2 * x[i]});
  }
  const auto coh = fixtures::cohort(fixtures::all_alive(n, 2), resp, y, x);
  MrpSpec spec{{}, {"x"}};
  MrpConfig cfg;
  cfg.n_burn = 50;
  cfg.n_keep = 50;
  MrpFitReport report;
  const auto models = fit_mrp_wave_models(coh, spec, cfg, 1, &report);
  ASSERT_EQ(report.notes.size(), 1u);
  EXPECT_NE(report.notes[0].find("no sample units"), std::string::npos);
  const auto& m1 = dynamic_cast<const MrpOutcomeModel&>(*models.outcome[1]);
  // features at wave 1: x, then y0; empty top bin drops the random effect
  const std::vector<double> f{35.0, 3.5};
  const auto& p = m1.posterior();
  const double expected = p.beta[0 * p.fixed] + p.beta[0 * p.fixed + 1] * 3.5;
  EXPECT_DOUBLE_EQ(m1.mean(0, f), expected);
}
