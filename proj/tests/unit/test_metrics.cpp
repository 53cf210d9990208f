#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ppcm/error.hpp"
#include "ppcm/metrics.hpp"
#include "ppcm/random.hpp"
#include "ppcm/study.hpp"

using namespace ppcm::metrics;

namespace {

ReplicateResult res(const std::string& e, std::size_t r, double point, double truth, double lo, double hi) {
  return ReplicateResult{e, r, point, lo, hi, truth, true, ""};
}

}  // namespace

TEST(CredibleInterval, Examples) {
  std::vector<double> d;
  for (int i = 1; i <= 100; ++i) d.push_back(i);
  const auto ci = credible_interval(d, 0.95);
  EXPECT_NEAR(ci.lo, 3.475, 1e-12);
  EXPECT_NEAR(ci.hi, 97.525, 1e-12);
  const auto c = credible_interval(std::vector<double>(10, 4.2));
  EXPECT_EQ(c.lo, 4.2);
  EXPECT_EQ(c.hi, 4.2);
  const auto med = credible_interval(d, 0.0);
  EXPECT_DOUBLE_EQ(med.lo, 50.5);
  EXPECT_DOUBLE_EQ(med.hi, 50.5);
  EXPECT_THROW(credible_interval(std::vector<double>{}), ppcm::ConfigError);
  EXPECT_THROW(credible_interval(std::vector<double>{1.0, std::nan("")}), ppcm::ConfigError);
}

TEST(Summarize, HandArithmetic) {
  const std::vector<ReplicateResult> r{res("a", 0, 1, 2, 0, 3), res("a", 1, 3, 2, 1, 4)};
  const auto rows = summarize(r);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].bias, 0.0);
  EXPECT_DOUBLE_EQ(*rows[0].sd, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(rows[0].mse, 1.0);
  EXPECT_DOUBLE_EQ(*rows[0].cp, 100.0);
}

TEST(Summarize, ExactEstimatesHaveZeroError) {
  std::vector<ReplicateResult> r;
  for (std::size_t k = 0; k < 5; ++k) r.push_back(res("e", k, 1.5, 1.5, 1.0, 2.0));
  const auto row = summarize(r)[0];
  EXPECT_EQ(row.bias, 0.0);
  EXPECT_EQ(*row.sd, 0.0);
  EXPECT_EQ(row.mse, 0.0);
}

TEST(Summarize, VarianceDecompositionAndInvariances) {
  ppcm::Rng rng(4, 0);
  std::vector<ReplicateResult> r;
  for (std::size_t k = 0; k < 50; ++k) {
    // fixed truth: SD is taken over point estimates, so the decomposition is exact only then
    const double truth = 0.4, point = truth + 0.3 + rng.normal();
    r.push_back(res("z", k, point, truth, point - 1.0, point + 1.0));
  }
  const auto row = summarize(r)[0];
  const double R = 50.0;
  EXPECT_NEAR(row.mse, row.bias * row.bias + *row.sd * *row.sd * (R - 1) / R, 1e-12);
  EXPECT_GE(row.mse, row.bias * row.bias);

  auto shuffled = r;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[3], shuffled[17]);
  const auto srow = summarize(shuffled)[0];
  EXPECT_EQ(srow.bias, row.bias);
  EXPECT_EQ(*srow.sd, *row.sd);
  EXPECT_EQ(srow.mse, row.mse);
  EXPECT_EQ(*srow.cp, *row.cp);

  const double a = -2.0, b = 5.0;
  auto mapped = r;
  for (auto& m : mapped) {
    m.point = a * m.point + b;
    m.truth = a * m.truth + b;
    const double lo = a * m.hi + b, hi = a * m.lo + b;
    m.lo = lo;
    m.hi = hi;
  }
  const auto mrow = summarize(mapped)[0];
  EXPECT_NEAR(mrow.bias, a * row.bias, 1e-12);
  EXPECT_NEAR(*mrow.sd, std::abs(a) * *row.sd, 1e-12);
  EXPECT_NEAR(mrow.mse, a * a * row.mse, 1e-11);
  EXPECT_EQ(*mrow.cp, *row.cp);
}

TEST(Summarize, SingleReplicateAndFailures) {
  std::vector<ReplicateResult> r{res("b", 0, 1, 0, 0, 2), res("a", 0, 2, 1, 0, 3)};
  r.push_back(ReplicateResult{"a", 1, 0, 0, 0, 0, false, "boom"});
  const auto rows = summarize(r);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].estimator, "a");
  EXPECT_EQ(rows[0].replicates, 1u);
  EXPECT_EQ(rows[0].failures, 1u);
  EXPECT_FALSE(rows[0].sd.has_value());
  EXPECT_FALSE(rows[0].cp.has_value());
  EXPECT_DOUBLE_EQ(rows[0].bias, 1.0);
}

TEST(Study, SampleEstimatorTwoReplicatesReproducible) {
  StudyConfig cfg;
  cfg.scenario.id = 1;
  cfg.replicates = 2;
  cfg.seed = 7;
  const auto a = run_study(cfg), b = run_study(cfg);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_TRUE(a[k].ok);
    EXPECT_EQ(a[k].replicate, k);
    EXPECT_EQ(a[k].point, b[k].point);
    EXPECT_EQ(a[k].truth, b[k].truth);
    EXPECT_LE(a[k].lo, a[k].hi);
  }
  EXPECT_NE(a[0].truth, a[1].truth);
}

TEST(Study, UnknownEstimatorListsValidNames) {
  try {
    validate_estimators({"sample", "bogus"});
    FAIL();
  } catch (const ppcm::ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("bogus"), std::string::npos);
    EXPECT_NE(msg.find("mb-sp"), std::string::npos);
    EXPECT_NE(msg.find("greg"), std::string::npos);
  }
}

TEST(Study, ComparisonEstimatorsRunOnOneReplicate) {
  StudyConfig cfg;
  cfg.scenario.id = 1;
  cfg.scenario.population_size = 3000;
  cfg.scenario.sample_size = 600;
  cfg.estimators = {"sample", "mb-lm", "ht", "greg", "mrp"};
  cfg.linear_draws = 100;
  cfg.n_posterior = 100;
  cfg.mrp.n_burn = 100;
  cfg.mrp.n_keep = 100;
  cfg.seed = 3;
  const auto r = run_replicate(cfg, 0);
  ASSERT_EQ(r.size(), 5u);
  for (const auto& e : r) {
    EXPECT_TRUE(e.ok) << e.estimator << ": " << e.error;
    EXPECT_LE(e.lo, e.point) << e.estimator;
    EXPECT_LE(e.point, e.hi) << e.estimator;
    EXPECT_LT(std::abs(e.point - e.truth), 1.0) << e.estimator;
  }
}
