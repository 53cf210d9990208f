#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ppcm/cells.hpp"
#include "ppcm/error.hpp"
#include "ppcm/numeric.hpp"
#include "ppcm/random.hpp"
#include "ppcm/weighting_estimators.hpp"

using namespace ppcm::alt;

namespace {

std::vector<CellKey> repeat(const std::vector<std::pair<CellKey, std::size_t>>& spec) {
  std::vector<CellKey> out;
  for (const auto& [k, c] : spec) out.insert(out.end(), c, k);
  return out;
}

}  // namespace

TEST(Cells, BalancedBinaryCovariatesGiveFourEqualCells) {
  const auto pop = repeat({{{0, 0}, 250}, {{0, 1}, 250}, {{1, 0}, 250}, {{1, 1}, 250}});
  const auto smp = repeat({{{0, 0}, 25}, {{0, 1}, 25}, {{1, 0}, 25}, {{1, 1}, 25}});
  const auto t = build_cells_from_keys(pop, smp);
  ASSERT_EQ(t.cells.size(), 4u);
  for (const auto& c : t.cells) EXPECT_DOUBLE_EQ(c.weight, 10.0);
  EXPECT_TRUE(t.merges.empty());
  EXPECT_TRUE(t.trims.empty());
}

TEST(Cells, SparseCellMergesIntoNearestDenseNeighbour) {
  // (1,1) has n = 5; neighbours (0,1) n=30 and (1,0) n=40 are both at distance 1: larger n wins
  const auto pop = repeat({{{0, 0}, 300}, {{0, 1}, 300}, {{1, 0}, 300}, {{1, 1}, 100}});
  const auto smp = repeat({{{0, 0}, 30}, {{0, 1}, 30}, {{1, 0}, 40}, {{1, 1}, 5}});
  const auto t = build_cells_from_keys(pop, smp);
  ASSERT_EQ(t.cells.size(), 3u);
  ASSERT_EQ(t.merges.size(), 1u);
  EXPECT_EQ(t.merges[0].from, (CellKey{1, 1}));
  EXPECT_EQ(t.merges[0].into, (CellKey{1, 0}));
  const Cell& merged = t.cells[t.sample_cell.back()];
  EXPECT_EQ(merged.key, (CellKey{1, 0}));
  EXPECT_EQ(merged.population_count, 400u);
  EXPECT_EQ(merged.sample_count, 45u);
  EXPECT_EQ(t.population_total(), pop.size());
  EXPECT_EQ(t.sample_total(), smp.size());
  for (const auto& c : t.cells) EXPECT_GE(c.sample_count, 20u);
}

TEST(Cells, WeightsAboveCapAreTrimmed) {
  const auto pop = repeat({{{0}, 900}, {{1}, 200}});
  const auto smp = repeat({{{0}, 20}, {{1}, 20}});
  const auto t = build_cells_from_keys(pop, smp);
  EXPECT_DOUBLE_EQ(t.cells[0].raw_weight, 45.0);
  EXPECT_DOUBLE_EQ(t.cells[0].weight, 30.0);
  EXPECT_DOUBLE_EQ(t.cells[1].weight, 10.0);
  ASSERT_EQ(t.trims.size(), 1u);
  EXPECT_EQ(t.trims[0].key, CellKey{0});
  EXPECT_DOUBLE_EQ(t.trims[0].raw_weight, 45.0);
  EXPECT_DOUBLE_EQ(t.trims[0].weight, 30.0);
  for (const auto& c : t.cells) EXPECT_LE(c.weight, c.raw_weight);
}

TEST(Cells, ConservationUnderRandomKeys) {
  ppcm::Rng rng(3, 0);
  std::vector<CellKey> pop, smp;
  for (int i = 0; i < 5000; ++i) pop.push_back({static_cast<int>(rng.index(3)), static_cast<int>(rng.index(4))});
  for (int i = 0; i < 300; ++i) {
    smp.push_back({static_cast<int>(rng.index(3)), static_cast<int>(rng.index(4) * rng.index(2))});
  }
  const auto t = build_cells_from_keys(pop, smp);
  EXPECT_EQ(t.population_total(), 5000u);
  EXPECT_EQ(t.sample_total(), 300u);
  for (const auto& c : t.cells) {
    EXPECT_GE(c.sample_count, 20u);
    EXPECT_LE(c.weight, 30.0);
  }
}

TEST(Cells, AllSparseIsDegenerate) {
  try {
    build_cells_from_keys(repeat({{{0}, 100}}), repeat({{{0}, 5}}));
    FAIL();
  } catch (const ppcm::EstimationError& e) {
    EXPECT_NE(std::string(e.what()).find("cell structure degenerate"), std::string::npos);
  }
}

TEST(Cells, TertilesFromSampleValues) {
  std::vector<double> x;
  for (int i = 0; i < 90; ++i) x.push_back(i);
  const auto pop = fixtures::population(fixtures::all_alive(90, 1), x);
  const auto coh = fixtures::cohort(fixtures::all_alive(90, 1), std::vector<std::vector<int>>(90, {1}),
                                    std::vector<std::vector<double>>(90, {0.0}), x);
  const auto t = build_cells(pop, coh, {{"x", true}});
  ASSERT_EQ(t.cells.size(), 3u);
  for (const auto& c : t.cells) EXPECT_EQ(c.sample_count, 30u);
}

TEST(WeightedMean, TwoUnitFixture) {
  const auto e = weighted_ratio_mean(std::vector<double>{1, 3}, std::vector<double>{0, 4});
  EXPECT_DOUBLE_EQ(e.point, 3.0);
  EXPECT_LE(e.lo, e.point);
  EXPECT_GE(e.hi, e.point);
}

TEST(Ht, UniformWeightsFullResponseGiveSampleMean) {
  const std::size_t n = 40;
  std::vector<double> x(n);
  std::vector<std::vector<double>> y;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i % 2);
    y.push_back({0.0, 0.3 * static_cast<double>(i)});
    sum += y.back()[1];
  }
  const auto coh = fixtures::cohort(fixtures::all_alive(n, 2), fixtures::all_alive(n, 2), y, x);
  const auto cells = build_cells_from_keys(std::vector<CellKey>(400, CellKey{0}), std::vector<CellKey>(n, CellKey{0}));
  ParticipationModel part;
  part.prob.assign(2, std::vector<double>(n, 1.0));
  EXPECT_DOUBLE_EQ(ht_estimate(coh, cells, part, 1).point, sum / static_cast<double>(n));
  const auto fitted = fit_participation(coh);
  EXPECT_DOUBLE_EQ(ht_estimate(coh, cells, fitted, 1).point, sum / static_cast<double>(n));
}

TEST(Ht, ZeroParticipationProbabilityIsAnError) {
  const auto coh = fixtures::cohort(fixtures::all_alive(2, 2), fixtures::all_alive(2, 2), {{0, 1}, {0, 2}}, {0, 1});
  const auto cells = build_cells_from_keys({{0}, {0}}, {{0}, {0}}, 1);
  ParticipationModel part;
  part.prob = {{1, 1}, {0.5, 0.0}};
  EXPECT_THROW(ht_estimate(coh, cells, part, 1), ppcm::EstimationError);
}

TEST(Ht, StratifiedDesignIsUnbiased) {
  // two strata sampled at different fractions; inverse inclusion weights N_h / n_h
  ppcm::Rng rng(21, 0);
  std::vector<double> pop_y;
  for (int i = 0; i < 60; ++i) pop_y.push_back(i < 20 ? 10.0 + rng.normal() : rng.normal());
  const double truth = ppcm::mean(pop_y);
  const std::size_t reps = 10000;
  std::vector<double> est;
  for (std::size_t r = 0; r < reps; ++r) {
    std::vector<double> w, y;
    auto draw = [&](std::size_t lo, std::size_t hi, std::size_t k) {
      std::vector<std::size_t> idx;
      for (std::size_t i = lo; i < hi; ++i) idx.push_back(i);
      for (std::size_t j = 0; j < k; ++j) {
        std::swap(idx[j], idx[j + rng.index(idx.size() - j)]);
        y.push_back(pop_y[idx[j]]);
        w.push_back(static_cast<double>(hi - lo) / static_cast<double>(k));
      }
    };
    draw(0, 20, 10);
    draw(20, 60, 5);
    est.push_back(weighted_ratio_mean(w, y).point);
  }
  const double se = std::sqrt(ppcm::sample_variance(est) / static_cast<double>(reps));
  EXPECT_NEAR(ppcm::mean(est), truth, 3.0 * se);
}

TEST(Greg, ZeroResidualsEqualPredictionMean) {
  const std::vector<double> pop_pred{1.0, 2.0, 4.0, 5.0};
  const std::vector<double> w{3.0, 7.0}, y{2.0, 4.0};
  const auto g = greg_from_terms(pop_pred, w, y, y);
  EXPECT_DOUBLE_EQ(g.point, 3.0);
  EXPECT_DOUBLE_EQ(g.correction_term, 0.0);
}

TEST(Greg, IdentityHoldsTermByTerm) {
  const std::vector<double> pop_pred{1.0, 2.0, 4.0, 5.0};
  const std::vector<double> w{3.0, 7.0}, y{2.5, 3.0}, m{2.0, 4.0};
  const auto g = greg_from_terms(pop_pred, w, y, m);
  EXPECT_DOUBLE_EQ(g.prediction_term, 3.0);
  EXPECT_DOUBLE_EQ(g.correction_term, (3.0 * 0.5 + 7.0 * -1.0) / 4.0);
  EXPECT_DOUBLE_EQ(g.point, g.prediction_term + g.correction_term);
  EXPECT_EQ(g.survivors, 4u);
}

TEST(Greg, InterpolatingWorkingModelReducesToPredictionMean) {
  // y1 is an exact linear function of x, so OLS residuals vanish
  const std::size_t n = 30;
  std::vector<double> x(n);
  std::vector<std::vector<double>> y;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i % 7);
    const double y0 = static_cast<double>((i * 5) % 11);
    y.push_back({y0, 1.0 + 0.5 * x[i]});
  }
  const auto coh = fixtures::cohort(fixtures::all_alive(n, 2), fixtures::all_alive(n, 2), y, x);
  const auto cells = build_cells_from_keys(std::vector<CellKey>(n, CellKey{0}), std::vector<CellKey>(n, CellKey{0}));
  const auto part = fit_participation(coh);
  const auto g = greg_estimate(coh, coh, cells, part, 1);
  EXPECT_NEAR(g.correction_term, 0.0, 1e-12);
  double mean_y = 0.0;
  for (const auto& v : y) mean_y += v[1] / static_cast<double>(n);
  EXPECT_NEAR(g.point, mean_y, 1e-12);
}

TEST(Probit, MleOnKnownModel) {
  ppcm::Rng rng(8, 0);
  const std::size_t n = 20000;
  std::vector<double> x(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    r[i] = rng.uniform() < ppcm::normal_cdf(0.3 + 0.8 * x[i]) ? 1.0 : 0.0;
  }
  const auto fit = fit_probit_mle(x, n, 1, r);
  EXPECT_NEAR(fit.coefficients[0], 0.3, 0.04);
  EXPECT_NEAR(fit.coefficients[1], 0.8, 0.04);
}

namespace {

// ages 70 or 80 at baseline, two years older at wave 1; grid {70, 80}
std::vector<std::vector<double>> two_cohort_ages(std::size_t n) {
  std::vector<std::vector<double>> a;
  for (std::size_t i = 0; i < n; ++i) {
    const double base = i % 2 == 0 ? 70.0 : 80.0;
    a.push_back({base, base + 2.0});
  }
  return a;
}

}  // namespace

TEST(HtByAge, UniformWeightsGiveSurvivorWeightedCohortMeans) {
  const std::size_t n = 40;
  std::vector<double> x(n);
  std::vector<std::vector<double>> y;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i % 3);
    y.push_back({static_cast<double>(i % 5), static_cast<double>((i * 7) % 9)});
  }
  const auto ages = two_cohort_ages(n);
  const auto coh = fixtures::cohort(fixtures::all_alive(n, 2), fixtures::all_alive(n, 2), y, x, ages);
  const auto cells = build_cells_from_keys(std::vector<CellKey>(n, CellKey{0}), std::vector<CellKey>(n, CellKey{0}));
  const auto part = fit_participation(coh);
  const std::vector<double> grid{70.0, 80.0};
  const auto curve = ht_by_age(coh, coh, cells, part, grid);
  ASSERT_EQ(curve.size(), 2u);
  for (std::size_t g = 0; g < 2; ++g) {
    // equal survivor counts at both waves: the plain average of the two wave means
    double m0 = 0.0, m1 = 0.0, k = 0.0;
    for (std::size_t i = g; i < n; i += 2) {
      m0 += y[i][0];
      m1 += y[i][1];
      k += 1.0;
    }
    ASSERT_TRUE(curve[g].has_value());
    EXPECT_NEAR(*curve[g], 0.5 * (m0 / k + m1 / k), 1e-12);
  }
  const std::vector<double> far{50.0};
  EXPECT_FALSE(ht_by_age(coh, coh, cells, part, far)[0].has_value());
}

TEST(GregByAge, ExactLinearOutcomesGivePopulationCohortMeans) {
  const std::size_t n = 30, extra = 10;
  std::vector<double> x(n + extra);
  for (std::size_t i = 0; i < n + extra; ++i) x[i] = static_cast<double>((i * 3) % 7);
  auto f0 = [](double v) { return 2.0 - v; };
  auto f1 = [](double v) { return 1.0 + 0.5 * v; };
  std::vector<std::vector<double>> y;
  for (std::size_t i = 0; i < n; ++i) y.push_back({f0(x[i]), f1(x[i])});
  const auto ages = two_cohort_ages(n + extra);
  const auto pop = fixtures::population(fixtures::all_alive(n + extra, 2), x, ages);
  const std::vector<double> cx(x.begin(), x.begin() + n);
  const std::vector<std::vector<double>> cages(ages.begin(), ages.begin() + n);
  const auto coh = fixtures::cohort(fixtures::all_alive(n, 2), fixtures::all_alive(n, 2), y, cx, cages);
  const auto cells =
      build_cells_from_keys(std::vector<CellKey>(n + extra, CellKey{0}), std::vector<CellKey>(n, CellKey{0}));
  const auto part = fit_participation(coh);
  const std::vector<double> grid{70.0, 80.0};
  const auto curve = greg_by_age(pop, coh, cells, part, grid);
  for (std::size_t g = 0; g < 2; ++g) {
    double m = 0.0, k = 0.0;
    for (std::size_t i = g; i < n + extra; i += 2) {
      m += 0.5 * (f0(x[i]) + f1(x[i]));
      k += 1.0;
    }
    ASSERT_TRUE(curve[g].has_value());
    EXPECT_NEAR(*curve[g], m / k, 1e-9);
  }
}

TEST(HtByAge, NeedsAgeColumn) {
  const auto coh = fixtures::cohort(fixtures::all_alive(2, 1), {{1}, {1}}, {{1.0}, {2.0}}, {0.0, 1.0});
  const auto cells = build_cells_from_keys({{0}, {0}}, {{0}, {0}}, 1);
  const auto part = fit_participation(coh);
  const std::vector<double> grid{70.0};
  EXPECT_THROW(ht_by_age(coh, coh, cells, part, grid), ppcm::ConfigError);
}
