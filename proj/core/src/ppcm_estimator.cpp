#include "ppcm/ppcm_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ppcm/error.hpp"
#include "ppcm/metrics.hpp"
#include "ppcm/numeric.hpp"
#include "ppcm/parallel.hpp"
#include "ppcm/random.hpp"

namespace ppcm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_grid(std::span<const double> grid) {
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!std::isfinite(grid[g])) throw ConfigError("age grid values must be finite");
    if (g > 0 && !(grid[g] > grid[g - 1])) throw ConfigError("age grid must be strictly increasing");
  }
}

}  // namespace

ForwardPredictions impute_forward(const data::Panel& population, const WaveModels& models,
                                  const SensitivityDraw& sens, std::size_t draw, std::uint64_t seed) {
  const std::size_t waves = population.waves();
  const std::size_t units = population.units();
  models.validate(waves);
  if (sens.units != units || sens.waves != waves) throw ConfigError("sensitivity draw does not match the population");

  ForwardPredictions out{units, waves, std::vector<double>(units * waves, kNaN),
                         std::vector<double>(units * waves, kNaN), std::vector<std::uint8_t>(units * waves, 0)};
  const std::uint64_t key = derive_seed(seed, StreamPurpose::kImputation, draw);
  std::vector<double> features(feature_count(population.schema(), waves - 1));

  for (std::size_t i = 0; i < units; ++i) {
    Rng rng(key, i);
    bool responding = true;
    for (std::size_t t = 0; t < waves; ++t) {
      // both variates are drawn at every wave so the stream never shifts
      const double u = rng.uniform();
      const double eps = rng.normal();
      if (!population.alive(i, t)) break;

      std::size_t w = fill_covariate_history(population, i, t, features.data());
      for (std::size_t k = 0; k < t; ++k) features[w++] = out.ystar[i * waves + k];
      const std::span<const double> f(features.data(), w);

      if (t > 0 && responding && models.response[t]) {
        const ResponseModel& rm = *models.response[t];
        responding = u < rm.probability(draw % rm.draws(), f);
      }
      const OutcomeModel& om = *models.outcome[t];
      const std::size_t od = draw % om.draws();
      const double mu = om.mean(od, f) + (responding ? 0.0 : sens.dropout_at(i, t));
      out.yhat[i * waves + t] = mu - sens.practice_at(i, t);
      out.ystar[i * waves + t] = mu + om.sigma(od) * eps;
      out.rstar[i * waves + t] = responding ? 1 : 0;
    }
  }
  return out;
}

std::optional<double> ppcm_at_wave(const ForwardPredictions& pred, const data::Panel& population, std::size_t t) {
  if (t >= population.waves()) throw ConfigError("wave " + std::to_string(t) + " out of range");
  CompensatedSum sum;
  std::size_t alive = 0;
  for (std::size_t i = 0; i < population.units(); ++i) {
    if (!population.alive(i, t)) continue;
    sum.add(pred.at(i, t));
    ++alive;
  }
  if (alive == 0) return std::nullopt;
  return sum.value() / static_cast<double>(alive);
}

std::optional<std::size_t> age_cohort(std::span<const double> grid, double age) {
  if (grid.empty() || std::isnan(age)) return std::nullopt;
  const auto it = std::lower_bound(grid.begin(), grid.end(), age);
  std::size_t g;
  if (it == grid.end()) {
    g = grid.size() - 1;
  } else if (it == grid.begin()) {
    g = 0;
  } else {
    const auto hi = static_cast<std::size_t>(it - grid.begin());
    // ties go to the lower value
    g = (age - grid[hi - 1] <= grid[hi] - age) ? hi - 1 : hi;
  }
  double half;
  if (grid.size() == 1) {
    half = 0.5;
  } else {
    const double gap = age < grid[g] ? (g > 0 ? grid[g] - grid[g - 1] : grid[1] - grid[0])
                                     : (g + 1 < grid.size() ? grid[g + 1] - grid[g] : grid[g] - grid[g - 1]);
    half = 0.5 * gap;
  }
  if (std::abs(age - grid[g]) > half) return std::nullopt;
  return g;
}

std::vector<std::optional<double>> ppcm_by_age(const ForwardPredictions& pred, const data::Panel& population,
                                               std::span<const double> grid) {
  check_grid(grid);
  if (!population.has_age()) throw ConfigError("age-specific PPCM requires an age column");
  const std::size_t waves = population.waves();
  const std::size_t G = grid.size();
  std::vector<CompensatedSum> sums(G * waves);
  std::vector<std::size_t> counts(G * waves, 0);
  for (std::size_t i = 0; i < population.units(); ++i) {
    for (std::size_t t = 0; t < waves && population.alive(i, t); ++t) {
      const double a = population.age(i, t);
      if (std::isnan(a)) {
        throw ConfigError("age missing for alive unit '" + population.unit_id(i) + "' at wave " + std::to_string(t));
      }
      const auto g = age_cohort(grid, a);
      if (!g) continue;
      sums[*g * waves + t].add(pred.at(i, t));
      ++counts[*g * waves + t];
    }
  }
  std::vector<std::optional<double>> out(G);
  for (std::size_t g = 0; g < G; ++g) {
    std::size_t total = 0;
    for (std::size_t t = 0; t < waves; ++t) total += counts[g * waves + t];
    if (total == 0) continue;
    CompensatedSum acc;
    for (std::size_t t = 0; t < waves; ++t) {
      const std::size_t n = counts[g * waves + t];
      if (n == 0) continue;
      const double cohort_ppcm = sums[g * waves + t].value() / static_cast<double>(n);
      acc.add(static_cast<double>(n) / static_cast<double>(total) * cohort_ppcm);
    }
    out[g] = acc.value();
  }
  return out;
}

std::vector<double> default_age_grid(const data::Panel& population) {
  if (!population.has_age()) throw ConfigError("age grid requested but the data have no age column");
  std::set<double> ages;
  for (std::size_t i = 0; i < population.units(); ++i) {
    for (std::size_t t = 0; t < population.waves() && population.alive(i, t); ++t) {
      const double a = population.age(i, t);
      if (!std::isnan(a)) ages.insert(std::round(a));
    }
  }
  return {ages.begin(), ages.end()};
}

void PpcmPosterior::summarize() {
  auto column_summary = [&](const std::vector<double>& draws_matrix, std::size_t cols, std::size_t c)
      -> std::optional<PosteriorSummary> {
    std::vector<double> col(draws);
    for (std::size_t d = 0; d < draws; ++d) {
      col[d] = draws_matrix[d * cols + c];
      if (std::isnan(col[d])) return std::nullopt;
    }
    const metrics::Interval ci = metrics::credible_interval(col, 0.95);
    return PosteriorSummary{compensated_sum(col) / static_cast<double>(draws), ci.lo, ci.hi};
  };
  wave_summary.assign(waves, std::nullopt);
  for (std::size_t t = 0; t < waves && draws > 0; ++t) wave_summary[t] = column_summary(wave_draws, waves, t);
  age_summary.assign(age_grid.size(), std::nullopt);
  for (std::size_t g = 0; g < age_grid.size() && draws > 0; ++g) {
    age_summary[g] = column_summary(age_draws, age_grid.size(), g);
  }
}

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] == b[k] || (std::isnan(a[k]) && std::isnan(b[k])))) return false;
  }
  return true;
}

}  // namespace

bool PpcmPosterior::operator==(const PpcmPosterior& o) const {
  return draws == o.draws && waves == o.waves && same_bits(wave_draws, o.wave_draws) && age_grid == o.age_grid &&
         same_bits(age_draws, o.age_draws);
}

PpcmPosterior estimate_ppcm_with_models(const data::Panel& population, const WaveModels& models,
                                        const SensitivityConfig& sens, const PpcmOptions& options) {
  const std::size_t waves = population.waves();
  if (options.n_posterior == 0) throw ConfigError("n_posterior must be at least 1");
  sens.validate(waves);
  models.validate(waves);
  if (!sens.dropout_zero()) {
    for (std::size_t t = 1; t < waves; ++t) {
      if (!models.response[t]) {
        throw ConfigError("a nonzero dropout offset needs a response model at wave " + std::to_string(t));
      }
    }
  }

  PpcmPosterior post;
  post.draws = options.n_posterior;
  post.waves = waves;
  post.wave_draws.assign(post.draws * waves, kNaN);
  if (options.age_grid) {
    check_grid(*options.age_grid);
    post.age_grid = *options.age_grid;
  } else if (options.by_age) {
    post.age_grid = default_age_grid(population);
  }
  const std::size_t G = post.age_grid.size();
  if (G > 0 && !population.has_age()) throw ConfigError("age grid requested but the data have no age column");
  post.age_draws.assign(post.draws * G, kNaN);

  parallel_for(post.draws, options.threads, [&](std::size_t d) {
    const SensitivityDraw sd = sample_sensitivity(sens, population, options.seed, d);
    const ForwardPredictions fp = impute_forward(population, models, sd, d, options.seed);
    for (std::size_t t = 0; t < waves; ++t) post.wave_draws[d * waves + t] = ppcm_at_wave(fp, population, t).value_or(kNaN);
    if (G > 0) {
      const auto by_age = ppcm_by_age(fp, population, post.age_grid);
      for (std::size_t g = 0; g < G; ++g) post.age_draws[d * G + g] = by_age[g].value_or(kNaN);
    }
  });
  post.summarize();
  return post;
}

PpcmPosterior estimate_ppcm(const data::PopulationFrame& population, const data::CohortFrame& cohort,
                            WaveFitOptions fit, const SensitivityConfig& sens, const PpcmOptions& options) {
  if (options.mode == CohortMode::kImmortal) return estimate_ppcm_immortal(population, cohort, std::move(fit), options);
  if (!(population.schema() == cohort.schema())) throw ConfigError("population and cohort schemas differ");
  sens.validate(population.waves());
  fit.fit_response = options.response_policy == ResponsePolicy::kAlways || !sens.dropout_zero();
  fit.seed = options.seed;
  fit.threads = options.threads;
  const WaveModels models = fit_bart_wave_models(cohort, fit);
  return estimate_ppcm_with_models(population, models, sens, options);
}

namespace {

data::PanelData immortal_panel(const data::Panel& panel, const std::vector<double>& increments) {
  data::PanelData d = panel.panel_data();
  const std::size_t waves = panel.waves();
  for (std::size_t t = 1; t < waves; ++t) d.schema.covariates[t].clear();
  for (std::size_t t = 1; t < waves; ++t) d.covariates[t].clear();
  for (std::size_t i = 0; i < panel.units(); ++i) {
    for (std::size_t t = 0; t < waves; ++t) {
      if (!d.alive[i * waves + t] && !d.age.empty()) d.age[i * waves + t] = d.age[i * waves] + increments[t];
      d.alive[i * waves + t] = 1;
    }
  }
  return d;
}

}  // namespace

std::pair<data::PopulationFrame, data::CohortFrame> make_immortal(const data::PopulationFrame& population,
                                                                   const data::CohortFrame& cohort) {
  if (!(population.schema() == cohort.schema())) throw ConfigError("population and cohort schemas differ");
  const std::size_t waves = population.waves();
  std::vector<double> increments(waves, 0.0);
  if (population.has_age()) {
    for (std::size_t t = 1; t < waves; ++t) {
      std::vector<double> diffs;
      for (std::size_t i = 0; i < population.units(); ++i) {
        const double a0 = population.age(i, 0), at = population.age(i, t);
        if (population.alive(i, t) && !std::isnan(a0) && !std::isnan(at)) diffs.push_back(at - a0);
      }
      if (diffs.empty()) {
        // nobody observed: continue the previous step linearly
        const double step = t >= 2 ? increments[t - 1] - increments[t - 2] : 1.0;
        increments[t] = increments[t - 1] + step;
      } else {
        std::sort(diffs.begin(), diffs.end());
        increments[t] = quantile_sorted(diffs, 0.5);
      }
    }
  }
  data::PopulationFrame pop(immortal_panel(population, increments));
  data::CohortData cd = cohort.cohort_data();
  cd.panel = immortal_panel(cohort, increments);
  return {std::move(pop), data::CohortFrame(std::move(cd))};
}

PpcmPosterior estimate_ppcm_immortal(const data::PopulationFrame& population, const data::CohortFrame& cohort,
                                     WaveFitOptions fit, const PpcmOptions& options) {
  auto [pop, coh] = make_immortal(population, cohort);
  PpcmOptions opts = options;
  opts.mode = CohortMode::kMortal;
  return estimate_ppcm(pop, coh, std::move(fit), SensitivityConfig::zeros(pop.waves()), opts);
}

}  // namespace ppcm
