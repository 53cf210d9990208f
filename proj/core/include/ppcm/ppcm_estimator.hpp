#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ppcm/frames.hpp"
#include "ppcm/sensitivity.hpp"
#include "ppcm/wave_models.hpp"

namespace ppcm {

enum class CohortMode { kMortal, kImmortal };

// kAlways fits response models unconditionally; kWhenNeeded skips them when
// every dropout offset is zero, where imputed response never reaches the
// predictions.
enum class ResponsePolicy { kAlways, kWhenNeeded };

struct PpcmOptions {
  CohortMode mode = CohortMode::kMortal;
  std::size_t n_posterior = 1000;
  // Explicit grid; when absent and by_age is set, the integer ages observed
  // among survivors are used.
  std::optional<std::vector<double>> age_grid;
  bool by_age = false;
  ResponsePolicy response_policy = ResponsePolicy::kAlways;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// One forward trajectory per unit for a single posterior draw, units x waves
// row-major. Dead unit-waves hold NaN predictions.
struct ForwardPredictions {
  std::size_t units = 0;
  std::size_t waves = 0;
  std::vector<double> yhat;
  std::vector<double> ystar;
  std::vector<std::uint8_t> rstar;

  double at(std::size_t i, std::size_t t) const { return yhat[i * waves + t]; }
};

ForwardPredictions impute_forward(const data::Panel& population, const WaveModels& models,
                                  const SensitivityDraw& sens, std::size_t draw, std::uint64_t seed);

// Mean prediction over units alive at t; absent when nobody survives.
std::optional<double> ppcm_at_wave(const ForwardPredictions& pred, const data::Panel& population, std::size_t t);

// Index of the grid value an age belongs to: the nearest value, provided it
// is within half the gap to its neighbour (0.5 for a single-value grid).
std::optional<std::size_t> age_cohort(std::span<const double> grid, double age);

// Survivor-weighted average over waves of each age cohort's PPCM_t.
std::vector<std::optional<double>> ppcm_by_age(const ForwardPredictions& pred, const data::Panel& population,
                                               std::span<const double> grid);

// Integer ages (rounded) observed among survivors at any wave, ascending.
std::vector<double> default_age_grid(const data::Panel& population);

struct PosteriorSummary {
  double point = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
};

struct PpcmPosterior {
  std::size_t draws = 0;
  std::size_t waves = 0;
  std::vector<double> wave_draws;  // draws x waves, NaN when absent
  std::vector<double> age_grid;
  std::vector<double> age_draws;   // draws x grid, NaN when absent
  std::vector<std::optional<PosteriorSummary>> wave_summary;
  std::vector<std::optional<PosteriorSummary>> age_summary;

  double wave_draw(std::size_t d, std::size_t t) const { return wave_draws[d * waves + t]; }
  double age_draw(std::size_t d, std::size_t g) const { return age_draws[d * age_grid.size() + g]; }
  // Recomputes posterior means and equal-tailed 95% intervals.
  void summarize();

  bool operator==(const PpcmPosterior&) const;
};

// Full pipeline: fit per-wave models on the cohort, then run the posterior
// loop over the population.
PpcmPosterior estimate_ppcm(const data::PopulationFrame& population, const data::CohortFrame& cohort,
                            WaveFitOptions fit, const SensitivityConfig& sens, const PpcmOptions& options);

// Posterior loop over already fitted models; lets several sensitivity
// settings share one set of fits.
PpcmPosterior estimate_ppcm_with_models(const data::Panel& population, const WaveModels& models,
                                        const SensitivityConfig& sens, const PpcmOptions& options);

// Frames for the immortal-cohort contrast: everybody alive at every wave,
// baseline covariates only, ages after death extrapolated by the median
// survivor age increment.
std::pair<data::PopulationFrame, data::CohortFrame> make_immortal(const data::PopulationFrame& population,
                                                                   const data::CohortFrame& cohort);

// Death and dropout both treated as ignorable, no offsets.
PpcmPosterior estimate_ppcm_immortal(const data::PopulationFrame& population, const data::CohortFrame& cohort,
                                     WaveFitOptions fit, const PpcmOptions& options);

}  // namespace ppcm
