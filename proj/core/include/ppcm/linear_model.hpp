#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppcm/frames.hpp"
#include "ppcm/wave_models.hpp"

namespace ppcm::alt {

// Exact posterior draws of y = b0 + X b + e, e ~ N(0, sigma^2), under a flat
// prior on the coefficients and p(sigma^2) proportional to 1 / sigma^2.
struct LinearPosterior {
  std::size_t predictors = 0;
  std::size_t draws = 0;
  std::vector<double> coefficients;  // draws x (predictors + 1), intercept first
  std::vector<double> sigma;

  double coefficient(std::size_t d, std::size_t j) const { return coefficients[d * (predictors + 1) + j]; }
  double predict(std::size_t d, std::span<const double> x) const;
};

// X is row-major n x p; requires n > p + 1. `names` (optional, size p) label
// columns in the rank-deficiency error.
LinearPosterior fit_mblm(std::span<const double> x, std::size_t n, std::size_t p, std::span<const double> y,
                         std::size_t draws, std::uint64_t seed, const std::vector<std::string>& names = {});

// Least-squares coefficients (intercept first); throws on rank deficiency.
std::vector<double> ols(std::span<const double> x, std::size_t n, std::size_t p, std::span<const double> y,
                        const std::vector<std::string>& names = {});

class LinearOutcomeModel final : public OutcomeModel {
 public:
  explicit LinearOutcomeModel(LinearPosterior posterior);
  std::size_t draws() const override { return posterior_.draws; }
  double mean(std::size_t d, std::span<const double> f) const override { return posterior_.predict(d, f); }
  double sigma(std::size_t d) const override { return posterior_.sigma[d]; }
  const LinearPosterior& posterior() const { return posterior_; }

 private:
  LinearPosterior posterior_;
};

// Linear outcome models for every wave (no response models: the parametric
// variant runs without dropout offsets).
WaveModels fit_linear_wave_models(const data::CohortFrame& cohort, std::size_t draws, std::uint64_t seed,
                                  std::size_t threads = 1);

}  // namespace ppcm::alt
