#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ppcm/random.hpp"

namespace ppcm::bart {

// Hyperprior on the sparsity concentration theta through
// lambda = theta / (theta + rho) ~ Beta(a, b), with rho = number of predictors.
struct DartPrior {
  double a = 0.5;
  double b = 1.0;
};

// Split-variable weights of the sparse Dirichlet prior, kept alongside their
// logs because tiny weights underflow long before their logs do.
struct DartState {
  std::vector<double> split_probs;
  std::vector<double> log_split_probs;
  double theta = 1.0;

  static DartState uniform(std::size_t predictors);
};

// Draw log s ~ Dirichlet(theta / p + counts_j). Gammas are drawn on the log
// scale and normalised with log-sum-exp.
std::vector<double> draw_log_split_probs(std::span<const std::size_t> counts, double theta, Rng& rng);

// Resample theta on a 1000-point lambda grid, lambda_k = k / 1001.
double draw_theta(std::span<const double> log_split_probs, const DartPrior& prior, Rng& rng);

// One DART Gibbs step: new split_probs from the count full conditional, then a
// fresh theta given them.
void update_dart_split_probs(DartState& state, std::span<const std::size_t> counts,
                             const DartPrior& prior, Rng& rng);

}  // namespace ppcm::bart
