#include "ppcm/dart.hpp"

#include <algorithm>
#include <cmath>

namespace ppcm::bart {
namespace {

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

DartState DartState::uniform(std::size_t predictors) {
  DartState s;
  s.split_probs.assign(predictors, 1.0 / static_cast<double>(predictors));
  s.log_split_probs.assign(predictors, -std::log(static_cast<double>(predictors)));
  return s;
}

std::vector<double> draw_log_split_probs(std::span<const std::size_t> counts, double theta, Rng& rng) {
  const std::size_t p = counts.size();
  std::vector<double> logs(p);
  if (p == 1) {
    logs[0] = 0.0;
    return logs;
  }
  const double base = theta / static_cast<double>(p);
  for (std::size_t j = 0; j < p; ++j) logs[j] = rng.log_gamma(base + static_cast<double>(counts[j]));
  const double norm = log_sum_exp(logs);
  for (double& l : logs) l -= norm;
  return logs;
}

double draw_theta(std::span<const double> log_split_probs, const DartPrior& prior, Rng& rng) {
  constexpr std::size_t kGrid = 1000;
  const auto p = static_cast<double>(log_split_probs.size());
  double sum_log = 0.0;
  for (double l : log_split_probs) sum_log += l;
  std::vector<double> theta(kGrid), weight(kGrid);
  for (std::size_t k = 0; k < kGrid; ++k) {
    const double lambda = static_cast<double>(k + 1) / static_cast<double>(kGrid + 1);
    theta[k] = lambda * p / (1.0 - lambda);
    const double loglik = std::lgamma(theta[k]) - p * std::lgamma(theta[k] / p) + (theta[k] / p) * sum_log;
    const double logprior = (prior.a - 1.0) * std::log(lambda) + (prior.b - 1.0) * std::log1p(-lambda);
    weight[k] = loglik + logprior;
  }
  const double norm = log_sum_exp(weight);
  double u = rng.uniform();
  for (std::size_t k = 0; k < kGrid; ++k) {
    u -= std::exp(weight[k] - norm);
    if (u <= 0.0) return theta[k];
  }
  return theta.back();
}

void update_dart_split_probs(DartState& state, std::span<const std::size_t> counts,
                             const DartPrior& prior, Rng& rng) {
  state.log_split_probs = draw_log_split_probs(counts, state.theta, rng);
  state.split_probs.resize(state.log_split_probs.size());
  double total = 0.0;
  for (std::size_t j = 0; j < state.split_probs.size(); ++j) {
    state.split_probs[j] = std::exp(state.log_split_probs[j]);
    total += state.split_probs[j];
  }
  for (double& s : state.split_probs) s /= total;
  if (state.split_probs.size() > 1) state.theta = draw_theta(state.log_split_probs, prior, rng);
}

}  // namespace ppcm::bart
