#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppcm::metrics {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Equal-tailed interval from linear-interpolation quantiles at
// (1 - level) / 2 and (1 + level) / 2. NaN draws are rejected.
Interval credible_interval(std::span<const double> draws, double level = 0.95);

struct ReplicateResult {
  std::string estimator;
  std::size_t replicate = 0;
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double truth = 0.0;
  bool ok = true;
  std::string error;  // reason when !ok
};

struct SummaryRow {
  std::string estimator;
  std::size_t replicates = 0;  // successful ones
  std::size_t failures = 0;
  double bias = 0.0;
  std::optional<double> sd;  // absent with a single replicate
  double mse = 0.0;
  std::optional<double> cp;  // percent; absent with a single replicate
};

// One row per estimator, sorted by name. Failed replicates are counted but
// excluded from every statistic; an estimator without successes gets NaN.
std::vector<SummaryRow> summarize(std::span<const ReplicateResult> results);

}  // namespace ppcm::metrics
