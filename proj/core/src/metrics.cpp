#include "ppcm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ppcm/error.hpp"
#include "ppcm/numeric.hpp"

namespace ppcm::metrics {

Interval credible_interval(std::span<const double> draws, double level) {
  if (draws.empty()) throw ConfigError("credible interval of an empty draw set");
  if (!(level >= 0.0 && level <= 1.0)) throw ConfigError("interval level must lie in [0, 1]");
  std::vector<double> sorted(draws.begin(), draws.end());
  for (double v : sorted) {
    if (std::isnan(v)) throw ConfigError("credible interval input contains NaN");
  }
  std::sort(sorted.begin(), sorted.end());
  return {quantile_sorted(sorted, 0.5 * (1.0 - level)), quantile_sorted(sorted, 0.5 * (1.0 + level))};
}

std::vector<SummaryRow> summarize(std::span<const ReplicateResult> results) {
  std::map<std::string, std::vector<const ReplicateResult*>> by_name;
  for (const auto& r : results) by_name[r.estimator].push_back(&r);

  std::vector<SummaryRow> rows;
  for (auto& [name, list] : by_name) {
    // replicate order fixes the summation order
    std::sort(list.begin(), list.end(), [](const ReplicateResult* a, const ReplicateResult* b) {
      return a->replicate < b->replicate;
    });
    SummaryRow row;
    row.estimator = name;
    std::vector<double> points, errors;
    CompensatedSum err_sum, sq_sum;
    std::size_t covered = 0;
    for (const ReplicateResult* r : list) {
      if (!r->ok) {
        ++row.failures;
        continue;
      }
      const double e = r->point - r->truth;
      points.push_back(r->point);
      err_sum.add(e);
      sq_sum.add(e * e);
      if (r->lo <= r->truth && r->truth <= r->hi) ++covered;
    }
    row.replicates = points.size();
    if (points.empty()) {
      row.bias = row.mse = std::numeric_limits<double>::quiet_NaN();
    } else {
      const double n = static_cast<double>(points.size());
      row.bias = err_sum.value() / n;
      row.mse = sq_sum.value() / n;
      if (points.size() >= 2) {
        row.sd = std::sqrt(sample_variance(points));
        row.cp = 100.0 * static_cast<double>(covered) / n;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ppcm::metrics
