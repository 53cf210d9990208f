#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ppcm {

double normal_cdf(double x);
double normal_quantile(double p);
double chi_squared_quantile(double p, double df);

// Neumaier-compensated running sum; results do not depend on the order in
// which equal multisets of terms are added, up to the compensation error.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> xs);
double mean(std::span<const double> xs);
// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> xs);

// Linear-interpolation quantile on sorted data:
// h = (n - 1) p, q = x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h]).
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace ppcm
