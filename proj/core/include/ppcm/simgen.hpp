#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ppcm/frames.hpp"
#include "ppcm/random.hpp"

namespace ppcm::sim {

struct ScenarioSpec {
  int id = 1;
  std::size_t population_size = 10000;
  std::size_t sample_size = 1000;
  std::uint64_t seed = 0;
  std::size_t replicate = 0;

  void validate() const;
};

// Skew-normal parameters of the error terms in scenarios 3-5: zero mean,
// scale 1.6, shape 5.
struct SkewNormal {
  double location;
  double scale;
  double shape;

  static SkewNormal scenario_errors();
  double mean() const;
  double variance() const;
  double skewness() const;
};

// One SN(location, scale, shape) draw via |U0| and U1 standard normals.
double sample_skew_normal(double location, double scale, double shape, Rng& rng);

struct SimReplicate {
  data::PopulationFrame population;
  data::CohortFrame cohort;
  double truth = 0.0;                 // survivor mean of the true wave-1 outcome
  std::vector<double> y0;             // true outcomes, population order
  std::vector<double> y1;
  std::vector<std::size_t> sampled;   // population index of each cohort unit
};

// Baseline covariates x1..x8, two waves, no age column. Sampling is
// fixed-size PPS without replacement with the scenario's selection weights.
SimReplicate gen_replicate(const ScenarioSpec& spec);

// Names of the generated covariates.
std::vector<std::string> covariate_names();

}  // namespace ppcm::sim
