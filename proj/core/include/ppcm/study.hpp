#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ppcm/bart.hpp"
#include "ppcm/metrics.hpp"
#include "ppcm/mrp.hpp"
#include "ppcm/simgen.hpp"

namespace ppcm::metrics {

// sample: responder mean; mb-sp: BART engine, offsets 0; mb-sp-pe: BART
// engine with practice offset Tri(0, b, b) at wave 1; mb-lm, ht, greg, mrp:
// the comparison estimators.
const std::vector<std::string>& estimator_names();
// Throws ConfigError listing the valid names.
void validate_estimators(const std::vector<std::string>& names);

struct StudyConfig {
  sim::ScenarioSpec scenario;  // seed and replicate fields are overridden per replicate
  std::vector<std::string> estimators{"sample"};
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  bart::BartConfig outcome = bart::BartConfig::continuous_defaults();
  std::size_t n_posterior = 1000;
  std::size_t linear_draws = 1000;
  alt::MrpConfig mrp;
  double practice_bound = 0.15;
  std::size_t threads = 1;
};

// Replicates in parallel; results ordered by replicate, then by the order
// of `estimators`.
std::vector<ReplicateResult> run_study(const StudyConfig& cfg);

// Runs the named estimators on one replicate.
std::vector<ReplicateResult> run_replicate(const StudyConfig& cfg, std::size_t replicate);

}  // namespace ppcm::metrics
