#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ppcm/cells.hpp"
#include "ppcm/frames.hpp"

namespace ppcm::alt {

// Maximum-likelihood probit regression with an intercept, fit by
// Newton-Raphson. X is row-major n x p.
struct ProbitFit {
  std::vector<double> coefficients;  // intercept first
  bool constant = false;             // single-class data
  double constant_probability = 0.0;

  double probability(std::span<const double> x) const;
};
ProbitFit fit_probit_mle(std::span<const double> x, std::size_t n, std::size_t p, std::span<const double> r);

// Per-wave participation probabilities for cohort units: prob[t][i] is the
// fitted P(r_t = 1 | r_{t-1} = 1, alive, history) for units eligible at
// wave t and NaN otherwise. prob[0] is all ones.
struct ParticipationModel {
  std::vector<std::vector<double>> prob;
  // w_it = cell weight / prod_{k <= t} pi_ik for a wave-t responder.
  double cumulative(std::size_t i, std::size_t t) const;
};
ParticipationModel fit_participation(const data::CohortFrame& cohort);

struct DesignEstimate {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// sum w y / sum w with a linearization (with-replacement) 95% interval.
DesignEstimate weighted_ratio_mean(std::span<const double> weights, std::span<const double> y);

// Participation-weighted mean of the observed wave-t outcomes.
DesignEstimate ht_estimate(const data::CohortFrame& cohort, const CellTable& cells,
                           const ParticipationModel& participation, std::size_t t);

struct GregEstimate {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double prediction_term = 0.0;  // (1 / N_t) sum over survivors of m(x)
  double correction_term = 0.0;  // (1 / N_t) sum over responders of w (y - m(x))
  std::size_t survivors = 0;
};

// Difference-form GREG from population predictions (survivors at t) and
// responder weights / outcomes / predictions.
GregEstimate greg_from_terms(std::span<const double> population_predictions, std::span<const double> weights,
                             std::span<const double> y, std::span<const double> sample_predictions);

// Working model: least squares of y_t on the covariate history xbar_t over
// wave-t responders, evaluated for every population survivor.
GregEstimate greg_estimate(const data::Panel& population, const data::CohortFrame& cohort, const CellTable& cells,
                           const ParticipationModel& participation, std::size_t t);

// Age-cohort curves built like the model-based ones: each cohort's wave-t
// estimate, averaged over waves with the cohort's population survivor counts
// as weights. Waves where a cohort has no responders drop out of its average.
std::vector<std::optional<double>> ht_by_age(const data::Panel& population, const data::CohortFrame& cohort,
                                             const CellTable& cells, const ParticipationModel& participation,
                                             std::span<const double> grid);
std::vector<std::optional<double>> greg_by_age(const data::Panel& population, const data::CohortFrame& cohort,
                                               const CellTable& cells, const ParticipationModel& participation,
                                               std::span<const double> grid);

}  // namespace ppcm::alt
