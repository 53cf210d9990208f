#include "ppcm/wave_models.hpp"

#include "ppcm/error.hpp"
#include "ppcm/parallel.hpp"
#include "ppcm/random.hpp"

namespace ppcm {

std::size_t feature_count(const data::WaveSchema& schema, std::size_t t) {
  std::size_t p = t;
  for (std::size_t k = 0; k <= t; ++k) p += schema.covariates[k].size();
  return p;
}

std::vector<std::string> feature_names(const data::WaveSchema& schema, std::size_t t) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k <= t; ++k) {
    for (const auto& c : schema.covariates[k]) names.push_back(c + "@" + std::to_string(k));
  }
  for (std::size_t k = 0; k < t; ++k) names.push_back("outcome@" + std::to_string(k));
  return names;
}

std::size_t fill_covariate_history(const data::Panel& panel, std::size_t i, std::size_t t, double* out) {
  std::size_t w = 0;
  for (std::size_t k = 0; k <= t; ++k) {
    const std::size_t pk = panel.covariate_count(k);
    for (std::size_t j = 0; j < pk; ++j) out[w++] = panel.covariate(i, k, j);
  }
  return w;
}

BartOutcomeModel::BartOutcomeModel(bart::PosteriorEnsemble ensemble) : ensemble_(std::move(ensemble)) {
  if (ensemble_.kind() != bart::OutcomeKind::kContinuous || ensemble_.size() == 0) {
    throw ConfigError("outcome model needs a non-empty continuous ensemble");
  }
}

BartResponseModel::BartResponseModel(bart::PosteriorEnsemble ensemble) : ensemble_(std::move(ensemble)) {
  if (ensemble_.kind() != bart::OutcomeKind::kProbit || ensemble_.size() == 0) {
    throw ConfigError("response model needs a non-empty probit ensemble");
  }
}

void WaveModels::validate(std::size_t waves) const {
  if (outcome.size() != waves) {
    throw ConfigError("expected " + std::to_string(waves) + " outcome models, got " + std::to_string(outcome.size()));
  }
  if (response.size() != waves) {
    throw ConfigError("expected " + std::to_string(waves) + " response slots, got " + std::to_string(response.size()));
  }
  for (std::size_t t = 0; t < waves; ++t) {
    if (!outcome[t] || outcome[t]->draws() == 0) {
      throw ConfigError("outcome model missing for wave " + std::to_string(t));
    }
    if (response[t] && response[t]->draws() == 0) {
      throw ConfigError("response model for wave " + std::to_string(t) + " has no draws");
    }
  }
}

namespace {

TrainingSet build_set(const data::CohortFrame& cohort, std::size_t t, const std::vector<std::size_t>& units,
                      bool response) {
  TrainingSet s;
  s.p = feature_count(cohort.schema(), t);
  s.n = units.size();
  s.units = units;
  s.x.resize(s.n * s.p);
  s.y.resize(s.n);
  for (std::size_t r = 0; r < s.n; ++r) {
    const std::size_t i = units[r];
    double* row = &s.x[r * s.p];
    std::size_t w = fill_covariate_history(cohort, i, t, row);
    for (std::size_t k = 0; k < t; ++k) row[w++] = cohort.outcome(i, k);
    s.y[r] = response ? (cohort.responded(i, t) ? 1.0 : 0.0) : cohort.outcome(i, t);
  }
  return s;
}

}  // namespace

TrainingSet outcome_training_set(const data::CohortFrame& cohort, std::size_t t) {
  return build_set(cohort, t, data::responders_at(cohort, t), false);
}

TrainingSet response_training_set(const data::CohortFrame& cohort, std::size_t t) {
  if (t == 0 || t >= cohort.waves()) throw ConfigError("response models exist for waves 1.." + std::to_string(cohort.waves() - 1));
  std::vector<std::size_t> units;
  for (std::size_t i = 0; i < cohort.units(); ++i) {
    if (cohort.responded(i, t - 1) && cohort.alive(i, t)) units.push_back(i);
  }
  return build_set(cohort, t, units, true);
}

WaveModels fit_bart_wave_models(const data::CohortFrame& cohort, const WaveFitOptions& options) {
  const std::size_t waves = cohort.waves();
  WaveModels models;
  models.outcome.resize(waves);
  models.response.resize(waves);

  // job j < waves fits outcome model j; job waves + t fits response model t
  const std::size_t jobs = options.fit_response ? 2 * waves : waves;
  parallel_for(jobs, options.threads, [&](std::size_t j) {
    if (j < waves) {
      const TrainingSet s = outcome_training_set(cohort, j);
      if (s.n < 2) {
        throw EstimationError("wave " + std::to_string(j) + " has " + std::to_string(s.n) +
                              " responders; the outcome model needs at least 2");
      }
      bart::BartConfig cfg = options.outcome;
      cfg.seed = derive_seed(options.seed, StreamPurpose::kBartOutcome, j);
      models.outcome[j] = std::make_shared<BartOutcomeModel>(bart::fit_continuous(s.x, s.n, s.p, s.y, cfg));
      return;
    }
    const std::size_t t = j - waves;
    if (t == 0) return;
    const TrainingSet s = response_training_set(cohort, t);
    std::size_t ones = 0;
    for (double v : s.y) ones += v > 0.5 ? 1 : 0;
    if (s.n == 0 || ones == 0 || ones == s.n) {
      models.response[t] = std::make_shared<ConstantResponseModel>(s.n > 0 && ones == s.n ? 1.0 : 0.0);
      return;
    }
    bart::BartConfig cfg = options.response;
    cfg.seed = derive_seed(options.seed, StreamPurpose::kBartResponse, t);
    models.response[t] = std::make_shared<BartResponseModel>(bart::fit_probit(s.x, s.n, s.p, s.y, cfg));
  });
  return models;
}

}  // namespace ppcm
