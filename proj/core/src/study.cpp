#include "ppcm/study.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include "ppcm/cells.hpp"
#include "ppcm/error.hpp"
#include "ppcm/linear_model.hpp"
#include "ppcm/numeric.hpp"
#include "ppcm/parallel.hpp"
#include "ppcm/ppcm_estimator.hpp"
#include "ppcm/weighting_estimators.hpp"

namespace ppcm::metrics {
namespace {

constexpr double kZ975 = 1.959963984540054;

ReplicateResult from_posterior(const PpcmPosterior& post, std::size_t t) {
  const auto& s = post.wave_summary.at(t);
  if (!s) throw EstimationError("no survivors at the target wave");
  return {"", 0, s->point, s->lo95, s->hi95, 0.0, true, ""};
}

ReplicateResult sample_mean(const data::CohortFrame& cohort, std::size_t t) {
  std::vector<double> y;
  for (std::size_t i : data::responders_at(cohort, t)) y.push_back(cohort.outcome(i, t));
  if (y.size() < 2) throw EstimationError("fewer than 2 responders");
  const double m = mean(y);
  const double half = kZ975 * std::sqrt(sample_variance(y) / static_cast<double>(y.size()));
  return {"", 0, m, m - half, m + half, 0.0, true, ""};
}

}  // namespace

const std::vector<std::string>& estimator_names() {
  static const std::vector<std::string> names{"sample", "mb-sp", "mb-sp-pe", "mb-lm", "ht", "greg", "mrp"};
  return names;
}

void validate_estimators(const std::vector<std::string>& names) {
  if (names.empty()) throw ConfigError("no estimators requested");
  const auto& valid = estimator_names();
  for (const auto& n : names) {
    if (std::find(valid.begin(), valid.end(), n) == valid.end()) {
      std::string list;
      for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
      throw ConfigError("unknown estimator '" + n + "' (valid: " + list + ")");
    }
  }
}

std::vector<ReplicateResult> run_replicate(const StudyConfig& cfg, std::size_t replicate) {
  sim::ScenarioSpec spec = cfg.scenario;
  spec.seed = cfg.seed;
  spec.replicate = replicate;
  const sim::SimReplicate rep = sim::gen_replicate(spec);
  const std::size_t t = rep.population.waves() - 1;
  const std::uint64_t seed = derive_seed(cfg.seed, StreamPurpose::kStudy, replicate);

  PpcmOptions opts;
  opts.n_posterior = cfg.n_posterior;
  opts.seed = seed;
  opts.response_policy = ResponsePolicy::kWhenNeeded;
  std::optional<WaveModels> bart_models;
  auto bart = [&]() -> const WaveModels& {
    if (!bart_models) {
      WaveFitOptions fit;
      fit.outcome = cfg.outcome;
      fit.fit_response = false;
      fit.seed = seed;
      bart_models = fit_bart_wave_models(rep.cohort, fit);
    }
    return *bart_models;
  };
  std::optional<alt::CellTable> cells;
  std::optional<alt::ParticipationModel> participation;
  auto weights = [&] {
    if (!cells) {
      std::vector<alt::CellVariable> vars{{"x1", false}, {"x2", false}, {"x3", true}, {"x4", true}};
      cells = alt::build_cells(rep.population, rep.cohort, vars);
      participation = alt::fit_participation(rep.cohort);
    }
  };

  const SensitivityConfig zero = SensitivityConfig::zeros(rep.population.waves());
  std::vector<ReplicateResult> out;
  for (const auto& name : cfg.estimators) {
    ReplicateResult r;
    try {
      if (name == "sample") {
        r = sample_mean(rep.cohort, t);
      } else if (name == "mb-sp") {
        r = from_posterior(estimate_ppcm_with_models(rep.population, bart(), zero, opts), t);
      } else if (name == "mb-sp-pe") {
        SensitivityConfig pe = zero;
        pe.practice[0] = TriangularPrior::constant(0.0, cfg.practice_bound, cfg.practice_bound);
        r = from_posterior(estimate_ppcm_with_models(rep.population, bart(), pe, opts), t);
      } else if (name == "mb-lm") {
        const WaveModels lm = alt::fit_linear_wave_models(rep.cohort, cfg.linear_draws, seed);
        r = from_posterior(estimate_ppcm_with_models(rep.population, lm, zero, opts), t);
      } else if (name == "ht") {
        weights();
        const auto e = alt::ht_estimate(rep.cohort, *cells, *participation, t);
        r = {"", 0, e.point, e.lo, e.hi, 0.0, true, ""};
      } else if (name == "greg") {
        weights();
        const auto e = alt::greg_estimate(rep.population, rep.cohort, *cells, *participation, t);
        r = {"", 0, e.point, e.lo, e.hi, 0.0, true, ""};
      } else if (name == "mrp") {
        alt::MrpSpec spec_mrp;
        spec_mrp.fixed_effects = {"x1", "x2"};
        spec_mrp.random_effects = {"x3", "x4", "x5", "x6", "x7", "x8"};
        alt::MrpConfig mc = cfg.mrp;
        mc.seed = seed;
        const WaveModels mm = alt::fit_mrp_wave_models(rep.cohort, spec_mrp, mc);
        r = from_posterior(estimate_ppcm_with_models(rep.population, mm, zero, opts), t);
      } else {
        throw ConfigError("unknown estimator '" + name + "'");
      }
    } catch (const Error& e) {
      r = ReplicateResult{};
      r.ok = false;
      r.error = e.what();
    }
    r.estimator = name;
    r.replicate = replicate;
    r.truth = rep.truth;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ReplicateResult> run_study(const StudyConfig& cfg) {
  if (cfg.replicates == 0) throw ConfigError("replicate count must be at least 1");
  validate_estimators(cfg.estimators);
  cfg.scenario.validate();
  std::vector<std::vector<ReplicateResult>> per(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) { per[r] = run_replicate(cfg, r); });
  std::vector<ReplicateResult> all;
  for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
  return all;
}

}  // namespace ppcm::metrics
