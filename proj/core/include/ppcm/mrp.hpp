#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppcm/frames.hpp"
#include "ppcm/wave_models.hpp"

namespace ppcm::alt {

// Fixed effects: listed baseline covariates plus, at wave t, the outcomes of
// waves 0..t-1. Random effects: one exchangeable group per listed baseline
// covariate, binned at the sample quartiles.
struct MrpSpec {
  std::vector<std::string> fixed_effects;
  std::vector<std::string> random_effects;
  // A variable whose sample share of exact zeros reaches this gets its own
  // zero level, with quartiles taken over the nonzero values.
  double zero_mass_threshold = 0.1;

  void validate() const;
};

struct MrpConfig {
  std::size_t n_burn = 500;
  std::size_t n_keep = 500;
  // Fixes every random-effect variance instead of sampling it.
  std::optional<double> fixed_tau2;
  std::uint64_t seed = 0;
};

struct Binning {
  std::vector<double> cuts;  // upper edges of all but the last nonzero bin
  bool zero_level = false;

  std::size_t levels() const { return cuts.size() + 1 + (zero_level ? 1 : 0); }
  std::size_t level(double x) const;
};
Binning make_binning(std::span<const double> sample_values, double zero_mass_threshold);

// Draws of y = X b + sum_g u_g[level_g] + e. X is row-major n x q with the
// intercept column included by the caller.
struct MrpPosterior {
  std::size_t draws = 0;
  std::size_t fixed = 0;
  std::vector<std::size_t> group_levels;
  std::vector<std::size_t> group_offset;  // first index of each group in u
  std::vector<double> beta;               // draws x fixed
  std::vector<double> u;                  // draws x total levels
  std::vector<double> sigma;
  std::vector<double> tau;                // draws x groups
  std::vector<std::size_t> level_counts;  // sample units per level

  std::size_t total_levels() const { return u.size() / std::max<std::size_t>(draws, 1); }
};

// `levels` is row-major n x G with entries below group_levels[g]. The
// half-Cauchy scale of each random-effect SD is A = (max y - min y) / 2.
MrpPosterior fit_mrp_gibbs(std::span<const double> x, std::size_t n, std::size_t q,
                           std::span<const std::size_t> levels, const std::vector<std::size_t>& group_levels,
                           std::span<const double> y, const MrpConfig& cfg);

// Wave-t outcome model over the engine's feature layout.
class MrpOutcomeModel final : public OutcomeModel {
 public:
  MrpOutcomeModel(MrpPosterior posterior, std::vector<std::size_t> fixed_columns, std::size_t history_start,
                  std::size_t history_count, std::vector<std::size_t> group_columns, std::vector<Binning> binnings);
  std::size_t draws() const override { return posterior_.draws; }
  double mean(std::size_t d, std::span<const double> f) const override;
  double sigma(std::size_t d) const override { return posterior_.sigma[d]; }
  const MrpPosterior& posterior() const { return posterior_; }

 private:
  MrpPosterior posterior_;
  std::vector<std::size_t> fixed_columns_;
  std::size_t history_start_;
  std::size_t history_count_;
  std::vector<std::size_t> group_columns_;
  std::vector<Binning> binnings_;
};

struct MrpFitReport {
  std::vector<std::string> notes;
};

WaveModels fit_mrp_wave_models(const data::CohortFrame& cohort, const MrpSpec& spec, const MrpConfig& cfg,
                               std::size_t threads = 1, MrpFitReport* report = nullptr);

}  // namespace ppcm::alt
