#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppcm/dart.hpp"
#include "ppcm/tree.hpp"

namespace ppcm::bart {

struct TreePrior {
  double alpha = 0.95;  // P(split) at depth d is alpha (1 + d)^-beta
  double beta = 2.0;
};

struct SigmaPrior {
  double df = 3.0;
  double quantile = 0.90;  // prior mass below the least-squares residual SD
};

struct MoveProbs {
  double grow = 0.28;
  double prune = 0.28;
  double change = 0.44;
};

struct BartConfig {
  std::size_t n_trees = 200;
  std::size_t n_burn = 1000;
  std::size_t n_keep = 1000;
  TreePrior tree_prior;
  double leaf_scale_k = 2.0;
  SigmaPrior sigma_prior;
  bool dart_enabled = true;
  DartPrior dart_prior;
  MoveProbs move_probs;
  std::uint64_t seed = 0;

  static BartConfig continuous_defaults() { return BartConfig{}; }
  static BartConfig probit_defaults() {
    BartConfig c;
    c.n_trees = 50;
    return c;
  }
  // Throws ConfigError.
  void validate() const;
};

// Lower-level switches for diagnostics and oracle tests.
struct SamplerControls {
  bool update_trees = true;  // false freezes structure and leaf values
  bool update_sigma = true;
  std::optional<double> fixed_sigma;     // original outcome scale
  std::optional<std::size_t> max_depth;  // 0 keeps every tree a single leaf
  std::optional<std::size_t> dart_start; // default: n_burn / 2
};

// Posterior draws of one sum-of-trees model. The forests hold leaf values on
// the original outcome scale, so predictions need no back-transformation.
class PosteriorEnsemble {
 public:
  PosteriorEnsemble() = default;
  PosteriorEnsemble(OutcomeKind kind, std::size_t predictors, std::vector<Forest> draws);

  OutcomeKind kind() const { return kind_; }
  std::size_t predictors() const { return predictors_; }
  std::size_t size() const { return draws_.size(); }
  const Forest& draw(std::size_t d) const { return draws_[d]; }
  const std::vector<Forest>& draws() const { return draws_; }

  double predict(std::size_t d, std::span<const double> x) const;
  double predict_mean(std::span<const double> x) const;
  // Posterior mean share of splits on each predictor.
  std::vector<double> split_proportions() const;

  bool operator==(const PosteriorEnsemble&) const = default;

 private:
  OutcomeKind kind_ = OutcomeKind::kContinuous;
  std::size_t predictors_ = 0;
  std::vector<Forest> draws_;
};

// Bayesian backfitting MCMC over a sum of trees with grow / prune / change
// proposals, conjugate normal leaves and, for probit, latent-variable
// augmentation. X is row-major n x p.
class BackfitSampler {
 public:
  BackfitSampler(std::span<const double> x, std::size_t n, std::size_t p, std::span<const double> y,
                 OutcomeKind kind, const BartConfig& cfg, const SamplerControls& controls = {});
  ~BackfitSampler();
  BackfitSampler(BackfitSampler&&) noexcept;
  BackfitSampler& operator=(BackfitSampler&&) noexcept;

  // One sweep over every tree, then sigma / latent / DART updates.
  void iterate();
  Forest snapshot() const;

  std::size_t iteration() const;
  // Residual SD on the original outcome scale.
  double sigma() const;
  const std::vector<double>& split_probs() const;
  std::vector<std::size_t> split_counts() const;
  // True when every leaf of every tree holds at least one training row.
  bool cells_nonempty() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

PosteriorEnsemble fit_continuous(std::span<const double> x, std::size_t n, std::size_t p,
                                 std::span<const double> y, const BartConfig& cfg,
                                 const SamplerControls& controls = {});
// r holds 0/1 labels.
PosteriorEnsemble fit_probit(std::span<const double> x, std::size_t n, std::size_t p,
                             std::span<const double> r, const BartConfig& cfg,
                             const SamplerControls& controls = {});

// Versioned JSON serialization of a fitted ensemble.
std::string ensemble_to_json(const PosteriorEnsemble& ensemble);
PosteriorEnsemble ensemble_from_json(const std::string& text);
void save_ensemble(const std::string& path, const PosteriorEnsemble& ensemble);
PosteriorEnsemble load_ensemble(const std::string& path);

}  // namespace ppcm::bart
