#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ppcm/bart.hpp"
#include "ppcm/frames.hpp"

namespace ppcm {

// Predictor layout at wave t: every covariate of waves 0..t in schema
// order, then the outcomes of waves 0..t-1.
std::size_t feature_count(const data::WaveSchema& schema, std::size_t t);
std::vector<std::string> feature_names(const data::WaveSchema& schema, std::size_t t);
// Writes the covariate part of unit i's wave-t features; returns the
// number of values written.
std::size_t fill_covariate_history(const data::Panel& panel, std::size_t i, std::size_t t, double* out);

// Posterior of a wave-t outcome model, indexed by posterior draw.
class OutcomeModel {
 public:
  virtual ~OutcomeModel() = default;
  virtual std::size_t draws() const = 0;
  virtual double mean(std::size_t d, std::span<const double> features) const = 0;
  virtual double sigma(std::size_t d) const = 0;
};

// Posterior of P(r_t = 1 | r_{t-1} = 1, alive, history).
class ResponseModel {
 public:
  virtual ~ResponseModel() = default;
  virtual std::size_t draws() const = 0;
  virtual double probability(std::size_t d, std::span<const double> features) const = 0;
};

class BartOutcomeModel final : public OutcomeModel {
 public:
  explicit BartOutcomeModel(bart::PosteriorEnsemble ensemble);
  std::size_t draws() const override { return ensemble_.size(); }
  double mean(std::size_t d, std::span<const double> f) const override { return ensemble_.draw(d).latent(f); }
  double sigma(std::size_t d) const override { return ensemble_.draw(d).sigma; }
  const bart::PosteriorEnsemble& ensemble() const { return ensemble_; }

 private:
  bart::PosteriorEnsemble ensemble_;
};

class BartResponseModel final : public ResponseModel {
 public:
  explicit BartResponseModel(bart::PosteriorEnsemble ensemble);
  std::size_t draws() const override { return ensemble_.size(); }
  double probability(std::size_t d, std::span<const double> f) const override {
    return bart::predict(ensemble_.draw(d), f);
  }
  const bart::PosteriorEnsemble& ensemble() const { return ensemble_; }

 private:
  bart::PosteriorEnsemble ensemble_;
};

class ConstantOutcomeModel final : public OutcomeModel {
 public:
  ConstantOutcomeModel(double mean, double sigma) : mean_(mean), sigma_(sigma) {}
  std::size_t draws() const override { return 1; }
  double mean(std::size_t, std::span<const double>) const override { return mean_; }
  double sigma(std::size_t) const override { return sigma_; }

 private:
  double mean_;
  double sigma_;
};

class ConstantResponseModel final : public ResponseModel {
 public:
  explicit ConstantResponseModel(double p) : p_(p) {}
  std::size_t draws() const override { return 1; }
  double probability(std::size_t, std::span<const double>) const override { return p_; }

 private:
  double p_;
};

// outcome[t] for t = 0..T; response[t] for t = 1..T (response[0] unused).
// A null response model keeps every unit responding.
struct WaveModels {
  std::vector<std::shared_ptr<const OutcomeModel>> outcome;
  std::vector<std::shared_ptr<const ResponseModel>> response;

  std::size_t waves() const { return outcome.size(); }
  // Checks one outcome model per wave and matching response slots.
  void validate(std::size_t waves) const;
};

// Row-major training design with the cohort rows it came from.
struct TrainingSet {
  std::vector<double> x;
  std::vector<double> y;
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<std::size_t> units;
};

// Units responding through t and alive at t; y is the observed outcome.
TrainingSet outcome_training_set(const data::CohortFrame& cohort, std::size_t t);
// Units with r_{t-1} = 1 and alive at t (t >= 1); y is r_t.
TrainingSet response_training_set(const data::CohortFrame& cohort, std::size_t t);

struct WaveFitOptions {
  bart::BartConfig outcome = bart::BartConfig::continuous_defaults();
  bart::BartConfig response = bart::BartConfig::probit_defaults();
  bool fit_response = true;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// Fits every wave's outcome and (optionally) response model in parallel,
// each chain with its own derived seed. A response training set holding a
// single class yields a constant response model.
WaveModels fit_bart_wave_models(const data::CohortFrame& cohort, const WaveFitOptions& options);

}  // namespace ppcm
