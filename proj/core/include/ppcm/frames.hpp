#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ppcm::data {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

// Per-wave covariate layout shared by the population and the cohort. Wave t
// lists the covariate columns first measured at t; models at wave t see the
// full history of waves 0..t. Death and any other truncating event are both
// encoded in the single `alive` indicator.
struct WaveSchema {
  std::vector<std::vector<std::string>> covariates;
  std::optional<std::string> age_column;

  std::size_t wave_count() const { return covariates.size(); }
  // Every covariate column, in first-appearance order across waves.
  std::vector<std::string> all_covariates() const;
  // Throws SchemaError on an empty schema or a duplicated name within a wave.
  void validate() const;

  static WaveSchema from_json(const std::string& text);
  static WaveSchema load(const std::string& path);
  std::string to_json() const;

  bool operator==(const WaveSchema&) const = default;
};

// Plain storage handed to the frame constructors. Matrices are row-major
// with units as rows: alive/age are units x waves, covariates[t] is
// units x covariates[t].size().
struct PanelData {
  WaveSchema schema;
  std::vector<std::string> unit_ids;
  std::vector<std::uint8_t> alive;
  std::vector<std::vector<double>> covariates;
  std::vector<double> age;  // empty when the schema has no age column
};

// Read-only view over validated longitudinal data.
class Panel {
 public:
  std::size_t units() const { return ids_.size(); }
  std::size_t waves() const { return schema_.wave_count(); }
  const WaveSchema& schema() const { return schema_; }

  const std::string& unit_id(std::size_t i) const { return ids_[i]; }
  bool alive(std::size_t i, std::size_t t) const { return alive_[i * waves() + t] != 0; }
  std::size_t covariate_count(std::size_t t) const { return schema_.covariates[t].size(); }
  double covariate(std::size_t i, std::size_t t, std::size_t j) const {
    return covariates_[t][i * covariate_count(t) + j];
  }
  bool has_age() const { return !age_.empty(); }
  double age(std::size_t i, std::size_t t) const {
    return has_age() ? age_[i * waves() + t] : kMissing;
  }
  std::size_t survivors(std::size_t t) const;

  PanelData panel_data() const;

  bool operator==(const Panel&) const;

 protected:
  Panel() = default;
  explicit Panel(PanelData data);

  WaveSchema schema_;
  std::vector<std::string> ids_;
  std::vector<std::uint8_t> alive_;
  std::vector<std::vector<double>> covariates_;
  std::vector<double> age_;
};

// The full population registry U: every unit is alive at baseline and
// survival is monotone.
class PopulationFrame : public Panel {
 public:
  PopulationFrame() = default;
  explicit PopulationFrame(PanelData data);
};

struct CohortData {
  PanelData panel;
  std::vector<std::uint8_t> responded;  // units x waves
  std::vector<double> outcome;          // units x waves, kMissing when unobserved
};

// The sampled cohort with monotone dropout.
class CohortFrame : public Panel {
 public:
  CohortFrame() = default;
  explicit CohortFrame(CohortData data);

  bool responded(std::size_t i, std::size_t t) const { return responded_[i * waves() + t] != 0; }
  double outcome(std::size_t i, std::size_t t) const { return outcome_[i * waves() + t]; }

  CohortData cohort_data() const;

  bool operator==(const CohortFrame&) const;

 private:
  std::vector<std::uint8_t> responded_;
  std::vector<double> outcome_;
};

// Units observed at every wave up to t and alive at t.
std::vector<std::size_t> responders_at(const CohortFrame& cohort, std::size_t t);

}  // namespace ppcm::data
