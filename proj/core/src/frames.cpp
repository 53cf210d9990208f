#include "ppcm/frames.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "ppcm/error.hpp"

namespace ppcm::data {
namespace {

std::string where(const std::string& id, std::size_t t) {
  return " (unit '" + id + "', wave " + std::to_string(t) + ")";
}

bool same_value(double a, double b) { return (is_missing(a) && is_missing(b)) || a == b; }

bool same_values(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_value(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> WaveSchema::all_covariates() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& wave : covariates) {
    for (const auto& name : wave) {
      if (seen.insert(name).second) out.push_back(name);
    }
  }
  return out;
}

void WaveSchema::validate() const {
  if (covariates.empty()) throw SchemaError("schema must declare at least one wave");
  for (std::size_t t = 0; t < covariates.size(); ++t) {
    std::set<std::string> names;
    for (const auto& name : covariates[t]) {
      if (name.empty()) throw SchemaError("empty covariate name at wave " + std::to_string(t));
      if (!names.insert(name).second) {
        throw SchemaError("duplicate covariate '" + name + "' at wave " + std::to_string(t));
      }
    }
  }
}

WaveSchema WaveSchema::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schema JSON: ") + e.what());
  }
  WaveSchema schema;
  try {
    const auto& cov = j.at("covariates");
    for (const auto& wave : cov) schema.covariates.push_back(wave.get<std::vector<std::string>>());
    if (j.contains("waves")) {
      const auto waves = j.at("waves").get<std::size_t>();
      if (waves != schema.covariates.size()) {
        throw SchemaError("schema declares " + std::to_string(waves) + " waves but lists " +
                          std::to_string(schema.covariates.size()) + " covariate sets");
      }
    }
    if (j.contains("age") && !j.at("age").is_null()) schema.age_column = j.at("age").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema JSON: ") + e.what());
  }
  schema.validate();
  return schema;
}

WaveSchema WaveSchema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open schema file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::string WaveSchema::to_json() const {
  nlohmann::json j;
  j["waves"] = covariates.size();
  j["covariates"] = covariates;
  j["age"] = age_column ? nlohmann::json(*age_column) : nlohmann::json(nullptr);
  return j.dump(2);
}

Panel::Panel(PanelData data)
    : schema_(std::move(data.schema)),
      ids_(std::move(data.unit_ids)),
      alive_(std::move(data.alive)),
      covariates_(std::move(data.covariates)),
      age_(std::move(data.age)) {
  schema_.validate();
  const std::size_t n = ids_.size();
  const std::size_t w = schema_.wave_count();
  if (alive_.size() != n * w) throw SchemaError("alive matrix has wrong shape");
  if (covariates_.size() != w) throw SchemaError("covariate block count differs from wave count");
  for (std::size_t t = 0; t < w; ++t) {
    if (covariates_[t].size() != n * schema_.covariates[t].size()) {
      throw SchemaError("covariate block for wave " + std::to_string(t) + " has wrong shape");
    }
  }
  if (schema_.age_column) {
    if (age_.size() != n * w) throw SchemaError("age matrix has wrong shape");
  } else if (!age_.empty()) {
    throw SchemaError("age values supplied but schema has no age column");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen.insert(ids_[i]).second) throw SchemaError("duplicate unit_id '" + ids_[i] + "'");
    for (std::size_t t = 0; t < w; ++t) {
      if (!alive(i, t)) continue;
      for (std::size_t j = 0; j < covariate_count(t); ++j) {
        if (is_missing(covariate(i, t, j))) {
          throw SchemaError("missing covariate '" + schema_.covariates[t][j] + "'" +
                            where(ids_[i], t));
        }
      }
    }
  }
}

std::size_t Panel::survivors(std::size_t t) const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < units(); ++i) count += alive(i, t) ? 1 : 0;
  return count;
}

PanelData Panel::panel_data() const { return PanelData{schema_, ids_, alive_, covariates_, age_}; }

bool Panel::operator==(const Panel& other) const {
  if (!(schema_ == other.schema_) || ids_ != other.ids_ || alive_ != other.alive_) return false;
  if (covariates_.size() != other.covariates_.size()) return false;
  for (std::size_t t = 0; t < covariates_.size(); ++t) {
    if (!same_values(covariates_[t], other.covariates_[t])) return false;
  }
  return same_values(age_, other.age_);
}

PopulationFrame::PopulationFrame(PanelData data) : Panel(std::move(data)) {
  for (std::size_t i = 0; i < units(); ++i) {
    if (!alive(i, 0)) throw InvariantError("unit not alive at baseline" + where(unit_id(i), 0));
    for (std::size_t t = 1; t < waves(); ++t) {
      if (alive(i, t) && !alive(i, t - 1)) {
        throw InvariantError("non-monotone survival" + where(unit_id(i), t));
      }
    }
  }
}

CohortFrame::CohortFrame(CohortData data)
    : Panel(std::move(data.panel)),
      responded_(std::move(data.responded)),
      outcome_(std::move(data.outcome)) {
  const std::size_t w = waves();
  if (responded_.size() != units() * w || outcome_.size() != units() * w) {
    throw SchemaError("response/outcome matrices have wrong shape");
  }
  for (std::size_t i = 0; i < units(); ++i) {
    const std::string& id = unit_id(i);
    if (!alive(i, 0)) throw InvariantError("unit not alive at baseline" + where(id, 0));
    if (!responded(i, 0)) throw InvariantError("missing baseline response" + where(id, 0));
    for (std::size_t t = 0; t < w; ++t) {
      if (t > 0 && alive(i, t) && !alive(i, t - 1)) {
        throw InvariantError("non-monotone survival" + where(id, t));
      }
      if (t > 0 && responded(i, t) && !responded(i, t - 1)) {
        throw InvariantError("non-monotone response" + where(id, t));
      }
      if (responded(i, t) && !alive(i, t)) {
        throw InvariantError("response after truncation" + where(id, t));
      }
      const bool observed = responded(i, t) && alive(i, t);
      if (observed && is_missing(outcome(i, t))) {
        throw InvariantError("outcome missing for responder" + where(id, t));
      }
      if (!observed && !is_missing(outcome(i, t))) {
        throw InvariantError("outcome present without response" + where(id, t));
      }
    }
  }
}

CohortData CohortFrame::cohort_data() const { return CohortData{panel_data(), responded_, outcome_}; }

bool CohortFrame::operator==(const CohortFrame& other) const {
  return Panel::operator==(other) && responded_ == other.responded_ &&
         same_values(outcome_, other.outcome_);
}

std::vector<std::size_t> responders_at(const CohortFrame& cohort, std::size_t t) {
  if (t >= cohort.waves()) {
    throw ConfigError("wave " + std::to_string(t) + " out of range (waves: " +
                      std::to_string(cohort.waves()) + ")");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cohort.units(); ++i) {
    // Monotone response makes r_it = 1 equivalent to r_ik = 1 for all k <= t.
    if (cohort.responded(i, t) && cohort.alive(i, t)) out.push_back(i);
  }
  return out;
}

}  // namespace ppcm::data
