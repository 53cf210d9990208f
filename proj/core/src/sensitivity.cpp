#include "ppcm/sensitivity.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ppcm/error.hpp"
#include "ppcm/numeric.hpp"
#include "ppcm/random.hpp"

namespace ppcm {
namespace {

using nlohmann::json;

QuadraticBound parse_bound(const json& j, const std::string& where) {
  if (j.is_number()) return QuadraticBound::constant(j.get<double>());
  if (j.is_array() && j.size() == 3) {
    QuadraticBound q{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    if (!std::isfinite(q.c0) || !std::isfinite(q.c1) || !std::isfinite(q.c2)) {
      throw ConfigError(where + ": quadratic coefficients must be finite");
    }
    return q;
  }
  throw ConfigError(where + ": expected a number or [c0, c1, c2]");
}

TriangularPrior parse_prior(const json& j, const std::string& where) {
  if (j.is_null()) return {};
  if (j.is_array()) {
    if (j.size() != 3) throw ConfigError(where + ": expected [min, mode, max]");
    return {parse_bound(j[0], where + ".min"), parse_bound(j[1], where + ".mode"), parse_bound(j[2], where + ".max")};
  }
  if (!j.is_object()) throw ConfigError(where + ": expected an object or [min, mode, max]");
  return {parse_bound(j.at("min"), where + ".min"), parse_bound(j.at("mode"), where + ".mode"),
          parse_bound(j.at("max"), where + ".max")};
}

json bound_json(const QuadraticBound& q) {
  if (!q.age_dependent()) return q.c0;
  return json::array({q.c0, q.c1, q.c2});
}

json prior_json(const TriangularPrior& p) {
  return {{"min", bound_json(p.min)}, {"mode", bound_json(p.mode)}, {"max", bound_json(p.max)}};
}

bool priors_zero(const std::vector<TriangularPrior>& v) {
  for (const auto& p : v) {
    if (!p.is_zero()) return false;
  }
  return true;
}

}  // namespace

bool TriangularPrior::is_zero() const {
  const QuadraticBound zero{};
  return min == zero && mode == zero && max == zero;
}

TriangularBounds eval_bound(const TriangularPrior& prior, double a, double scale_k, std::size_t wave) {
  TriangularBounds b{scale_k * prior.min(a), scale_k * prior.mode(a), scale_k * prior.max(a)};
  if (!(b.min <= b.mode && b.mode <= b.max)) {
    std::ostringstream msg;
    msg << "triangular prior at wave " << wave << ", age " << a << " violates min <= mode <= max (" << b.min
        << ", " << b.mode << ", " << b.max << ")";
    throw ConfigError(msg.str());
  }
  return b;
}

double triangular_quantile(const TriangularBounds& b, double u) {
  const double width = b.max - b.min;
  if (width <= 0.0) return b.min;
  const double f = (b.mode - b.min) / width;
  if (u < f) return b.min + std::sqrt(u * width * (b.mode - b.min));
  return b.max - std::sqrt((1.0 - u) * width * (b.max - b.mode));
}

SensitivityConfig SensitivityConfig::zeros(std::size_t waves) {
  SensitivityConfig c;
  const std::size_t follow = waves > 0 ? waves - 1 : 0;
  c.dropout.assign(follow, TriangularPrior{});
  c.practice.assign(follow, TriangularPrior{});
  return c;
}

bool SensitivityConfig::dropout_zero() const { return scale_k == 0.0 || priors_zero(dropout); }
bool SensitivityConfig::practice_zero() const { return scale_k == 0.0 || priors_zero(practice); }

bool SensitivityConfig::age_dependent() const {
  for (const auto& p : dropout) {
    if (p.age_dependent()) return true;
  }
  for (const auto& p : practice) {
    if (p.age_dependent()) return true;
  }
  return false;
}

void SensitivityConfig::validate(std::size_t waves) const {
  if (waves == 0) throw ConfigError("sensitivity configuration needs at least one wave");
  if (dropout.size() != waves - 1 || practice.size() != waves - 1) {
    throw ConfigError("sensitivity configuration covers " + std::to_string(dropout.size()) +
                      " follow-up waves, data has " + std::to_string(waves - 1));
  }
  if (!(scale_k >= 0.0) || !std::isfinite(scale_k)) throw ConfigError("scale_k must be a finite value >= 0");
  for (std::size_t t = 0; t + 1 < waves; ++t) {
    // constant priors can be checked up front; age-dependent ones at draw time
    if (!dropout[t].age_dependent()) eval_bound(dropout[t], 0.0, scale_k, t + 1);
    if (!practice[t].age_dependent()) eval_bound(practice[t], 0.0, scale_k, t + 1);
  }
}

SensitivityConfig SensitivityConfig::with_dropout_zeroed() const {
  SensitivityConfig c = *this;
  for (auto& p : c.dropout) p = TriangularPrior{};
  return c;
}

SensitivityConfig SensitivityConfig::with_practice_zeroed() const {
  SensitivityConfig c = *this;
  for (auto& p : c.practice) p = TriangularPrior{};
  return c;
}

SensitivityConfig SensitivityConfig::scaled(double k) const {
  SensitivityConfig c = *this;
  c.scale_k = scale_k * k;
  return c;
}

SensitivityConfig SensitivityConfig::from_json(const std::string& text, std::size_t waves) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("sensitivity JSON: ") + e.what());
  }
  SensitivityConfig c = zeros(waves);
  try {
    if (doc.contains("scale_k")) c.scale_k = doc.at("scale_k").get<double>();
    if (doc.contains("waves")) {
      for (const auto& w : doc.at("waves")) {
        const auto t = w.at("wave").get<std::size_t>();
        if (t == 0 || t >= waves) {
          throw ConfigError("sensitivity wave " + std::to_string(t) + " outside 1.." + std::to_string(waves - 1));
        }
        const std::string where = "wave " + std::to_string(t);
        if (w.contains("dropout")) c.dropout[t - 1] = parse_prior(w.at("dropout"), where + ".dropout");
        if (w.contains("practice")) c.practice[t - 1] = parse_prior(w.at("practice"), where + ".practice");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sensitivity JSON: ") + e.what());
  }
  c.validate(waves);
  return c;
}

SensitivityConfig SensitivityConfig::load(const std::string& path, std::size_t waves) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sensitivity file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(ss.str(), waves);
  } catch (const InputError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string SensitivityConfig::to_json() const {
  json waves = json::array();
  for (std::size_t t = 0; t < dropout.size(); ++t) {
    waves.push_back({{"wave", t + 1}, {"dropout", prior_json(dropout[t])}, {"practice", prior_json(practice[t])}});
  }
  return json{{"scale_k", scale_k}, {"waves", waves}}.dump(2);
}

SensitivityDraw SensitivityDraw::zeros(std::size_t units, std::size_t waves) {
  return {units, waves, std::vector<double>(units * waves, 0.0), std::vector<double>(units * waves, 0.0)};
}

SensitivityDraw sample_sensitivity(const SensitivityConfig& cfg, const data::Panel& population, std::uint64_t seed,
                                   std::size_t draw) {
  const std::size_t waves = population.waves();
  cfg.validate(waves);
  SensitivityDraw out = SensitivityDraw::zeros(population.units(), waves);
  if (cfg.all_zero()) return out;
  if (cfg.age_dependent() && !population.has_age()) {
    throw ConfigError("age-dependent sensitivity prior requires an age column");
  }
  const std::uint64_t key = derive_seed(seed, StreamPurpose::kSensitivity, draw);
  for (std::size_t i = 0; i < population.units(); ++i) {
    Rng rng(key, i);
    for (std::size_t t = 1; t < waves; ++t) {
      // both uniforms are consumed at every wave to keep streams aligned
      const double u_drop = rng.uniform();
      const double u_prac = rng.uniform();
      if (!population.alive(i, t)) continue;
      const TriangularPrior& gp = cfg.dropout[t - 1];
      const TriangularPrior& dp = cfg.practice[t - 1];
      double a = 0.0;
      if (gp.age_dependent() || dp.age_dependent()) {
        a = population.age(i, t);
        if (data::is_missing(a)) {
          throw ConfigError("age missing for unit '" + population.unit_id(i) + "' at wave " + std::to_string(t) +
                            " with an age-dependent prior");
        }
      }
      out.dropout[i * waves + t] = triangular_quantile(eval_bound(gp, a, cfg.scale_k, t), u_drop);
      out.practice[i * waves + t] = triangular_quantile(eval_bound(dp, a, cfg.scale_k, t), u_prac);
    }
  }
  return out;
}

}  // namespace ppcm
