#include "ppcm/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ppcm/error.hpp"

namespace ppcm::sim {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kCovariates = 8;
constexpr double kPracticeEffect = 0.1;

enum Stream : std::uint64_t { kCovStream = 0, kNormalErr, kSkewErr, kSelection, kResponse, kSurvival };

double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

void ScenarioSpec::validate() const {
  if (id < 1 || id > 5) throw ConfigError("unknown scenario " + std::to_string(id) + " (valid: 1-5)");
  if (sample_size < 1 || population_size < sample_size) throw ConfigError("scenario sizes need N >= n >= 1");
}

SkewNormal SkewNormal::scenario_errors() {
  const double alpha = 5.0, omega = 1.6;
  const double delta = alpha / std::sqrt(1.0 + alpha * alpha);
  return {-omega * delta * std::sqrt(2.0 / kPi), omega, alpha};
}

double SkewNormal::mean() const {
  const double delta = shape / std::sqrt(1.0 + shape * shape);
  return location + scale * delta * std::sqrt(2.0 / kPi);
}

double SkewNormal::variance() const {
  const double delta = shape / std::sqrt(1.0 + shape * shape);
  return scale * scale * (1.0 - 2.0 * delta * delta / kPi);
}

double SkewNormal::skewness() const {
  const double delta = shape / std::sqrt(1.0 + shape * shape);
  const double m = delta * std::sqrt(2.0 / kPi);
  return 0.5 * (4.0 - kPi) * std::pow(m, 3) / std::pow(1.0 - m * m, 1.5);
}

double sample_skew_normal(double location, double scale, double shape, Rng& rng) {
  if (!(scale > 0.0)) throw ConfigError("skew-normal scale must be positive");
  const double delta = shape / std::sqrt(1.0 + shape * shape);
  const double u0 = rng.normal();
  const double u1 = rng.normal();
  return location + scale * (delta * std::abs(u0) + std::sqrt(1.0 - delta * delta) * u1);
}

std::vector<std::string> covariate_names() {
  std::vector<std::string> names;
  for (std::size_t j = 1; j <= kCovariates; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

SimReplicate gen_replicate(const ScenarioSpec& spec) {
  spec.validate();
  const std::size_t N = spec.population_size;
  const std::uint64_t key = derive_seed(spec.seed, StreamPurpose::kSimulation, spec.replicate);
  const int id = spec.id;
  const bool skew = id >= 3;

  // covariates, row-major N x 8
  std::vector<double> x(N * kCovariates);
  {
    Rng rng(key, kCovStream);
    for (std::size_t i = 0; i < N; ++i) {
      double* xi = &x[i * kCovariates];
      xi[0] = rng.uniform() < 0.5 ? 1.0 : 0.0;
      xi[1] = rng.uniform() < 0.5 ? 1.0 : 0.0;
      for (std::size_t j = 2; j < kCovariates; ++j) xi[j] = 2.0 * rng.uniform() - 1.0;
    }
  }

  // outcomes; both error streams are always advanced
  SimReplicate rep;
  rep.y0.resize(N);
  rep.y1.resize(N);
  {
    Rng normal_rng(key, kNormalErr), skew_rng(key, kSkewErr);
    const SkewNormal sn = SkewNormal::scenario_errors();
    for (std::size_t i = 0; i < N; ++i) {
      const double* xi = &x[i * kCovariates];
      const double x1 = xi[0], x2 = xi[1], x3 = xi[2], x4 = xi[3];
      const double n0 = normal_rng.normal(), n1 = normal_rng.normal();
      const double s0 = sample_skew_normal(sn.location, sn.scale, sn.shape, skew_rng);
      const double s1 = sample_skew_normal(sn.location, sn.scale, sn.shape, skew_rng);
      const double e0 = skew ? s0 : n0, e1 = skew ? s1 : n1;
      const double y0 = -1.0 - x1 + x2 + x3 + x4 + e0;
      rep.y0[i] = y0;
      if (skew) {
        rep.y1[i] = -0.87 - 0.4 * x3 + 0.8 * x3 * x3 + 0.8 * x3 * x3 * x3 + 0.4 * x4 + 0.8 * x1 + 0.8 * x2 +
                    0.4 * y0 - 0.4 * x1 * y0 + e1;
      } else {
        rep.y1[i] = -1.0 - x1 + x2 + x3 + x4 - 0.3 * y0 + e1;
      }
    }
  }

  // survival at wave 1
  std::vector<std::uint8_t> alive1(N, 1);
  {
    Rng rng(key, kSurvival);
    for (std::size_t i = 0; i < N; ++i) {
      const double* xi = &x[i * kCovariates];
      const double u = rng.uniform();
      if (id == 5) alive1[i] = u < expit(1.7 + 0.35 * (xi[0] + xi[1] + xi[2] + xi[3])) ? 1 : 0;
    }
  }

  // fixed-size PPS without replacement: keep the n largest log(u) / w
  {
    Rng rng(key, kSelection);
    std::vector<double> score(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double* xi = &x[i * kCovariates];
      const double w = expit(-2.67 - 0.4 * xi[0] + 0.4 * xi[1] + 0.4 * xi[2] + 0.4 * xi[3]);
      score[i] = std::log(rng.uniform()) / w;
    }
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.sample_size), order.end(),
                      [&](std::size_t a, std::size_t b) { return score[a] > score[b] || (score[a] == score[b] && a < b); });
    rep.sampled.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.sample_size));
    std::sort(rep.sampled.begin(), rep.sampled.end());
  }

  // wave-1 response among sampled units; the formula gives P(non-response)
  std::vector<std::uint8_t> resp1(N, 0);
  {
    Rng rng(key, kResponse);
    for (std::size_t i = 0; i < N; ++i) {
      const double* xi = &x[i * kCovariates];
      const double x1 = xi[0], x2 = xi[1], x3 = xi[2], x4 = xi[3], y0 = rep.y0[i];
      const double eta = id == 1 ? -2.7 + 1.2 * (x1 + x2 + x3 + x4) - 1.2 * y0
                                 : -2.7 - x1 + x2 + x3 + x4 + y0 + x3 * x4 + x3 * x1 + y0 * x1;
      const double u = rng.uniform();
      resp1[i] = (u >= expit(eta) && alive1[i]) ? 1 : 0;
    }
  }

  data::WaveSchema schema;
  schema.covariates = {covariate_names(), {}};
  auto make_panel = [&](const std::vector<std::size_t>& units) {
    data::PanelData d;
    d.schema = schema;
    d.covariates.resize(2);
    for (std::size_t i : units) {
      char id_buf[16];
      std::snprintf(id_buf, sizeof id_buf, "u%05zu", i + 1);
      d.unit_ids.emplace_back(id_buf);
      d.alive.push_back(1);
      d.alive.push_back(alive1[i]);
      d.covariates[0].insert(d.covariates[0].end(), &x[i * kCovariates], &x[i * kCovariates] + kCovariates);
    }
    return d;
  };
  std::vector<std::size_t> everyone(N);
  std::iota(everyone.begin(), everyone.end(), std::size_t{0});
  rep.population = data::PopulationFrame(make_panel(everyone));

  data::CohortData cd;
  cd.panel = make_panel(rep.sampled);
  for (std::size_t i : rep.sampled) {
    cd.responded.push_back(1);
    cd.responded.push_back(resp1[i]);
    cd.outcome.push_back(rep.y0[i]);
    const double observed = rep.y1[i] + (id == 4 ? kPracticeEffect : 0.0);
    cd.outcome.push_back(resp1[i] ? observed : data::kMissing);
  }
  rep.cohort = data::CohortFrame(std::move(cd));

  double sum = 0.0;
  std::size_t alive = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!alive1[i]) continue;
    sum += rep.y1[i];
    ++alive;
  }
  rep.truth = sum / static_cast<double>(alive);
  return rep;
}

}  // namespace ppcm::sim
