#include "ppcm/weighting_estimators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "ppcm/error.hpp"
#include "ppcm/linear_model.hpp"
#include "ppcm/numeric.hpp"
#include "ppcm/ppcm_estimator.hpp"
#include "ppcm/wave_models.hpp"

namespace ppcm::alt {
namespace {

constexpr double kZ975 = 1.959963984540054;
constexpr double kProbFloor = 1e-12;

double log_cdf(double z) { return std::log(std::max(normal_cdf(z), 1e-300)); }

// Inverse Mills ratio phi(z) / Phi(z), stable in the lower tail.
double mills(double z) {
  if (z < -30.0) return -z;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
  return phi / normal_cdf(z);
}

}  // namespace

double ProbitFit::probability(std::span<const double> x) const {
  if (constant) return constant_probability;
  double eta = coefficients[0];
  for (std::size_t j = 0; j + 1 < coefficients.size(); ++j) eta += coefficients[j + 1] * x[j];
  return normal_cdf(eta);
}

ProbitFit fit_probit_mle(std::span<const double> x, std::size_t n, std::size_t p, std::span<const double> r) {
  if (x.size() != n * p || r.size() != n) throw ConfigError("probit data dimensions disagree");
  ProbitFit fit;
  std::size_t ones = 0;
  for (double v : r) ones += v > 0.5 ? 1 : 0;
  if (n == 0 || ones == 0 || ones == n) {
    fit.constant = true;
    fit.constant_probability = n > 0 && ones == n ? 1.0 : 0.0;
    return fit;
  }
  const auto k = static_cast<Eigen::Index>(p + 1);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), k);
  for (std::size_t i = 0; i < n; ++i) {
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t j = 0; j < p; ++j) design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = x[i * p + j];
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  beta(0) = normal_quantile(static_cast<double>(ones) / static_cast<double>(n));

  auto loglik = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd eta = design * b;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) ll += log_cdf(r[static_cast<std::size_t>(i)] > 0.5 ? eta(i) : -eta(i));
    return ll;
  };
  double ll = loglik(beta);
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::VectorXd eta = design * beta;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      const double q = r[static_cast<std::size_t>(i)] > 0.5 ? 1.0 : -1.0;
      const double lam = mills(q * eta(i));
      // d/d eta of log Phi(q eta) and its negative second derivative
      const double g = q * lam;
      const double h = lam * (lam + q * eta(i));
      grad += g * design.row(i).transpose();
      info.noalias() += h * design.row(i).transpose() * design.row(i);
    }
    info.diagonal().array() += 1e-10;
    const Eigen::VectorXd step = info.ldlt().solve(grad);
    double scale = 1.0;
    Eigen::VectorXd next = beta + step;
    double ll_next = loglik(next);
    while (ll_next < ll - 1e-12 && scale > 1e-6) {
      scale *= 0.5;
      next = beta + scale * step;
      ll_next = loglik(next);
    }
    const bool converged = std::abs(ll_next - ll) < 1e-10 * (1.0 + std::abs(ll));
    beta = next;
    ll = ll_next;
    if (converged) break;
  }
  fit.coefficients.assign(beta.data(), beta.data() + beta.size());
  return fit;
}

double ParticipationModel::cumulative(std::size_t i, std::size_t t) const {
  double p = 1.0;
  for (std::size_t k = 1; k <= t; ++k) p *= prob[k][i];
  return p;
}

ParticipationModel fit_participation(const data::CohortFrame& cohort) {
  ParticipationModel m;
  m.prob.assign(cohort.waves(), std::vector<double>(cohort.units(), std::numeric_limits<double>::quiet_NaN()));
  std::fill(m.prob[0].begin(), m.prob[0].end(), 1.0);
  for (std::size_t t = 1; t < cohort.waves(); ++t) {
    const TrainingSet s = response_training_set(cohort, t);
    const ProbitFit fit = fit_probit_mle(s.x, s.n, s.p, s.y);
    for (std::size_t r = 0; r < s.n; ++r) {
      m.prob[t][s.units[r]] = fit.probability(std::span<const double>(&s.x[r * s.p], s.p));
    }
  }
  return m;
}

DesignEstimate weighted_ratio_mean(std::span<const double> weights, std::span<const double> y) {
  if (weights.size() != y.size() || y.empty()) throw EstimationError("weighted mean needs matching, non-empty inputs");
  CompensatedSum sw, swy;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sw.add(weights[i]);
    swy.add(weights[i] * y[i]);
  }
  const double total = sw.value();
  if (!(total > 0.0)) throw EstimationError("weights sum to zero");
  const double point = swy.value() / total;
  const std::size_t n = y.size();
  double var = 0.0;
  if (n > 1) {
    CompensatedSum sz;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = weights[i] * (y[i] - point) / total;
      sz.add(z * z);
    }
    var = static_cast<double>(n) / static_cast<double>(n - 1) * sz.value();
  }
  const double half = kZ975 * std::sqrt(var);
  return {point, point - half, point + half};
}

namespace {

void responder_weights(const data::CohortFrame& cohort, const CellTable& cells, const ParticipationModel& part,
                       std::size_t t, std::vector<std::size_t>& units, std::vector<double>& w, std::vector<double>& y) {
  if (t >= cohort.waves()) throw ConfigError("wave " + std::to_string(t) + " out of range");
  if (cells.sample_cell.size() != cohort.units()) throw ConfigError("cell table does not match the cohort");
  units = data::responders_at(cohort, t);
  if (units.empty()) throw EstimationError("wave " + std::to_string(t) + " has no responders");
  for (std::size_t i : units) {
    const double pi = part.cumulative(i, t);
    if (!(pi > kProbFloor)) {
      throw EstimationError("participation probability is zero for responder '" + cohort.unit_id(i) + "' at wave " +
                            std::to_string(t));
    }
    w.push_back(cells.sample_weight(i) / pi);
    y.push_back(cohort.outcome(i, t));
  }
}

}  // namespace

DesignEstimate ht_estimate(const data::CohortFrame& cohort, const CellTable& cells,
                           const ParticipationModel& participation, std::size_t t) {
  std::vector<std::size_t> units;
  std::vector<double> w, y;
  responder_weights(cohort, cells, participation, t, units, w, y);
  return weighted_ratio_mean(w, y);
}

GregEstimate greg_from_terms(std::span<const double> population_predictions, std::span<const double> weights,
                             std::span<const double> y, std::span<const double> sample_predictions) {
  if (population_predictions.empty()) throw EstimationError("GREG needs at least one survivor");
  if (weights.size() != y.size() || y.size() != sample_predictions.size() || y.empty()) {
    throw EstimationError("GREG sample inputs must match and be non-empty");
  }
  GregEstimate g;
  g.survivors = population_predictions.size();
  const double nt = static_cast<double>(g.survivors);
  g.prediction_term = compensated_sum(population_predictions) / nt;
  CompensatedSum corr, sw;
  std::vector<double> resid(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    resid[i] = y[i] - sample_predictions[i];
    corr.add(weights[i] * resid[i]);
    sw.add(weights[i]);
  }
  g.correction_term = corr.value() / nt;
  g.point = g.prediction_term + g.correction_term;
  const std::size_t n = y.size();
  double var = 0.0;
  if (n > 1) {
    const double mean_we = corr.value() / static_cast<double>(n);
    CompensatedSum sz;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = weights[i] * resid[i] - mean_we;
      sz.add(z * z);
    }
    var = static_cast<double>(n) / static_cast<double>(n - 1) * sz.value() / (nt * nt);
  }
  const double half = kZ975 * std::sqrt(var);
  g.lo = g.point - half;
  g.hi = g.point + half;
  return g;
}

namespace {

// Least squares of y_t on the covariate history over the given responders.
struct WorkingModel {
  std::size_t p = 0;
  std::vector<double> beta;

  double predict(const double* row) const {
    double m = beta[0];
    for (std::size_t j = 0; j < p; ++j) m += beta[j + 1] * row[j];
    return m;
  }
};

WorkingModel fit_working_model(const data::CohortFrame& cohort, std::size_t t, const std::vector<std::size_t>& units,
                               const std::vector<double>& y, std::vector<double>& sample_pred) {
  WorkingModel m;
  m.p = feature_count(cohort.schema(), t) - t;  // covariates only
  std::vector<double> x(units.size() * m.p);
  for (std::size_t r = 0; r < units.size(); ++r) fill_covariate_history(cohort, units[r], t, &x[r * m.p]);
  std::vector<std::string> names = feature_names(cohort.schema(), t);
  names.resize(m.p);
  m.beta = ols(x, units.size(), m.p, y, names);
  sample_pred.resize(units.size());
  for (std::size_t r = 0; r < units.size(); ++r) sample_pred[r] = m.predict(&x[r * m.p]);
  return m;
}

void check_age_inputs(const data::Panel& population, const data::CohortFrame& cohort, std::span<const double> grid) {
  if (!(population.schema() == cohort.schema())) throw ConfigError("population and cohort schemas differ");
  if (!population.has_age() || !cohort.has_age()) throw ConfigError("age-specific estimates require an age column");
  if (grid.empty()) throw ConfigError("age grid is empty");
}

// Survivor-weighted pooling over waves, as for the model-based curves.
std::vector<std::optional<double>> pool_over_waves(const std::vector<double>& est, const std::vector<std::size_t>& n,
                                                   std::size_t groups, std::size_t waves) {
  std::vector<std::optional<double>> out(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    std::size_t total = 0;
    for (std::size_t t = 0; t < waves; ++t) total += std::isnan(est[g * waves + t]) ? 0 : n[g * waves + t];
    if (total == 0) continue;
    CompensatedSum acc;
    for (std::size_t t = 0; t < waves; ++t) {
      if (std::isnan(est[g * waves + t])) continue;
      acc.add(static_cast<double>(n[g * waves + t]) / static_cast<double>(total) * est[g * waves + t]);
    }
    out[g] = acc.value();
  }
  return out;
}

std::vector<std::size_t> survivor_counts(const data::Panel& population, std::span<const double> grid) {
  const std::size_t waves = population.waves();
  std::vector<std::size_t> n(grid.size() * waves, 0);
  for (std::size_t i = 0; i < population.units(); ++i) {
    for (std::size_t t = 0; t < waves; ++t) {
      if (!population.alive(i, t)) continue;
      if (const auto g = age_cohort(grid, population.age(i, t))) ++n[*g * waves + t];
    }
  }
  return n;
}

}  // namespace

GregEstimate greg_estimate(const data::Panel& population, const data::CohortFrame& cohort, const CellTable& cells,
                           const ParticipationModel& participation, std::size_t t) {
  if (!(population.schema() == cohort.schema())) throw ConfigError("population and cohort schemas differ");
  std::vector<std::size_t> units;
  std::vector<double> w, y, sample_pred;
  responder_weights(cohort, cells, participation, t, units, w, y);
  const WorkingModel model = fit_working_model(cohort, t, units, y, sample_pred);
  std::vector<double> pop_pred;
  std::vector<double> row(model.p);
  for (std::size_t i = 0; i < population.units(); ++i) {
    if (!population.alive(i, t)) continue;
    fill_covariate_history(population, i, t, row.data());
    pop_pred.push_back(model.predict(row.data()));
  }
  return greg_from_terms(pop_pred, w, y, sample_pred);
}

std::vector<std::optional<double>> ht_by_age(const data::Panel& population, const data::CohortFrame& cohort,
                                             const CellTable& cells, const ParticipationModel& participation,
                                             std::span<const double> grid) {
  check_age_inputs(population, cohort, grid);
  const std::size_t waves = cohort.waves(), G = grid.size();
  std::vector<double> est(G * waves, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t t = 0; t < waves; ++t) {
    std::vector<std::size_t> units;
    std::vector<double> w, y;
    responder_weights(cohort, cells, participation, t, units, w, y);
    std::vector<CompensatedSum> sw(G), swy(G);
    for (std::size_t r = 0; r < units.size(); ++r) {
      const auto g = age_cohort(grid, cohort.age(units[r], t));
      if (!g) continue;
      sw[*g].add(w[r]);
      swy[*g].add(w[r] * y[r]);
    }
    for (std::size_t g = 0; g < G; ++g) {
      if (sw[g].value() > 0.0) est[g * waves + t] = swy[g].value() / sw[g].value();
    }
  }
  return pool_over_waves(est, survivor_counts(population, grid), G, waves);
}

std::vector<std::optional<double>> greg_by_age(const data::Panel& population, const data::CohortFrame& cohort,
                                               const CellTable& cells, const ParticipationModel& participation,
                                               std::span<const double> grid) {
  check_age_inputs(population, cohort, grid);
  const std::size_t waves = cohort.waves(), G = grid.size();
  const std::vector<std::size_t> n = survivor_counts(population, grid);
  std::vector<double> est(G * waves, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t t = 0; t < waves; ++t) {
    std::vector<std::size_t> units;
    std::vector<double> w, y, sample_pred;
    responder_weights(cohort, cells, participation, t, units, w, y);
    const WorkingModel model = fit_working_model(cohort, t, units, y, sample_pred);
    std::vector<CompensatedSum> pred(G), corr(G);
    std::vector<std::size_t> responders(G, 0);
    std::vector<double> row(model.p);
    for (std::size_t i = 0; i < population.units(); ++i) {
      if (!population.alive(i, t)) continue;
      const auto g = age_cohort(grid, population.age(i, t));
      if (!g) continue;
      fill_covariate_history(population, i, t, row.data());
      pred[*g].add(model.predict(row.data()));
    }
    for (std::size_t r = 0; r < units.size(); ++r) {
      const auto g = age_cohort(grid, cohort.age(units[r], t));
      if (!g) continue;
      corr[*g].add(w[r] * (y[r] - sample_pred[r]));
      ++responders[*g];
    }
    for (std::size_t g = 0; g < G; ++g) {
      const std::size_t nt = n[g * waves + t];
      if (nt == 0 || responders[g] == 0) continue;
      est[g * waves + t] = (pred[g].value() + corr[g].value()) / static_cast<double>(nt);
    }
  }
  return pool_over_waves(est, n, G, waves);
}

}  // namespace ppcm::alt
