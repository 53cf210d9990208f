#include "ppcm/mrp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "ppcm/error.hpp"
#include "ppcm/numeric.hpp"
#include "ppcm/parallel.hpp"
#include "ppcm/random.hpp"

namespace ppcm::alt {

void MrpSpec::validate() const {
  std::set<std::string> seen;
  for (const auto* list : {&fixed_effects, &random_effects}) {
    for (const auto& name : *list) {
      if (!seen.insert(name).second) throw ConfigError("MRP covariate '" + name + "' appears in more than one role");
    }
  }
  if (!(zero_mass_threshold > 0.0 && zero_mass_threshold <= 1.0)) {
    throw ConfigError("zero-mass threshold must lie in (0, 1]");
  }
}

std::size_t Binning::level(double x) const {
  if (zero_level) {
    if (x == 0.0) return 0;
    return 1 + static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
  }
  return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
}

Binning make_binning(std::span<const double> sample_values, double zero_mass_threshold) {
  if (sample_values.empty()) throw ConfigError("cannot bin an empty variable");
  std::size_t zeros = 0;
  for (double v : sample_values) zeros += v == 0.0 ? 1 : 0;
  Binning b;
  std::vector<double> vals;
  b.zero_level = static_cast<double>(zeros) >= zero_mass_threshold * static_cast<double>(sample_values.size()) &&
                 zeros < sample_values.size();
  for (double v : sample_values) {
    if (!b.zero_level || v != 0.0) vals.push_back(v);
  }
  std::sort(vals.begin(), vals.end());
  for (double p : {0.25, 0.5, 0.75}) {
    const double c = quantile_sorted(vals, p);
    // cuts are strict upper edges, x < c falls below
    if (b.cuts.empty() || c > b.cuts.back()) b.cuts.push_back(c);
  }
  return b;
}

MrpPosterior fit_mrp_gibbs(std::span<const double> x, std::size_t n, std::size_t q,
                           std::span<const std::size_t> levels, const std::vector<std::size_t>& group_levels,
                           std::span<const double> y, const MrpConfig& cfg) {
  const std::size_t G = group_levels.size();
  if (x.size() != n * q || y.size() != n || levels.size() != n * G) throw ConfigError("MRP data dimensions disagree");
  if (cfg.n_keep == 0) throw ConfigError("MRP n_keep must be at least 1");
  if (n <= q) throw EstimationError("MRP needs more rows than fixed effects");
  for (std::size_t g = 0; g < G; ++g) {
    if (group_levels[g] < 2) throw ConfigError("every random-effect grouping needs at least 2 levels");
  }

  const auto N = static_cast<Eigen::Index>(n), Q = static_cast<Eigen::Index>(q);
  Eigen::MatrixXd X(N, Q);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < q; ++j) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i * q + j];
  const Eigen::VectorXd Y = Eigen::Map<const Eigen::VectorXd>(y.data(), N);
  const Eigen::LLT<Eigen::MatrixXd> xtx((X.transpose() * X).eval());
  if (xtx.info() != Eigen::Success) throw EstimationError("MRP fixed-effect design is rank deficient");
  const Eigen::MatrixXd L = xtx.matrixL();

  MrpPosterior post;
  post.draws = cfg.n_keep;
  post.fixed = q;
  post.group_levels = group_levels;
  std::size_t total = 0;
  for (std::size_t g = 0; g < G; ++g) {
    post.group_offset.push_back(total);
    total += group_levels[g];
  }
  post.level_counts.assign(total, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t g = 0; g < G; ++g) {
      const std::size_t l = levels[i * G + g];
      if (l >= group_levels[g]) throw ConfigError("MRP level index out of range");
      ++post.level_counts[post.group_offset[g] + l];
    }
  post.beta.reserve(cfg.n_keep * q);
  post.u.reserve(cfg.n_keep * total);
  post.tau.reserve(cfg.n_keep * G);
  post.sigma.reserve(cfg.n_keep);

  Rng rng(cfg.seed, 0);
  const double ymin = Y.minCoeff(), ymax = Y.maxCoeff();
  const double A = std::max(0.5 * (ymax - ymin), 1e-6);
  std::vector<double> u(total, 0.0);
  std::vector<double> tau2(G, cfg.fixed_tau2.value_or(A * A / 4.0));
  std::vector<double> aux(G, 1.0);
  double sigma2 = std::max(1e-8, (Y.array() - Y.mean()).square().sum() / static_cast<double>(n));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(Q);
  Eigen::VectorXd re(N);  // summed random effects per row
  re.setZero();
  Eigen::VectorXd z(Q);
  std::vector<double> level_sum(total);

  auto random_part = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t g = 0; g < G; ++g) s += u[post.group_offset[g] + levels[i * G + g]];
    return s;
  };

  for (std::size_t it = 0; it < cfg.n_burn + cfg.n_keep; ++it) {
    // fixed effects
    const Eigen::VectorXd rhs = X.transpose() * (Y - re);
    const Eigen::VectorXd bhat = xtx.solve(rhs);
    for (Eigen::Index j = 0; j < Q; ++j) z(j) = rng.normal();
    beta = bhat + std::sqrt(sigma2) * L.transpose().triangularView<Eigen::Upper>().solve(z);
    const Eigen::VectorXd fixed_fit = X * beta;

    // random effects, one group at a time
    for (std::size_t g = 0; g < G; ++g) {
      const std::size_t off = post.group_offset[g];
      std::fill(level_sum.begin() + static_cast<std::ptrdiff_t>(off),
                level_sum.begin() + static_cast<std::ptrdiff_t>(off + group_levels[g]), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const std::size_t l = off + levels[i * G + g];
        level_sum[l] += Y(ii) - fixed_fit(ii) - (re(ii) - u[l]);
      }
      for (std::size_t l = off; l < off + group_levels[g]; ++l) {
        const double prec = static_cast<double>(post.level_counts[l]) / sigma2 + 1.0 / tau2[g];
        u[l] = level_sum[l] / sigma2 / prec + rng.normal() / std::sqrt(prec);
      }
      for (std::size_t i = 0; i < n; ++i) re(static_cast<Eigen::Index>(i)) = random_part(i);
    }

    // residual variance
    const double ssr = (Y - fixed_fit - re).squaredNorm();
    sigma2 = ssr / rng.chi_squared(static_cast<double>(n));

    // half-Cauchy scale via the inverse-gamma mixture
    if (!cfg.fixed_tau2) {
      for (std::size_t g = 0; g < G; ++g) {
        double ss = 0.0;
        for (std::size_t l = post.group_offset[g]; l < post.group_offset[g] + group_levels[g]; ++l) ss += u[l] * u[l];
        const double shape = 0.5 * (static_cast<double>(group_levels[g]) + 1.0);
        tau2[g] = (0.5 * ss + 1.0 / aux[g]) / rng.gamma(shape);
        aux[g] = (1.0 / tau2[g] + 1.0 / (A * A)) / rng.gamma(1.0);
      }
    }

    if (it >= cfg.n_burn) {
      for (Eigen::Index j = 0; j < Q; ++j) post.beta.push_back(beta(j));
      post.u.insert(post.u.end(), u.begin(), u.end());
      for (double t2 : tau2) post.tau.push_back(std::sqrt(t2));
      post.sigma.push_back(std::sqrt(sigma2));
    }
  }
  return post;
}

MrpOutcomeModel::MrpOutcomeModel(MrpPosterior posterior, std::vector<std::size_t> fixed_columns,
                                 std::size_t history_start, std::size_t history_count,
                                 std::vector<std::size_t> group_columns, std::vector<Binning> binnings)
    : posterior_(std::move(posterior)),
      fixed_columns_(std::move(fixed_columns)),
      history_start_(history_start),
      history_count_(history_count),
      group_columns_(std::move(group_columns)),
      binnings_(std::move(binnings)) {
  if (posterior_.fixed != 1 + fixed_columns_.size() + history_count_) throw ConfigError("MRP model layout mismatch");
}

double MrpOutcomeModel::mean(std::size_t d, std::span<const double> f) const {
  const double* b = &posterior_.beta[d * posterior_.fixed];
  double m = b[0];
  std::size_t k = 1;
  for (std::size_t c : fixed_columns_) m += b[k++] * f[c];
  for (std::size_t h = 0; h < history_count_; ++h) m += b[k++] * f[history_start_ + h];
  const std::size_t total = posterior_.total_levels();
  for (std::size_t g = 0; g < group_columns_.size(); ++g) {
    const std::size_t l = posterior_.group_offset[g] + binnings_[g].level(f[group_columns_[g]]);
    // a level without sample units is predicted at the group mean
    if (posterior_.level_counts[l] > 0) m += posterior_.u[d * total + l];
  }
  return m;
}

WaveModels fit_mrp_wave_models(const data::CohortFrame& cohort, const MrpSpec& spec, const MrpConfig& cfg,
                               std::size_t threads, MrpFitReport* report) {
  spec.validate();
  const auto& base = cohort.schema().covariates[0];
  auto column = [&](const std::string& name) {
    const auto it = std::find(base.begin(), base.end(), name);
    if (it == base.end()) throw ConfigError("MRP covariate '" + name + "' is not a baseline covariate");
    return static_cast<std::size_t>(it - base.begin());
  };
  std::vector<std::size_t> fixed_cols, group_cols;
  for (const auto& name : spec.fixed_effects) fixed_cols.push_back(column(name));
  for (const auto& name : spec.random_effects) group_cols.push_back(column(name));

  // bins from the baseline sample
  std::vector<Binning> binnings;
  for (std::size_t c : group_cols) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < cohort.units(); ++i) vals.push_back(cohort.covariate(i, 0, c));
    binnings.push_back(make_binning(vals, spec.zero_mass_threshold));
  }
  std::vector<std::size_t> group_levels;
  for (const auto& b : binnings) group_levels.push_back(b.levels());

  const std::size_t waves = cohort.waves();
  WaveModels models;
  models.outcome.resize(waves);
  models.response.resize(waves);
  std::mutex note_mutex;
  parallel_for(waves, threads, [&](std::size_t t) {
    const TrainingSet s = outcome_training_set(cohort, t);
    const std::size_t history_start = s.p - t;
    const std::size_t q = 1 + fixed_cols.size() + t;
    const std::size_t G = group_cols.size();
    std::vector<double> x(s.n * q);
    std::vector<std::size_t> lv(s.n * G);
    for (std::size_t r = 0; r < s.n; ++r) {
      const double* f = &s.x[r * s.p];
      double* row = &x[r * q];
      std::size_t k = 0;
      row[k++] = 1.0;
      for (std::size_t c : fixed_cols) row[k++] = f[c];
      for (std::size_t h = 0; h < t; ++h) row[k++] = f[history_start + h];
      for (std::size_t g = 0; g < G; ++g) lv[r * G + g] = binnings[g].level(f[group_cols[g]]);
    }
    MrpConfig wave_cfg = cfg;
    wave_cfg.seed = derive_seed(cfg.seed, StreamPurpose::kMrp, t);
    MrpPosterior post = fit_mrp_gibbs(x, s.n, q, lv, group_levels, s.y, wave_cfg);
    if (report) {
      std::lock_guard lock(note_mutex);
      for (std::size_t g = 0; g < G; ++g)
        for (std::size_t l = 0; l < group_levels[g]; ++l)
          if (post.level_counts[post.group_offset[g] + l] == 0) {
            report->notes.push_back("wave " + std::to_string(t) + ": level " + std::to_string(l) + " of '" +
                                    spec.random_effects[g] + "' has no sample units; predicted at the group mean");
          }
    }
    models.outcome[t] = std::make_shared<MrpOutcomeModel>(std::move(post), fixed_cols, history_start, t, group_cols,
                                                          binnings);
  });
  return models;
}

}  // namespace ppcm::alt
