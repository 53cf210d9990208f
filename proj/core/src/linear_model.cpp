#include "ppcm/linear_model.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ppcm/error.hpp"
#include "ppcm/parallel.hpp"
#include "ppcm/random.hpp"

namespace ppcm::alt {
namespace {

struct Design {
  Eigen::MatrixXd x;  // n x (p + 1), intercept first
  Eigen::VectorXd y;
};

Design make_design(std::span<const double> x, std::size_t n, std::size_t p, std::span<const double> y) {
  if (x.size() != n * p || y.size() != n) throw ConfigError("linear model data dimensions disagree");
  Design d{Eigen::MatrixXd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1)),
           Eigen::VectorXd(static_cast<Eigen::Index>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    d.x(r, 0) = 1.0;
    for (std::size_t j = 0; j < p; ++j) d.x(r, static_cast<Eigen::Index>(j + 1)) = x[i * p + j];
    d.y(r) = y[i];
  }
  return d;
}

std::string column_name(const std::vector<std::string>& names, Eigen::Index c) {
  if (c == 0) return "(intercept)";
  const auto j = static_cast<std::size_t>(c - 1);
  return j < names.size() ? names[j] : "x" + std::to_string(j);
}

// QR with a rank check; collinear columns are those the pivoting pushes past
// the numerical rank.
Eigen::ColPivHouseholderQR<Eigen::MatrixXd> checked_qr(const Eigen::MatrixXd& x,
                                                       const std::vector<std::string>& names) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) {
    std::string cols;
    for (Eigen::Index k = qr.rank(); k < x.cols(); ++k) {
      if (!cols.empty()) cols += ", ";
      cols += column_name(names, qr.colsPermutation().indices()(k));
    }
    throw EstimationError("rank-deficient design: collinear column(s) " + cols);
  }
  return qr;
}

}  // namespace

double LinearPosterior::predict(std::size_t d, std::span<const double> x) const {
  const double* b = &coefficients[d * (predictors + 1)];
  double m = b[0];
  for (std::size_t j = 0; j < predictors; ++j) m += b[j + 1] * x[j];
  return m;
}

std::vector<double> ols(std::span<const double> x, std::size_t n, std::size_t p, std::span<const double> y,
                        const std::vector<std::string>& names) {
  if (n < p + 1) throw EstimationError("least squares needs at least p + 1 rows");
  const Design d = make_design(x, n, p, y);
  const auto qr = checked_qr(d.x, names);
  const Eigen::VectorXd b = qr.solve(d.y);
  return {b.data(), b.data() + b.size()};
}

LinearPosterior fit_mblm(std::span<const double> x, std::size_t n, std::size_t p, std::span<const double> y,
                         std::size_t draws, std::uint64_t seed, const std::vector<std::string>& names) {
  if (draws == 0) throw ConfigError("draws must be at least 1");
  if (n <= p + 1) {
    throw EstimationError("linear model needs n > p + 1 (n = " + std::to_string(n) + ", p = " + std::to_string(p) + ")");
  }
  const Design d = make_design(x, n, p, y);
  const auto qr = checked_qr(d.x, names);
  const Eigen::Index k = d.x.cols();
  const Eigen::VectorXd bhat = qr.solve(d.y);
  const double ssr = (d.y - d.x * bhat).squaredNorm();

  // Cholesky factor of (X'X)^-1 from R: X'X = P R'R P'
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));

  LinearPosterior post;
  post.predictors = p;
  post.draws = draws;
  post.coefficients.resize(draws * static_cast<std::size_t>(k));
  post.sigma.resize(draws);
  Rng rng(seed, 0);
  const double df = static_cast<double>(n) - static_cast<double>(k);
  Eigen::VectorXd z(k);
  for (std::size_t s = 0; s < draws; ++s) {
    const double sigma2 = ssr / rng.chi_squared(df);
    for (Eigen::Index j = 0; j < k; ++j) z(j) = rng.normal();
    // beta = bhat + sigma P R^-1 z has covariance sigma^2 (X'X)^-1
    const Eigen::VectorXd permuted = rinv * z;
    const Eigen::VectorXd beta = bhat + std::sqrt(sigma2) * (qr.colsPermutation() * permuted);
    for (Eigen::Index j = 0; j < k; ++j) post.coefficients[s * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)] = beta(j);
    post.sigma[s] = std::sqrt(sigma2);
  }
  return post;
}

LinearOutcomeModel::LinearOutcomeModel(LinearPosterior posterior) : posterior_(std::move(posterior)) {
  if (posterior_.draws == 0) throw ConfigError("linear outcome model needs at least one draw");
}

WaveModels fit_linear_wave_models(const data::CohortFrame& cohort, std::size_t draws, std::uint64_t seed,
                                  std::size_t threads) {
  const std::size_t waves = cohort.waves();
  WaveModels models;
  models.outcome.resize(waves);
  models.response.resize(waves);
  parallel_for(waves, threads, [&](std::size_t t) {
    const TrainingSet s = outcome_training_set(cohort, t);
    const auto names = feature_names(cohort.schema(), t);
    models.outcome[t] = std::make_shared<LinearOutcomeModel>(
        fit_mblm(s.x, s.n, s.p, s.y, draws, derive_seed(seed, StreamPurpose::kLinear, t), names));
  });
  return models;
}

}  // namespace ppcm::alt
