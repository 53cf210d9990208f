#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ppcm/bart.hpp"
#include "ppcm/error.hpp"
#include "ppcm/numeric.hpp"
#include "ppcm/random.hpp"

namespace ppcm::bart {
namespace {

constexpr double kMinSigmaHat = 1e-4;

struct Node {
  std::int32_t var = -1;
  double cut = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t parent = -1;
  std::int32_t depth = 0;
  double mu = 0.0;  // leaf parameter on the internal (scaled) outcome scale
  std::size_t n = 0;
  double sum = 0.0;
  bool splittable = false;
  bool in_use = true;

  bool is_leaf() const { return var < 0; }
};

struct MutableTree {
  std::vector<Node> nodes;
  std::vector<std::int32_t> free_slots;
  std::vector<std::int32_t> leaf_of;  // training row -> leaf node

  std::int32_t allocate() {
    if (!free_slots.empty()) {
      const std::int32_t i = free_slots.back();
      free_slots.pop_back();
      nodes[i] = Node{};
      return i;
    }
    nodes.emplace_back();
    return static_cast<std::int32_t>(nodes.size() - 1);
  }
  void release(std::int32_t i) {
    nodes[i].in_use = false;
    free_slots.push_back(i);
  }
  bool has_internal() const { return !nodes[0].is_leaf(); }
};

struct SplitStats {
  std::size_t nl = 0, nr = 0;
  double sl = 0.0, sr = 0.0;
};

}  // namespace

void BartConfig::validate() const {
  if (n_trees == 0) throw ConfigError("n_trees must be at least 1");
  if (n_keep == 0) throw ConfigError("n_keep must be at least 1");
  if (!(tree_prior.alpha > 0.0 && tree_prior.alpha < 1.0)) throw ConfigError("tree prior alpha must lie in (0,1)");
  if (!(tree_prior.beta > 0.0)) throw ConfigError("tree prior beta must be positive");
  if (!(leaf_scale_k > 0.0)) throw ConfigError("leaf scale k must be positive");
  if (!(sigma_prior.df > 0.0)) throw ConfigError("sigma prior df must be positive");
  if (!(sigma_prior.quantile > 0.0 && sigma_prior.quantile < 1.0)) {
    throw ConfigError("sigma prior quantile must lie in (0,1)");
  }
  if (move_probs.grow < 0 || move_probs.prune < 0 || move_probs.change < 0 ||
      std::abs(move_probs.grow + move_probs.prune + move_probs.change - 1.0) > 1e-9) {
    throw ConfigError("move probabilities must be non-negative and sum to 1");
  }
  if (move_probs.grow <= 0.0 || move_probs.prune <= 0.0) {
    throw ConfigError("grow and prune probabilities must be positive");
  }
  if (dart_enabled && !(dart_prior.a > 0.0 && dart_prior.b > 0.0)) {
    throw ConfigError("DART Beta hyperparameters must be positive");
  }
}

struct BackfitSampler::State {
  // data
  std::vector<double> x;
  std::size_t n = 0, p = 0;
  std::vector<double> y;       // scaled continuous outcome, or latent minus offset
  std::vector<double> labels;  // probit only
  OutcomeKind kind = OutcomeKind::kContinuous;
  double center = 0.0;  // continuous: midrange; probit: latent offset
  double scale = 1.0;   // continuous: range

  BartConfig cfg;
  SamplerControls controls;
  Rng rng;

  // priors
  double tau = 1.0;
  double sigma = 1.0;  // scaled
  double lambda = 1.0;
  DartState dart;
  std::size_t dart_start = 0;

  // chain state
  std::vector<MutableTree> trees;
  std::vector<double> allfit;
  std::vector<double> resid;
  std::size_t iter = 0;

  // scratch
  std::vector<std::size_t> rows;
  std::vector<double> values;
  std::vector<double> lo, hi;
  std::vector<std::uint8_t> var_ok;

  double xv(std::size_t i, std::size_t j) const { return x[i * p + j]; }

  double split_prob_at(std::int32_t depth) const {
    return cfg.tree_prior.alpha * std::pow(1.0 + depth, -cfg.tree_prior.beta);
  }

  double log_marginal(std::size_t count, double sum) const {
    const double s2 = sigma * sigma;
    const double t2 = tau * tau;
    const double denom = s2 + static_cast<double>(count) * t2;
    return 0.5 * std::log(s2 / denom) + 0.5 * t2 * sum * sum / (s2 * denom);
  }

  bool depth_allows_split(const Node& nd) const {
    return !controls.max_depth || static_cast<std::size_t>(nd.depth) < *controls.max_depth;
  }
  bool goodbot(const Node& nd) const { return nd.is_leaf() && nd.splittable && depth_allows_split(nd); }

  // Collect the training rows routed to any of the given leaves.
  void collect_rows(const MutableTree& t, std::int32_t a, std::int32_t b = -1) {
    rows.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const std::int32_t l = t.leaf_of[i];
      if (l == a || l == b) rows.push_back(i);
    }
  }

  // Marks which variables have at least two distinct values among `rows`.
  std::size_t mark_splittable_vars() {
    lo.assign(p, std::numeric_limits<double>::infinity());
    hi.assign(p, -std::numeric_limits<double>::infinity());
    for (std::size_t i : rows) {
      const double* xi = &x[i * p];
      for (std::size_t j = 0; j < p; ++j) {
        lo[j] = std::min(lo[j], xi[j]);
        hi[j] = std::max(hi[j], xi[j]);
      }
    }
    var_ok.assign(p, 0);
    std::size_t count = 0;
    for (std::size_t j = 0; j < p; ++j) {
      if (hi[j] > lo[j]) {
        var_ok[j] = 1;
        ++count;
      }
    }
    return count;
  }

  bool rows_splittable(std::span<const std::size_t> subset) const {
    if (subset.size() < 2) return false;
    const double* first = &x[subset[0] * p];
    for (std::size_t k = 1; k < subset.size(); ++k) {
      const double* xi = &x[subset[k] * p];
      for (std::size_t j = 0; j < p; ++j) {
        if (xi[j] != first[j]) return true;
      }
    }
    return false;
  }

  // Draws a splittable variable with probability proportional to its DART
  // weight, then a cutpoint uniformly from the cell's observed values above
  // the minimum. Requires mark_splittable_vars() on the same rows.
  std::pair<std::int32_t, double> draw_rule() {
    double total = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (var_ok[j]) total += dart.split_probs[j];
    }
    std::int32_t var = -1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t j = 0; j < p; ++j) {
        if (!var_ok[j]) continue;
        var = static_cast<std::int32_t>(j);
        u -= dart.split_probs[j];
        if (u <= 0.0) break;
      }
    } else {
      // every splittable weight underflowed: fall back to a uniform choice
      std::size_t count = 0;
      for (std::size_t j = 0; j < p; ++j) count += var_ok[j];
      std::size_t pick = rng.index(count);
      for (std::size_t j = 0; j < p; ++j) {
        if (var_ok[j] && pick-- == 0) {
          var = static_cast<std::int32_t>(j);
          break;
        }
      }
    }
    values.clear();
    for (std::size_t i : rows) values.push_back(xv(i, static_cast<std::size_t>(var)));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const std::size_t candidates = values.size() - 1;
    const double cut = values[1 + rng.index(candidates)];
    return {var, cut};
  }

  SplitStats split_stats(std::int32_t var, double cut) const {
    SplitStats s;
    for (std::size_t i : rows) {
      if (xv(i, static_cast<std::size_t>(var)) < cut) {
        ++s.nl;
        s.sl += resid[i];
      } else {
        ++s.nr;
        s.sr += resid[i];
      }
    }
    return s;
  }

  // Splittability of the two children produced by (var, cut) on `rows`.
  std::pair<bool, bool> children_splittable(std::int32_t var, double cut) {
    std::vector<std::size_t> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (std::size_t i : rows) {
      (xv(i, static_cast<std::size_t>(var)) < cut ? left : right).push_back(i);
    }
    return {rows_splittable(left), rows_splittable(right)};
  }

  void assign_children(MutableTree& t, std::int32_t parent) {
    const Node& pn = t.nodes[parent];
    for (std::size_t i : rows) {
      t.leaf_of[i] = xv(i, static_cast<std::size_t>(pn.var)) < pn.cut ? pn.left : pn.right;
    }
  }

  double birth_prob(std::size_t goodbots, bool root_only) const {
    if (goodbots == 0) return 0.0;
    if (root_only) return 1.0;
    return cfg.move_probs.grow / (cfg.move_probs.grow + cfg.move_probs.prune);
  }
  double change_weight(bool has_internal) const { return has_internal ? cfg.move_probs.change : 0.0; }

  void grow(MutableTree& t, std::int32_t leaf, std::size_t goodbots, std::size_t nogs) {
    Node& nd = t.nodes[leaf];
    collect_rows(t, leaf);
    mark_splittable_vars();
    const auto [var, cut] = draw_rule();
    const SplitStats s = split_stats(var, cut);
    const auto [left_ok, right_ok] = children_splittable(var, cut);

    const bool root_only = !t.has_internal();
    const std::int32_t d = nd.depth;
    const bool child_depth_ok = !controls.max_depth || static_cast<std::size_t>(d + 1) < *controls.max_depth;
    const std::size_t goodbots_after =
        goodbots - 1 + ((left_ok && child_depth_ok) ? 1 : 0) + ((right_ok && child_depth_ok) ? 1 : 0);
    std::size_t nogs_after = nogs + 1;
    if (nd.parent >= 0) {
      const Node& par = t.nodes[nd.parent];
      const std::int32_t sibling = par.left == leaf ? par.right : par.left;
      if (t.nodes[sibling].is_leaf()) --nogs_after;  // parent stops being a nog
    }
    const double pb_before = (1.0 - change_weight(!root_only)) * birth_prob(goodbots, root_only);
    const double pd_after = (1.0 - change_weight(true)) * (1.0 - birth_prob(goodbots_after, false));

    const double pg = split_prob_at(d);
    const double pg_child = split_prob_at(d + 1);
    double log_ratio = std::log(pd_after / static_cast<double>(nogs_after)) -
                       std::log(pb_before / static_cast<double>(goodbots));
    log_ratio += std::log(pg) + 2.0 * std::log1p(-pg_child) - std::log1p(-pg);
    log_ratio += log_marginal(s.nl, s.sl) + log_marginal(s.nr, s.sr) - log_marginal(s.nl + s.nr, s.sl + s.sr);

    if (std::log(rng.uniform()) >= log_ratio) return;

    const std::int32_t l = t.allocate();
    const std::int32_t r = t.allocate();
    Node& parent = t.nodes[leaf];  // allocate may reallocate
    parent.var = var;
    parent.cut = cut;
    parent.left = l;
    parent.right = r;
    for (auto [child, cnt, sum, ok] : {std::tuple{l, s.nl, s.sl, left_ok}, std::tuple{r, s.nr, s.sr, right_ok}}) {
      Node& c = t.nodes[child];
      c.parent = leaf;
      c.depth = d + 1;
      c.n = cnt;
      c.sum = sum;
      c.splittable = ok;
    }
    assign_children(t, leaf);
  }

  void prune(MutableTree& t, std::int32_t nog, std::size_t goodbots, std::size_t nogs) {
    const Node& nd = t.nodes[nog];
    const Node& l = t.nodes[nd.left];
    const Node& r = t.nodes[nd.right];
    const std::size_t goodbots_after = goodbots - (goodbot(l) ? 1 : 0) - (goodbot(r) ? 1 : 0) + 1;
    const bool root_only_after = nog == 0;
    std::size_t nogs_after = nogs - 1;
    if (nd.parent >= 0) {
      const Node& par = t.nodes[nd.parent];
      const std::int32_t sibling = par.left == nog ? par.right : par.left;
      if (t.nodes[sibling].is_leaf()) ++nogs_after;
    }
    (void)nogs_after;
    const double pd_before = (1.0 - change_weight(true)) * (1.0 - birth_prob(goodbots, false));
    const double pb_after =
        (1.0 - change_weight(!root_only_after)) * birth_prob(goodbots_after, root_only_after);

    const double pg = split_prob_at(nd.depth);
    const double pg_child = split_prob_at(nd.depth + 1);
    double log_ratio = std::log(pb_after / static_cast<double>(goodbots_after)) -
                       std::log(pd_before / static_cast<double>(nogs));
    log_ratio += std::log1p(-pg) - std::log(pg) - 2.0 * std::log1p(-pg_child);
    log_ratio += log_marginal(l.n + r.n, l.sum + r.sum) - log_marginal(l.n, l.sum) - log_marginal(r.n, r.sum);

    if (std::log(rng.uniform()) >= log_ratio) return;

    const std::int32_t li = nd.left, ri = nd.right;
    Node& merged = t.nodes[nog];
    merged.n = t.nodes[li].n + t.nodes[ri].n;
    merged.sum = t.nodes[li].sum + t.nodes[ri].sum;
    merged.var = -1;
    merged.left = merged.right = -1;
    merged.splittable = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (t.leaf_of[i] == li || t.leaf_of[i] == ri) t.leaf_of[i] = nog;
    }
    t.release(li);
    t.release(ri);
  }

  void change(MutableTree& t, std::int32_t nog) {
    Node& nd = t.nodes[nog];
    collect_rows(t, nd.left, nd.right);
    mark_splittable_vars();
    const auto [var, cut] = draw_rule();
    const SplitStats s = split_stats(var, cut);
    const Node& l = t.nodes[nd.left];
    const Node& r = t.nodes[nd.right];
    const double log_ratio = log_marginal(s.nl, s.sl) + log_marginal(s.nr, s.sr) -
                             log_marginal(l.n, l.sum) - log_marginal(r.n, r.sum);
    if (std::log(rng.uniform()) >= log_ratio) return;
    const auto [left_ok, right_ok] = children_splittable(var, cut);
    nd.var = var;
    nd.cut = cut;
    Node& nl = t.nodes[nd.left];
    nl.n = s.nl;
    nl.sum = s.sl;
    nl.splittable = left_ok;
    Node& nr = t.nodes[nd.right];
    nr.n = s.nr;
    nr.sum = s.sr;
    nr.splittable = right_ok;
    assign_children(t, nog);
  }

  void update_tree(MutableTree& t) {
    // partial residuals and current leaf statistics
    for (auto& nd : t.nodes) {
      if (nd.in_use && nd.is_leaf()) {
        nd.n = 0;
        nd.sum = 0.0;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      Node& leaf = t.nodes[t.leaf_of[i]];
      resid[i] = y[i] - allfit[i] + leaf.mu;
      ++leaf.n;
      leaf.sum += resid[i];
    }

    if (controls.update_trees) {
      std::vector<std::int32_t> goodbots, nogs;
      for (std::size_t k = 0; k < t.nodes.size(); ++k) {
        const Node& nd = t.nodes[k];
        if (!nd.in_use) continue;
        if (goodbot(nd)) goodbots.push_back(static_cast<std::int32_t>(k));
        if (!nd.is_leaf() && t.nodes[nd.left].is_leaf() && t.nodes[nd.right].is_leaf()) {
          nogs.push_back(static_cast<std::int32_t>(k));
        }
      }
      const bool has_internal = t.has_internal();
      const double u = rng.uniform();
      if (has_internal && u < cfg.move_probs.change) {
        change(t, nogs[rng.index(nogs.size())]);
      } else {
        const double pb = birth_prob(goodbots.size(), !has_internal);
        if (rng.uniform() < pb) {
          grow(t, goodbots[rng.index(goodbots.size())], goodbots.size(), nogs.size());
        } else if (has_internal) {
          prune(t, nogs[rng.index(nogs.size())], goodbots.size(), nogs.size());
        }
      }
    }

    if (!controls.update_trees) return;
    // conjugate leaf draws
    const double s2 = sigma * sigma;
    const double t2 = tau * tau;
    for (auto& nd : t.nodes) {
      if (!nd.in_use || !nd.is_leaf()) continue;
      const double prec = static_cast<double>(nd.n) / s2 + 1.0 / t2;
      const double var = 1.0 / prec;
      nd.mu = var * nd.sum / s2 + std::sqrt(var) * rng.normal();
    }
    for (std::size_t i = 0; i < n; ++i) allfit[i] = y[i] - resid[i] + t.nodes[t.leaf_of[i]].mu;
  }

  void update_sigma() {
    if (controls.fixed_sigma || !controls.update_sigma) return;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - allfit[i];
      ssr += e * e;
    }
    const double nu = cfg.sigma_prior.df;
    sigma = std::sqrt((nu * lambda + ssr) / rng.chi_squared(nu + static_cast<double>(n)));
  }

  void update_latent() {
    for (std::size_t i = 0; i < n; ++i) {
      const double m = center + allfit[i];
      const double z = labels[i] > 0.5 ? m + rng.normal_above(-m) : m - rng.normal_above(m);
      y[i] = z - center;
    }
  }

  void update_dart() {
    if (!cfg.dart_enabled || iter < dart_start) return;
    std::vector<std::size_t> counts(p, 0);
    for (const auto& t : trees) {
      for (const auto& nd : t.nodes) {
        if (nd.in_use && !nd.is_leaf()) ++counts[static_cast<std::size_t>(nd.var)];
      }
    }
    update_dart_split_probs(dart, counts, cfg.dart_prior, rng);
  }

  Tree compact(const MutableTree& t) const {
    std::vector<TreeNode> out;
    std::vector<std::int32_t> queue{0};
    out.emplace_back();
    // breadth-first: out[k] corresponds to queue[k]
    for (std::size_t k = 0; k < queue.size(); ++k) {
      const Node& nd = t.nodes[queue[k]];
      if (nd.is_leaf()) {
        out[k] = TreeNode{-1, -1, kind == OutcomeKind::kContinuous ? nd.mu * scale : nd.mu};
      } else {
        out[k] = TreeNode{nd.var, static_cast<std::int32_t>(queue.size()), nd.cut};
        queue.push_back(nd.left);
        queue.push_back(nd.right);
        out.emplace_back();
        out.emplace_back();
      }
    }
    return Tree(std::move(out));
  }
};

namespace {

double least_squares_sigma(std::span<const double> x, std::size_t n, std::size_t p, std::span<const double> y) {
  Eigen::VectorXd yv(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) yv(static_cast<Eigen::Index>(i)) = y[i];
  const double ybar = yv.mean();
  const double sd = n > 1 ? std::sqrt((yv.array() - ybar).square().sum() / static_cast<double>(n - 1)) : 0.0;
  if (n <= p + 1) return sd;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
  for (std::size_t j = 0; j < p; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += x[i * p + j];
    m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i * p + j] - m;
    }
  }
  design.col(static_cast<Eigen::Index>(p)).setOnes();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const auto rank = static_cast<std::size_t>(qr.rank());
  if (n <= rank) return sd;
  const Eigen::VectorXd beta = qr.solve(yv);
  const double ssr = (yv - design * beta).squaredNorm();
  return std::sqrt(ssr / static_cast<double>(n - rank));
}

}  // namespace

BackfitSampler::BackfitSampler(std::span<const double> x, std::size_t n, std::size_t p,
                               std::span<const double> y, OutcomeKind kind, const BartConfig& cfg,
                               const SamplerControls& controls)
    : state_(std::make_unique<State>()) {
  cfg.validate();
  if (n < 2) throw ConfigError("BART needs at least 2 training rows");
  if (p < 1) throw ConfigError("BART needs at least one predictor");
  if (x.size() != n * p || y.size() != n) throw ConfigError("BART data dimensions disagree");
  for (double v : x) {
    if (std::isnan(v)) throw ConfigError("BART design matrix contains missing values");
  }
  for (double v : y) {
    if (std::isnan(v)) throw ConfigError("BART outcome contains missing values");
  }

  State& s = *state_;
  s.x.assign(x.begin(), x.end());
  s.n = n;
  s.p = p;
  s.kind = kind;
  s.cfg = cfg;
  s.controls = controls;
  s.rng = Rng(cfg.seed, 0);
  s.dart = DartState::uniform(p);
  s.dart_start = controls.dart_start.value_or(cfg.n_burn / 2);
  const double root_k = std::sqrt(static_cast<double>(cfg.n_trees));

  if (kind == OutcomeKind::kContinuous) {
    const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
    s.center = 0.5 * (*mn + *mx);
    s.scale = *mx - *mn;
    if (!(s.scale > 0.0)) s.scale = 1.0;
    s.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.y[i] = (y[i] - s.center) / s.scale;
    s.tau = 0.5 / (cfg.leaf_scale_k * root_k);
    const double sigma_hat = std::max(least_squares_sigma(x, n, p, s.y), kMinSigmaHat);
    const double nu = cfg.sigma_prior.df;
    s.lambda = sigma_hat * sigma_hat * chi_squared_quantile(1.0 - cfg.sigma_prior.quantile, nu) / nu;
    s.sigma = controls.fixed_sigma ? *controls.fixed_sigma / s.scale : sigma_hat;
  } else {
    std::size_t ones = 0;
    for (double v : y) {
      if (v != 0.0 && v != 1.0) throw ConfigError("probit labels must be 0 or 1");
      ones += v == 1.0 ? 1 : 0;
    }
    if (ones == 0 || ones == n) {
      throw DegenerateOutcomeError("probit outcome has a single class (" + std::to_string(ones) + " of " +
                                   std::to_string(n) + " positive)");
    }
    s.labels.assign(y.begin(), y.end());
    s.center = normal_quantile(static_cast<double>(ones) / static_cast<double>(n));
    s.scale = 1.0;
    s.sigma = 1.0;
    s.tau = 3.0 / (cfg.leaf_scale_k * root_k);
    s.y.assign(n, 0.0);
  }

  double ybar = 0.0;
  if (kind == OutcomeKind::kContinuous) {
    for (double v : s.y) ybar += v;
    ybar /= static_cast<double>(n);
  }
  const double init_mu = ybar / static_cast<double>(cfg.n_trees);
  bool root_splittable = false;
  {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    root_splittable = s.rows_splittable(all);
  }
  s.trees.resize(cfg.n_trees);
  for (auto& t : s.trees) {
    t.nodes.assign(1, Node{});
    t.nodes[0].mu = init_mu;
    t.nodes[0].splittable = root_splittable;
    t.leaf_of.assign(n, 0);
  }
  s.allfit.assign(n, ybar);
  s.resid.assign(n, 0.0);
  if (kind == OutcomeKind::kProbit) s.update_latent();
}

BackfitSampler::~BackfitSampler() = default;
BackfitSampler::BackfitSampler(BackfitSampler&&) noexcept = default;
BackfitSampler& BackfitSampler::operator=(BackfitSampler&&) noexcept = default;

void BackfitSampler::iterate() {
  State& s = *state_;
  for (auto& t : s.trees) s.update_tree(t);
  if (s.kind == OutcomeKind::kContinuous) {
    s.update_sigma();
  } else {
    s.update_latent();
  }
  ++s.iter;
  s.update_dart();
}

Forest BackfitSampler::snapshot() const {
  const State& s = *state_;
  Forest f;
  f.kind = s.kind;
  f.offset = s.center;
  f.sigma = s.kind == OutcomeKind::kContinuous ? s.sigma * s.scale : 1.0;
  f.split_probs = s.dart.split_probs;
  f.trees.reserve(s.trees.size());
  for (const auto& t : s.trees) f.trees.push_back(s.compact(t));
  return f;
}

std::size_t BackfitSampler::iteration() const { return state_->iter; }

double BackfitSampler::sigma() const {
  return state_->kind == OutcomeKind::kContinuous ? state_->sigma * state_->scale : 1.0;
}

const std::vector<double>& BackfitSampler::split_probs() const { return state_->dart.split_probs; }

std::vector<std::size_t> BackfitSampler::split_counts() const {
  std::vector<std::size_t> counts(state_->p, 0);
  for (const auto& t : state_->trees) {
    for (const auto& nd : t.nodes) {
      if (nd.in_use && !nd.is_leaf()) ++counts[static_cast<std::size_t>(nd.var)];
    }
  }
  return counts;
}

bool BackfitSampler::cells_nonempty() const {
  const State& s = *state_;
  for (const auto& t : s.trees) {
    std::vector<std::size_t> hits(t.nodes.size(), 0);
    for (std::int32_t l : t.leaf_of) {
      if (!t.nodes[l].in_use || !t.nodes[l].is_leaf()) return false;
      ++hits[l];
    }
    for (std::size_t k = 0; k < t.nodes.size(); ++k) {
      if (t.nodes[k].in_use && t.nodes[k].is_leaf() && hits[k] == 0) return false;
    }
  }
  return true;
}

PosteriorEnsemble::PosteriorEnsemble(OutcomeKind kind, std::size_t predictors, std::vector<Forest> draws)
    : kind_(kind), predictors_(predictors), draws_(std::move(draws)) {
  for (const auto& f : draws_) {
    if (f.kind != kind_ || f.predictors() != predictors_) {
      throw ConfigError("ensemble draws disagree on kind or predictor count");
    }
    if (!draws_.empty() && f.trees.size() != draws_.front().trees.size()) {
      throw ConfigError("ensemble draws disagree on tree count");
    }
  }
}

double PosteriorEnsemble::predict(std::size_t d, std::span<const double> x) const {
  return bart::predict(draws_.at(d), x);
}

double PosteriorEnsemble::predict_mean(std::span<const double> x) const {
  CompensatedSum s;
  for (const auto& f : draws_) s.add(bart::predict(f, x));
  return s.value() / static_cast<double>(draws_.size());
}

std::vector<double> PosteriorEnsemble::split_proportions() const {
  std::vector<double> total(predictors_, 0.0);
  for (const auto& f : draws_) {
    std::vector<std::size_t> counts(predictors_, 0);
    for (const auto& t : f.trees) t.accumulate_split_counts(counts);
    std::size_t all = 0;
    for (std::size_t c : counts) all += c;
    if (all == 0) continue;
    for (std::size_t j = 0; j < predictors_; ++j) {
      total[j] += static_cast<double>(counts[j]) / static_cast<double>(all);
    }
  }
  for (double& v : total) v /= static_cast<double>(std::max<std::size_t>(draws_.size(), 1));
  return total;
}

namespace {

PosteriorEnsemble run_chain(std::span<const double> x, std::size_t n, std::size_t p, std::span<const double> y,
                            OutcomeKind kind, const BartConfig& cfg, const SamplerControls& controls) {
  BackfitSampler sampler(x, n, p, y, kind, cfg, controls);
  for (std::size_t i = 0; i < cfg.n_burn; ++i) sampler.iterate();
  std::vector<Forest> draws;
  draws.reserve(cfg.n_keep);
  for (std::size_t i = 0; i < cfg.n_keep; ++i) {
    sampler.iterate();
    draws.push_back(sampler.snapshot());
  }
  return PosteriorEnsemble(kind, p, std::move(draws));
}

}  // namespace

PosteriorEnsemble fit_continuous(std::span<const double> x, std::size_t n, std::size_t p,
                                 std::span<const double> y, const BartConfig& cfg,
                                 const SamplerControls& controls) {
  return run_chain(x, n, p, y, OutcomeKind::kContinuous, cfg, controls);
}

PosteriorEnsemble fit_probit(std::span<const double> x, std::size_t n, std::size_t p,
                             std::span<const double> r, const BartConfig& cfg,
                             const SamplerControls& controls) {
  return run_chain(x, n, p, r, OutcomeKind::kProbit, cfg, controls);
}

}  // namespace ppcm::bart
