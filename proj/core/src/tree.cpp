#include "ppcm/tree.hpp"

#include <cmath>
#include <string>

#include "ppcm/error.hpp"
#include "ppcm/numeric.hpp"

namespace ppcm::bart {

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ConfigError("tree must have at least one node");
  std::size_t internal = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) continue;
    ++internal;
    if (n.left <= static_cast<std::int32_t>(i) ||
        static_cast<std::size_t>(n.left) + 1 >= nodes_.size()) {
      throw ConfigError("tree node " + std::to_string(i) + " has invalid children");
    }
  }
  if (nodes_.size() != 2 * internal + 1) throw ConfigError("tree leaf count must equal internal count + 1");
}

Tree Tree::constant(double leaf_value) { return Tree({TreeNode{-1, -1, leaf_value}}); }

Tree Tree::stump(std::int32_t var, double cut, double left_value, double right_value) {
  return Tree({TreeNode{var, 1, cut}, TreeNode{-1, -1, left_value}, TreeNode{-1, -1, right_value}});
}

std::size_t Tree::leaf_count() const { return nodes_.size() - internal_count(); }

std::size_t Tree::internal_count() const {
  std::size_t c = 0;
  for (const auto& n : nodes_) c += n.is_leaf() ? 0 : 1;
  return c;
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].left + 1] = d[i] + 1;
    }
  }
  return best;
}

void Tree::accumulate_split_counts(std::span<std::size_t> counts) const {
  for (const auto& n : nodes_) {
    if (!n.is_leaf() && static_cast<std::size_t>(n.var) < counts.size()) ++counts[n.var];
  }
}

double Forest::latent(std::span<const double> x) const {
  double s = offset;
  for (const auto& t : trees) s += t.evaluate(x);
  return s;
}

void Forest::validate() const {
  if (trees.empty()) throw ConfigError("forest must contain at least one tree");
  if (kind == OutcomeKind::kContinuous && !(sigma > 0.0)) throw ConfigError("forest sigma must be positive");
  if (split_probs.empty()) throw ConfigError("forest must declare at least one predictor");
  const double total = compensated_sum(split_probs);
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("split probabilities must sum to 1");
  for (const auto& t : trees) {
    for (const auto& n : t.nodes()) {
      if (!n.is_leaf() && static_cast<std::size_t>(n.var) >= predictors()) {
        throw ConfigError("tree splits on predictor outside the forest's range");
      }
    }
  }
}

double predict(const Forest& forest, std::span<const double> x) {
  if (x.size() != forest.predictors()) {
    throw ConfigError("predict: expected " + std::to_string(forest.predictors()) +
                      " predictors, got " + std::to_string(x.size()));
  }
  const double z = forest.latent(x);
  return forest.kind == OutcomeKind::kProbit ? normal_cdf(z) : z;
}

}  // namespace ppcm::bart
