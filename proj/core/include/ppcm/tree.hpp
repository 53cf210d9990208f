#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ppcm::bart {

enum class OutcomeKind { kContinuous, kProbit };

// Flat node record. Internal nodes have var >= 0 and route x[var] < value to
// `left` and everything else to `left + 1`; leaves have var == -1 and carry
// their parameter in `value`.
struct TreeNode {
  std::int32_t var = -1;
  std::int32_t left = -1;
  double value = 0.0;

  bool is_leaf() const { return var < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Immutable decision tree in evaluation order (children stored adjacently).
class Tree {
 public:
  Tree() : nodes_{TreeNode{}} {}
  explicit Tree(std::vector<TreeNode> nodes);

  static Tree constant(double leaf_value);
  // One split on `var` at `cut`: x[var] < cut -> left_value, else right_value.
  static Tree stump(std::int32_t var, double cut, double left_value, double right_value);

  double evaluate(std::span<const double> x) const {
    std::int32_t i = 0;
    while (nodes_[i].var >= 0) {
      const TreeNode& n = nodes_[i];
      i = n.left + (x[n.var] < n.value ? 0 : 1);
    }
    return nodes_[i].value;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t internal_count() const;
  std::size_t depth() const;
  // Adds the number of internal nodes splitting on each variable.
  void accumulate_split_counts(std::span<std::size_t> counts) const;

  bool operator==(const Tree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

// One posterior draw of a sum-of-trees model.
struct Forest {
  std::vector<Tree> trees;
  OutcomeKind kind = OutcomeKind::kContinuous;
  double sigma = 1.0;               // residual SD (continuous), 1 for probit
  std::vector<double> split_probs;  // one weight per predictor
  double offset = 0.0;

  std::size_t predictors() const { return split_probs.size(); }
  // offset + sum of leaf values reached by x.
  double latent(std::span<const double> x) const;
  // Validates dimensions and invariants; throws ConfigError.
  void validate() const;

  bool operator==(const Forest&) const = default;
};

// Continuous forests return the latent mean; probit forests return Phi(latent).
double predict(const Forest& forest, std::span<const double> x);

}  // namespace ppcm::bart
