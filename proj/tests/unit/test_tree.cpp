#include <gtest/gtest.h>

#include <vector>

#include "ppcm/error.hpp"
#include "ppcm/tree.hpp"

using namespace ppcm::bart;

TEST(Predict, SumOfRootLeaves) {
  Forest f;
  f.split_probs = {1.0};
  for (int k = 0; k < 10; ++k) f.trees.push_back(Tree::constant(0.2));
  const std::vector<double> x{0.0};
  EXPECT_NEAR(predict(f, x), 2.0, 1e-12);
}

TEST(Predict, ProbitLatentZeroIsHalf) {
  Forest f;
  f.kind = OutcomeKind::kProbit;
  f.split_probs = {0.5, 0.5};
  f.trees = {Tree::stump(0, 0.0, -0.3, 0.3), Tree::stump(1, 0.0, 0.3, -0.3)};
  const std::vector<double> x{1.0, 1.0};
  EXPECT_DOUBLE_EQ(predict(f, x), 0.5);
}

TEST(Predict, SingleDecisionRule) {
  Forest f;
  f.split_probs = {1.0};
  f.trees = {Tree::stump(0, 0.5, -1.0, 1.0)};
  EXPECT_DOUBLE_EQ(predict(f, std::vector<double>{0.2}), -1.0);
  EXPECT_DOUBLE_EQ(predict(f, std::vector<double>{0.5}), 1.0);
}

TEST(Predict, DimensionMismatch) {
  Forest f;
  f.split_probs = {0.5, 0.5};
  f.trees = {Tree::constant(1.0)};
  EXPECT_THROW(predict(f, std::vector<double>{1.0}), ppcm::ConfigError);
}

TEST(Tree, StructureCounts) {
  // root splits x0 < 0; left child splits x1 < 1
  Tree t({TreeNode{0, 1, 0.0}, TreeNode{1, 3, 1.0}, TreeNode{-1, -1, 5.0}, TreeNode{-1, -1, 1.0},
          TreeNode{-1, -1, 2.0}});
  EXPECT_EQ(t.leaf_count(), 3u);
  EXPECT_EQ(t.internal_count(), 2u);
  EXPECT_EQ(t.leaf_count(), t.internal_count() + 1);
  EXPECT_EQ(t.depth(), 2u);
  EXPECT_DOUBLE_EQ(t.evaluate(std::vector<double>{-1.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(t.evaluate(std::vector<double>{-1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(t.evaluate(std::vector<double>{1.0, 0.0}), 5.0);
  std::vector<std::size_t> counts(2, 0);
  t.accumulate_split_counts(counts);
  EXPECT_EQ(counts, (std::vector<std::size_t>{1, 1}));
}

TEST(Tree, RejectsMalformedNodes) {
  EXPECT_THROW(Tree({TreeNode{0, 1, 0.0}, TreeNode{-1, -1, 0.0}}), ppcm::ConfigError);
  EXPECT_THROW(Tree({TreeNode{0, 5, 0.0}, TreeNode{}, TreeNode{}}), ppcm::ConfigError);
}

TEST(Forest, ValidateChecksSimplexAndSigma) {
  Forest f;
  f.trees = {Tree::constant(0.0)};
  f.split_probs = {0.5, 0.25};
  EXPECT_THROW(f.validate(), ppcm::ConfigError);
  f.split_probs = {0.5, 0.5};
  f.sigma = 0.0;
  EXPECT_THROW(f.validate(), ppcm::ConfigError);
  f.sigma = 1.0;
  EXPECT_NO_THROW(f.validate());
}
