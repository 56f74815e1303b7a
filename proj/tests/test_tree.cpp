#include <gtest/gtest.h>

#include <map>
#include <random>

#include "mistake_lab/dimension.hpp"
#include "mistake_lab/errors.hpp"
#include "mistake_lab/tree.hpp"
#include "support.hpp"

using namespace mistake_lab;
using testing_support::figure_non_monotone_tree;
using testing_support::figure_path_tree;

TEST(ExpectedBranchLength, Examples) {
  EXPECT_EQ(expected_branch_length(figure_path_tree()), Rational(7, 4));
  EXPECT_EQ(expected_branch_length(MistakeTree::leaf()), 0);
  for (int d = 0; d <= 6; ++d) EXPECT_EQ(expected_branch_length(complete_tree(d)), d);
}

TEST(MinBranchLength, Examples) {
  EXPECT_EQ(min_branch_length(figure_path_tree()), 1);
  EXPECT_EQ(min_branch_length(complete_tree(5)), 5);
  EXPECT_EQ(min_branch_length(MistakeTree::node("x", MistakeTree::leaf(), complete_tree(3))), 1);
  EXPECT_EQ(min_branch_length(MistakeTree::leaf()), 0);
}

TEST(Monotone, Examples) {
  EXPECT_TRUE(is_monotone(figure_path_tree()));
  EXPECT_FALSE(is_monotone(figure_non_monotone_tree()));
  EXPECT_TRUE(is_monotone(MistakeTree::leaf()));
}

TEST(QuasiBalance, PathTreeWeights) {
  auto qb = quasi_balance_weights(figure_path_tree());
  ASSERT_TRUE(qb.ok());
  // The deeper (zero) side always carries the smaller weight.
  EXPECT_EQ(qb.weights->at(""), (EdgeWeights{Rational(1, 8), Rational(7, 8)}));
  EXPECT_EQ(qb.weights->at("0"), (EdgeWeights{Rational(1, 4), Rational(3, 4)}));
  EXPECT_EQ(qb.weights->at("00"), (EdgeWeights{Rational(1, 2), Rational(1, 2)}));
  for (const auto& w : branch_weights(figure_path_tree(), &*qb.weights)) EXPECT_EQ(w, Rational(7, 8));
}

TEST(QuasiBalance, CompleteTreeIsUniform) {
  auto qb = quasi_balance_weights(complete_tree(4));
  ASSERT_TRUE(qb.ok());
  EXPECT_EQ(qb.weights->entries().size(), 15u);
  for (const auto& [pos, w] : qb.weights->entries()) EXPECT_EQ(w.w0, Rational(1, 2)) << pos;
}

TEST(QuasiBalance, NonMonotoneFailsAtRoot) {
  auto t = figure_non_monotone_tree();
  EXPECT_EQ(expected_branch_length(t), Rational(7, 2));
  EXPECT_EQ(min_branch_length(t), 2);
  auto qb = quasi_balance_weights(t);
  EXPECT_FALSE(qb.ok());
  ASSERT_TRUE(qb.violation.has_value());
  EXPECT_EQ(*qb.violation, "");
  EXPECT_FALSE(annotate_quasi_balanced(t).has_value());
}

TEST(QuasiBalance, AnnotationMatchesMap) {
  auto t = figure_path_tree();
  auto annotated = annotate_quasi_balanced(t);
  ASSERT_TRUE(annotated.has_value());
  EXPECT_EQ(common_branch_weight(*annotated), Rational(7, 8));
  EXPECT_EQ(expected_branch_weight(*annotated), Rational(7, 8));
}

TEST(Truncate, Examples) {
  EXPECT_EQ(depth(truncate(complete_tree(5), 2)), 2);
  EXPECT_EQ(expected_branch_length(truncate(complete_tree(5), 2)), 2);
  EXPECT_TRUE(truncate(figure_path_tree(), 0).is_leaf());
}

TEST(Truncate, SingleHypothesisPath) {
  auto w = testing_support::single_hypothesis(1);
  for (int d = 1; d <= 8; ++d) {
    auto t = extract_optimal_tree(w, d);
    Rational expect = 2 - 2 * pow2_inverse(static_cast<unsigned>(d));
    EXPECT_EQ(expected_branch_length(truncate(t, d)), expect) << d;
  }
}

TEST(SampleBranch, LeafIsEmpty) {
  for (std::uint64_t s = 0; s < 5; ++s) EXPECT_TRUE(sample_branch(MistakeTree::leaf(), s).empty());
}

TEST(SampleBranch, DeterministicGivenSeed) {
  auto t = complete_tree(6);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto a = sample_branch(t, s);
    auto b = sample_branch(t, s);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].label, b[i].label);
  }
}

TEST(SampleBranch, UniformOnCompleteTree) {
  auto t = complete_tree(3);
  std::map<std::string, int> counts;
  const int n = 100000;
  for (int s = 0; s < n; ++s) {
    std::string key;
    for (const auto& e : sample_branch(t, static_cast<std::uint64_t>(s))) key += static_cast<char>('0' + e.label);
    ++counts[key];
  }
  ASSERT_EQ(counts.size(), 8u);
  for (const auto& [k, c] : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.125, 0.01) << k;
}

TEST(SampleBranch, MeanLengthOnPathTree) {
  auto t = figure_path_tree();
  double sum = 0;
  const int n = 100000;
  for (int s = 0; s < n; ++s) sum += static_cast<double>(sample_branch(t, static_cast<std::uint64_t>(s)).size());
  EXPECT_NEAR(sum / n, 1.75, 0.02);
}

TEST(Shatter, TwoConstantsDepthOne) {
  auto w = testing_support::two_constants(0);
  EXPECT_TRUE(shatter_check(complete_tree(1), w).shattered);
  auto r = shatter_check(complete_tree(2), w);
  EXPECT_FALSE(r.shattered);
  EXPECT_EQ(r.failing.size(), 2u);  // 01 and 10 are unrealizable
}

TEST(Shatter, TwoExpertsCompleteTrees) {
  for (int k = 0; k <= 3; ++k) {
    auto w = universal_class(2, k);
    EXPECT_TRUE(shatter_check(complete_tree(2 * k + 1, "01"), w).shattered) << k;
    EXPECT_FALSE(shatter_check(complete_tree(2 * k + 2, "01"), w).shattered) << k;
  }
}

TEST(Shatter, UnknownInstance) {
  EXPECT_THROW(shatter_check(complete_tree(1, "zz"), universal_class(2, 0)), PreconditionError);
}

TEST(TreeJson, RoundTripWithWeights) {
  auto t = figure_path_tree();
  auto qb = quasi_balance_weights(t);
  auto text = tree_to_json(t, &*qb.weights);
  auto [back, wf] = tree_from_json(text);
  EXPECT_EQ(expected_branch_length(back), Rational(7, 4));
  EXPECT_EQ(wf, *qb.weights);
  EXPECT_EQ(tree_to_json(back, &wf), text);
}

TEST(TreeJson, Errors) {
  EXPECT_THROW(tree_from_json("{\"instance\":\"x\"}"), ParseError);
  EXPECT_THROW(tree_from_json("[]"), ParseError);
  EXPECT_THROW(tree_from_json(R"({"instance":"x","zero":{"leaf":true},"one":{"leaf":true},"w0":"3/2"})"),
               ParseError);
}

TEST(WeightFunction, RejectsInvalid) {
  WeightFunction wf;
  EXPECT_THROW(wf.set("", EdgeWeights{Rational(1, 2), Rational(1, 3)}), PreconditionError);
  EXPECT_THROW(wf.set("", EdgeWeights{Rational(-1), Rational(2)}), PreconditionError);
  EXPECT_THROW(weights_at(complete_tree(1), "", &wf), PreconditionError);
}

TEST(Concentration, ExtractedTreeTails) {
  auto w = universal_class(2, 3);
  DimensionEngine engine(w);
  auto t = engine.extract_optimal_tree(w, engine.horizon_for_slack(w, Rational(1, 64)));
  auto r = concentration_check(t, {0.1, 0.2, 0.3}, 20000, 5);
  EXPECT_TRUE(r.ok());
  EXPECT_NEAR(r.mean_length, to_double(r.expected_length), 0.1);
}

// Properties over random trees.

TEST(TreeProperties, RecursionAndExplicitSum) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = testing_support::random_tree(rng, {"a", "b"}, 7, 0.35);
    if (!t.is_leaf()) {
      EXPECT_EQ(expected_branch_length(t),
                1 + (expected_branch_length(t.zero()) + expected_branch_length(t.one())) / 2);
    }
    Rational sum = 0;
    for (const auto& b : branches(t)) sum += Rational(static_cast<long>(b.size())) * pow2_inverse(b.size());
    EXPECT_EQ(sum, expected_branch_length(t));
  }
}

TEST(TreeProperties, QuasiBalancedIffMonotone) {
  std::mt19937_64 rng(22);
  int monotone = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto t = testing_support::random_tree(rng, {"a"}, 7, 0.1 + 0.5 * (trial % 5) / 5.0);
    auto qb = quasi_balance_weights(t);
    EXPECT_EQ(qb.ok(), is_monotone(t));
    if (qb.ok()) {
      ++monotone;
      const Rational half = expected_branch_length(t) / 2;
      for (const auto& w : branch_weights(t, &*qb.weights)) EXPECT_EQ(w, half);
      EXPECT_LE(expected_branch_length(t), 2 * min_branch_length(t));
    }
  }
  EXPECT_GT(monotone, 20);
  EXPECT_LT(monotone, 280);
}

TEST(TreeProperties, RandomWeightsAverageToHalfE) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = testing_support::random_tree(rng, {"a"}, 6, 0.3);
    auto wf = testing_support::random_weights(rng, t);
    EXPECT_EQ(expected_branch_weight(t, &wf), expected_branch_length(t) / 2);
  }
}

TEST(TreeProperties, SharedSubtreesCountedOnce) {
  auto t = complete_tree(20);
  EXPECT_EQ(distinct_nodes(t), 21u);  // one node per level plus the shared leaf
  EXPECT_EQ(expected_branch_length(t), 20);
  EXPECT_TRUE(is_monotone(t));
}
