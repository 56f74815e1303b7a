#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mistake_lab/class_core.hpp"
#include "mistake_lab/rational.hpp"
#include "mistake_lab/tree.hpp"

namespace testing_support {

using mistake_lab::Bits;
using mistake_lab::MistakeTree;
using mistake_lab::Rational;
using mistake_lab::WeightedClass;

/// Class with `members` random hypotheses over `points` points p0.., budgets
/// uniform in [0, max_budget].
WeightedClass random_class(std::mt19937_64& rng, int members, int points, int max_budget);

/// Random tree over the given instance names. `leaf_bias` in (0,1) is the
/// chance that a non-root node below depth 1 is a leaf.
MistakeTree random_tree(std::mt19937_64& rng, const std::vector<std::string>& instances, int max_depth,
                        double leaf_bias);

/// Random tree shattered by w: every node picks a point on which both
/// restrictions are non-empty.
MistakeTree random_shattered_tree(std::mt19937_64& rng, const WeightedClass& w, int max_depth, double leaf_bias);

/// A random valid weight function on every internal position of t.
mistake_lab::WeightFunction random_weights(std::mt19937_64& rng, const MistakeTree& t);

/// The fixture classes from the tree figures.
MistakeTree figure_path_tree();        // three nodes nested on the zero side, E = 7/4
MistakeTree figure_non_monotone_tree();  // complete depth-4 left subtree, depth-1 right subtree
WeightedClass single_hypothesis(int budget);  // domain {x}, h(x) = 0
WeightedClass two_constants(int budget);      // domain {x}, all-0 and all-1

/// sqrt(RL * ln(max(e, (k+1) * ln(max(e, RL))))): the adaptive learner's
/// excess-loss shape with both logarithms floored at 1.
double adaptive_shape(const Rational& rl, int k_star);

/// Reads a numeric field from tests/golden/<file>; nullopt when absent.
std::optional<double> golden_value(const std::string& file, const std::string& key);
void write_golden_value(const std::string& file, const std::string& key, double value);

/// Brute-force reference implementation, independent of the engine: its own
/// label matrix, restriction and realizability code.
class Oracle {
 public:
  explicit Oracle(const WeightedClass& w);

  struct State {
    std::vector<int> budgets;  // -1 = dropped
    bool empty() const;
    friend bool operator<(const State& a, const State& b) { return a.budgets < b.budgets; }
  };

  State initial() const { return {budgets_}; }
  State restrict(const State& s, std::size_t point, int label) const;
  bool realizable(const std::vector<std::pair<std::size_t, int>>& branch) const;

  /// Every (E_T, m_T) pair of a tree of depth <= depth shattered by the
  /// state, leaf included.
  const std::set<std::pair<Rational, int>>& values(const State& s, int depth);

  /// max E_T / 2 and max m_T over the same trees.
  Rational best_half_expected(int depth);
  int best_min_branch(int depth);

  std::size_t points() const { return rows_.empty() ? 0 : rows_.front().size(); }

 private:
  std::vector<Bits> rows_;
  std::vector<int> budgets_;
  std::map<std::pair<State, int>, std::set<std::pair<Rational, int>>> memo_;
};

/// Plain trees over point indices, for explicit enumeration.
struct PlainTree {
  int point = -1;  // -1 = leaf
  std::vector<PlainTree> kids;
};
std::vector<PlainTree> all_trees(int points, int depth);
MistakeTree to_mistake_tree(const PlainTree& t, const mistake_lab::Domain& domain);
Rational plain_expected(const PlainTree& t);
int plain_min_branch(const PlainTree& t);
bool plain_shattered(const PlainTree& t, const Oracle& oracle);

}  // namespace testing_support
