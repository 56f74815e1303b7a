#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mistake_lab/class_core.hpp"
#include "mistake_lab/rational.hpp"

namespace mistake_lab {

/// Weights on the two edges leaving an internal node.
struct EdgeWeights {
  Rational w0;
  Rational w1;
  friend bool operator==(const EdgeWeights&, const EdgeWeights&) = default;
};

/// Finite full binary tree with instance-labeled internal nodes; the left
/// (zero) edge carries label 0 and the right (one) edge label 1.
///
/// Nodes are immutable and reference counted, so identical subtrees may be
/// shared. Extracted optimal trees rely on this: their size is bounded by
/// (class states x horizon) rather than by the number of branches. An
/// internal node may carry edge weights, which is how subtree-determined
/// weight functions (the quasi-balanced ones) travel with shared trees.
class MistakeTree {
 public:
  MistakeTree() = default;  // a leaf

  static MistakeTree leaf() { return {}; }
  static MistakeTree node(std::string instance, MistakeTree zero, MistakeTree one,
                          std::optional<EdgeWeights> weights = std::nullopt);

  bool is_leaf() const { return node_ == nullptr; }
  const std::string& instance() const;
  const MistakeTree& zero() const;
  const MistakeTree& one() const;
  const MistakeTree& child(int label) const { return label == 0 ? zero() : one(); }
  const std::optional<EdgeWeights>& weights() const;

  /// Stable identity of the root node for memoization (nullptr for leaves).
  const void* identity() const { return node_.get(); }

 private:
  struct Node;
  std::shared_ptr<const Node> node_;
};

struct MistakeTree::Node {
  std::string instance;
  MistakeTree zero;
  MistakeTree one;
  std::optional<EdgeWeights> weights;
};

/// Root-to-node bit string ("" is the root, "01" is root->zero->one).
using Position = std::string;

/// Per-internal-node edge weights, addressed by position.
class WeightFunction {
 public:
  WeightFunction() = default;
  explicit WeightFunction(std::map<Position, EdgeWeights> weights);

  /// Throws PreconditionError unless w0, w1 are in [0,1] and sum to 1.
  void set(const Position& at, EdgeWeights w);
  const EdgeWeights& at(const Position& p) const;
  bool contains(const Position& p) const { return weights_.count(p) > 0; }
  const std::map<Position, EdgeWeights>& entries() const { return weights_; }

  friend bool operator==(const WeightFunction&, const WeightFunction&) = default;

 private:
  std::map<Position, EdgeWeights> weights_;
};

/// One root-to-leaf path as (instance, label) pairs.
using Branch = ExampleSequence;

/// E_T: expected length of a uniformly random branch.
Rational expected_branch_length(const MistakeTree& t);
int min_branch_length(const MistakeTree& t);
int depth(const MistakeTree& t);
/// Number of distinct node objects (shared subtrees counted once).
std::size_t distinct_nodes(const MistakeTree& t);

/// All branches in left-to-right order. Exponential on shared trees; meant
/// for small trees.
std::vector<Branch> branches(const MistakeTree& t);

/// Every subtree has E at least as large as both children's.
bool is_monotone(const MistakeTree& t);

struct QuasiBalance {
  std::optional<WeightFunction> weights;
  /// First node in preorder where the unique candidate weight leaves [0,1].
  std::optional<Position> violation;
  bool ok() const { return weights.has_value(); }
};

/// The unique weight function under which all branches weigh E_T/2, with
/// w(e0) = (1 + lambda_1 - lambda_0)/2 where lambda = E/2 of each child.
QuasiBalance quasi_balance_weights(const MistakeTree& t);

/// Same weights, embedded in the nodes of a structurally identical tree
/// (sharing preserved). Returns nullopt when the tree is not monotone.
std::optional<MistakeTree> annotate_quasi_balanced(const MistakeTree& t);

/// Weights from the map when present, otherwise from the node annotation.
/// Throws PreconditionError when neither is available.
EdgeWeights weights_at(const MistakeTree& node, const Position& at, const WeightFunction* wf);

/// Sum of weights along each branch (left-to-right order).
std::vector<Rational> branch_weights(const MistakeTree& t, const WeightFunction* wf = nullptr);

/// E over the uniform random branch of its weight; equals E_T/2 for every
/// valid weight function.
Rational expected_branch_weight(const MistakeTree& t, const WeightFunction* wf = nullptr);

/// Checks that every node reachable from the root has a weight (map or
/// annotation) in [0,1] summing to 1 and that all branch weights agree.
/// Returns the common branch weight.
std::optional<Rational> common_branch_weight(const MistakeTree& t, const WeightFunction* wf = nullptr);

MistakeTree truncate(const MistakeTree& t, int depth);

/// Uniform random branch: fair coin at every internal node. std::mt19937_64
/// seeded with `seed`.
Branch sample_branch(const MistakeTree& t, std::uint64_t seed);
int sample_branch_length(const MistakeTree& t, std::mt19937_64& rng);

/// Empirical tails of the random branch length X against
///   Pr[X < (1-eps) E_T] <= exp(-eps^2 E_T / 4)
///   Pr[X > (1+eps) E_T] <= exp(-eps^2 E_T / (4 (1+eps)))
/// with `tolerance` binomial standard errors of slack.
struct TailCheck {
  double eps = 0;
  double lower_freq = 0;
  double lower_bound = 0;
  double lower_stderr = 0;
  double upper_freq = 0;
  double upper_bound = 0;
  double upper_stderr = 0;
  bool ok = false;
};

struct ConcentrationReport {
  Rational expected_length;
  std::size_t samples = 0;
  double mean_length = 0;
  std::vector<TailCheck> tails;
  bool ok() const;
};

ConcentrationReport concentration_check(const MistakeTree& t, const std::vector<double>& eps, std::size_t samples,
                                        std::uint64_t seed, double tolerance = 3);

struct ShatterReport {
  bool shattered = true;
  std::vector<Branch> failing;  // capped at kMaxReported
  static constexpr std::size_t kMaxReported = 64;
};

/// Every branch realizable by w. Throws PreconditionError for instances
/// outside w's domain.
ShatterReport shatter_check(const MistakeTree& t, const WeightedClass& w);

/// Tree file format: {"leaf":true} or
/// {"instance":"p","zero":<tree>,"one":<tree>[,"w0":"7/8"]}.
std::string tree_to_json(const MistakeTree& t, const WeightFunction* wf = nullptr, int indent = -1);
/// Parses a tree; weight annotations become both node annotations and
/// entries of the returned weight function.
std::pair<MistakeTree, WeightFunction> tree_from_json(const std::string& text);

/// Convenience builders.
MistakeTree complete_tree(int depth, const std::string& instance = "x");
/// A node at each level whose one-child is a leaf, `length` internal nodes
/// nested on the zero side.
MistakeTree left_path(int length, const std::string& instance = "x");

}  // namespace mistake_lab
