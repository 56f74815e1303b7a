#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "mistake_lab/class_core.hpp"
#include "mistake_lab/rational.hpp"
#include "mistake_lab/tree.hpp"

namespace mistake_lab {

/// Exact dimension value: a non-negative rational, or EMPTY (-1) for the
/// empty class.
class DimValue {
 public:
  static DimValue empty() { return DimValue(Rational(-1)); }
  explicit DimValue(Rational v) : value_(std::move(v)) {}

  bool is_empty() const { return value_ < 0; }
  /// The rational, with -1 standing for EMPTY.
  const Rational& value() const { return value_; }
  std::string render() const;

  friend bool operator==(const DimValue&, const DimValue&) = default;

 private:
  Rational value_;
};

/// DP state: one integer per slot. For explicit classes a slot is a base
/// member and holds its budget (-1 once dropped); for expert pools slot j
/// counts the experts with j mistakes left.
using ClassState = std::vector<int>;

namespace detail {

struct Move {
  ClassState zero;  // state after label 0
  ClassState one;   // state after label 1
  bool constant = false;
  Bits pattern;         // explicit classes: behavior over active members
  std::string witness;  // explicit classes: first point in domain order
};

struct StateHash {
  std::size_t operator()(const ClassState& s) const noexcept;
};

/// Enumerates the adversary's distinct moves out of a state.
class MoveSource {
 public:
  virtual ~MoveSource() = default;
  virtual bool is_empty(const ClassState& s) const = 0;
  virtual bool has_instances() const = 0;
  virtual ClassState decremented(const ClassState& s) const = 0;
  /// Ordered by pattern (lexicographic) for explicit classes.
  virtual std::vector<Move> moves(const ClassState& s) const = 0;
};

/// Memoized recursions shared by both state representations.
class Solver {
 public:
  explicit Solver(std::unique_ptr<MoveSource> source) : source_(std::move(source)) {}

  Rational randomized(const ClassState& s);
  int deterministic(const ClassState& s);
  Rational bounded_randomized(const ClassState& s, int horizon);
  MistakeTree extract(const ClassState& s, int horizon);

  std::size_t states_visited() const;
  /// 0 means unlimited; otherwise BudgetExceeded once this many memo
  /// entries exist.
  void set_max_states(std::size_t n) { max_states_ = n; }
  const MoveSource& source() const { return *source_; }

 private:
  const std::vector<Move>& moves_of(const ClassState& s);
  void charge() const;

  std::size_t max_states_ = 0;

  std::unique_ptr<MoveSource> source_;
  std::unordered_map<ClassState, std::vector<Move>, StateHash> moves_;
  std::unordered_map<ClassState, Rational, StateHash> rl_;
  std::unordered_map<ClassState, int, StateHash> l_;
  std::unordered_map<ClassState, Rational, StateHash> bounded_;  // key = state + horizon
  std::unordered_map<ClassState, MistakeTree, StateHash> trees_;
};

}  // namespace detail

/// Exact L, RL and their horizon-bounded versions for every class sharing
/// the base of the class it was built from. Holds its memo tables, so one
/// engine should serve all queries against one family of restricted classes
/// (learners share one engine across rounds). Not thread-safe.
class DimensionEngine {
 public:
  explicit DimensionEngine(const WeightedClass& root);

  DimValue littlestone(const WeightedClass& w);
  DimValue randomized_littlestone(const WeightedClass& w);
  DimValue bounded_randomized_littlestone(const WeightedClass& w, int horizon);
  /// min(horizon, L(w)); EMPTY for the empty class.
  DimValue bounded_littlestone(const WeightedClass& w, int horizon);

  /// Argmax tree of the bounded recursion, labeled with a witness of each
  /// chosen behavior and annotated with its quasi-balanced weights. Identical
  /// (state, remaining horizon) subtrees are shared. Ties go to the
  /// lexicographically smallest behavior pattern.
  MistakeTree extract_optimal_tree(const WeightedClass& w, int horizon);

  /// Smallest T >= 1 with RL(w,T) >= RL(w) - slack, by doubling then
  /// bisection.
  int horizon_for_slack(const WeightedClass& w, const Rational& slack);

  std::size_t states_visited() const { return solver_.states_visited(); }
  void set_max_states(std::size_t n) { solver_.set_max_states(n); }

 private:
  void check(const WeightedClass& w) const;

  std::shared_ptr<const ClassBase> base_;
  detail::Solver solver_;
};

/// One-shot helpers (fresh engine per call).
DimValue littlestone(const WeightedClass& w);
DimValue randomized_littlestone(const WeightedClass& w);
DimValue bounded_randomized_littlestone(const WeightedClass& w, int horizon);
DimValue bounded_littlestone(const WeightedClass& w, int horizon);
MistakeTree extract_optimal_tree(const WeightedClass& w, int horizon);
int horizon_for_slack(const WeightedClass& w, const Rational& slack);

/// Experts (the universal class U_n) in compressed form: the state is the
/// number of experts at each remaining budget, and the adversary's moves are
/// all per-level splits of who advises 1. {0,1}^n is never materialized.
class ExpertsEngine {
 public:
  ExpertsEngine();
  ExpertsEngine(const ExpertsEngine&) = delete;
  ExpertsEngine& operator=(const ExpertsEngine&) = delete;

  /// All n experts with budget k.
  static ClassState initial(int n, int k);
  /// Arbitrary per-expert budgets (negative entries are absent experts).
  static ClassState from_budgets(const std::vector<int>& budgets);

  DimValue littlestone(const ClassState& s);
  DimValue randomized_littlestone(const ClassState& s);
  DimValue bounded_randomized_littlestone(const ClassState& s, int horizon);

  DimValue littlestone(int n, int k) { return littlestone(initial(n, k)); }
  DimValue randomized_littlestone(int n, int k) { return randomized_littlestone(initial(n, k)); }

  std::size_t states_visited() const { return solver_.states_visited(); }
  void set_max_states(std::size_t n) { solver_.set_max_states(n); }

 private:
  detail::Solver solver_;
};

}  // namespace mistake_lab
