#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mistake_lab/class_core.hpp"
#include "mistake_lab/dimension.hpp"
#include "mistake_lab/learners.hpp"
#include "mistake_lab/rational.hpp"
#include "mistake_lab/tree.hpp"

namespace mistake_lab {

struct Round {
  Instance instance;
  Rational p;
  int y = 0;
  Rational loss;  // |y - p|
};

/// Post-hoc realizability check of a played sequence against the class the
/// adversary declared.
struct Certificate {
  std::optional<std::string> best_member;  // fewest mistakes, first on ties
  std::size_t mistakes = 0;
  bool realizable = false;
};

struct Transcript {
  std::vector<Round> rounds;
  Rational total = 0;
  Certificate certificate;
};

class Adversary {
 public:
  virtual ~Adversary() = default;

  virtual std::string name() const = 0;
  /// Next instance, or nullopt to end the game. Sees the learner only
  /// through its public interface (proper adversaries read expert_weights).
  virtual std::optional<Instance> next_instance(const Learner& learner, std::mt19937_64& rng) = 0;
  /// True label for the instance just emitted, given the learner's p.
  virtual int label(const Rational& p, std::mt19937_64& rng) = 0;

  /// The class the emitted sequence is claimed to be realizable by, indexed
  /// like Instance::advice. Negative budgets mark absent members.
  virtual const std::vector<std::string>& member_names() const = 0;
  virtual const std::vector<int>& member_budgets() const = 0;
};

/// Walks a mistake tree over the instances of a class.
class TreeAdversary final : public Adversary {
 public:
  enum class Mode { RandomBranch, Threshold };

  TreeAdversary(MistakeTree tree, WeightedClass w, Mode mode, std::optional<WeightFunction> wf = std::nullopt);

  std::string name() const override { return mode_ == Mode::RandomBranch ? "branch" : "threshold"; }
  std::optional<Instance> next_instance(const Learner& learner, std::mt19937_64& rng) override;
  int label(const Rational& p, std::mt19937_64& rng) override;
  const std::vector<std::string>& member_names() const override { return names_; }
  const std::vector<int>& member_budgets() const override { return budgets_; }

  const MistakeTree& tree() const { return root_; }

 private:
  MistakeTree root_;
  WeightedClass class_;
  Mode mode_;
  std::optional<WeightFunction> wf_;
  std::vector<std::string> names_;
  std::vector<int> budgets_;
  MistakeTree at_;
  Position position_;
};

/// Fair-coin walk down a tree shattered by w (checked).
std::unique_ptr<TreeAdversary> random_branch_adversary(const MistakeTree& t, const WeightedClass& w);

/// Label 0 when p >= w(e0) at the current node, else 1. Weights come from
/// wf when given, otherwise from the node annotations; every node must have
/// them (checked up front).
std::unique_ptr<TreeAdversary> threshold_adversary(const MistakeTree& t, const WeightedClass& w,
                                                   const WeightFunction* wf = nullptr);

struct OnlineOptimal {
  std::unique_ptr<TreeAdversary> adversary;
  int horizon = 0;
  Rational slack;
  /// E_T/2 of the played tree; at least RL(w) - slack.
  Rational guarantee;
};

/// Threshold play on the optimal tree of depth horizon_for_slack(w, slack).
OnlineOptimal online_optimal_adversary(const WeightedClass& w, const Rational& slack,
                                       std::shared_ptr<DimensionEngine> engine = nullptr);

/// The lower-bound game for proper learners on n experts with no mistakes
/// allowed: n-1 rounds, label 0 each time, and the experts advising 1 are
/// those already wrong plus the heaviest survivor (lowest index on ties).
/// Instances are the advice bit strings; {0,1}^n is never built.
class ProperAdversary final : public Adversary {
 public:
  explicit ProperAdversary(int n);

  std::string name() const override { return "proper"; }
  std::optional<Instance> next_instance(const Learner& learner, std::mt19937_64& rng) override;
  int label(const Rational& p, std::mt19937_64& rng) override;
  const std::vector<std::string>& member_names() const override { return names_; }
  const std::vector<int>& member_budgets() const override { return budgets_; }

 private:
  int n_;
  int round_ = 0;
  std::vector<bool> wrong_;
  std::vector<std::string> names_;
  std::vector<int> budgets_;
};

std::unique_ptr<ProperAdversary> proper_adversary(int n);

/// Runs the game. Throws ProtocolError naming the round when the learner
/// emits p outside [0,1].
Transcript play(Learner& learner, Adversary& adversary, std::size_t max_rounds, std::uint64_t seed);

/// Realizability certificate of a round list against a declared class.
Certificate certify(const std::vector<Round>& rounds, const std::vector<std::string>& names,
                    const std::vector<int>& budgets);

/// Exact expected total loss when the adversary walks a uniformly random
/// branch of t; the learner is cloned at every node so each branch replays
/// its own history.
Rational exact_expected_loss(const Learner& learner, const MistakeTree& t, const WeightedClass& w);

/// Largest cumulative loss any realizable adversary can force within
/// `horizon` rounds. Memoized on (class state, learner state key, rounds
/// left) when the learner provides a key. Throws BudgetExceeded after
/// `max_states` recursion nodes.
Rational worst_case_loss(const Learner& learner, const WeightedClass& w, int horizon,
                         std::size_t max_states = 2'000'000);

/// One JSON object per round, then a summary line.
std::string transcript_to_jsonl(const Transcript& t);

}  // namespace mistake_lab
