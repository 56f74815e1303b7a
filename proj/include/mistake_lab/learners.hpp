#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mistake_lab/class_core.hpp"
#include "mistake_lab/dimension.hpp"
#include "mistake_lab/rational.hpp"

namespace mistake_lab {

/// An online learner. Each round it sees an instance, emits the probability
/// p in [0,1] of predicting 1, and is then told the true label; its loss is
/// |y - p|. Learners are deterministic functions of the history.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual std::string name() const = 0;
  virtual Rational predict(const Instance& x) = 0;
  virtual void update(const Instance& x, int label) = 0;
  virtual std::unique_ptr<Learner> clone() const = 0;

  /// Proper learners commit to a mixture over the class members before the
  /// round's advice is revealed; others return nullopt.
  virtual std::optional<std::vector<Rational>> expert_weights() const { return std::nullopt; }

  /// A key that determines all future behaviour, when one exists. Used to
  /// memoize exhaustive audits.
  virtual std::optional<std::string> state_key() const { return std::nullopt; }
};

/// Deterministic weighted SOA: predicts the label whose restriction has the
/// larger Littlestone dimension, 0 on ties.
class SoaLearner final : public Learner {
 public:
  SoaLearner(WeightedClass w, std::shared_ptr<DimensionEngine> engine = nullptr);

  std::string name() const override { return "soa"; }
  Rational predict(const Instance& x) override;
  void update(const Instance& x, int label) override;
  std::unique_ptr<Learner> clone() const override { return std::make_unique<SoaLearner>(*this); }
  std::optional<std::string> state_key() const override;

  const WeightedClass& version_space() const { return version_; }

 private:
  WeightedClass version_;
  std::shared_ptr<DimensionEngine> engine_;
};

/// The round-optimal randomized prediction from the two restrictions' RL
/// values (EMPTY counts as -1):
///   |RL0 - RL1| <= 1  ->  p = (1 + RL1 - RL0)/2
///   RL0 + 1 < RL1     ->  p = 1
///   RL1 + 1 < RL0     ->  p = 0
Rational optimal_prediction(const Rational& rl0, const Rational& rl1);

/// Weighted randomized SOA over the version space.
class RandSoaLearner final : public Learner {
 public:
  RandSoaLearner(WeightedClass w, std::shared_ptr<DimensionEngine> engine = nullptr);

  std::string name() const override { return "randsoa"; }
  Rational predict(const Instance& x) override;
  void update(const Instance& x, int label) override;
  std::unique_ptr<Learner> clone() const override { return std::make_unique<RandSoaLearner>(*this); }
  std::optional<std::string> state_key() const override;

  const WeightedClass& version_space() const { return version_; }
  bool alive() const { return !version_.empty(); }

 private:
  WeightedClass version_;
  std::shared_ptr<DimensionEngine> engine_;
};

/// Randomized SOA for a known horizon, driven by RL(., remaining - 1).
class BoundedRandSoaLearner final : public Learner {
 public:
  BoundedRandSoaLearner(WeightedClass w, int horizon, std::shared_ptr<DimensionEngine> engine = nullptr);

  std::string name() const override { return "bounded-randsoa"; }
  Rational predict(const Instance& x) override;
  void update(const Instance& x, int label) override;
  std::unique_ptr<Learner> clone() const override { return std::make_unique<BoundedRandSoaLearner>(*this); }
  std::optional<std::string> state_key() const override;

  int remaining() const { return remaining_; }

 private:
  WeightedClass version_;
  int remaining_;
  std::shared_ptr<DimensionEngine> engine_;
};

/// Proper follow-the-leader: a uniformly random expert among those with no
/// mistakes so far.
class FtlLearner final : public Learner {
 public:
  explicit FtlLearner(std::size_t experts);

  std::string name() const override { return "ftl"; }
  Rational predict(const Instance& x) override;
  void update(const Instance& x, int label) override;
  std::unique_ptr<Learner> clone() const override { return std::make_unique<FtlLearner>(*this); }
  std::optional<std::vector<Rational>> expert_weights() const override;
  std::optional<std::string> state_key() const override;

  std::size_t survivors() const;

 private:
  std::vector<bool> alive_;
};

/// Predicts the same probability every round.
class ConstantLearner final : public Learner {
 public:
  explicit ConstantLearner(Rational p);

  std::string name() const override { return "constant:" + to_string(p_); }
  Rational predict(const Instance&) override { return p_; }
  void update(const Instance&, int) override {}
  std::unique_ptr<Learner> clone() const override { return std::make_unique<ConstantLearner>(*this); }
  std::optional<std::string> state_key() const override { return std::string(); }

 private:
  Rational p_;
};

/// Prior weight of the budget-k sub-learner, 1/((k+1)(k+2)).
Rational adaptive_prior(int k);

/// Adaptive aggregator over WeightedRandSOA sub-learners, one per budget
/// k = 0..K, with prior 1/((k+1)(k+2)). Second-order exponential weights
/// over a grid of learning rates eta_j = 2^-j per sub-learner: the weight of
/// (k, eta) is prior_k / J * exp(eta R_k - eta^2 V_k), where R_k is the
/// cumulative regret against sub-learner k and V_k the sum of squared
/// instantaneous regrets, and the prediction is the eta-weighted mean of the
/// sub-learner predictions. K starts at 1 and doubles once every budget
/// below K has been exhausted; new sub-learners are replayed on the history.
class AdaptiveLearner final : public Learner {
 public:
  struct Options {
    int initial_K = 1;
    int eta_grid = 10;
  };

  struct SubLearnerStats {
    int budget = 0;
    bool alive = true;
    Rational loss = 0;      // cumulative |y - p_k|
    double regret = 0;      // R_k
    double variance = 0;    // V_k
  };

  AdaptiveLearner(WeightedClass hypotheses, Options options, std::shared_ptr<DimensionEngine> engine = nullptr);
  explicit AdaptiveLearner(WeightedClass hypotheses) : AdaptiveLearner(std::move(hypotheses), Options{}) {}

  std::string name() const override { return "squint"; }
  Rational predict(const Instance& x) override;
  void update(const Instance& x, int label) override;
  std::unique_ptr<Learner> clone() const override;

  int K() const { return static_cast<int>(subs_.size()) - 1; }
  std::vector<SubLearnerStats> stats() const;
  const Rational& total_loss() const { return total_loss_; }

 private:
  struct Sub {
    RandSoaLearner learner;
    SubLearnerStats stats;
    Rational last_p;
  };
  struct Round {
    Instance x;
    int y;
    Rational loss;
  };

  Sub make_sub(int k) const;
  Rational sub_predict(Sub& s, const Instance& x) const;
  void record(Sub& s, const Instance& x, int y, const Rational& p_k, const Rational& loss);
  void grow();

  WeightedClass hypotheses_;
  Options options_;
  std::shared_ptr<DimensionEngine> engine_;
  std::vector<Sub> subs_;
  std::vector<Round> history_;
  Rational total_loss_ = 0;
  std::optional<Rational> pending_p_;
};

/// Builds a learner from its selection string:
/// soa | randsoa | bounded-randsoa | ftl | squint | constant:<p>.
/// `horizon` is only used by bounded-randsoa.
std::unique_ptr<Learner> make_learner(std::string_view choice, const WeightedClass& w, int horizon = 0,
                                      std::shared_ptr<DimensionEngine> engine = nullptr);

// ---------------------------------------------------------------------------
// Perceptron in the k-realizable setting.

struct PerceptronInstance {
  std::vector<std::vector<double>> vectors;
  std::vector<int> labels;  // +1 / -1
  double margin_norm = 1;   // B: norm of a separator with y<w,x> >= 1 on all but k points
  int flipped = 0;          // k
  std::vector<double> separator;

  /// R = max norm over the vectors, recomputed on every call.
  double radius() const;
};

struct PerceptronResult {
  std::size_t mistakes = 0;
  std::vector<double> weights;
  std::vector<double> squared_norms;  // ||w||^2 after each mistake
};

/// Mistake-driven updates w <- w + y x from w = 0; y<w,x> <= 0 counts as a
/// mistake.
PerceptronResult perceptron_run(const PerceptronInstance& instance);

/// B^2 R^2 + 2k(BR + 1).
double perceptron_bound(double B, double R, int k);

/// Random separator of norm B, `points` vectors with y<w*,x> >= 1, then
/// `flips` labels flipped.
PerceptronInstance plant_perceptron_instance(int dimension, int points, int flips, std::uint64_t seed);

}  // namespace mistake_lab
