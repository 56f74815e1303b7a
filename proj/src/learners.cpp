#include "mistake_lab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mistake_lab/errors.hpp"

namespace mistake_lab {

namespace {

std::shared_ptr<DimensionEngine> engine_for(const WeightedClass& w, std::shared_ptr<DimensionEngine> engine) {
  return engine ? std::move(engine) : std::make_shared<DimensionEngine>(w);
}

std::string budgets_key(const WeightedClass& w) {
  std::string key;
  for (int b : w.budgets()) key += std::to_string(b) + ',';
  return key;
}

void check_label(int label) {
  if (label != 0 && label != 1) throw ProtocolError("labels must be 0 or 1");
}

}  // namespace

Rational optimal_prediction(const Rational& rl0, const Rational& rl1) {
  if (rl0 + 1 < rl1) return 1;
  if (rl1 + 1 < rl0) return 0;
  return (1 + rl1 - rl0) / 2;
}

// --- SOA -------------------------------------------------------------------

SoaLearner::SoaLearner(WeightedClass w, std::shared_ptr<DimensionEngine> engine)
    : version_(std::move(w)), engine_(engine_for(version_, std::move(engine))) {}

Rational SoaLearner::predict(const Instance& x) {
  if (version_.empty()) throw PreconditionError("soa: prediction requested on an empty version space");
  const Rational l0 = engine_->littlestone(version_.restrict_column(x.advice, 0)).value();
  const Rational l1 = engine_->littlestone(version_.restrict_column(x.advice, 1)).value();
  return l1 > l0 ? 1 : 0;
}

void SoaLearner::update(const Instance& x, int label) {
  check_label(label);
  version_ = version_.restrict_column(x.advice, label);
}

std::optional<std::string> SoaLearner::state_key() const { return budgets_key(version_); }

// --- RandSOA ---------------------------------------------------------------

RandSoaLearner::RandSoaLearner(WeightedClass w, std::shared_ptr<DimensionEngine> engine)
    : version_(std::move(w)), engine_(engine_for(version_, std::move(engine))) {}

Rational RandSoaLearner::predict(const Instance& x) {
  if (version_.empty()) throw PreconditionError("randsoa: prediction requested on an empty version space");
  const Rational rl0 = engine_->randomized_littlestone(version_.restrict_column(x.advice, 0)).value();
  const Rational rl1 = engine_->randomized_littlestone(version_.restrict_column(x.advice, 1)).value();
  return optimal_prediction(rl0, rl1);
}

void RandSoaLearner::update(const Instance& x, int label) {
  check_label(label);
  version_ = version_.restrict_column(x.advice, label);
}

std::optional<std::string> RandSoaLearner::state_key() const { return budgets_key(version_); }

// --- bounded RandSOA -------------------------------------------------------

BoundedRandSoaLearner::BoundedRandSoaLearner(WeightedClass w, int horizon, std::shared_ptr<DimensionEngine> engine)
    : version_(std::move(w)), remaining_(horizon), engine_(engine_for(version_, std::move(engine))) {
  if (horizon < 0) throw PreconditionError("bounded-randsoa: horizon must be non-negative");
}

Rational BoundedRandSoaLearner::predict(const Instance& x) {
  if (remaining_ < 1) throw PreconditionError("bounded-randsoa: horizon exhausted");
  if (version_.empty()) throw PreconditionError("bounded-randsoa: prediction requested on an empty version space");
  const int rest = remaining_ - 1;
  const Rational rl0 = engine_->bounded_randomized_littlestone(version_.restrict_column(x.advice, 0), rest).value();
  const Rational rl1 = engine_->bounded_randomized_littlestone(version_.restrict_column(x.advice, 1), rest).value();
  return optimal_prediction(rl0, rl1);
}

void BoundedRandSoaLearner::update(const Instance& x, int label) {
  check_label(label);
  if (remaining_ < 1) throw PreconditionError("bounded-randsoa: horizon exhausted");
  version_ = version_.restrict_column(x.advice, label);
  --remaining_;
}

std::optional<std::string> BoundedRandSoaLearner::state_key() const {
  return budgets_key(version_) + "|" + std::to_string(remaining_);
}

// --- FTL -------------------------------------------------------------------

FtlLearner::FtlLearner(std::size_t experts) : alive_(experts, true) {
  if (experts == 0) throw PreconditionError("ftl: needs at least one expert");
}

std::size_t FtlLearner::survivors() const { return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), true)); }

Rational FtlLearner::predict(const Instance& x) {
  if (x.advice.size() != alive_.size()) throw PreconditionError("ftl: advice vector has the wrong length");
  const std::size_t g = survivors();
  if (g == 0) throw ProtocolError("ftl: all experts eliminated (the sequence is not realizable)");
  std::size_t ones = 0;
  for (std::size_t i = 0; i < alive_.size(); ++i) {
    if (alive_[i] && x.advice[i] == 1) ++ones;
  }
  return ratio(static_cast<long>(ones), static_cast<long>(g));
}

void FtlLearner::update(const Instance& x, int label) {
  check_label(label);
  for (std::size_t i = 0; i < alive_.size(); ++i) {
    if (x.advice.at(i) != label) alive_[i] = false;
  }
}

std::optional<std::vector<Rational>> FtlLearner::expert_weights() const {
  const std::size_t g = survivors();
  std::vector<Rational> w(alive_.size(), 0);
  if (g == 0) return w;
  for (std::size_t i = 0; i < alive_.size(); ++i) {
    if (alive_[i]) w[i] = ratio(1, static_cast<long>(g));
  }
  return w;
}

std::optional<std::string> FtlLearner::state_key() const {
  std::string key;
  for (bool a : alive_) key += a ? '1' : '0';
  return key;
}

// --- constant --------------------------------------------------------------

ConstantLearner::ConstantLearner(Rational p) : p_(std::move(p)) {
  if (p_ < 0 || p_ > 1) throw PreconditionError("constant learner: p must lie in [0,1]");
}

// --- adaptive aggregator ---------------------------------------------------

Rational adaptive_prior(int k) { return Rational(1, static_cast<unsigned long>((k + 1) * (k + 2))); }

AdaptiveLearner::AdaptiveLearner(WeightedClass hypotheses, Options options, std::shared_ptr<DimensionEngine> engine)
    : hypotheses_(std::move(hypotheses)), options_(options), engine_(engine_for(hypotheses_, std::move(engine))) {
  if (hypotheses_.empty()) throw PreconditionError("squint: empty hypothesis class");
  if (options_.initial_K < 1 || options_.eta_grid < 1) throw PreconditionError("squint: bad options");
  for (int k = 0; k <= options_.initial_K; ++k) subs_.push_back(make_sub(k));
}

AdaptiveLearner::Sub AdaptiveLearner::make_sub(int k) const {
  std::vector<int> budgets = hypotheses_.budgets();
  for (auto& b : budgets) {
    if (b >= 0) b = k;
  }
  Sub s{RandSoaLearner(hypotheses_.with_budgets(budgets), engine_), {}, 0};
  s.stats.budget = k;
  return s;
}

Rational AdaptiveLearner::sub_predict(Sub& s, const Instance& x) const {
  // An exhausted sub-learner abstains with 1/2.
  if (!s.stats.alive) return Rational(1, 2);
  return s.learner.predict(x);
}

Rational AdaptiveLearner::predict(const Instance& x) {
  std::vector<double> log_w;
  std::vector<double> etas;
  std::vector<double> ps;
  double max_log = -INFINITY;
  for (auto& s : subs_) {
    s.last_p = sub_predict(s, x);
    const double prior = std::log(to_double(adaptive_prior(s.stats.budget)) / options_.eta_grid);
    for (int j = 1; j <= options_.eta_grid; ++j) {
      const double eta = std::ldexp(1.0, -j);
      const double lw = prior + eta * s.stats.regret - eta * eta * s.stats.variance;
      log_w.push_back(lw);
      etas.push_back(eta);
      ps.push_back(to_double(s.last_p));
      max_log = std::max(max_log, lw);
    }
  }
  double num = 0;
  double den = 0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    const double w = std::exp(log_w[i] - max_log) * etas[i];
    num += w * ps[i];
    den += w;
  }
  double p = std::clamp(num / den, 0.0, 1.0);
  pending_p_ = from_double(p);
  return *pending_p_;
}

void AdaptiveLearner::record(Sub& s, const Instance& x, int y, const Rational& p_k, const Rational& loss) {
  const Rational loss_k = y == 1 ? Rational(1 - p_k) : p_k;
  const double r = to_double(loss) - to_double(loss_k);
  s.stats.loss += loss_k;
  s.stats.regret += r;
  s.stats.variance += r * r;
  if (s.stats.alive) {
    s.learner.update(x, y);
    s.stats.alive = s.learner.alive();
  }
}

void AdaptiveLearner::update(const Instance& x, int label) {
  check_label(label);
  if (!pending_p_) pending_p_ = predict(x);
  const Rational loss = label == 1 ? Rational(1 - *pending_p_) : *pending_p_;
  total_loss_ += loss;
  for (auto& s : subs_) record(s, x, label, s.last_p, loss);
  history_.push_back({x, label, loss});
  pending_p_.reset();
  grow();
}

void AdaptiveLearner::grow() {
  auto best_alive = [&] {
    for (const auto& s : subs_) {
      if (s.stats.alive) return s.stats.budget;
    }
    return K() + 1;
  };
  while (best_alive() >= K()) {
    const int old_K = K();
    for (int k = old_K + 1; k <= 2 * old_K; ++k) {
      Sub s = make_sub(k);
      for (const auto& r : history_) {
        Rational p_k = sub_predict(s, r.x);
        record(s, r.x, r.y, p_k, r.loss);
      }
      subs_.push_back(std::move(s));
    }
  }
}

std::unique_ptr<Learner> AdaptiveLearner::clone() const { return std::make_unique<AdaptiveLearner>(*this); }

std::vector<AdaptiveLearner::SubLearnerStats> AdaptiveLearner::stats() const {
  std::vector<SubLearnerStats> out;
  for (const auto& s : subs_) out.push_back(s.stats);
  return out;
}

// --- factory ---------------------------------------------------------------

std::unique_ptr<Learner> make_learner(std::string_view choice, const WeightedClass& w, int horizon,
                                      std::shared_ptr<DimensionEngine> engine) {
  if (choice == "soa") return std::make_unique<SoaLearner>(w, engine);
  if (choice == "randsoa") return std::make_unique<RandSoaLearner>(w, engine);
  if (choice == "bounded-randsoa") return std::make_unique<BoundedRandSoaLearner>(w, horizon, engine);
  if (choice == "ftl") return std::make_unique<FtlLearner>(w.base_size());
  if (choice == "squint") return std::make_unique<AdaptiveLearner>(w, AdaptiveLearner::Options{}, engine);
  if (choice.rfind("constant:", 0) == 0) {
    try {
      return std::make_unique<ConstantLearner>(parse_rational(choice.substr(9)));
    } catch (const ParseError& e) {
      throw PreconditionError(std::string("bad constant learner: ") + e.what());
    }
  }
  throw PreconditionError("unknown learner '" + std::string(choice) +
                          "' (expected soa | randsoa | bounded-randsoa | ftl | squint | constant:<p>)");
}

// --- perceptron ------------------------------------------------------------

double PerceptronInstance::radius() const {
  double r = 0;
  for (const auto& x : vectors) {
    double s = 0;
    for (double v : x) s += v * v;
    r = std::max(r, std::sqrt(s));
  }
  return r;
}

PerceptronResult perceptron_run(const PerceptronInstance& instance) {
  PerceptronResult out;
  if (instance.vectors.size() != instance.labels.size()) throw PreconditionError("perceptron: labels/vectors mismatch");
  if (instance.vectors.empty()) return out;
  const std::size_t dim = instance.vectors.front().size();
  out.weights.assign(dim, 0.0);
  for (std::size_t i = 0; i < instance.vectors.size(); ++i) {
    const auto& x = instance.vectors[i];
    const int y = instance.labels[i];
    if (x.size() != dim) throw PreconditionError("perceptron: inconsistent dimensions");
    if (y != 1 && y != -1) throw PreconditionError("perceptron: labels must be +1 or -1");
    double dot = 0;
    for (std::size_t j = 0; j < dim; ++j) dot += out.weights[j] * x[j];
    if (y * dot <= 0) {
      ++out.mistakes;
      double sq = 0;
      for (std::size_t j = 0; j < dim; ++j) {
        out.weights[j] += y * x[j];
        sq += out.weights[j] * out.weights[j];
      }
      out.squared_norms.push_back(sq);
    }
  }
  return out;
}

double perceptron_bound(double B, double R, int k) {
  if (!(B > 0 && R > 0) || k < 0) throw PreconditionError("perceptron_bound: requires B, R > 0 and k >= 0");
  return B * B * R * R + 2.0 * k * (B * R + 1);
}

PerceptronInstance plant_perceptron_instance(int dimension, int points, int flips, std::uint64_t seed) {
  if (dimension < 1 || points < 0 || flips < 0 || flips > points) {
    throw PreconditionError("plant_perceptron_instance: bad arguments");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto unit = [&] {
    std::vector<double> v(dimension);
    double s = 0;
    do {
      s = 0;
      for (auto& c : v) {
        c = gauss(rng);
        s += c * c;
      }
    } while (s == 0);
    for (auto& c : v) c /= std::sqrt(s);
    return v;
  };
  const double margin = 0.2;
  std::vector<double> direction = unit();
  PerceptronInstance out;
  out.separator.resize(dimension);
  for (int j = 0; j < dimension; ++j) out.separator[j] = direction[j] / margin;
  out.margin_norm = 1 / margin;
  while (static_cast<int>(out.vectors.size()) < points) {
    std::vector<double> x = unit();
    double dot = 0;
    for (int j = 0; j < dimension; ++j) dot += x[j] * out.separator[j];
    if (std::abs(dot) < 1) continue;
    out.vectors.push_back(std::move(x));
    out.labels.push_back(dot > 0 ? 1 : -1);
  }
  std::vector<int> order(points);
  for (int i = 0; i < points; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < flips; ++i) out.labels[order[i]] = -out.labels[order[i]];
  out.flipped = flips;
  return out;
}

}  // namespace mistake_lab
