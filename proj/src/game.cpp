#include "mistake_lab/game.hpp"

#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "mistake_lab/errors.hpp"

namespace mistake_lab {

namespace {

std::vector<std::string> base_names(const WeightedClass& w) { return w.base()->names; }

Rational abs_diff(int y, const Rational& p) { return y == 1 ? Rational(1 - p) : p; }

}  // namespace

// --- tree walkers ----------------------------------------------------------

TreeAdversary::TreeAdversary(MistakeTree tree, WeightedClass w, Mode mode, std::optional<WeightFunction> wf)
    : root_(std::move(tree)),
      class_(std::move(w)),
      mode_(mode),
      wf_(std::move(wf)),
      names_(base_names(class_)),
      budgets_(class_.budgets()),
      at_(root_) {}

std::optional<Instance> TreeAdversary::next_instance(const Learner&, std::mt19937_64&) {
  if (at_.is_leaf()) return std::nullopt;
  return class_.instance(at_.instance());
}

int TreeAdversary::label(const Rational& p, std::mt19937_64& rng) {
  if (at_.is_leaf()) throw ProtocolError("adversary: label requested after the walk ended");
  int y = 0;
  if (mode_ == Mode::RandomBranch) {
    y = static_cast<int>(rng() >> 63);
  } else {
    const EdgeWeights w = weights_at(at_, position_, wf_ ? &*wf_ : nullptr);
    y = p >= w.w0 ? 0 : 1;
  }
  MistakeTree next = at_.child(y);
  at_ = std::move(next);
  position_.push_back(static_cast<char>('0' + y));
  return y;
}

namespace {

void require_shattered(const MistakeTree& t, const WeightedClass& w) {
  const ShatterReport report = shatter_check(t, w);
  if (!report.shattered) {
    std::string msg = "adversary: tree is not shattered by the class";
    if (!report.failing.empty()) {
      msg += "; first unrealizable branch:";
      for (const auto& e : report.failing.front()) msg += " (" + e.point + "," + std::to_string(e.label) + ")";
    }
    throw PreconditionError(msg);
  }
}

}  // namespace

std::unique_ptr<TreeAdversary> random_branch_adversary(const MistakeTree& t, const WeightedClass& w) {
  require_shattered(t, w);
  return std::make_unique<TreeAdversary>(t, w, TreeAdversary::Mode::RandomBranch);
}

std::unique_ptr<TreeAdversary> threshold_adversary(const MistakeTree& t, const WeightedClass& w,
                                                   const WeightFunction* wf) {
  require_shattered(t, w);
  // Throws when some reachable node has no weights.
  expected_branch_weight(t, wf);
  std::optional<WeightFunction> copy;
  if (wf != nullptr) copy = *wf;
  return std::make_unique<TreeAdversary>(t, w, TreeAdversary::Mode::Threshold, std::move(copy));
}

OnlineOptimal online_optimal_adversary(const WeightedClass& w, const Rational& slack,
                                       std::shared_ptr<DimensionEngine> engine) {
  if (w.empty()) throw PreconditionError("online_optimal_adversary: empty class");
  if (slack <= 0) throw PreconditionError("online_optimal_adversary: slack must be positive");
  if (!engine) engine = std::make_shared<DimensionEngine>(w);
  OnlineOptimal out;
  out.slack = slack;
  out.horizon = engine->horizon_for_slack(w, slack);
  MistakeTree tree = engine->extract_optimal_tree(w, out.horizon);
  out.guarantee = expected_branch_length(tree) / 2;
  out.adversary = threshold_adversary(tree, w);
  return out;
}

// --- proper game -----------------------------------------------------------

ProperAdversary::ProperAdversary(int n) : n_(n) {
  if (n < 1) throw PreconditionError("proper_adversary: n must be positive");
  wrong_.assign(n, false);
  budgets_.assign(n, 0);
  for (int i = 1; i <= n; ++i) names_.push_back("e" + std::to_string(i));
}

std::optional<Instance> ProperAdversary::next_instance(const Learner& learner, std::mt19937_64&) {
  if (round_ >= n_ - 1) return std::nullopt;
  const auto weights = learner.expert_weights();
  if (!weights) {
    throw PreconditionError("proper_adversary: learner '" + learner.name() + "' is not proper (no expert weights)");
  }
  if (weights->size() != static_cast<std::size_t>(n_)) {
    throw PreconditionError("proper_adversary: learner weights do not cover " + std::to_string(n_) + " experts");
  }
  int heaviest = -1;
  for (int i = 0; i < n_; ++i) {
    if (wrong_[i]) continue;
    if (heaviest < 0 || (*weights)[i] > (*weights)[heaviest]) heaviest = i;
  }
  Instance x;
  x.advice.assign(n_, 0);
  for (int i = 0; i < n_; ++i) {
    if (wrong_[i]) x.advice[i] = 1;
  }
  x.advice[heaviest] = 1;
  wrong_[heaviest] = true;
  for (auto b : x.advice) x.id.push_back(static_cast<char>('0' + b));
  ++round_;
  return x;
}

int ProperAdversary::label(const Rational&, std::mt19937_64&) { return 0; }

std::unique_ptr<ProperAdversary> proper_adversary(int n) { return std::make_unique<ProperAdversary>(n); }

// --- play ------------------------------------------------------------------

Certificate certify(const std::vector<Round>& rounds, const std::vector<std::string>& names,
                    const std::vector<int>& budgets) {
  Certificate out;
  for (std::size_t m = 0; m < budgets.size(); ++m) {
    if (budgets[m] < 0) continue;
    std::size_t mistakes = 0;
    for (const auto& r : rounds) {
      if (r.instance.advice.at(m) != r.y) ++mistakes;
    }
    if (!out.best_member || mistakes < out.mistakes) {
      out.best_member = names.at(m);
      out.mistakes = mistakes;
    }
    if (mistakes <= static_cast<std::size_t>(budgets[m])) out.realizable = true;
  }
  return out;
}

Transcript play(Learner& learner, Adversary& adversary, std::size_t max_rounds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Transcript out;
  for (std::size_t i = 0; i < max_rounds; ++i) {
    std::optional<Instance> x = adversary.next_instance(learner, rng);
    if (!x) break;
    Rational p = learner.predict(*x);
    if (p < 0 || p > 1) {
      throw ProtocolError("round " + std::to_string(i) + ": learner '" + learner.name() + "' predicted " +
                          to_string(p) + ", outside [0,1]");
    }
    const int y = adversary.label(p, rng);
    Rational loss = abs_diff(y, p);
    learner.update(*x, y);
    out.total += loss;
    out.rounds.push_back({std::move(*x), std::move(p), y, std::move(loss)});
  }
  out.certificate = certify(out.rounds, adversary.member_names(), adversary.member_budgets());
  return out;
}

// --- exact evaluation ------------------------------------------------------

Rational exact_expected_loss(const Learner& learner, const MistakeTree& t, const WeightedClass& w) {
  if (t.is_leaf()) return 0;
  const Instance x = w.instance(t.instance());
  std::unique_ptr<Learner> probe = learner.clone();
  const Rational p = probe->predict(x);
  Rational total = 0;
  for (int y = 0; y <= 1; ++y) {
    std::unique_ptr<Learner> next = probe->clone();
    next->update(x, y);
    total += abs_diff(y, p) + exact_expected_loss(*next, t.child(y), w);
  }
  return total / 2;
}

namespace {

struct Audit {
  std::vector<Instance> instances;  // one per distinct full column
  std::size_t max_states;
  std::size_t visited = 0;
  std::map<std::tuple<std::vector<int>, std::string, int>, Rational> memo;

  Rational run(const Learner& learner, const WeightedClass& w, int rounds) {
    if (rounds == 0 || w.empty()) return 0;
    const auto key_part = learner.state_key();
    std::tuple<std::vector<int>, std::string, int> key;
    if (key_part) {
      key = {w.budgets(), *key_part, rounds};
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
    }
    if (++visited > max_states) {
      throw BudgetExceeded("worst_case_loss: more than " + std::to_string(max_states) + " states");
    }
    Rational best = 0;
    for (const auto& x : instances) {
      std::unique_ptr<Learner> probe;
      Rational p;
      for (int y = 0; y <= 1; ++y) {
        WeightedClass child = w.restrict_column(x.advice, y);
        if (child.empty()) continue;
        if (!probe) {
          probe = learner.clone();
          p = probe->predict(x);
        }
        std::unique_ptr<Learner> next = probe->clone();
        next->update(x, y);
        Rational v = abs_diff(y, p) + run(*next, child, rounds - 1);
        if (v > best) best = v;
      }
    }
    if (key_part) memo.emplace(std::move(key), best);
    return best;
  }
};

}  // namespace

Rational worst_case_loss(const Learner& learner, const WeightedClass& w, int horizon, std::size_t max_states) {
  if (horizon < 0) throw PreconditionError("worst_case_loss: horizon must be non-negative");
  Audit audit;
  audit.max_states = max_states;
  std::set<Bits> seen;
  for (std::size_t i = 0; i < w.domain().size(); ++i) {
    if (seen.insert(w.column(i)).second) audit.instances.push_back(w.instance(i));
  }
  return audit.run(learner, w, horizon);
}

// --- output ----------------------------------------------------------------

std::string transcript_to_jsonl(const Transcript& t) {
  std::string out;
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const Round& r = t.rounds[i];
    nlohmann::ordered_json line;
    line["round"] = i;
    line["instance"] = r.instance.id;
    line["p"] = to_string(r.p);
    line["y"] = r.y;
    line["loss"] = to_string(r.loss);
    out += line.dump() + "\n";
  }
  nlohmann::ordered_json summary;
  summary["summary"] = true;
  summary["rounds"] = t.rounds.size();
  summary["total"] = to_string(t.total);
  summary["total_decimal"] = to_decimal(t.total);
  summary["best_member"] = t.certificate.best_member ? nlohmann::json(*t.certificate.best_member) : nlohmann::json();
  summary["best_member_mistakes"] = t.certificate.mistakes;
  summary["realizable"] = t.certificate.realizable;
  out += summary.dump() + "\n";
  return out;
}

}  // namespace mistake_lab
