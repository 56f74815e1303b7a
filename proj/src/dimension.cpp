#include "mistake_lab/dimension.hpp"

#include <algorithm>
#include <map>

#include "mistake_lab/errors.hpp"

namespace mistake_lab {

std::string DimValue::render() const {
  if (is_empty()) return "EMPTY (-1)";
  return mistake_lab::render(value_);
}

namespace detail {

std::size_t StateHash::operator()(const ClassState& s) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (int v : s) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

const std::vector<Move>& Solver::moves_of(const ClassState& s) {
  auto it = moves_.find(s);
  if (it == moves_.end()) it = moves_.emplace(s, source_->moves(s)).first;
  return it->second;
}

std::size_t Solver::states_visited() const { return rl_.size() + l_.size() + bounded_.size(); }

void Solver::charge() const {
  if (max_states_ != 0 && states_visited() >= max_states_) {
    throw BudgetExceeded("state budget of " + std::to_string(max_states_) + " exhausted");
  }
}

Rational Solver::randomized(const ClassState& s) {
  if (source_->is_empty(s)) return -1;
  if (auto it = rl_.find(s); it != rl_.end()) return it->second;
  Rational best = 0;
  for (const auto& m : moves_of(s)) {
    Rational v;
    if (m.constant) {
      // Self-loop v = (1 + v + RL(dec))/2 resolves to 1 + RL(dec).
      v = 1 + randomized(source_->decremented(s));
    } else {
      v = (1 + randomized(m.zero) + randomized(m.one)) / 2;
    }
    if (v > best) best = v;
  }
  charge();
  rl_.emplace(s, best);
  return best;
}

int Solver::deterministic(const ClassState& s) {
  if (source_->is_empty(s)) return -1;
  if (auto it = l_.find(s); it != l_.end()) return it->second;
  int best = 0;
  for (const auto& m : moves_of(s)) {
    int v = m.constant ? 1 + deterministic(source_->decremented(s))
                       : 1 + std::min(deterministic(m.zero), deterministic(m.one));
    best = std::max(best, v);
  }
  charge();
  l_.emplace(s, best);
  return best;
}

Rational Solver::bounded_randomized(const ClassState& s, int horizon) {
  if (source_->is_empty(s)) return -1;
  if (horizon <= 0) return 0;
  ClassState key = s;
  key.push_back(horizon);
  if (auto it = bounded_.find(key); it != bounded_.end()) return it->second;
  Rational best = 0;
  for (const auto& m : moves_of(s)) {
    if (source_->is_empty(m.zero) || source_->is_empty(m.one)) continue;
    Rational v = (1 + bounded_randomized(m.zero, horizon - 1) + bounded_randomized(m.one, horizon - 1)) / 2;
    if (v > best) best = v;
  }
  charge();
  bounded_.emplace(std::move(key), best);
  return best;
}

MistakeTree Solver::extract(const ClassState& s, int horizon) {
  if (source_->is_empty(s)) throw PreconditionError("cannot extract a tree for the empty class");
  if (horizon <= 0) return MistakeTree::leaf();
  ClassState key = s;
  key.push_back(horizon);
  if (auto it = trees_.find(key); it != trees_.end()) return it->second;
  const Rational target = bounded_randomized(s, horizon);
  MistakeTree out;
  for (const auto& m : moves_of(s)) {
    if (source_->is_empty(m.zero) || source_->is_empty(m.one)) continue;
    const Rational lambda0 = bounded_randomized(m.zero, horizon - 1);
    const Rational lambda1 = bounded_randomized(m.one, horizon - 1);
    if ((1 + lambda0 + lambda1) / 2 != target) continue;
    const Rational w0 = (1 + lambda1 - lambda0) / 2;
    out = MistakeTree::node(m.witness, extract(m.zero, horizon - 1), extract(m.one, horizon - 1),
                            EdgeWeights{w0, 1 - w0});
    break;
  }
  trees_.emplace(std::move(key), out);
  return out;
}

}  // namespace detail

namespace {

/// Moves of an explicit class: distinct behaviors over the active members.
class ExplicitMoves final : public detail::MoveSource {
 public:
  explicit ExplicitMoves(std::shared_ptr<const ClassBase> base) : base_(std::move(base)) {
    std::map<Bits, std::size_t> seen;
    for (std::size_t p = 0; p < base_->domain.size(); ++p) {
      if (seen.emplace(base_->columns[p], p).second) distinct_points_.push_back(p);
    }
  }

  bool is_empty(const ClassState& s) const override {
    return std::none_of(s.begin(), s.end(), [](int b) { return b >= 0; });
  }

  bool has_instances() const override { return !base_->domain.empty(); }

  ClassState decremented(const ClassState& s) const override {
    ClassState out = s;
    for (auto& b : out) {
      if (b >= 0) --b;
    }
    return out;
  }

  std::vector<detail::Move> moves(const ClassState& s) const override {
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= 0) act.push_back(i);
    }
    std::map<Bits, std::size_t> by_pattern;  // pattern -> first witness
    for (auto p : distinct_points_) {
      const Bits& col = base_->columns[p];
      Bits pattern(act.size());
      for (std::size_t j = 0; j < act.size(); ++j) pattern[j] = col[act[j]];
      by_pattern.emplace(std::move(pattern), p);
    }
    std::vector<detail::Move> out;
    out.reserve(by_pattern.size());
    for (auto& [pattern, p] : by_pattern) {
      detail::Move m;
      m.zero = s;
      m.one = s;
      const Bits& col = base_->columns[p];
      for (auto i : act) {
        if (col[i] != 0) --m.zero[i];
        if (col[i] != 1) --m.one[i];
      }
      m.constant = m.zero == s || m.one == s;
      m.pattern = pattern;
      m.witness = base_->domain.point(p);
      out.push_back(std::move(m));
    }
    return out;
  }

 private:
  std::shared_ptr<const ClassBase> base_;
  std::vector<std::size_t> distinct_points_;  // first point of each distinct full column
};

/// Moves of an expert pool: every split of each budget level into experts
/// advising 0 and experts advising 1.
class ExpertMoves final : public detail::MoveSource {
 public:
  bool is_empty(const ClassState& s) const override {
    return std::all_of(s.begin(), s.end(), [](int c) { return c == 0; });
  }

  bool has_instances() const override { return true; }

  ClassState decremented(const ClassState& s) const override {
    ClassState out(s.size(), 0);
    for (std::size_t j = 1; j < s.size(); ++j) out[j - 1] = s[j];
    return out;
  }

  std::vector<detail::Move> moves(const ClassState& s) const override {
    std::vector<detail::Move> out;
    ClassState ones(s.size(), 0);  // experts at each level advising 1
    while (true) {
      detail::Move m;
      m.zero = after_label(s, ones, /*wrong_are_ones=*/true);
      m.one = after_label(s, ones, /*wrong_are_ones=*/false);
      m.constant = m.zero == s || m.one == s;
      out.push_back(std::move(m));
      std::size_t j = 0;
      while (j < s.size() && ones[j] == s[j]) ones[j++] = 0;
      if (j == s.size()) break;
      ++ones[j];
    }
    return out;
  }

 private:
  static ClassState after_label(const ClassState& s, const ClassState& ones, bool wrong_are_ones) {
    ClassState out(s.size(), 0);
    for (std::size_t j = 0; j < s.size(); ++j) {
      const int wrong = wrong_are_ones ? ones[j] : s[j] - ones[j];
      out[j] += s[j] - wrong;
      if (j > 0) out[j - 1] += wrong;
    }
    return out;
  }
};

}  // namespace

DimensionEngine::DimensionEngine(const WeightedClass& root)
    : base_(root.base()), solver_(std::make_unique<ExplicitMoves>(root.base())) {}

void DimensionEngine::check(const WeightedClass& w) const {
  if (w.base() != base_) throw PreconditionError("class does not belong to this engine's family");
}

DimValue DimensionEngine::littlestone(const WeightedClass& w) {
  check(w);
  if (w.empty()) return DimValue::empty();
  return DimValue(Rational(solver_.deterministic(w.budgets())));
}

DimValue DimensionEngine::randomized_littlestone(const WeightedClass& w) {
  check(w);
  if (w.empty()) return DimValue::empty();
  return DimValue(solver_.randomized(w.budgets()));
}

DimValue DimensionEngine::bounded_randomized_littlestone(const WeightedClass& w, int horizon) {
  check(w);
  if (horizon < 0) throw PreconditionError("horizon must be non-negative");
  if (w.empty()) return DimValue::empty();
  return DimValue(solver_.bounded_randomized(w.budgets(), horizon));
}

DimValue DimensionEngine::bounded_littlestone(const WeightedClass& w, int horizon) {
  if (horizon < 0) throw PreconditionError("horizon must be non-negative");
  DimValue l = littlestone(w);
  if (l.is_empty()) return l;
  return DimValue(std::min(l.value(), Rational(horizon)));
}

MistakeTree DimensionEngine::extract_optimal_tree(const WeightedClass& w, int horizon) {
  check(w);
  if (w.empty()) throw PreconditionError("extract_optimal_tree: empty class");
  if (horizon < 0) throw PreconditionError("horizon must be non-negative");
  return solver_.extract(w.budgets(), horizon);
}

int DimensionEngine::horizon_for_slack(const WeightedClass& w, const Rational& slack) {
  check(w);
  if (slack <= 0) throw PreconditionError("slack must be positive");
  if (w.empty()) throw PreconditionError("horizon_for_slack: empty class");
  constexpr int kMaxHorizon = 1 << 12;
  const Rational target = solver_.randomized(w.budgets()) - slack;
  auto good = [&](int t) { return solver_.bounded_randomized(w.budgets(), t) >= target; };
  int hi = 1;
  while (!good(hi)) {
    if (hi >= kMaxHorizon) throw BudgetExceeded("horizon_for_slack: no horizon up to 4096 reaches the target");
    hi *= 2;
  }
  int lo = hi / 2;  // good(lo) is false unless lo == 0
  if (lo == 0) return hi;
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    (good(mid) ? hi : lo) = mid;
  }
  return hi;
}

DimValue littlestone(const WeightedClass& w) { return DimensionEngine(w).littlestone(w); }
DimValue randomized_littlestone(const WeightedClass& w) { return DimensionEngine(w).randomized_littlestone(w); }
DimValue bounded_randomized_littlestone(const WeightedClass& w, int horizon) {
  return DimensionEngine(w).bounded_randomized_littlestone(w, horizon);
}
DimValue bounded_littlestone(const WeightedClass& w, int horizon) {
  return DimensionEngine(w).bounded_littlestone(w, horizon);
}
MistakeTree extract_optimal_tree(const WeightedClass& w, int horizon) {
  return DimensionEngine(w).extract_optimal_tree(w, horizon);
}
int horizon_for_slack(const WeightedClass& w, const Rational& slack) {
  return DimensionEngine(w).horizon_for_slack(w, slack);
}

ExpertsEngine::ExpertsEngine() : solver_(std::make_unique<ExpertMoves>()) {}

ClassState ExpertsEngine::initial(int n, int k) {
  if (n < 1) throw PreconditionError("experts: n must be positive");
  if (k < 0) throw PreconditionError("experts: k must be non-negative");
  ClassState s(static_cast<std::size_t>(k) + 1, 0);
  s[k] = n;
  return s;
}

ClassState ExpertsEngine::from_budgets(const std::vector<int>& budgets) {
  int top = 0;
  for (int b : budgets) top = std::max(top, b);
  ClassState s(static_cast<std::size_t>(top) + 1, 0);
  for (int b : budgets) {
    if (b >= 0) ++s[b];
  }
  return s;
}

DimValue ExpertsEngine::littlestone(const ClassState& s) {
  if (solver_.source().is_empty(s)) return DimValue::empty();
  return DimValue(Rational(solver_.deterministic(s)));
}

DimValue ExpertsEngine::randomized_littlestone(const ClassState& s) {
  if (solver_.source().is_empty(s)) return DimValue::empty();
  return DimValue(solver_.randomized(s));
}

DimValue ExpertsEngine::bounded_randomized_littlestone(const ClassState& s, int horizon) {
  if (solver_.source().is_empty(s)) return DimValue::empty();
  return DimValue(solver_.bounded_randomized(s, horizon));
}

}  // namespace mistake_lab
