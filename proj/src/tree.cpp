#include "mistake_lab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "mistake_lab/errors.hpp"

namespace mistake_lab {

using nlohmann::json;

MistakeTree MistakeTree::node(std::string instance, MistakeTree zero, MistakeTree one,
                              std::optional<EdgeWeights> weights) {
  MistakeTree t;
  t.node_ = std::make_shared<const Node>(Node{std::move(instance), std::move(zero), std::move(one), std::move(weights)});
  return t;
}

const std::string& MistakeTree::instance() const {
  if (!node_) throw PreconditionError("leaf has no instance");
  return node_->instance;
}

const MistakeTree& MistakeTree::zero() const {
  if (!node_) throw PreconditionError("leaf has no children");
  return node_->zero;
}

const MistakeTree& MistakeTree::one() const {
  if (!node_) throw PreconditionError("leaf has no children");
  return node_->one;
}

const std::optional<EdgeWeights>& MistakeTree::weights() const {
  static const std::optional<EdgeWeights> none;
  return node_ ? node_->weights : none;
}

namespace {

void check_edge_weights(const EdgeWeights& w, const std::string& where) {
  if (w.w0 < 0 || w.w0 > 1 || w.w1 < 0 || w.w1 > 1 || w.w0 + w.w1 != 1) {
    throw PreconditionError("invalid edge weights at '" + where + "': " + to_string(w.w0) + ", " + to_string(w.w1));
  }
}

/// Bottom-up fold over a possibly shared tree, one evaluation per node.
template <class T, class LeafFn, class NodeFn>
T fold(const MistakeTree& t, LeafFn leaf_value, NodeFn combine) {
  std::unordered_map<const void*, T> memo;
  std::function<T(const MistakeTree&)> go = [&](const MistakeTree& s) -> T {
    if (s.is_leaf()) return leaf_value();
    if (auto it = memo.find(s.identity()); it != memo.end()) return it->second;
    T v = combine(s, go(s.zero()), go(s.one()));
    memo.emplace(s.identity(), v);
    return v;
  };
  return go(t);
}

}  // namespace

WeightFunction::WeightFunction(std::map<Position, EdgeWeights> weights) {
  for (auto& [p, w] : weights) set(p, w);
}

void WeightFunction::set(const Position& at, EdgeWeights w) {
  check_edge_weights(w, at);
  weights_[at] = std::move(w);
}

const EdgeWeights& WeightFunction::at(const Position& p) const {
  auto it = weights_.find(p);
  if (it == weights_.end()) throw PreconditionError("no weights at position '" + p + "'");
  return it->second;
}

Rational expected_branch_length(const MistakeTree& t) {
  return fold<Rational>(
      t, [] { return Rational(0); },
      [](const MistakeTree&, const Rational& e0, const Rational& e1) { return Rational(1 + (e0 + e1) / 2); });
}

int min_branch_length(const MistakeTree& t) {
  return fold<int>(
      t, [] { return 0; }, [](const MistakeTree&, int a, int b) { return 1 + std::min(a, b); });
}

int depth(const MistakeTree& t) {
  return fold<int>(
      t, [] { return 0; }, [](const MistakeTree&, int a, int b) { return 1 + std::max(a, b); });
}

std::size_t distinct_nodes(const MistakeTree& t) {
  std::unordered_set<const void*> seen;
  std::vector<const MistakeTree*> stack{&t};
  std::size_t leaves = 0;
  while (!stack.empty()) {
    const MistakeTree* s = stack.back();
    stack.pop_back();
    if (s->is_leaf()) {
      ++leaves;
      continue;
    }
    if (!seen.insert(s->identity()).second) continue;
    stack.push_back(&s->zero());
    stack.push_back(&s->one());
  }
  return seen.size() + (leaves > 0 ? 1 : 0);
}

std::vector<Branch> branches(const MistakeTree& t) {
  std::vector<Branch> out;
  Branch prefix;
  std::function<void(const MistakeTree&)> go = [&](const MistakeTree& s) {
    if (s.is_leaf()) {
      out.push_back(prefix);
      return;
    }
    for (int y = 0; y < 2; ++y) {
      prefix.push_back({s.instance(), y});
      go(s.child(y));
      prefix.pop_back();
    }
  };
  go(t);
  return out;
}

bool is_monotone(const MistakeTree& t) {
  struct Acc {
    Rational e;
    bool monotone;
  };
  return fold<Acc>(
             t, [] { return Acc{0, true}; },
             [](const MistakeTree&, const Acc& a, const Acc& b) {
               Rational e = 1 + (a.e + b.e) / 2;
               bool weak = e >= a.e && e >= b.e;
               return Acc{e, a.monotone && b.monotone && weak};
             })
      .monotone;
}

namespace {

EdgeWeights candidate_weights(const Rational& e0, const Rational& e1) {
  // lambda = E/2, w0 = (1 + lambda1 - lambda0)/2
  Rational w0 = (1 + (e1 - e0) / 2) / 2;
  return {w0, 1 - w0};
}

bool in_unit(const EdgeWeights& w) { return w.w0 >= 0 && w.w0 <= 1; }

}  // namespace

QuasiBalance quasi_balance_weights(const MistakeTree& t) {
  std::unordered_map<const void*, Rational> e_memo;
  std::function<Rational(const MistakeTree&)> e_of = [&](const MistakeTree& s) -> Rational {
    if (s.is_leaf()) return 0;
    if (auto it = e_memo.find(s.identity()); it != e_memo.end()) return it->second;
    Rational e = 1 + (e_of(s.zero()) + e_of(s.one())) / 2;
    e_memo.emplace(s.identity(), e);
    return e;
  };
  QuasiBalance result;
  WeightFunction wf;
  Position pos;
  std::function<bool(const MistakeTree&)> go = [&](const MistakeTree& s) -> bool {
    if (s.is_leaf()) return true;
    EdgeWeights w = candidate_weights(e_of(s.zero()), e_of(s.one()));
    if (!in_unit(w)) {
      result.violation = pos;
      return false;
    }
    wf.set(pos, w);
    for (int y = 0; y < 2; ++y) {
      pos.push_back(static_cast<char>('0' + y));
      bool ok = go(s.child(y));
      pos.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  if (go(t)) result.weights = std::move(wf);
  return result;
}

std::optional<MistakeTree> annotate_quasi_balanced(const MistakeTree& t) {
  struct Acc {
    Rational e;
    std::optional<MistakeTree> tree;
  };
  std::unordered_map<const void*, Acc> memo;
  std::function<Acc(const MistakeTree&)> go = [&](const MistakeTree& s) -> Acc {
    if (s.is_leaf()) return {0, MistakeTree::leaf()};
    if (auto it = memo.find(s.identity()); it != memo.end()) return it->second;
    Acc a = go(s.zero());
    Acc b = go(s.one());
    Acc out{1 + (a.e + b.e) / 2, std::nullopt};
    EdgeWeights w = candidate_weights(a.e, b.e);
    if (a.tree && b.tree && in_unit(w)) out.tree = MistakeTree::node(s.instance(), *a.tree, *b.tree, w);
    memo.emplace(s.identity(), out);
    return out;
  };
  return go(t).tree;
}

EdgeWeights weights_at(const MistakeTree& node, const Position& at, const WeightFunction* wf) {
  if (wf != nullptr && wf->contains(at)) return wf->at(at);
  if (node.weights()) return *node.weights();
  throw PreconditionError("no weights available at position '" + at + "'");
}

std::vector<Rational> branch_weights(const MistakeTree& t, const WeightFunction* wf) {
  std::vector<Rational> out;
  Position pos;
  std::function<void(const MistakeTree&, const Rational&)> go = [&](const MistakeTree& s, const Rational& acc) {
    if (s.is_leaf()) {
      out.push_back(acc);
      return;
    }
    EdgeWeights w = weights_at(s, pos, wf);
    pos.push_back('0');
    go(s.zero(), acc + w.w0);
    pos.back() = '1';
    go(s.one(), acc + w.w1);
    pos.pop_back();
  };
  go(t, Rational(0));
  return out;
}

Rational expected_branch_weight(const MistakeTree& t, const WeightFunction* wf) {
  if (wf == nullptr) {
    return fold<Rational>(
        t, [] { return Rational(0); },
        [](const MistakeTree& s, const Rational& a, const Rational& b) {
          const auto& w = s.weights();
          if (!w) throw PreconditionError("tree node carries no weights");
          return Rational(((w->w0 + a) + (w->w1 + b)) / 2);
        });
  }
  Position pos;
  std::function<Rational(const MistakeTree&)> go = [&](const MistakeTree& s) -> Rational {
    if (s.is_leaf()) return 0;
    EdgeWeights w = weights_at(s, pos, wf);
    pos.push_back('0');
    Rational a = go(s.zero());
    pos.back() = '1';
    Rational b = go(s.one());
    pos.pop_back();
    return ((w.w0 + a) + (w.w1 + b)) / 2;
  };
  return go(t);
}

std::optional<Rational> common_branch_weight(const MistakeTree& t, const WeightFunction* wf) {
  if (wf == nullptr) {
    // Annotated trees: the weight below a node is subtree-determined.
    std::unordered_map<const void*, std::optional<Rational>> memo;
    std::function<std::optional<Rational>(const MistakeTree&)> go =
        [&](const MistakeTree& s) -> std::optional<Rational> {
      if (s.is_leaf()) return Rational(0);
      if (auto it = memo.find(s.identity()); it != memo.end()) return it->second;
      std::optional<Rational> out;
      const auto& w = s.weights();
      if (w && w->w0 >= 0 && w->w1 >= 0 && w->w0 + w->w1 == 1) {
        auto a = go(s.zero());
        auto b = go(s.one());
        if (a && b && w->w0 + *a == w->w1 + *b) out = w->w0 + *a;
      }
      memo.emplace(s.identity(), out);
      return out;
    };
    return go(t);
  }
  std::vector<Rational> ws;
  try {
    ws = branch_weights(t, wf);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
  for (const auto& w : ws) {
    if (w != ws.front()) return std::nullopt;
  }
  return ws.front();
}

MistakeTree truncate(const MistakeTree& t, int depth_limit) {
  std::unordered_map<const void*, std::unordered_map<int, MistakeTree>> memo;
  std::function<MistakeTree(const MistakeTree&, int)> go = [&](const MistakeTree& s, int d) -> MistakeTree {
    if (s.is_leaf() || d <= 0) return MistakeTree::leaf();
    auto& slot = memo[s.identity()];
    if (auto it = slot.find(d); it != slot.end()) return it->second;
    MistakeTree out = MistakeTree::node(s.instance(), go(s.zero(), d - 1), go(s.one(), d - 1));
    memo[s.identity()].emplace(d, out);
    return out;
  };
  return go(t, depth_limit);
}

Branch sample_branch(const MistakeTree& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Branch out;
  const MistakeTree* s = &t;
  while (!s->is_leaf()) {
    int y = static_cast<int>(rng() >> 63);
    out.push_back({s->instance(), y});
    s = &s->child(y);
  }
  return out;
}

int sample_branch_length(const MistakeTree& t, std::mt19937_64& rng) {
  int len = 0;
  const MistakeTree* s = &t;
  while (!s->is_leaf()) {
    s = &s->child(static_cast<int>(rng() >> 63));
    ++len;
  }
  return len;
}

bool ConcentrationReport::ok() const {
  return std::all_of(tails.begin(), tails.end(), [](const TailCheck& c) { return c.ok; });
}

ConcentrationReport concentration_check(const MistakeTree& t, const std::vector<double>& eps, std::size_t samples,
                                        std::uint64_t seed, double tolerance) {
  if (samples == 0) throw PreconditionError("concentration_check: need at least one sample");
  ConcentrationReport out;
  out.expected_length = expected_branch_length(t);
  out.samples = samples;
  std::mt19937_64 rng(seed);
  std::vector<int> lengths(samples);
  double sum = 0;
  for (auto& x : lengths) {
    x = sample_branch_length(t, rng);
    sum += x;
  }
  out.mean_length = sum / samples;
  const double e_t = to_double(out.expected_length);
  const double n = static_cast<double>(samples);
  for (double e : eps) {
    if (!(e > 0)) throw PreconditionError("concentration_check: eps must be positive");
    TailCheck c;
    c.eps = e;
    std::size_t below = 0;
    std::size_t above = 0;
    for (int x : lengths) {
      if (x < (1 - e) * e_t) ++below;
      if (x > (1 + e) * e_t) ++above;
    }
    c.lower_freq = below / n;
    c.upper_freq = above / n;
    c.lower_stderr = std::sqrt(c.lower_freq * (1 - c.lower_freq) / n);
    c.upper_stderr = std::sqrt(c.upper_freq * (1 - c.upper_freq) / n);
    c.lower_bound = std::exp(-e * e * e_t / 4);
    c.upper_bound = std::exp(-e * e * e_t / (4 * (1 + e)));
    c.ok = c.lower_freq <= c.lower_bound + tolerance * c.lower_stderr &&
           c.upper_freq <= c.upper_bound + tolerance * c.upper_stderr;
    out.tails.push_back(c);
  }
  return out;
}

ShatterReport shatter_check(const MistakeTree& t, const WeightedClass& w) {
  // Realizability of every branch below a node only depends on (node, class
  // state), so whole shared subtrees are cleared at once; branches are
  // enumerated only under failing subtrees, and each reported branch is
  // confirmed with min_mistakes on the root class.
  std::map<std::pair<const void*, std::vector<int>>, bool> memo;
  std::function<bool(const MistakeTree&, const WeightedClass&)> ok = [&](const MistakeTree& s,
                                                                         const WeightedClass& v) -> bool {
    if (v.empty()) return false;
    if (s.is_leaf()) return true;
    auto key = std::make_pair(s.identity(), v.budgets());
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const std::size_t p = v.domain().index_of(s.instance());
    bool r = ok(s.zero(), v.restrict_column(v.column(p), 0)) && ok(s.one(), v.restrict_column(v.column(p), 1));
    memo.emplace(std::move(key), r);
    return r;
  };
  ShatterReport report;
  Branch prefix;
  std::function<void(const MistakeTree&, const WeightedClass&)> collect = [&](const MistakeTree& s,
                                                                             const WeightedClass& v) {
    if (report.failing.size() >= ShatterReport::kMaxReported) return;
    if (!v.empty() && ok(s, v)) return;
    if (s.is_leaf()) {
      if (!min_mistakes(prefix, w).realizable) report.failing.push_back(prefix);
      return;
    }
    const std::size_t p = v.domain().index_of(s.instance());
    for (int y = 0; y < 2; ++y) {
      prefix.push_back({s.instance(), y});
      collect(s.child(y), v.restrict_column(v.column(p), y));
      prefix.pop_back();
    }
  };
  // validate instances up front so unknown ids raise even on empty classes
  fold<int>(
      t, [] { return 0; },
      [&](const MistakeTree& s, int, int) {
        w.domain().index_of(s.instance());
        return 0;
      });
  report.shattered = ok(t, w);
  if (!report.shattered) collect(t, w);
  return report;
}

namespace {

json to_json_node(const MistakeTree& s, const WeightFunction* wf, Position& pos) {
  if (s.is_leaf()) return json{{"leaf", true}};
  json j;
  j["instance"] = s.instance();
  std::optional<EdgeWeights> w;
  if (wf != nullptr && wf->contains(pos)) {
    w = wf->at(pos);
  } else if (s.weights()) {
    w = *s.weights();
  }
  if (w) j["w0"] = to_string(w->w0);
  pos.push_back('0');
  j["zero"] = to_json_node(s.zero(), wf, pos);
  pos.back() = '1';
  j["one"] = to_json_node(s.one(), wf, pos);
  pos.pop_back();
  return j;
}

MistakeTree from_json_node(const json& j, WeightFunction& wf, Position& pos) {
  const std::string where = pos.empty() ? "<root>" : pos;
  if (!j.is_object()) throw ParseError("tree node " + where + ": expected an object");
  if (j.contains("leaf")) {
    if (!j["leaf"].is_boolean() || !j["leaf"].get<bool>()) throw ParseError("tree node " + where + ": bad leaf flag");
    return MistakeTree::leaf();
  }
  if (!j.contains("instance") || !j["instance"].is_string()) {
    throw ParseError("tree node " + where + ".instance: expected a string");
  }
  if (!j.contains("zero") || !j.contains("one")) throw ParseError("tree node " + where + ": missing zero/one child");
  std::optional<EdgeWeights> w;
  if (j.contains("w0")) {
    if (!j["w0"].is_string()) throw ParseError("tree node " + where + ".w0: expected a rational string");
    Rational w0 = parse_rational(j["w0"].get<std::string>());
    w = EdgeWeights{w0, 1 - w0};
    try {
      wf.set(pos, *w);
    } catch (const PreconditionError& e) {
      throw ParseError(e.what());
    }
  }
  pos.push_back('0');
  MistakeTree zero = from_json_node(j["zero"], wf, pos);
  pos.back() = '1';
  MistakeTree one = from_json_node(j["one"], wf, pos);
  pos.pop_back();
  return MistakeTree::node(j["instance"].get<std::string>(), std::move(zero), std::move(one), w);
}

}  // namespace

std::string tree_to_json(const MistakeTree& t, const WeightFunction* wf, int indent) {
  Position pos;
  return to_json_node(t, wf, pos).dump(indent);
}

std::pair<MistakeTree, WeightFunction> tree_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("tree document: ") + e.what());
  }
  WeightFunction wf;
  Position pos;
  MistakeTree t = from_json_node(doc, wf, pos);
  return {std::move(t), std::move(wf)};
}

MistakeTree complete_tree(int d, const std::string& instance) {
  MistakeTree t = MistakeTree::leaf();
  for (int i = 0; i < d; ++i) t = MistakeTree::node(instance, t, t);
  return t;
}

MistakeTree left_path(int length, const std::string& instance) {
  MistakeTree t = MistakeTree::leaf();
  for (int i = 0; i < length; ++i) t = MistakeTree::node(instance, t, MistakeTree::leaf());
  return t;
}

}  // namespace mistake_lab
