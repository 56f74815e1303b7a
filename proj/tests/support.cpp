#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace testing_support {

using mistake_lab::Domain;
using mistake_lab::EdgeWeights;
using mistake_lab::Member;
using mistake_lab::WeightFunction;

WeightedClass random_class(std::mt19937_64& rng, int members, int points, int max_budget) {
  std::vector<std::string> ids;
  for (int p = 0; p < points; ++p) ids.push_back("p" + std::to_string(p));
  std::vector<Member> ms;
  for (int m = 0; m < members; ++m) {
    Member h;
    h.name = "h" + std::to_string(m);
    for (int p = 0; p < points; ++p) h.labels.push_back(static_cast<std::uint8_t>(rng() & 1));
    h.budget = static_cast<int>(rng() % static_cast<unsigned>(max_budget + 1));
    ms.push_back(std::move(h));
  }
  return WeightedClass::from_members(Domain(ids), std::move(ms));
}

MistakeTree random_tree(std::mt19937_64& rng, const std::vector<std::string>& instances, int max_depth,
                        double leaf_bias) {
  std::uniform_real_distribution<double> unit(0, 1);
  std::function<MistakeTree(int)> go = [&](int level) {
    if (level >= max_depth || (level > 0 && unit(rng) < leaf_bias)) return MistakeTree::leaf();
    const auto& id = instances[rng() % instances.size()];
    MistakeTree zero = go(level + 1);
    MistakeTree one = go(level + 1);
    return MistakeTree::node(id, zero, one);
  };
  return go(0);
}

MistakeTree random_shattered_tree(std::mt19937_64& rng, const WeightedClass& w, int max_depth, double leaf_bias) {
  std::uniform_real_distribution<double> unit(0, 1);
  std::function<MistakeTree(const WeightedClass&, int)> go = [&](const WeightedClass& s, int level) {
    if (level >= max_depth || (level > 0 && unit(rng) < leaf_bias)) return MistakeTree::leaf();
    std::vector<std::size_t> options;
    for (std::size_t p = 0; p < s.domain().size(); ++p) {
      if (!s.restrict_column(s.column(p), 0).empty() && !s.restrict_column(s.column(p), 1).empty()) {
        options.push_back(p);
      }
    }
    if (options.empty()) return MistakeTree::leaf();
    const std::size_t p = options[rng() % options.size()];
    MistakeTree zero = go(s.restrict_column(s.column(p), 0), level + 1);
    MistakeTree one = go(s.restrict_column(s.column(p), 1), level + 1);
    return MistakeTree::node(s.domain().point(p), zero, one);
  };
  return go(w, 0);
}

WeightFunction random_weights(std::mt19937_64& rng, const MistakeTree& t) {
  WeightFunction wf;
  std::function<void(const MistakeTree&, const std::string&)> go = [&](const MistakeTree& s, const std::string& pos) {
    if (s.is_leaf()) return;
    Rational w0(static_cast<long>(rng() % 17), 16UL);
    w0.canonicalize();
    if (w0 > 1) w0 = 1;
    wf.set(pos, EdgeWeights{w0, 1 - w0});
    go(s.zero(), pos + "0");
    go(s.one(), pos + "1");
  };
  go(t, "");
  return wf;
}

MistakeTree figure_path_tree() { return mistake_lab::left_path(3, "x"); }

MistakeTree figure_non_monotone_tree() {
  return MistakeTree::node("x", mistake_lab::complete_tree(4, "x"), mistake_lab::complete_tree(1, "x"));
}

WeightedClass single_hypothesis(int budget) {
  return WeightedClass::from_members(Domain({"x"}), {Member{"h", {0}, budget}});
}

WeightedClass two_constants(int budget) {
  return WeightedClass::from_members(Domain({"x"}), {Member{"zero", {0}, budget}, Member{"one", {1}, budget}});
}

double adaptive_shape(const Rational& rl, int k_star) {
  const double e = std::exp(1.0);
  const double r = mistake_lab::to_double(rl);
  const double inner = (k_star + 1) * std::log(std::max(e, r));
  return std::sqrt(r * std::log(std::max(e, inner)));
}

namespace {

std::string golden_path(const std::string& file) { return std::string(GOLDEN_DIR) + "/" + file; }

nlohmann::json read_golden(const std::string& file) {
  std::ifstream in(golden_path(file));
  if (!in) return nlohmann::json::object();
  std::stringstream buf;
  buf << in.rdbuf();
  return nlohmann::json::parse(buf.str());
}

}  // namespace

std::optional<double> golden_value(const std::string& file, const std::string& key) {
  auto j = read_golden(file);
  if (!j.contains(key)) return std::nullopt;
  return j[key].get<double>();
}

void write_golden_value(const std::string& file, const std::string& key, double value) {
  auto j = read_golden(file);
  j[key] = value;
  std::ofstream out(golden_path(file));
  out << j.dump(2) << "\n";
}

// --- oracle ----------------------------------------------------------------

bool Oracle::State::empty() const {
  return std::none_of(budgets.begin(), budgets.end(), [](int b) { return b >= 0; });
}

Oracle::Oracle(const WeightedClass& w) {
  for (const auto& m : w.members()) {
    rows_.push_back(m.labels);
    budgets_.push_back(m.budget);
  }
}

Oracle::State Oracle::restrict(const State& s, std::size_t point, int label) const {
  State out = s;
  for (std::size_t m = 0; m < rows_.size(); ++m) {
    if (out.budgets[m] < 0) continue;
    if (rows_[m][point] != label) out.budgets[m] -= 1;  // 0 -> -1 drops the member
  }
  return out;
}

bool Oracle::realizable(const std::vector<std::pair<std::size_t, int>>& branch) const {
  for (std::size_t m = 0; m < rows_.size(); ++m) {
    int mistakes = 0;
    for (const auto& [p, y] : branch) mistakes += rows_[m][p] != y;
    if (mistakes <= budgets_[m]) return true;
  }
  return false;
}

const std::set<std::pair<Rational, int>>& Oracle::values(const State& s, int depth) {
  auto key = std::make_pair(s, depth);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  std::set<std::pair<Rational, int>> out;
  out.insert({Rational(0), 0});
  if (depth > 0) {
    for (std::size_t p = 0; p < points(); ++p) {
      State a = restrict(s, p, 0);
      State b = restrict(s, p, 1);
      if (a.empty() || b.empty()) continue;
      const auto left = values(a, depth - 1);
      const auto& right = values(b, depth - 1);
      for (const auto& [e0, m0] : left) {
        for (const auto& [e1, m1] : right) {
          Rational e = 1 + (e0 + e1) / 2;
          e.canonicalize();
          out.insert({e, 1 + std::min(m0, m1)});
        }
      }
    }
  }
  return memo_.emplace(key, std::move(out)).first->second;
}

Rational Oracle::best_half_expected(int depth) {
  Rational best = -1;
  if (initial().empty()) return best;
  for (const auto& [e, m] : values(initial(), depth)) best = std::max(best, Rational(e / 2));
  return best;
}

int Oracle::best_min_branch(int depth) {
  if (initial().empty()) return -1;
  int best = 0;
  for (const auto& [e, m] : values(initial(), depth)) best = std::max(best, m);
  return best;
}

// --- plain trees -----------------------------------------------------------

std::vector<PlainTree> all_trees(int points, int depth) {
  std::vector<PlainTree> out{PlainTree{}};
  if (depth == 0) return out;
  const std::vector<PlainTree> sub = all_trees(points, depth - 1);
  for (int p = 0; p < points; ++p) {
    for (const auto& a : sub) {
      for (const auto& b : sub) out.push_back(PlainTree{p, {a, b}});
    }
  }
  return out;
}

MistakeTree to_mistake_tree(const PlainTree& t, const Domain& domain) {
  if (t.point < 0) return MistakeTree::leaf();
  return MistakeTree::node(domain.point(static_cast<std::size_t>(t.point)), to_mistake_tree(t.kids[0], domain),
                           to_mistake_tree(t.kids[1], domain));
}

Rational plain_expected(const PlainTree& t) {
  // Sum over branches of |b| 2^-|b|.
  Rational total = 0;
  std::function<void(const PlainTree&, int)> go = [&](const PlainTree& s, int len) {
    if (s.point < 0) {
      Rational w(1);
      mpq_div_2exp(w.get_mpq_t(), w.get_mpq_t(), static_cast<unsigned long>(len));
      total += w * len;
      return;
    }
    go(s.kids[0], len + 1);
    go(s.kids[1], len + 1);
  };
  go(t, 0);
  return total;
}

int plain_min_branch(const PlainTree& t) {
  if (t.point < 0) return 0;
  return 1 + std::min(plain_min_branch(t.kids[0]), plain_min_branch(t.kids[1]));
}

bool plain_shattered(const PlainTree& t, const Oracle& oracle) {
  std::vector<std::pair<std::size_t, int>> branch;
  std::function<bool(const PlainTree&)> go = [&](const PlainTree& s) {
    if (s.point < 0) return oracle.realizable(branch);
    for (int y = 0; y <= 1; ++y) {
      branch.emplace_back(static_cast<std::size_t>(s.point), y);
      const bool ok = go(s.kids[static_cast<std::size_t>(y)]);
      branch.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  return go(t);
}

}  // namespace testing_support
