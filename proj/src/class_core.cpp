#include "mistake_lab/class_core.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mistake_lab/errors.hpp"

namespace mistake_lab {

using nlohmann::json;

Domain::Domain(std::vector<std::string> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!index_.emplace(points_[i], i).second) {
      throw PreconditionError("duplicate domain point '" + points_[i] + "'");
    }
  }
}

std::optional<std::size_t> Domain::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Domain::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw PreconditionError("unknown instance '" + std::string(id) + "'");
}

bool Behavior::is_constant() const {
  return std::adjacent_find(pattern.begin(), pattern.end(), std::not_equal_to<>()) == pattern.end();
}

WeightedClass WeightedClass::from_members(Domain domain, std::vector<Member> members) {
  auto base = std::make_shared<ClassBase>();
  WeightedClass out;
  std::set<std::string> names;
  std::set<std::pair<Bits, int>> seen;
  for (std::size_t i = 0; i < members.size(); ++i) {
    auto& m = members[i];
    if (m.labels.size() != domain.size()) {
      throw PreconditionError("hypotheses[" + std::to_string(i) + "] ('" + m.name + "').labels: length " +
                              std::to_string(m.labels.size()) + " does not match domain size " +
                              std::to_string(domain.size()));
    }
    if (m.budget < 0) {
      throw PreconditionError("hypotheses[" + std::to_string(i) + "] ('" + m.name + "').budget: negative");
    }
    for (auto b : m.labels) {
      if (b > 1) {
        throw PreconditionError("hypotheses[" + std::to_string(i) + "] ('" + m.name + "').labels: not 0/1");
      }
    }
    if (!names.insert(m.name).second) {
      throw PreconditionError("hypotheses[" + std::to_string(i) + "].name: duplicate name '" + m.name + "'");
    }
    if (!seen.emplace(m.labels, m.budget).second) {
      ++out.duplicates_;
      continue;
    }
    base->names.push_back(m.name);
    base->rows.push_back(std::move(m.labels));
    out.budgets_.push_back(m.budget);
  }
  base->columns.assign(domain.size(), Bits(base->rows.size()));
  for (std::size_t m = 0; m < base->rows.size(); ++m) {
    for (std::size_t p = 0; p < domain.size(); ++p) base->columns[p][m] = base->rows[m][p];
  }
  base->domain = std::move(domain);
  out.base_ = std::move(base);
  return out;
}

std::size_t WeightedClass::size() const {
  return static_cast<std::size_t>(std::count_if(budgets_.begin(), budgets_.end(), [](int b) { return b >= 0; }));
}

std::vector<std::size_t> WeightedClass::active() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < budgets_.size(); ++i) {
    if (budgets_[i] >= 0) out.push_back(i);
  }
  return out;
}

std::vector<Member> WeightedClass::members() const {
  std::vector<Member> out;
  for (auto i : active()) out.push_back({base_->names[i], base_->rows[i], budgets_[i]});
  return out;
}

Instance WeightedClass::instance(std::size_t point) const { return {domain().point(point), column(point)}; }

WeightedClass WeightedClass::restrict(std::string_view point, int label) const {
  return restrict_column(column(domain().index_of(point)), label);
}

WeightedClass WeightedClass::restrict_column(const Bits& column, int label) const {
  if (column.size() != budgets_.size()) throw PreconditionError("instance column does not match class");
  WeightedClass out = *this;
  for (std::size_t i = 0; i < budgets_.size(); ++i) {
    if (out.budgets_[i] >= 0 && column[i] != label) --out.budgets_[i];
  }
  return out;
}

WeightedClass WeightedClass::decremented() const {
  WeightedClass out = *this;
  for (auto& b : out.budgets_) {
    if (b >= 0) --b;
  }
  return out;
}

WeightedClass WeightedClass::with_budgets(std::vector<int> budgets) const {
  if (budgets.size() != budgets_.size()) throw PreconditionError("budget vector does not match class");
  WeightedClass out = *this;
  for (auto& b : budgets) b = std::max(b, kDropped);
  out.budgets_ = std::move(budgets);
  return out;
}

bool operator==(const WeightedClass& a, const WeightedClass& b) {
  if (a.base_ == b.base_) return a.budgets_ == b.budgets_;
  if (a.domain().points() != b.domain().points()) return false;
  auto key = [](const WeightedClass& w) {
    std::multiset<std::pair<Bits, int>> out;
    for (auto& m : w.members()) out.emplace(m.labels, m.budget);
    return out;
  };
  return key(a) == key(b);
}

WeightedClass load_class(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("class document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("class document: expected an object");
  if (!doc.contains("domain") || !doc["domain"].is_array()) throw ParseError("domain: expected an array of strings");
  std::vector<std::string> points;
  for (std::size_t i = 0; i < doc["domain"].size(); ++i) {
    const auto& p = doc["domain"][i];
    if (!p.is_string()) throw ParseError("domain[" + std::to_string(i) + "]: expected a string");
    points.push_back(p.get<std::string>());
  }
  if (!doc.contains("hypotheses") || !doc["hypotheses"].is_array()) throw ParseError("hypotheses: expected an array");
  std::vector<Member> members;
  const auto& hs = doc["hypotheses"];
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const auto& h = hs[i];
    std::string path = "hypotheses[" + std::to_string(i) + "]";
    if (!h.is_object()) throw ParseError(path + ": expected an object");
    Member m;
    m.name = h.contains("name") && h["name"].is_string() ? h["name"].get<std::string>() : "h" + std::to_string(i);
    path += " ('" + m.name + "')";
    if (!h.contains("labels") || !h["labels"].is_array()) throw ParseError(path + ".labels: expected an array");
    for (std::size_t j = 0; j < h["labels"].size(); ++j) {
      const auto& b = h["labels"][j];
      if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
        throw ParseError(path + ".labels[" + std::to_string(j) + "]: expected 0 or 1");
      }
      m.labels.push_back(static_cast<std::uint8_t>(b.get<int>()));
    }
    if (m.labels.size() != points.size()) {
      throw ParseError(path + ".labels: length " + std::to_string(m.labels.size()) + " does not match domain size " +
                       std::to_string(points.size()));
    }
    if (h.contains("budget")) {
      if (!h["budget"].is_number_integer()) throw ParseError(path + ".budget: expected an integer");
      m.budget = h["budget"].get<int>();
      if (m.budget < 0) throw ParseError(path + ".budget: negative budget " + std::to_string(m.budget));
    }
    members.push_back(std::move(m));
  }
  try {
    return WeightedClass::from_members(Domain(std::move(points)), std::move(members));
  } catch (const PreconditionError& e) {
    throw ParseError(e.what());
  }
}

WeightedClass load_class_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open class file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return load_class(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string class_to_json(const WeightedClass& w) {
  json doc;
  doc["domain"] = w.domain().points();
  doc["hypotheses"] = json::array();
  for (const auto& m : w.members()) {
    json labels = json::array();
    for (auto b : m.labels) labels.push_back(static_cast<int>(b));
    doc["hypotheses"].push_back({{"name", m.name}, {"labels", labels}, {"budget", m.budget}});
  }
  return doc.dump();
}

std::vector<Behavior> behaviors(const WeightedClass& w) {
  auto act = w.active();
  std::map<Bits, std::vector<std::string>> groups;
  for (std::size_t p = 0; p < w.domain().size(); ++p) {
    const auto& col = w.column(p);
    Bits pattern(act.size());
    for (std::size_t j = 0; j < act.size(); ++j) pattern[j] = col[act[j]];
    groups[std::move(pattern)].push_back(w.domain().point(p));
  }
  std::vector<Behavior> out;
  out.reserve(groups.size());
  for (auto& [pattern, witnesses] : groups) out.push_back({pattern, std::move(witnesses)});
  return out;
}

WeightedClass universal_class(int n, int k) {
  if (n < 1) throw PreconditionError("universal_class: n must be positive");
  if (k < 0) throw PreconditionError("universal_class: k must be non-negative");
  if (n > kUniversalCap) {
    throw PreconditionError("universal_class: n=" + std::to_string(n) + " exceeds the enumeration cap " +
                            std::to_string(kUniversalCap));
  }
  const std::size_t count = std::size_t{1} << n;
  std::vector<std::string> points;
  points.reserve(count);
  std::vector<Member> members(n);
  for (int i = 0; i < n; ++i) {
    members[i].name = "e" + std::to_string(i + 1);
    members[i].budget = k;
    members[i].labels.resize(count);
  }
  for (std::size_t b = 0; b < count; ++b) {
    std::string id(n, '0');
    for (int i = 0; i < n; ++i) {
      // bit i (member i) is the i-th character, most significant first
      const int bit = static_cast<int>((b >> (n - 1 - i)) & 1U);
      id[i] = static_cast<char>('0' + bit);
      members[i].labels[b] = static_cast<std::uint8_t>(bit);
    }
    points.push_back(std::move(id));
  }
  return WeightedClass::from_members(Domain(std::move(points)), std::move(members));
}

RealizabilityReport min_mistakes(const ExampleSequence& s, const WeightedClass& w) {
  std::vector<std::size_t> point_index;
  point_index.reserve(s.size());
  for (const auto& ex : s) point_index.push_back(w.domain().index_of(ex.point));
  RealizabilityReport report;
  bool any = false;
  for (auto m : w.active()) {
    std::size_t mistakes = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (w.column(point_index[i])[m] != s[i].label) ++mistakes;
    }
    if (!any || mistakes < report.min_mistakes) {
      report.min_mistakes = mistakes;
      report.best_member = w.base()->names[m];
      any = true;
    }
    if (mistakes <= static_cast<std::size_t>(w.budget_of(m))) report.realizable = true;
  }
  return report;
}

}  // namespace mistake_lab
