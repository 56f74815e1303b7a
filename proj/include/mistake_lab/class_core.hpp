#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mistake_lab {

using Bits = std::vector<std::uint8_t>;

/// Ordered list of distinct, opaque instance identifiers.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<std::string> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<std::string>& points() const { return points_; }
  const std::string& point(std::size_t i) const { return points_.at(i); }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws PreconditionError for identifiers outside the domain.
  std::size_t index_of(std::string_view id) const;

 private:
  std::vector<std::string> points_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One hypothesis with its remaining mistake budget.
struct Member {
  std::string name;
  Bits labels;  // one entry per domain point
  int budget = 0;
};

/// What the learner sees in a round: an identifier plus the labels every
/// member of the underlying class assigns to it, indexed by base member.
struct Instance {
  std::string id;
  Bits advice;
};

struct Example {
  std::string point;
  int label = 0;
};
using ExampleSequence = std::vector<Example>;

/// A distinct column of the member-by-point label matrix, restricted to the
/// active members, together with every point that produces it.
struct Behavior {
  Bits pattern;  // indexed by active member, in base order
  std::vector<std::string> witnesses;

  bool is_constant() const;
};

/// Immutable data shared by a class and every class reachable from it by
/// restriction.
struct ClassBase {
  Domain domain;
  std::vector<std::string> names;
  std::vector<Bits> rows;     // rows[m][p]
  std::vector<Bits> columns;  // columns[p][m]
};

/// Finite hypothesis class with per-member mistake budgets.
///
/// Restriction never copies labels: all classes derived from one load share a
/// ClassBase and differ only in the budget vector, where kDropped marks a
/// member that has left the class. The budget vector is the canonical DP
/// state used by the dimension engine.
class WeightedClass {
 public:
  static constexpr int kDropped = -1;

  WeightedClass() = default;

  /// Builds a class. Members with identical (labels, budget) are collapsed;
  /// the number collapsed is available through duplicates_collapsed().
  /// Throws PreconditionError on length mismatches, negative budgets or
  /// repeated names.
  static WeightedClass from_members(Domain domain, std::vector<Member> members);

  const Domain& domain() const { return base_->domain; }
  const std::shared_ptr<const ClassBase>& base() const { return base_; }
  std::size_t base_size() const { return base_->names.size(); }

  /// Active members only.
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<Member> members() const;
  std::vector<std::size_t> active() const;

  /// Per-base-member budget, kDropped for members no longer present.
  const std::vector<int>& budgets() const { return budgets_; }
  int budget_of(std::size_t base_member) const { return budgets_.at(base_member); }

  std::size_t duplicates_collapsed() const { return duplicates_; }

  /// Label column of a domain point, indexed by base member.
  const Bits& column(std::size_t point) const { return base_->columns.at(point); }
  Instance instance(std::size_t point) const;
  Instance instance(std::string_view id) const { return instance(domain().index_of(id)); }

  /// Members agreeing with y are kept; the others lose one unit of budget,
  /// or leave when their budget is already 0.
  WeightedClass restrict(std::string_view point, int label) const;
  WeightedClass restrict_column(const Bits& column, int label) const;

  /// Every member loses one unit of budget (members at 0 leave).
  WeightedClass decremented() const;

  /// Same base, new budget vector (size must match the base).
  WeightedClass with_budgets(std::vector<int> budgets) const;

  bool same_base(const WeightedClass& other) const { return base_ == other.base_; }

  friend bool operator==(const WeightedClass& a, const WeightedClass& b);

 private:
  std::shared_ptr<const ClassBase> base_ = std::make_shared<ClassBase>();
  std::vector<int> budgets_;
  std::size_t duplicates_ = 0;
};

/// Parses the class JSON document; errors name the member and field path.
WeightedClass load_class(std::string_view json_text);
WeightedClass load_class_file(const std::string& path);
std::string class_to_json(const WeightedClass& w);

/// Distinct columns over the active members, witnesses in domain order,
/// behaviors ordered by pattern.
std::vector<Behavior> behaviors(const WeightedClass& w);

/// The n projection functions on {0,1}^n, every budget k. Points are bit
/// strings "b1...bn" and member i labels a point with bit i.
WeightedClass universal_class(int n, int k);
inline constexpr int kUniversalCap = 16;

struct RealizabilityReport {
  std::size_t min_mistakes = 0;
  bool realizable = false;
  std::optional<std::string> best_member;  // fewest mistakes, first in base order
};

/// Fewest mistakes of any active member on s, and whether some member's
/// mistakes fit within its budget.
RealizabilityReport min_mistakes(const ExampleSequence& s, const WeightedClass& w);

}  // namespace mistake_lab
