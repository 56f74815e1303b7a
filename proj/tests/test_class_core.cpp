#include <gtest/gtest.h>

#include <random>

#include "mistake_lab/class_core.hpp"
#include "mistake_lab/errors.hpp"
#include "support.hpp"

using namespace mistake_lab;

namespace {

WeightedClass one_point(int label, int budget) {
  return WeightedClass::from_members(Domain({"x"}), {Member{"h", {static_cast<std::uint8_t>(label)}, budget}});
}

}  // namespace

TEST(LoadClass, MinimalFile) {
  auto w = load_class(R"({"domain":["x"],"hypotheses":[{"name":"a","labels":[0]},{"name":"b","labels":[1]}]})");
  EXPECT_EQ(w.size(), 2u);
  EXPECT_EQ(w.budgets(), (std::vector<int>{0, 0}));
}

TEST(LoadClass, LengthMismatchNamesTheMember) {
  try {
    load_class(R"({"domain":["x","y"],"hypotheses":[{"name":"bad","labels":[0,1,0]}]})");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("'bad'"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("labels"), std::string::npos) << e.what();
  }
}

TEST(LoadClass, NegativeBudgetIsReportedWithPath) {
  try {
    load_class(R"({"domain":["x"],"hypotheses":[{"name":"neg","labels":[0],"budget":-1}]})");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("hypotheses[0] ('neg').budget"), std::string::npos) << e.what();
  }
}

TEST(LoadClass, DuplicatesCollapse) {
  auto w = load_class(
      R"({"domain":["x"],"hypotheses":[{"name":"a","labels":[1],"budget":1},{"name":"b","labels":[1],"budget":1}]})");
  EXPECT_EQ(w.size(), 1u);
  EXPECT_EQ(w.duplicates_collapsed(), 1u);
}

TEST(LoadClass, SameLabelsDifferentBudgetsAreKept) {
  auto w = load_class(
      R"({"domain":["x"],"hypotheses":[{"name":"a","labels":[1],"budget":0},{"name":"b","labels":[1],"budget":2}]})");
  EXPECT_EQ(w.size(), 2u);
  EXPECT_EQ(w.duplicates_collapsed(), 0u);
}

TEST(LoadClass, RejectsGarbage) {
  EXPECT_THROW(load_class("not json"), ParseError);
  EXPECT_THROW(load_class(R"({"domain":[1],"hypotheses":[]})"), ParseError);
  EXPECT_THROW(load_class(R"({"domain":["x"],"hypotheses":[{"name":"a","labels":[2]}]})"), ParseError);
}

TEST(LoadClass, JsonRoundTrip) {
  auto w = universal_class(2, 1);
  auto back = load_class(class_to_json(w));
  EXPECT_EQ(back, w);
}

TEST(Restrict, WrongMemberLosesBudget) {
  auto w = one_point(0, 1).restrict("x", 1);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w.budgets(), (std::vector<int>{0}));
}

TEST(Restrict, ExhaustedMemberLeaves) { EXPECT_TRUE(one_point(0, 0).restrict("x", 1).empty()); }

TEST(Restrict, ConsistentExampleChangesNothing) {
  auto w = one_point(0, 0);
  EXPECT_EQ(w.restrict("x", 0), w);
}

TEST(Restrict, UnknownInstance) { EXPECT_THROW(one_point(0, 0).restrict("nope", 0), PreconditionError); }

TEST(Behaviors, FullCubeForTwoExperts) {
  auto bs = behaviors(universal_class(2, 0));
  ASSERT_EQ(bs.size(), 4u);
  EXPECT_EQ(bs[0].pattern, (Bits{0, 0}));
  EXPECT_EQ(bs[1].pattern, (Bits{0, 1}));
  EXPECT_EQ(bs[1].witnesses, (std::vector<std::string>{"01"}));
  EXPECT_EQ(bs[3].pattern, (Bits{1, 1}));
}

TEST(Behaviors, ColumnDedup) {
  auto w = WeightedClass::from_members(Domain({"a", "b", "c"}), {Member{"h", {0, 0, 1}, 0}});
  auto bs = behaviors(w);
  ASSERT_EQ(bs.size(), 2u);
  EXPECT_EQ(bs[0].witnesses, (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(bs[0].is_constant());
}

TEST(Behaviors, TwoConstantFunctionsHaveOneBehavior) {
  auto w = WeightedClass::from_members(Domain({"a", "b", "c"}),
                                       {Member{"zero", {0, 0, 0}, 0}, Member{"one", {1, 1, 1}, 0}});
  auto bs = behaviors(w);
  ASSERT_EQ(bs.size(), 1u);
  EXPECT_EQ(bs[0].pattern, (Bits{0, 1}));
  EXPECT_EQ(bs[0].witnesses.size(), 3u);
}

TEST(Behaviors, EmptyDomain) {
  auto w = WeightedClass::from_members(Domain(), {Member{"h", {}, 0}});
  EXPECT_TRUE(behaviors(w).empty());
}

TEST(UniversalClass, Projections) {
  EXPECT_EQ(universal_class(1, 3).size(), 1u);
  EXPECT_EQ(universal_class(1, 3).budgets(), (std::vector<int>{3}));
  auto u = universal_class(2, 0);
  EXPECT_EQ(u.domain().points(), (std::vector<std::string>{"00", "01", "10", "11"}));
  auto ms = u.members();
  EXPECT_EQ(ms[0].labels, (Bits{0, 0, 1, 1}));
  EXPECT_EQ(ms[1].labels, (Bits{0, 1, 0, 1}));
  EXPECT_EQ(universal_class(2, 1).budgets(), (std::vector<int>{1, 1}));
  EXPECT_THROW(universal_class(kUniversalCap + 1, 0), PreconditionError);
}

TEST(MinMistakes, TwoConstantsBudgetOne) {
  auto r = min_mistakes({{"x", 0}, {"x", 1}}, testing_support::two_constants(1));
  EXPECT_EQ(r.min_mistakes, 1u);
  EXPECT_TRUE(r.realizable);
}

TEST(MinMistakes, EmptySequence) {
  auto r = min_mistakes({}, universal_class(3, 0));
  EXPECT_EQ(r.min_mistakes, 0u);
  EXPECT_TRUE(r.realizable);
}

TEST(MinMistakes, ExceedsBudget) {
  auto r = min_mistakes({{"x", 1}, {"x", 1}, {"x", 1}}, one_point(0, 2));
  EXPECT_EQ(r.min_mistakes, 3u);
  EXPECT_FALSE(r.realizable);
}

// Properties over random classes.

TEST(ClassProperties, IdempotentOnConsistentPoints) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto w = testing_support::random_class(rng, 1 + rng() % 4, 1 + rng() % 4, 2);
    for (std::size_t p = 0; p < w.domain().size(); ++p) {
      for (int y = 0; y <= 1; ++y) {
        auto once = w.restrict(w.domain().point(p), y);
        bool agree = true;
        for (auto m : once.active()) agree = agree && once.column(p)[m] == y;
        if (agree) EXPECT_EQ(once.restrict(w.domain().point(p), y), once);
      }
    }
  }
}

TEST(ClassProperties, RestrictionsPartitionMembers) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto w = testing_support::random_class(rng, 1 + rng() % 4, 1 + rng() % 4, 2);
    for (std::size_t p = 0; p < w.domain().size(); ++p) {
      auto w0 = w.restrict_column(w.column(p), 0);
      auto w1 = w.restrict_column(w.column(p), 1);
      for (auto m : w.active()) {
        const int b = w.budget_of(m);
        const int agree_side = w.column(p)[m];
        const auto& same = agree_side == 0 ? w0 : w1;
        const auto& other = agree_side == 0 ? w1 : w0;
        EXPECT_EQ(same.budget_of(m), b);
        EXPECT_EQ(other.budget_of(m), b - 1);  // -1 is "dropped"
      }
    }
  }
}

TEST(ClassProperties, MinMistakesMonotoneUnderAppend) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    auto w = testing_support::random_class(rng, 1 + rng() % 4, 1 + rng() % 4, 2);
    ExampleSequence s;
    std::size_t last = 0;
    for (int i = 0; i < 8; ++i) {
      s.push_back({w.domain().point(rng() % w.domain().size()), static_cast<int>(rng() & 1)});
      auto r = min_mistakes(s, w);
      EXPECT_GE(r.min_mistakes, last);
      last = r.min_mistakes;
    }
  }
}

TEST(ClassProperties, BehaviorCountBound) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    auto w = testing_support::random_class(rng, 1 + rng() % 4, 1 + rng() % 6, 1);
    const std::size_t bound = std::min<std::size_t>(std::size_t{1} << w.size(), w.domain().size());
    EXPECT_LE(behaviors(w).size(), bound);
  }
}
