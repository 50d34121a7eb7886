#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "triage/fuzzy.hpp"

using namespace triage;

namespace {

MembershipFunction cholesterol() { return MembershipFunction({{260, Grade{0.0}}, {600, Grade{1.0}}}); }

}  // namespace

TEST(Grade, RejectsOutOfRange) {
  EXPECT_THROW(Grade{-0.01}, DomainError);
  EXPECT_THROW(Grade{1.0000001}, DomainError);
  EXPECT_THROW(Grade{std::nan("")}, DomainError);
  EXPECT_EQ(Grade{0.0}.value(), 0.0);
  EXPECT_EQ(Grade{1.0}.value(), 1.0);
}

TEST(Membership, CholesterolRamp) {
  const auto mf = cholesterol();
  EXPECT_EQ(eval_membership(mf, 200).value(), 0.0);
  EXPECT_EQ(eval_membership(mf, 700).value(), 1.0);
  EXPECT_NEAR(eval_membership(mf, 430).value(), (430.0 - 260.0) / (600.0 - 260.0), oracle::kTol);
  EXPECT_NEAR(eval_membership(mf, 430).value(), 0.5, oracle::kTol);
  EXPECT_EQ(eval_membership(mf, 260).value(), 0.0);
  EXPECT_EQ(eval_membership(mf, 600).value(), 1.0);
}

TEST(Membership, ExplicitOutsideGrades) {
  MembershipFunction mf({{0, Grade{0.2}}, {10, Grade{0.8}}}, Grade{0.0}, Grade{1.0});
  EXPECT_EQ(eval_membership(mf, -1).value(), 0.0);
  EXPECT_EQ(eval_membership(mf, 0).value(), 0.2);
  EXPECT_EQ(eval_membership(mf, 11).value(), 1.0);
}

TEST(Membership, RejectsBadBreakpoints) {
  EXPECT_THROW(MembershipFunction({}), DomainError);
  EXPECT_THROW(MembershipFunction({{5, Grade{0.0}}, {5, Grade{1.0}}}), DomainError);
  EXPECT_THROW(MembershipFunction({{6, Grade{0.0}}, {5, Grade{1.0}}}), DomainError);
  EXPECT_THROW(eval_membership(cholesterol(), std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(eval_membership(cholesterol(), std::nan("")), DomainError);
}

TEST(Membership, MatchesInterpolationOracle) {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = gen.integer(1, 6);
    std::vector<std::pair<double, double>> pts;
    std::vector<Breakpoint> bps;
    double x = gen.uniform(-50, 50);
    for (int i = 0; i < n; ++i) {
      const double g = gen.grade();
      pts.emplace_back(x, g);
      bps.push_back({x, Grade{g}});
      x += gen.uniform(0.5, 20);
    }
    MembershipFunction mf(bps);
    for (int probe = 0; probe < 40; ++probe) {
      const double at = gen.uniform(pts.front().first - 10, pts.back().first + 10);
      EXPECT_NEAR(eval_membership(mf, at).value(), oracle::piecewise(pts, pts.front().second, pts.back().second, at),
                  oracle::kTol);
    }
  }
}

TEST(FuzzySet, RejectsDuplicatesAndForeignElements) {
  EXPECT_THROW(FuzzySet("u", {{"a", Grade{0.1}}, {"a", Grade{0.2}}}), DomainError);
  Universe u{"u", {"a", "b"}};
  EXPECT_THROW(FuzzySet(u, {{"c", Grade{0.1}}}), DomainError);
  EXPECT_NO_THROW(FuzzySet(u, {{"b", Grade{0.1}}}));
}

TEST(AlphaCut, Examples) {
  FuzzySet fs("u", {{"a", Grade{0.9}}, {"b", Grade{0.4}}, {"c", Grade{0.5}}});
  EXPECT_EQ(alpha_cut(fs, Grade{0.5}), (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(alpha_cut(fs, Grade{0.0}), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(alpha_cut(FuzzySet{}, Grade{0.3}).empty());
  EXPECT_TRUE(alpha_cut(FuzzySet{}, Grade{0.0}).empty());
}

TEST(Combine, Examples) {
  EXPECT_EQ(combine(GradeCombinator::minimum(), {Grade{0.3}, Grade{0.7}}).value(), 0.3);
  EXPECT_EQ(combine(GradeCombinator::maximum(), {Grade{0.3}, Grade{0.7}}).value(), 0.7);
  EXPECT_EQ(combine(GradeCombinator::product(), {Grade{1.0}, Grade{1.0}, Grade{1.0}}).value(), 1.0);
  EXPECT_NEAR(combine(GradeCombinator::weighted_mean({1, 3}), {Grade{0.2}, Grade{0.6}}).value(),
              (1 * 0.2 + 3 * 0.6) / 4.0, oracle::kTol);
  EXPECT_NEAR(combine(GradeCombinator::weighted_mean({1, 3}), {Grade{0.2}, Grade{0.6}}).value(), 0.5, oracle::kTol);
}

TEST(Combine, Errors) {
  EXPECT_THROW(combine(GradeCombinator::maximum(), std::span<const Grade>{}), DomainError);
  EXPECT_THROW(combine(GradeCombinator::weighted_mean({1, 2}), {Grade{0.5}}), DomainError);
  EXPECT_THROW(GradeCombinator::weighted_mean({}), DomainError);
  EXPECT_THROW(GradeCombinator::weighted_mean({-1, 2}), DomainError);
  EXPECT_THROW(GradeCombinator::weighted_mean({0, 0}), DomainError);
}

TEST(Combine, StaysInUnitIntervalAndMatchesOracle) {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = gen.integer(1, 8);
    std::vector<Grade> gs;
    std::vector<double> raw, w;
    for (int i = 0; i < n; ++i) {
      raw.push_back(gen.grade());
      gs.emplace_back(raw.back());
      w.push_back(gen.uniform(0.01, 5));
    }
    const double lo = *std::min_element(raw.begin(), raw.end());
    const double hi = *std::max_element(raw.begin(), raw.end());
    double prod = 1.0;
    for (double g : raw) prod *= g;
    EXPECT_EQ(combine(GradeCombinator::minimum(), gs).value(), lo);
    EXPECT_EQ(combine(GradeCombinator::maximum(), gs).value(), hi);
    EXPECT_NEAR(combine(GradeCombinator::product(), gs).value(), prod, oracle::kTol);
    const double wm = combine(GradeCombinator::weighted_mean(w), gs).value();
    EXPECT_NEAR(wm, oracle::mean_weighted(w, raw), oracle::kTol);
    EXPECT_GE(wm, lo);
    EXPECT_LE(wm, hi);
  }
}
