#pragma once

// Membership grades, piecewise-linear membership functions, finite fuzzy
// sets with alpha-cuts, and the small family of grade combinators used by
// the mapping rules.

#include <algorithm>
#include <cmath>
#include <compare>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "triage/errors.hpp"

namespace triage {

// A degree of membership in [0, 1]. Out-of-range values are rejected, never clamped.
class Grade {
 public:
  constexpr Grade() = default;

  explicit Grade(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw DomainError("grade " + std::to_string(value) + " outside [0, 1]");
    }
  }

  static constexpr Grade zero() { return Grade{}; }
  static Grade one() { return Grade{1.0}; }
  static Grade of_bit(bool bit) { return Grade{bit ? 1.0 : 0.0}; }

  static bool valid(double value) { return value >= 0.0 && value <= 1.0; }

  constexpr double value() const noexcept { return value_; }

  friend constexpr bool operator==(Grade, Grade) = default;
  friend constexpr auto operator<=>(Grade a, Grade b) { return a.value_ <=> b.value_; }

 private:
  double value_ = 0.0;
};

struct Breakpoint {
  double input;
  Grade grade;

  bool operator==(const Breakpoint&) const = default;
};

// Continuous piecewise-linear map between breakpoints; constant grades
// outside the breakpoint range (by default the end grades).
class MembershipFunction {
 public:
  explicit MembershipFunction(std::vector<Breakpoint> breakpoints)
      : breakpoints_(std::move(breakpoints)) {
    check();
    below_ = breakpoints_.front().grade;
    above_ = breakpoints_.back().grade;
  }

  MembershipFunction(std::vector<Breakpoint> breakpoints, Grade below, Grade above)
      : breakpoints_(std::move(breakpoints)), below_(below), above_(above) {
    check();
  }

  // Ramp from 0 at `low` to 1 at `high`.
  static MembershipFunction ramp(double low, double high) {
    return MembershipFunction({{low, Grade::zero()}, {high, Grade::one()}});
  }

  const std::vector<Breakpoint>& breakpoints() const noexcept { return breakpoints_; }
  Grade below() const noexcept { return below_; }
  Grade above() const noexcept { return above_; }

  bool non_decreasing() const {
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
      if (breakpoints_[i].grade < breakpoints_[i - 1].grade) return false;
    }
    return below_ <= breakpoints_.front().grade && breakpoints_.back().grade <= above_;
  }

  bool operator==(const MembershipFunction&) const = default;

 private:
  void check() const {
    if (breakpoints_.empty()) throw DomainError("membership function needs at least one breakpoint");
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      if (!std::isfinite(breakpoints_[i].input)) throw DomainError("breakpoint input must be finite");
      if (i > 0 && !(breakpoints_[i - 1].input < breakpoints_[i].input)) {
        throw DomainError("breakpoint inputs must be strictly increasing");
      }
    }
  }

  std::vector<Breakpoint> breakpoints_;
  Grade below_;
  Grade above_;
};

inline Grade eval_membership(const MembershipFunction& mf, double x) {
  if (!std::isfinite(x)) throw DomainError("membership input must be finite");
  const auto& bps = mf.breakpoints();
  if (x < bps.front().input) return mf.below();
  if (x > bps.back().input) return mf.above();

  auto hi = std::lower_bound(bps.begin(), bps.end(), x,
                             [](const Breakpoint& b, double v) { return b.input < v; });
  if (hi->input == x) return hi->grade;
  auto lo = std::prev(hi);
  const double g0 = lo->grade.value();
  const double g1 = hi->grade.value();
  const double t = (x - lo->input) / (hi->input - lo->input);
  return Grade{std::clamp(std::lerp(g0, g1, t), std::min(g0, g1), std::max(g0, g1))};
}

struct Universe {
  std::string id;
  std::vector<std::string> elements;
};

struct FuzzyMember {
  std::string element;
  Grade grade;

  bool operator==(const FuzzyMember&) const = default;
};

// Finite fuzzy set; members keep their declaration order.
class FuzzySet {
 public:
  FuzzySet() = default;

  FuzzySet(std::string universe_id, std::vector<FuzzyMember> members)
      : universe_id_(std::move(universe_id)), members_(std::move(members)) {
    std::unordered_set<std::string> seen;
    for (const auto& m : members_) {
      if (!seen.insert(m.element).second) throw DomainError("duplicate fuzzy set element '" + m.element + "'");
    }
  }

  FuzzySet(const Universe& universe, std::vector<FuzzyMember> members)
      : FuzzySet(universe.id, std::move(members)) {
    std::unordered_set<std::string> allowed(universe.elements.begin(), universe.elements.end());
    for (const auto& m : members_) {
      if (!allowed.contains(m.element)) {
        throw DomainError("element '" + m.element + "' not in universe '" + universe.id + "'");
      }
    }
  }

  const std::string& universe_id() const noexcept { return universe_id_; }
  const std::vector<FuzzyMember>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  bool contains(const std::string& element) const {
    return std::any_of(members_.begin(), members_.end(), [&](const auto& m) { return m.element == element; });
  }

  bool operator==(const FuzzySet&) const = default;

 private:
  std::string universe_id_;
  std::vector<FuzzyMember> members_;
};

// Crisp set { e : grade(e) >= alpha }, in member order.
inline std::vector<std::string> alpha_cut(const FuzzySet& fs, Grade alpha) {
  std::vector<std::string> out;
  for (const auto& m : fs.members()) {
    if (m.grade >= alpha) out.push_back(m.element);
  }
  return out;
}

class GradeCombinator {
 public:
  enum class Kind { minimum, maximum, product, weighted_mean };

  static GradeCombinator minimum() { return GradeCombinator(Kind::minimum, {}); }
  static GradeCombinator maximum() { return GradeCombinator(Kind::maximum, {}); }
  static GradeCombinator product() { return GradeCombinator(Kind::product, {}); }
  static GradeCombinator weighted_mean(std::vector<double> weights) {
    if (weights.empty()) throw DomainError("weighted_mean needs weights");
    double sum = 0.0;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) throw DomainError("weighted_mean weights must be finite and nonnegative");
      sum += w;
    }
    if (!(sum > 0.0)) throw DomainError("weighted_mean weights must sum to a positive value");
    return GradeCombinator(Kind::weighted_mean, std::move(weights));
  }

  GradeCombinator() : GradeCombinator(Kind::maximum, {}) {}

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  bool operator==(const GradeCombinator&) const = default;

 private:
  GradeCombinator(Kind kind, std::vector<double> weights) : kind_(kind), weights_(std::move(weights)) {}

  Kind kind_;
  std::vector<double> weights_;
};

inline const char* to_string(GradeCombinator::Kind kind) {
  switch (kind) {
    case GradeCombinator::Kind::minimum: return "minimum";
    case GradeCombinator::Kind::maximum: return "maximum";
    case GradeCombinator::Kind::product: return "product";
    case GradeCombinator::Kind::weighted_mean: return "weighted_mean";
  }
  return "?";
}

namespace detail {

inline Grade weighted_mean(std::span<const double> weights, std::span<const Grade> grades) {
  double num = 0.0;
  double den = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < grades.size(); ++i) {
    num += weights[i] * grades[i].value();
    den += weights[i];
    lo = std::min(lo, grades[i].value());
    hi = std::max(hi, grades[i].value());
  }
  if (!(den > 0.0)) return Grade::zero();
  return Grade{std::clamp(num / den, lo, hi)};
}

}  // namespace detail

inline Grade combine(const GradeCombinator& c, std::span<const Grade> grades) {
  if (grades.empty()) throw DomainError("combine needs at least one grade");
  switch (c.kind()) {
    case GradeCombinator::Kind::minimum:
      return *std::min_element(grades.begin(), grades.end());
    case GradeCombinator::Kind::maximum:
      return *std::max_element(grades.begin(), grades.end());
    case GradeCombinator::Kind::product: {
      double p = 1.0;
      for (Grade g : grades) p *= g.value();
      return Grade{p};
    }
    case GradeCombinator::Kind::weighted_mean:
      if (c.weights().size() != grades.size()) {
        throw DomainError("weighted_mean has " + std::to_string(c.weights().size()) + " weights for " +
                          std::to_string(grades.size()) + " grades");
      }
      return detail::weighted_mean(c.weights(), grades);
  }
  throw DomainError("unknown combinator");
}

inline Grade combine(const GradeCombinator& c, std::initializer_list<Grade> grades) {
  return combine(c, std::span<const Grade>(grades.begin(), grades.size()));
}

}  // namespace triage
