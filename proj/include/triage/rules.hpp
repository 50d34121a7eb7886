#pragma once

// Mapping rules and the cell/column model they evaluate over. The same
// evaluator serves history inference, symptom designation and sign severity.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "triage/errors.hpp"
#include "triage/fuzzy.hpp"

namespace triage {

// A single cell of a problem profile or observables column.
using CellValue = std::variant<std::string, double, Grade>;

// Cells keyed by factor/observable id. A missing key is an empty cell.
using Column = std::map<std::string, CellValue>;

// Value a location_match rule requires: categorical label or number.
using MatchValue = std::variant<std::string, double>;

struct LocationMatch {
  std::map<std::string, MatchValue> required;

  bool operator==(const LocationMatch&) const = default;
};

struct WeightedSource {
  std::string source;
  double weight;

  bool operator==(const WeightedSource&) const = default;
};

struct WeightedThreshold {
  std::vector<WeightedSource> weights;
  double threshold = 0.0;

  bool operator==(const WeightedThreshold&) const = default;
};

struct MembershipPassthrough {
  std::string source;

  bool operator==(const MembershipPassthrough&) const = default;
};

struct Combined {
  GradeCombinator combinator;
  std::vector<std::string> sources;

  bool operator==(const Combined&) const = default;
};

using RuleBody = std::variant<LocationMatch, WeightedThreshold, MembershipPassthrough, Combined>;

enum class TargetKind { history, symptom, sign };

inline const char* to_string(TargetKind k) {
  switch (k) {
    case TargetKind::history: return "history";
    case TargetKind::symptom: return "symptom";
    case TargetKind::sign: return "sign";
  }
  return "?";
}

struct MappingRule {
  TargetKind target_kind = TargetKind::symptom;
  std::string target;
  // Source problem column; symptom rules only.
  std::string problem;
  RuleBody body;

  bool binary_output() const {
    return std::holds_alternative<LocationMatch>(body) || std::holds_alternative<WeightedThreshold>(body);
  }

  bool operator==(const MappingRule&) const = default;
};

inline const char* rule_kind_name(const RuleBody& body) {
  switch (body.index()) {
    case 0: return "location_match";
    case 1: return "weighted_threshold";
    case 2: return "membership_passthrough";
    default: return "combined";
  }
}

// Sources a rule reads from its column, in declaration order.
inline std::vector<std::string> rule_sources(const RuleBody& body) {
  std::vector<std::string> out;
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, LocationMatch>) {
          for (const auto& [k, v] : r.required) out.push_back(k);
        } else if constexpr (std::is_same_v<R, WeightedThreshold>) {
          for (const auto& w : r.weights) out.push_back(w.source);
        } else if constexpr (std::is_same_v<R, MembershipPassthrough>) {
          out.push_back(r.source);
        } else {
          out = r.sources;
        }
      },
      body);
  return out;
}

// 1 iff sum(weights[i] * bits[i]) >= threshold.
inline std::uint8_t weighted_threshold(std::span<const double> weights, std::span<const std::uint8_t> bits,
                                       double threshold) {
  if (weights.size() != bits.size()) {
    throw DomainError("rule has " + std::to_string(weights.size()) + " weights for a vector of length " +
                      std::to_string(bits.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw DomainError("vector entries must be binary");
    if (bits[i]) sum += weights[i];
  }
  return sum >= threshold ? 1 : 0;
}

namespace detail {

inline bool cell_matches(const CellValue& cell, const MatchValue& want) {
  if (const auto* s = std::get_if<std::string>(&want)) {
    const auto* c = std::get_if<std::string>(&cell);
    return c && *c == *s;
  }
  const double w = std::get<double>(want);
  if (const auto* d = std::get_if<double>(&cell)) return *d == w;
  if (const auto* g = std::get_if<Grade>(&cell)) return g->value() == w;
  return false;
}

inline double numeric_of(const CellValue& cell, const std::string& source) {
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (const auto* g = std::get_if<Grade>(&cell)) return g->value();
  throw DomainError("source '" + source + "' holds a categorical value; a number is required");
}

inline Grade grade_of(const CellValue& cell, const std::string& source) {
  if (const auto* g = std::get_if<Grade>(&cell)) return *g;
  throw DomainError("source '" + source + "' is not a graded cell");
}

}  // namespace detail

// Evaluates one rule over one column. Empty cells count as absent evidence:
// location_match fails, weighted_threshold reads 0, passthrough gives 0 and
// combined skips them (all empty gives 0).
inline Grade evaluate_rule(const RuleBody& body, const Column& column) {
  return std::visit(
      [&](const auto& r) -> Grade {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, LocationMatch>) {
          for (const auto& [factor, want] : r.required) {
            auto it = column.find(factor);
            if (it == column.end() || !detail::cell_matches(it->second, want)) return Grade::zero();
          }
          return Grade::one();
        } else if constexpr (std::is_same_v<R, WeightedThreshold>) {
          double sum = 0.0;
          for (const auto& w : r.weights) {
            auto it = column.find(w.source);
            if (it != column.end()) sum += w.weight * detail::numeric_of(it->second, w.source);
          }
          return Grade::of_bit(sum >= r.threshold);
        } else if constexpr (std::is_same_v<R, MembershipPassthrough>) {
          auto it = column.find(r.source);
          return it == column.end() ? Grade::zero() : detail::grade_of(it->second, r.source);
        } else {
          std::vector<Grade> grades;
          std::vector<double> weights;
          const bool weighted = r.combinator.kind() == GradeCombinator::Kind::weighted_mean;
          if (weighted && r.combinator.weights().size() != r.sources.size()) {
            throw DomainError("combined rule has " + std::to_string(r.combinator.weights().size()) +
                              " weights for " + std::to_string(r.sources.size()) + " sources");
          }
          for (std::size_t i = 0; i < r.sources.size(); ++i) {
            auto it = column.find(r.sources[i]);
            if (it == column.end()) continue;
            grades.push_back(detail::grade_of(it->second, r.sources[i]));
            if (weighted) weights.push_back(r.combinator.weights()[i]);
          }
          if (grades.empty()) return Grade::zero();
          // Surviving weights may sum to zero after skipping empties.
          if (weighted) return detail::weighted_mean(weights, grades);
          return combine(r.combinator, grades);
        }
      },
      body);
}

}  // namespace triage
