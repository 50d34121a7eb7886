#pragma once

// Problem matrix B (one column per reported problem) and the symptom
// severity matrix A designated from it.

#include <set>
#include <string>
#include <vector>

#include "triage/knowledge_base.hpp"
#include "triage/record.hpp"

namespace triage {

struct ProblemColumn {
  std::string problem;
  Column cells;

  bool operator==(const ProblemColumn&) const = default;
};

struct ProblemMatrix {
  // Union of declared profile factors.
  std::vector<std::string> rows;
  // Reported problems in declaration order.
  std::vector<ProblemColumn> columns;

  const ProblemColumn* column(const std::string& problem) const {
    for (const auto& c : columns)
      if (c.problem == problem) return &c;
    return nullptr;
  }

  bool operator==(const ProblemMatrix&) const = default;
};

struct SymptomMatrix {
  std::vector<std::string> symptoms;
  std::vector<Grade> entries;

  bool operator==(const SymptomMatrix&) const = default;
};

inline ProblemMatrix build_problem_matrix(const KnowledgeBase& kb, const std::vector<ProblemReport>& reports) {
  std::set<std::string> seen;
  for (const auto& r : reports) {
    const auto* decl = kb.problem(r.problem);
    if (!decl) throw DomainError("unknown problem '" + r.problem + "'");
    if (!seen.insert(r.problem).second) throw DomainError("duplicate report for problem '" + r.problem + "'");
    for (const auto& [factor, cell] : r.profile) {
      const auto* f = decl->factor(factor);
      if (!f) throw DomainError("factor '" + factor + "' is not in the profile of '" + r.problem + "'");
      Issues issues;
      detail::check_cell(*f, cell, factor, issues);
      if (!issues.empty()) throw DomainError(issues.items().front().message);
    }
  }
  ProblemMatrix b{kb.profile_rows(), {}};
  for (const auto& decl : kb.problems)
    for (const auto& r : reports)
      if (r.problem == decl.id) b.columns.push_back({r.problem, r.profile});
  return b;
}

// delta_i applied to one problem column.
inline Grade designate_symptom(const MappingRule& rule, const Column& column) {
  if (rule.target_kind != TargetKind::symptom) throw DomainError("rule does not target a symptom");
  return evaluate_rule(rule.body, column);
}

// Applies every symptom rule to the column it reads. Unreported problems give
// no evidence; several rules on one symptom combine by maximum.
inline SymptomMatrix assemble_symptom_matrix(const KnowledgeBase& kb, const ProblemMatrix& b) {
  SymptomMatrix a;
  for (const auto& s : kb.symptoms) {
    Grade value = Grade::zero();
    for (const auto* rule : kb.rules_for(TargetKind::symptom, s.id)) {
      const auto* column = b.column(rule->problem);
      if (!column) continue;
      value = std::max(value, designate_symptom(*rule, column->cells));
    }
    a.symptoms.push_back(s.id);
    a.entries.push_back(value);
  }
  return a;
}

}  // namespace triage
