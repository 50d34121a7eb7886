#pragma once

// Observables matrix D and sign severities S. Sign rules share the symptom
// rule semantics exactly.

#include <map>
#include <string>
#include <vector>

#include "triage/knowledge_base.hpp"
#include "triage/record.hpp"

namespace triage {

struct ObservablesMatrix {
  // One column per declared sign, in declaration order; unobserved columns are empty.
  std::vector<std::string> signs;
  std::vector<Column> columns;
  // Size of the largest declared observable set.
  std::size_t rows = 0;

  bool operator==(const ObservablesMatrix&) const = default;
};

struct SignMatrix {
  std::vector<std::string> signs;
  std::vector<Grade> entries;

  bool operator==(const SignMatrix&) const = default;
};

inline ObservablesMatrix build_observables_matrix(const KnowledgeBase& kb,
                                                  const std::map<std::string, Column>& observations) {
  for (const auto& [sign, cells] : observations) {
    if (!kb.sign(sign)) throw DomainError("unknown sign '" + sign + "'");
    const auto* schema = kb.observable_schema(sign);
    for (const auto& [obs, cell] : cells) {
      const auto* decl = schema ? schema->observable(obs) : nullptr;
      if (!decl) throw DomainError("observable '" + obs + "' is not declared for sign '" + sign + "'");
      Issues issues;
      detail::check_cell(*decl, cell, obs, issues);
      if (!issues.empty()) throw DomainError(issues.items().front().message);
    }
  }
  ObservablesMatrix d;
  d.rows = kb.max_observables();
  for (const auto& s : kb.signs) {
    d.signs.push_back(s.id);
    auto it = observations.find(s.id);
    d.columns.push_back(it == observations.end() ? Column{} : it->second);
  }
  return d;
}

// Psi_j applied to the observables column of sign j.
inline Grade sign_severity(const MappingRule& rule, const Column& column) {
  if (rule.target_kind != TargetKind::sign) throw DomainError("rule does not target a sign");
  return evaluate_rule(rule.body, column);
}

inline SignMatrix assemble_sign_matrix(const KnowledgeBase& kb, const ObservablesMatrix& d) {
  if (d.columns.size() != kb.sign_count()) throw DomainError("observables matrix does not match the declared signs");
  SignMatrix s;
  for (std::size_t j = 0; j < kb.signs.size(); ++j) {
    Grade value = Grade::zero();
    for (const auto* rule : kb.rules_for(TargetKind::sign, kb.signs[j].id))
      value = std::max(value, sign_severity(*rule, d.columns[j]));
    s.signs.push_back(kb.signs[j].id);
    s.entries.push_back(value);
  }
  return s;
}

}  // namespace triage
