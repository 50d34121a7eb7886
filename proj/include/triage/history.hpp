#pragma once

// Binary history matrix H = [H_A | H_B]. H_A covers possibly-undiagnosed
// aspects and is inferred from recalled past symptoms when the physician has
// not designated it directly.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "triage/knowledge_base.hpp"

namespace triage {

// Presence flags over the prominent past symptoms of one disease, in the
// order of the disease's graded symptom set.
struct PastSymptomVector {
  std::string disease;
  std::vector<std::string> symptoms;
  std::vector<std::uint8_t> entries;

  std::size_t size() const { return entries.size(); }
  bool operator==(const PastSymptomVector&) const = default;
};

struct HistoryMatrix {
  std::vector<std::string> aspects;
  std::vector<std::uint8_t> entries;
  // First `split` entries form H_A.
  std::size_t split = 0;

  std::size_t size() const { return entries.size(); }
  std::span<const std::uint8_t> undiagnosed_part() const { return {entries.data(), split}; }
  std::span<const std::uint8_t> direct_part() const { return {entries.data() + split, entries.size() - split}; }
  bool operator==(const HistoryMatrix&) const = default;
};

inline PastSymptomVector build_past_symptom_vector(const KnowledgeBase& kb, const std::string& disease,
                                                   const std::set<std::string>& recalled,
                                                   std::optional<Grade> alpha_override = std::nullopt,
                                                   std::vector<std::string>* warnings = nullptr) {
  const auto* universe = kb.past_symptom_universe(disease);
  if (!universe) throw DomainError("unknown undiagnosed disease '" + disease + "'");
  PastSymptomVector v{disease, prominent_symptom_set(kb, disease, alpha_override), {}};
  for (const auto& s : v.symptoms) v.entries.push_back(recalled.contains(s) ? 1 : 0);
  if (warnings) {
    for (const auto& s : recalled)
      if (!universe->grades.contains(s))
        warnings->push_back("recalled symptom '" + s + "' is not a symptom of '" + disease + "'; ignored");
  }
  return v;
}

// Evaluates f_j on a past-symptom vector. Weights are looked up by symptom id;
// symptoms outside the prominent set carry no weight.
inline std::uint8_t infer_history_entry(const MappingRule& rule, const PastSymptomVector& v) {
  if (rule.target_kind != TargetKind::history) throw DomainError("rule does not target a history aspect");
  if (rule.target != v.disease)
    throw DomainError("rule targets '" + rule.target + "' but the vector belongs to '" + v.disease + "'");
  if (v.symptoms.size() != v.entries.size()) throw DomainError("past-symptom vector labels and entries differ in length");

  if (const auto* wt = std::get_if<WeightedThreshold>(&rule.body)) {
    std::vector<double> weights(v.symptoms.size(), 0.0);
    for (std::size_t i = 0; i < v.symptoms.size(); ++i)
      for (const auto& w : wt->weights)
        if (w.source == v.symptoms[i]) weights[i] = w.weight;
    return weighted_threshold(weights, v.entries, wt->threshold);
  }
  if (const auto* lm = std::get_if<LocationMatch>(&rule.body)) {
    for (const auto& [symptom, want] : lm->required) {
      double have = 0.0;
      for (std::size_t i = 0; i < v.symptoms.size(); ++i)
        if (v.symptoms[i] == symptom) have = v.entries[i];
      const auto* w = std::get_if<double>(&want);
      if (!w || *w != have) return 0;
    }
    return 1;
  }
  throw DomainError(std::string("history rules cannot be ") + rule_kind_name(rule.body));
}

inline HistoryMatrix assemble_history_matrix(const KnowledgeBase& kb,
                                             const std::map<std::string, std::uint8_t>& direct_answers,
                                             const std::map<std::string, std::set<std::string>>& recalled_by_disease,
                                             std::optional<Grade> alpha_override = std::nullopt,
                                             std::vector<std::string>* warnings = nullptr) {
  for (const auto& [aspect, value] : direct_answers) {
    if (!kb.aspect(aspect)) throw DomainError("unknown history aspect '" + aspect + "'");
    if (value > 1) throw DomainError("history answer for '" + aspect + "' must be 0 or 1");
  }
  static const std::set<std::string> kNothing;
  HistoryMatrix h;
  h.split = kb.undiagnosed_count();
  for (const auto& a : kb.history_aspects) {
    h.aspects.push_back(a.id);
    if (auto it = direct_answers.find(a.id); it != direct_answers.end()) {
      h.entries.push_back(it->second);
      continue;
    }
    if (!a.undiagnosed) {
      h.entries.push_back(0);
      continue;
    }
    auto rec = recalled_by_disease.find(a.id);
    const auto& recalled = rec == recalled_by_disease.end() ? kNothing : rec->second;
    auto v = build_past_symptom_vector(kb, a.id, recalled, alpha_override, warnings);
    auto rules = kb.rules_for(TargetKind::history, a.id);
    if (rules.empty()) throw DomainError("no history rule for '" + a.id + "'");
    h.entries.push_back(infer_history_entry(*rules.front(), v));
  }
  return h;
}

}  // namespace triage
