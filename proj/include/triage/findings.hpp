#pragma once

// Single intake findings, merged one at a time into a PatientRecord.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "triage/json_support.hpp"
#include "triage/record.hpp"

namespace triage {

struct HistoryAnswer {
  std::string aspect;
  std::uint8_t value = 0;
  bool operator==(const HistoryAnswer&) const = default;
};

struct RecalledSymptom {
  std::string disease;
  std::string symptom;
  // false withdraws an earlier recall.
  bool present = true;
  bool operator==(const RecalledSymptom&) const = default;
};

// Creates the problem report if needed, then sets the given profile factors.
struct ProblemFinding {
  std::string problem;
  Column factors;
  bool operator==(const ProblemFinding&) const = default;
};

struct ObservationFinding {
  std::string sign;
  Column values;
  bool operator==(const ObservationFinding&) const = default;
};

struct TestFinding {
  TestResult result;
  bool operator==(const TestFinding&) const = default;
};

// nullopt clears the override.
struct AlphaFinding {
  std::optional<Grade> alpha;
  bool operator==(const AlphaFinding&) const = default;
};

using Finding = std::variant<HistoryAnswer, RecalledSymptom, ProblemFinding, ObservationFinding, TestFinding, AlphaFinding>;

// A value replaced by a later finding for the same key.
struct AuditEntry {
  std::uint64_t revision = 0;
  std::string key;
  json previous;
  json current;
  bool operator==(const AuditEntry&) const = default;
};

namespace detail {

inline void note_change(std::vector<AuditEntry>* audit, const std::string& key, const json& previous, const json& current) {
  if (audit && !previous.is_null() && previous != current) audit->push_back({0, key, previous, current});
}

inline json test_value_json(const TestResult& r) {
  if (const auto* v = std::get_if<double>(&r.value)) return *v;
  return std::get<std::vector<double>>(r.value);
}

}  // namespace detail

// Later values for a key replace earlier ones. Replacements of a different
// value are appended to `audit` (with revision left 0 for the caller to stamp).
inline void merge_finding(PatientRecord& rec, const Finding& finding, std::vector<AuditEntry>* audit = nullptr) {
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, HistoryAnswer>) {
          auto it = rec.direct_history.find(f.aspect);
          detail::note_change(audit, "direct_history." + f.aspect,
                              it == rec.direct_history.end() ? json() : json(static_cast<int>(it->second)),
                              static_cast<int>(f.value));
          rec.direct_history[f.aspect] = f.value;
        } else if constexpr (std::is_same_v<F, RecalledSymptom>) {
          auto& set = rec.recalled_past_symptoms[f.disease];
          const bool had = set.contains(f.symptom);
          // Absence is the default, so only a withdrawn recall counts as a replacement.
          if (had && !f.present) detail::note_change(audit, "recalled_past_symptoms." + f.disease + "." + f.symptom, true, false);
          if (f.present) set.insert(f.symptom);
          else set.erase(f.symptom);
          if (set.empty()) rec.recalled_past_symptoms.erase(f.disease);
        } else if constexpr (std::is_same_v<F, ProblemFinding>) {
          auto it = std::find_if(rec.problem_reports.begin(), rec.problem_reports.end(),
                                 [&](const auto& r) { return r.problem == f.problem; });
          if (it == rec.problem_reports.end()) {
            rec.problem_reports.push_back({f.problem, {}});
            it = std::prev(rec.problem_reports.end());
          }
          for (const auto& [factor, cell] : f.factors) {
            auto old = it->profile.find(factor);
            detail::note_change(audit, "problem_reports." + f.problem + "." + factor,
                                old == it->profile.end() ? json() : detail::cell_to_json(old->second),
                                detail::cell_to_json(cell));
            it->profile[factor] = cell;
          }
        } else if constexpr (std::is_same_v<F, ObservationFinding>) {
          auto& col = rec.observations[f.sign];
          for (const auto& [obs, cell] : f.values) {
            auto old = col.find(obs);
            detail::note_change(audit, "observations." + f.sign + "." + obs,
                                old == col.end() ? json() : detail::cell_to_json(old->second), detail::cell_to_json(cell));
            col[obs] = cell;
          }
          if (col.empty()) rec.observations.erase(f.sign);
        } else if constexpr (std::is_same_v<F, TestFinding>) {
          auto it = std::find_if(rec.test_results.begin(), rec.test_results.end(),
                                 [&](const auto& r) { return r.test == f.result.test; });
          if (it == rec.test_results.end()) {
            rec.test_results.push_back(f.result);
          } else {
            detail::note_change(audit, "test_results." + f.result.test, detail::test_value_json(*it),
                                detail::test_value_json(f.result));
            *it = f.result;
          }
        } else {
          detail::note_change(audit, "alpha_override", rec.alpha_override ? json(rec.alpha_override->value()) : json(),
                              f.alpha ? json(f.alpha->value()) : json());
          rec.alpha_override = f.alpha;
        }
      },
      finding);
}

// Splits a record into the finest findings that rebuild it when merged in any order.
inline std::vector<Finding> decompose(const PatientRecord& rec) {
  std::vector<Finding> out;
  for (const auto& [aspect, value] : rec.direct_history) out.push_back(HistoryAnswer{aspect, value});
  for (const auto& [disease, symptoms] : rec.recalled_past_symptoms)
    for (const auto& s : symptoms) out.push_back(RecalledSymptom{disease, s, true});
  for (const auto& r : rec.problem_reports) {
    if (r.profile.empty()) out.push_back(ProblemFinding{r.problem, {}});
    for (const auto& [factor, cell] : r.profile) out.push_back(ProblemFinding{r.problem, {{factor, cell}}});
  }
  for (const auto& [sign, cells] : rec.observations)
    for (const auto& [obs, cell] : cells) out.push_back(ObservationFinding{sign, {{obs, cell}}});
  for (const auto& r : rec.test_results) out.push_back(TestFinding{r});
  if (rec.alpha_override) out.push_back(AlphaFinding{rec.alpha_override});
  return out;
}

inline Finding finding_from_json(const KnowledgeBase& kb, const json& j) {
  Issues issues;
  JsonReader rd(issues);
  if (!rd.expect_object(j, "")) throw ValidationError(issues.items());
  auto type = rd.string(j, "type", "");
  if (!type) throw ValidationError(issues.items());
  std::optional<Finding> out;
  if (*type == "history") {
    rd.check_keys(j, "", {"type", "aspect", "value"});
    auto aspect = rd.string(j, "aspect", "");
    std::optional<std::uint8_t> bit;
    if (const json* v = rd.member(j, "value", "", true)) bit = detail::read_bit(rd, *v, "value");
    if (aspect && bit) out = HistoryAnswer{*aspect, *bit};
  } else if (*type == "recalled_symptom") {
    rd.check_keys(j, "", {"type", "disease", "symptom", "present"});
    auto disease = rd.string(j, "disease", "");
    auto symptom = rd.string(j, "symptom", "");
    auto present = rd.boolean(j, "present", "", false);
    if (disease && symptom) out = RecalledSymptom{*disease, *symptom, present.value_or(true)};
  } else if (*type == "problem") {
    rd.check_keys(j, "", {"type", "problem", "profile"});
    auto problem = rd.string(j, "problem", "");
    if (problem) {
      Column factors;
      if (const json* p = rd.member(j, "profile", "", false))
        factors = detail::read_column(rd, *p, "profile", detail::factor_lookup(kb, *problem));
      out = ProblemFinding{*problem, std::move(factors)};
    }
  } else if (*type == "observation") {
    rd.check_keys(j, "", {"type", "sign", "values"});
    auto sign = rd.string(j, "sign", "");
    if (sign) {
      Column values;
      if (const json* v = rd.member(j, "values", "", true))
        values = detail::read_column(rd, *v, "values", detail::observable_lookup(kb, *sign));
      out = ObservationFinding{*sign, std::move(values)};
    }
  } else if (*type == "test_result") {
    json body = j;
    body.erase("type");
    if (auto r = detail::read_test_result(rd, body, "")) out = TestFinding{std::move(*r)};
  } else if (*type == "alpha") {
    rd.check_keys(j, "", {"type", "value"});
    const json* v = rd.member(j, "value", "", true);
    if (v && v->is_null()) {
      out = AlphaFinding{std::nullopt};
    } else if (v) {
      if (auto d = rd.number_value(*v, "value")) {
        if (Grade::valid(*d)) out = AlphaFinding{Grade{*d}};
        else issues.add("value", "alpha out of range");
      }
    }
  } else {
    issues.add("type", "unknown finding type '" + *type + "'");
  }
  throw_if_any(issues);
  if (!out) throw ValidationError("", "malformed finding");
  return *out;
}

inline json to_json(const Finding& finding) {
  return std::visit(
      [](const auto& f) -> json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, HistoryAnswer>) {
          return {{"type", "history"}, {"aspect", f.aspect}, {"value", static_cast<int>(f.value)}};
        } else if constexpr (std::is_same_v<F, RecalledSymptom>) {
          return {{"type", "recalled_symptom"}, {"disease", f.disease}, {"symptom", f.symptom}, {"present", f.present}};
        } else if constexpr (std::is_same_v<F, ProblemFinding>) {
          return {{"type", "problem"}, {"problem", f.problem}, {"profile", detail::column_to_json(f.factors)}};
        } else if constexpr (std::is_same_v<F, ObservationFinding>) {
          return {{"type", "observation"}, {"sign", f.sign}, {"values", detail::column_to_json(f.values)}};
        } else if constexpr (std::is_same_v<F, TestFinding>) {
          json out = detail::test_result_to_json(f.result);
          out["type"] = "test_result";
          return out;
        } else {
          return {{"type", "alpha"}, {"value", f.alpha ? json(f.alpha->value()) : json(nullptr)}};
        }
      },
      finding);
}

}  // namespace triage
