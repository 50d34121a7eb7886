#pragma once

// Composition of the four models over one patient record, and the
// structured / human-readable reports of the result.

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "triage/clinical_tests.hpp"
#include "triage/history.hpp"
#include "triage/json_support.hpp"
#include "triage/record.hpp"
#include "triage/signs.hpp"
#include "triage/symptoms.hpp"

namespace triage {

struct Unanswered {
  std::vector<std::string> history_aspects;
  std::vector<std::string> problems;
  std::vector<std::string> signs;
  std::vector<std::string> tests;

  bool operator==(const Unanswered&) const = default;
};

struct EvaluationMatrices {
  std::string record_id;
  // Global threshold in effect (the record's override, or the knowledge base's).
  Grade alpha;
  HistoryMatrix history;
  SymptomMatrix symptoms;
  SignMatrix signs;
  TestAbnormalityVector tests;
  Unanswered unanswered;
  std::vector<std::string> warnings;

  bool operator==(const EvaluationMatrices&) const = default;
};

inline EvaluationMatrices evaluate(const KnowledgeBase& kb, const PatientRecord& record) {
  throw_if_any(validate_record(kb, record));

  EvaluationMatrices out;
  out.record_id = record.record_id;
  out.alpha = record.alpha_override.value_or(kb.alpha);
  out.history = assemble_history_matrix(kb, record.direct_history, record.recalled_past_symptoms,
                                        record.alpha_override, &out.warnings);
  out.symptoms = assemble_symptom_matrix(kb, build_problem_matrix(kb, record.problem_reports));
  out.signs = assemble_sign_matrix(kb, build_observables_matrix(kb, record.observations));
  out.tests = assemble_test_vector(kb, record.test_results);

  for (const auto& a : kb.history_aspects) {
    if (record.direct_history.contains(a.id)) continue;
    if (a.undiagnosed && record.recalled_past_symptoms.contains(a.id) && !record.recalled_past_symptoms.at(a.id).empty())
      continue;
    out.unanswered.history_aspects.push_back(a.id);
  }
  for (const auto& p : kb.problems) {
    bool reported = std::any_of(record.problem_reports.begin(), record.problem_reports.end(),
                                [&](const auto& r) { return r.problem == p.id; });
    if (!reported) out.unanswered.problems.push_back(p.id);
  }
  for (const auto& s : kb.signs) {
    auto it = record.observations.find(s.id);
    if (it == record.observations.end() || it->second.empty()) out.unanswered.signs.push_back(s.id);
  }
  for (std::size_t i = 0; i < kb.tests.size(); ++i)
    if (!out.tests.entries[i]) out.unanswered.tests.push_back(kb.tests[i].id);
  return out;
}

enum class ReportFormat { structured, text };

inline std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "structured" || name == "json") return ReportFormat::structured;
  if (name == "text") return ReportFormat::text;
  return std::nullopt;
}

inline json to_json(const EvaluationMatrices& m) {
  auto grades = [](const std::vector<Grade>& gs) {
    json out = json::array();
    for (Grade g : gs) out.push_back(g.value());
    return out;
  };
  json z = json::array();
  for (const auto& e : m.tests.entries) z.push_back(e ? json(e->value()) : json(nullptr));
  json h = json::array();
  for (auto bit : m.history.entries) h.push_back(static_cast<int>(bit));
  return {
      {"record_id", m.record_id},
      {"alpha", m.alpha.value()},
      {"H", {{"aspects", m.history.aspects}, {"values", h}, {"split", m.history.split}}},
      {"A", {{"symptoms", m.symptoms.symptoms}, {"values", grades(m.symptoms.entries)}}},
      {"S", {{"signs", m.signs.signs}, {"values", grades(m.signs.entries)}}},
      {"Z", {{"tests", m.tests.tests}, {"values", z}}},
      {"unanswered",
       {{"history_aspects", m.unanswered.history_aspects},
        {"problems", m.unanswered.problems},
        {"signs", m.unanswered.signs},
        {"tests", m.unanswered.tests}}},
      {"warnings", m.warnings},
  };
}

// Inverse of to_json; throws ValidationError on a malformed report.
inline EvaluationMatrices matrices_from_json(const json& j) {
  Issues issues;
  JsonReader rd(issues);
  EvaluationMatrices m;
  auto section = [&](const char* key) -> const json& {
    static const json kEmpty = json::object();
    const json* s = rd.member(j, key, "", true);
    return s && rd.expect_object(*s, key) ? *s : kEmpty;
  };
  auto grades = [&](const json& obj, const std::string& path) {
    std::vector<Grade> out;
    for (double d : rd.numbers(obj, "values", path)) {
      if (Grade::valid(d)) out.emplace_back(d);
      else issues.add(path + ".values", "grade out of range");
    }
    return out;
  };
  if (!rd.expect_object(j, "")) throw ValidationError(issues.items());
  rd.check_keys(j, "", {"record_id", "alpha", "H", "A", "S", "Z", "unanswered", "warnings"});
  m.record_id = rd.string(j, "record_id", "").value_or("");
  if (auto a = rd.number(j, "alpha", "")) {
    if (Grade::valid(*a)) m.alpha = Grade{*a};
    else issues.add("alpha", "alpha out of range");
  }

  const json& h = section("H");
  m.history.aspects = rd.strings(h, "aspects", "H");
  for (double d : rd.numbers(h, "values", "H")) {
    if (d != 0.0 && d != 1.0) issues.add("H.values", "history entries must be 0 or 1");
    m.history.entries.push_back(d == 1.0 ? 1 : 0);
  }
  if (auto p = rd.number(h, "split", "H")) m.history.split = static_cast<std::size_t>(*p);

  const json& a = section("A");
  m.symptoms.symptoms = rd.strings(a, "symptoms", "A");
  m.symptoms.entries = grades(a, "A");
  const json& s = section("S");
  m.signs.signs = rd.strings(s, "signs", "S");
  m.signs.entries = grades(s, "S");

  const json& z = section("Z");
  m.tests.tests = rd.strings(z, "tests", "Z");
  if (const json* vals = rd.member(z, "values", "Z", true); vals && rd.expect_array(*vals, "Z.values")) {
    for (std::size_t i = 0; i < vals->size(); ++i) {
      if ((*vals)[i].is_null()) {
        m.tests.entries.emplace_back();
      } else if (auto d = rd.number_value((*vals)[i], JsonReader::index("Z.values", i)); d && Grade::valid(*d)) {
        m.tests.entries.emplace_back(Grade{*d});
      } else {
        issues.add(JsonReader::index("Z.values", i), "grade out of range");
      }
    }
  }

  const json& u = section("unanswered");
  m.unanswered.history_aspects = rd.strings(u, "history_aspects", "unanswered");
  m.unanswered.problems = rd.strings(u, "problems", "unanswered");
  m.unanswered.signs = rd.strings(u, "signs", "unanswered");
  m.unanswered.tests = rd.strings(u, "tests", "unanswered");
  m.warnings = rd.strings(j, "warnings", "", false);
  throw_if_any(issues);
  return m;
}

namespace detail {

inline std::string fixed(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(3) << v;
  return ss.str();
}

inline void list_line(std::ostringstream& out, const char* label, const std::vector<std::string>& items) {
  out << "  " << label << ": ";
  if (items.empty()) out << "(none)";
  for (std::size_t i = 0; i < items.size(); ++i) out << (i ? ", " : "") << items[i];
  out << "\n";
}

}  // namespace detail

inline std::string render_text(const EvaluationMatrices& m) {
  std::ostringstream out;
  std::size_t width = 0;
  for (const auto* ids : {&m.history.aspects, &m.symptoms.symptoms, &m.signs.signs, &m.tests.tests})
    for (const auto& id : *ids) width = std::max(width, id.size());
  auto row = [&](const std::string& id, const std::string& value, const char* note = "") {
    out << "  " << std::left << std::setw(static_cast<int>(width)) << id << "  " << value << note << "\n";
  };

  out << "Evaluation of record '" << m.record_id << "' (alpha " << detail::fixed(m.alpha.value()) << ")\n\n";
  out << "History H (1 = present; first " << m.history.split << " inferable)\n";
  for (std::size_t i = 0; i < m.history.size(); ++i)
    row(m.history.aspects[i], std::to_string(m.history.entries[i]), i < m.history.split ? "  [H_A]" : "  [H_B]");
  out << "\nSymptoms A (severity, 1 = most severe)\n";
  for (std::size_t i = 0; i < m.symptoms.entries.size(); ++i)
    row(m.symptoms.symptoms[i], detail::fixed(m.symptoms.entries[i].value()));
  out << "\nSigns S (severity, 1 = most severe)\n";
  for (std::size_t i = 0; i < m.signs.entries.size(); ++i) row(m.signs.signs[i], detail::fixed(m.signs.entries[i].value()));
  out << "\nTests Z (abnormality, 1 = most abnormal)\n";
  for (std::size_t i = 0; i < m.tests.entries.size(); ++i)
    row(m.tests.tests[i], m.tests.entries[i] ? detail::fixed(m.tests.entries[i]->value()) : std::string("not performed"));
  out << "\nUnanswered\n";
  detail::list_line(out, "history aspects", m.unanswered.history_aspects);
  detail::list_line(out, "problems", m.unanswered.problems);
  detail::list_line(out, "signs", m.unanswered.signs);
  detail::list_line(out, "tests", m.unanswered.tests);
  if (!m.warnings.empty()) {
    out << "\nWarnings\n";
    for (const auto& w : m.warnings) out << "  " << w << "\n";
  }
  return out.str();
}

inline std::string render_report(const EvaluationMatrices& m, ReportFormat format) {
  if (format == ReportFormat::text) return render_text(m);
  return to_json(m).dump(2) + "\n";
}

}  // namespace triage
