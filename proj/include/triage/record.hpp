#pragma once

// Raw patient intake and its JSON form (schemas/record.schema.json).

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "triage/json_support.hpp"
#include "triage/knowledge_base.hpp"

namespace triage {

struct ProblemReport {
  std::string problem;
  Column profile;

  bool operator==(const ProblemReport&) const = default;
};

struct TestResult {
  std::string test;
  // A single reading, or one value per declared aspect in declaration order.
  std::variant<double, std::vector<double>> value;

  bool multi_aspect() const { return std::holds_alternative<std::vector<double>>(value); }
  bool operator==(const TestResult&) const = default;
};

struct PatientRecord {
  std::string record_id;
  std::map<std::string, std::uint8_t> direct_history;
  // Empty sets are never stored.
  std::map<std::string, std::set<std::string>> recalled_past_symptoms;
  std::vector<ProblemReport> problem_reports;
  std::map<std::string, Column> observations;
  std::vector<TestResult> test_results;
  std::optional<Grade> alpha_override;

  bool operator==(const PatientRecord&) const = default;
};

// Orders problem reports and test results by their knowledge-base declaration.
inline void canonicalize(const KnowledgeBase& kb, PatientRecord& rec) {
  auto rank_of = [](const auto& items, const std::string& id) {
    for (std::size_t i = 0; i < items.size(); ++i)
      if (items[i].id == id) return i;
    return items.size();
  };
  std::stable_sort(rec.problem_reports.begin(), rec.problem_reports.end(), [&](const auto& a, const auto& b) {
    return rank_of(kb.problems, a.problem) < rank_of(kb.problems, b.problem);
  });
  std::stable_sort(rec.test_results.begin(), rec.test_results.end(), [&](const auto& a, const auto& b) {
    return rank_of(kb.tests, a.test) < rank_of(kb.tests, b.test);
  });
  std::erase_if(rec.recalled_past_symptoms, [](const auto& kv) { return kv.second.empty(); });
  std::erase_if(rec.observations, [](const auto& kv) { return kv.second.empty(); });
}

namespace detail {

inline void check_cell(const ValueDecl& decl, const CellValue& cell, const std::string& path, Issues& issues) {
  switch (decl.type) {
    case ValueType::categorical: {
      const auto* s = std::get_if<std::string>(&cell);
      if (!s) {
        issues.add(path, "'" + decl.id + "' expects a categorical label");
      } else if (!decl.values.empty() && std::find(decl.values.begin(), decl.values.end(), *s) == decl.values.end()) {
        issues.add(path, "'" + *s + "' is not a declared value of '" + decl.id + "'");
      }
      break;
    }
    case ValueType::numeric:
      if (!std::holds_alternative<double>(cell)) issues.add(path, "'" + decl.id + "' expects a number");
      break;
    case ValueType::grade:
      if (!std::holds_alternative<Grade>(cell)) issues.add(path, "'" + decl.id + "' expects a grade in [0, 1]");
      break;
  }
}

}  // namespace detail

// Every reference in the record must resolve against the knowledge base.
inline Issues validate_record(const KnowledgeBase& kb, const PatientRecord& rec) {
  Issues issues;
  for (const auto& [aspect, value] : rec.direct_history) {
    const std::string path = "direct_history." + aspect;
    if (!kb.aspect(aspect)) issues.add(path, "unknown history aspect '" + aspect + "'");
    if (value > 1) issues.add(path, "history answers must be 0 or 1");
  }

  const auto known_symptoms = kb.all_past_symptoms();
  for (const auto& [disease, recalled] : rec.recalled_past_symptoms) {
    const std::string path = "recalled_past_symptoms." + disease;
    if (!kb.past_symptom_universe(disease)) {
      issues.add(path, "'" + disease + "' is not an undiagnosed history aspect");
      continue;
    }
    std::size_t i = 0;
    for (const auto& s : recalled) {
      if (!known_symptoms.contains(s))
        issues.add(path + "[" + std::to_string(i) + "]", "unknown past symptom '" + s + "'");
      ++i;
    }
  }

  std::set<std::string> reported;
  for (std::size_t i = 0; i < rec.problem_reports.size(); ++i) {
    const auto& r = rec.problem_reports[i];
    const std::string path = "problem_reports[" + std::to_string(i) + "]";
    const auto* decl = kb.problem(r.problem);
    if (!decl) {
      issues.add(path + ".problem", "unknown problem '" + r.problem + "'");
      continue;
    }
    if (!reported.insert(r.problem).second) issues.add(path + ".problem", "duplicate report for problem '" + r.problem + "'");
    for (const auto& [factor, cell] : r.profile) {
      const auto* f = decl->factor(factor);
      if (!f) issues.add(path + ".profile." + factor, "factor '" + factor + "' is not in the profile of '" + r.problem + "'");
      else detail::check_cell(*f, cell, path + ".profile." + factor, issues);
    }
  }

  for (const auto& [sign, cells] : rec.observations) {
    const std::string path = "observations." + sign;
    if (!kb.sign(sign)) {
      issues.add(path, "unknown sign '" + sign + "'");
      continue;
    }
    const auto* schema = kb.observable_schema(sign);
    for (const auto& [obs, cell] : cells) {
      const auto* o = schema ? schema->observable(obs) : nullptr;
      if (!o) issues.add(path + "." + obs, "observable '" + obs + "' is not declared for sign '" + sign + "'");
      else detail::check_cell(*o, cell, path + "." + obs, issues);
    }
  }

  std::set<std::string> performed;
  for (std::size_t i = 0; i < rec.test_results.size(); ++i) {
    const auto& r = rec.test_results[i];
    const std::string path = "test_results[" + std::to_string(i) + "]";
    const auto* t = kb.test(r.test);
    if (!t) {
      issues.add(path + ".test", "unknown test '" + r.test + "'");
      continue;
    }
    if (!performed.insert(r.test).second) issues.add(path + ".test", "duplicate result for test '" + r.test + "'");
    if (t->multi_aspect() != r.multi_aspect()) {
      issues.add(path, t->multi_aspect() ? "test '" + r.test + "' expects aspect values"
                                          : "test '" + r.test + "' expects a single value");
      continue;
    }
    if (const auto* v = std::get_if<double>(&r.value)) {
      if (!std::isfinite(*v)) issues.add(path + ".value", "value must be finite");
      else if (t->domain && !t->domain->contains(*v)) issues.add(path + ".value", "value outside the test's result domain");
    } else {
      const auto& aspects = std::get<std::vector<double>>(r.value);
      if (aspects.size() != t->aspects.size()) {
        issues.add(path + ".aspects", "expected " + std::to_string(t->aspects.size()) + " aspect values, got " +
                                          std::to_string(aspects.size()));
        continue;
      }
      for (std::size_t a = 0; a < aspects.size(); ++a) {
        const std::string ap = path + ".aspects[" + std::to_string(a) + "]";
        if (!std::isfinite(aspects[a])) issues.add(ap, "value must be finite");
        else if (t->aspects[a].domain && !t->aspects[a].domain->contains(aspects[a]))
          issues.add(ap, "value outside the domain of aspect '" + t->aspects[a].id + "'");
      }
    }
  }
  return issues;
}

namespace detail {

// Types a JSON cell. Numbers become grades when the declaration says so and the
// value is in range; anything else is left for validate_record to report.
inline std::optional<CellValue> read_cell(JsonReader& rd, const json& v, const ValueDecl* decl, const std::string& path) {
  if (v.is_string()) return CellValue{v.get<std::string>()};
  auto d = rd.number_value(v, path);
  if (!d) return std::nullopt;
  if (decl && decl->type == ValueType::grade && Grade::valid(*d)) return CellValue{Grade{*d}};
  return CellValue{*d};
}

inline json cell_to_json(const CellValue& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* g = std::get_if<Grade>(&c)) return g->value();
  return std::get<double>(c);
}

inline Column read_column(JsonReader& rd, const json& obj, const std::string& path,
                          const std::function<const ValueDecl*(const std::string&)>& lookup) {
  Column col;
  if (!rd.expect_object(obj, path)) return col;
  for (const auto& [k, v] : obj.items())
    if (auto cell = read_cell(rd, v, lookup(k), JsonReader::join(path, k))) col.emplace(k, *cell);
  return col;
}

inline json column_to_json(const Column& col) {
  json out = json::object();
  for (const auto& [k, v] : col) out[k] = cell_to_json(v);
  return out;
}

inline std::optional<std::uint8_t> read_bit(JsonReader& rd, const json& v, const std::string& path) {
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  if (v.is_number_integer() || v.is_number_unsigned()) {
    auto i = v.get<long long>();
    if (i == 0 || i == 1) return static_cast<std::uint8_t>(i);
  }
  rd.issues().add(path, "history answers must be 0 or 1");
  return std::nullopt;
}

inline std::optional<TestResult> read_test_result(JsonReader& rd, const json& j, const std::string& path) {
  if (!rd.expect_object(j, path)) return std::nullopt;
  rd.check_keys(j, path, {"test", "value", "aspects"});
  auto test = rd.string(j, "test", path);
  const bool has_value = j.contains("value");
  const bool has_aspects = j.contains("aspects");
  if (has_value == has_aspects) {
    rd.issues().add(path, "test result needs exactly one of 'value' or 'aspects'");
    return std::nullopt;
  }
  if (!test) return std::nullopt;
  if (has_value) {
    auto v = rd.number(j, "value", path);
    if (!v) return std::nullopt;
    return TestResult{*test, *v};
  }
  const std::size_t before = rd.issues().size();
  auto aspects = rd.numbers(j, "aspects", path);
  if (rd.issues().size() != before) return std::nullopt;
  return TestResult{*test, aspects};
}

inline json test_result_to_json(const TestResult& r) {
  json out = {{"test", r.test}};
  if (const auto* v = std::get_if<double>(&r.value)) out["value"] = *v;
  else out["aspects"] = std::get<std::vector<double>>(r.value);
  return out;
}

inline std::function<const ValueDecl*(const std::string&)> factor_lookup(const KnowledgeBase& kb,
                                                                         const std::string& problem) {
  const auto* p = kb.problem(problem);
  return [p](const std::string& id) -> const ValueDecl* { return p ? p->factor(id) : nullptr; };
}

inline std::function<const ValueDecl*(const std::string&)> observable_lookup(const KnowledgeBase& kb,
                                                                             const std::string& sign) {
  const auto* s = kb.observable_schema(sign);
  return [s](const std::string& id) -> const ValueDecl* { return s ? s->observable(id) : nullptr; };
}

}  // namespace detail

// Reads a record document, typing cells against `kb`. Throws ValidationError
// with every structural or referential problem found.
inline PatientRecord record_from_json(const KnowledgeBase& kb, const json& root) {
  Issues issues;
  JsonReader rd(issues);
  PatientRecord rec;
  if (!rd.expect_object(root, "")) throw ValidationError(issues.items());
  rd.check_keys(root, "", {"record_id", "direct_history", "recalled_past_symptoms", "problem_reports", "observations",
                           "test_results", "alpha_override"});
  rec.record_id = rd.string(root, "record_id", "", false).value_or("");

  if (const json* dh = rd.member(root, "direct_history", "", false); dh && rd.expect_object(*dh, "direct_history")) {
    for (const auto& [k, v] : dh->items())
      if (auto bit = detail::read_bit(rd, v, "direct_history." + k)) rec.direct_history[k] = *bit;
  }
  if (const json* rp = rd.member(root, "recalled_past_symptoms", "", false);
      rp && rd.expect_object(*rp, "recalled_past_symptoms")) {
    for (const auto& [disease, list] : rp->items()) {
      const std::string path = "recalled_past_symptoms." + disease;
      if (!rd.expect_array(list, path)) continue;
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].is_string()) rec.recalled_past_symptoms[disease].insert(list[i].get<std::string>());
        else issues.add(JsonReader::index(path, i), "expected a string");
      }
    }
  }
  if (const json* prs = rd.member(root, "problem_reports", "", false); prs && rd.expect_array(*prs, "problem_reports")) {
    for (std::size_t i = 0; i < prs->size(); ++i) {
      const std::string path = JsonReader::index("problem_reports", i);
      const json& pr = (*prs)[i];
      if (!rd.expect_object(pr, path)) continue;
      rd.check_keys(pr, path, {"problem", "profile"});
      auto problem = rd.string(pr, "problem", path);
      if (!problem) continue;
      Column profile;
      if (const json* prof = rd.member(pr, "profile", path, false))
        profile = detail::read_column(rd, *prof, JsonReader::join(path, "profile"), detail::factor_lookup(kb, *problem));
      rec.problem_reports.push_back({*problem, std::move(profile)});
    }
  }
  if (const json* obs = rd.member(root, "observations", "", false); obs && rd.expect_object(*obs, "observations")) {
    for (const auto& [sign, cells] : obs->items())
      rec.observations[sign] = detail::read_column(rd, cells, "observations." + sign, detail::observable_lookup(kb, sign));
  }
  if (const json* trs = rd.member(root, "test_results", "", false); trs && rd.expect_array(*trs, "test_results")) {
    for (std::size_t i = 0; i < trs->size(); ++i)
      if (auto r = detail::read_test_result(rd, (*trs)[i], JsonReader::index("test_results", i)))
        rec.test_results.push_back(std::move(*r));
  }
  if (const json* a = rd.member(root, "alpha_override", "", false); a && !a->is_null()) {
    if (auto d = rd.number_value(*a, "alpha_override")) {
      if (Grade::valid(*d)) rec.alpha_override = Grade{*d};
      else issues.add("alpha_override", "alpha out of range");
    }
  }
  issues.append(validate_record(kb, rec));
  throw_if_any(issues);
  canonicalize(kb, rec);
  return rec;
}

inline PatientRecord load_record(const KnowledgeBase& kb, std::string_view text) {
  return record_from_json(kb, parse_json(text));
}

inline PatientRecord load_record_file(const KnowledgeBase& kb, const std::string& path) {
  return load_record(kb, read_file(path));
}

inline json to_json(const PatientRecord& rec) {
  json out = json::object();
  out["record_id"] = rec.record_id;
  json dh = json::object();
  for (const auto& [k, v] : rec.direct_history) dh[k] = static_cast<int>(v);
  out["direct_history"] = dh;
  json rp = json::object();
  for (const auto& [k, v] : rec.recalled_past_symptoms) rp[k] = std::vector<std::string>(v.begin(), v.end());
  out["recalled_past_symptoms"] = rp;
  json prs = json::array();
  for (const auto& r : rec.problem_reports) prs.push_back({{"problem", r.problem}, {"profile", detail::column_to_json(r.profile)}});
  out["problem_reports"] = prs;
  json obs = json::object();
  for (const auto& [k, v] : rec.observations) obs[k] = detail::column_to_json(v);
  out["observations"] = obs;
  json trs = json::array();
  for (const auto& r : rec.test_results) trs.push_back(detail::test_result_to_json(r));
  out["test_results"] = trs;
  if (rec.alpha_override) out["alpha_override"] = rec.alpha_override->value();
  return out;
}

inline std::string serialize(const PatientRecord& rec) { return to_json(rec).dump(2) + "\n"; }

}  // namespace triage
