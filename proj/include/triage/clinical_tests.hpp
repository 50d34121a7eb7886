#pragma once

// Abnormality grades of clinical and diagnostic test results (vector Z).

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "triage/knowledge_base.hpp"
#include "triage/record.hpp"

namespace triage {

struct TestAbnormalityVector {
  std::vector<std::string> tests;
  // nullopt marks a test that was not performed, which is not the same as grade 0.
  std::vector<std::optional<Grade>> entries;

  std::size_t performed() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.has_value(); }));
  }
  bool operator==(const TestAbnormalityVector&) const = default;
};

inline Grade abnormality(const KnowledgeBase& kb, const TestResult& result) {
  const auto* t = kb.test(result.test);
  if (!t) throw DomainError("unknown test '" + result.test + "'");
  if (t->multi_aspect() || !t->membership) throw DomainError("test '" + result.test + "' is multi-aspect");
  const auto* v = std::get_if<double>(&result.value);
  if (!v) throw DomainError("test '" + result.test + "' takes a single value, not aspects");
  return eval_membership(*t->membership, *v);
}

// Grades each aspect with its own membership function, then combines them
// with the test's combinator (maximum unless the knowledge base says otherwise).
inline Grade multi_aspect_abnormality(const KnowledgeBase& kb, const TestResult& result) {
  const auto* t = kb.test(result.test);
  if (!t) throw DomainError("unknown test '" + result.test + "'");
  if (!t->multi_aspect()) throw DomainError("test '" + result.test + "' is not multi-aspect");
  const auto* values = std::get_if<std::vector<double>>(&result.value);
  if (!values) throw DomainError("test '" + result.test + "' expects aspect values");
  if (values->size() != t->aspects.size())
    throw DomainError("test '" + result.test + "' has " + std::to_string(t->aspects.size()) + " aspects, got " +
                      std::to_string(values->size()) + " values");
  std::vector<Grade> grades;
  for (std::size_t i = 0; i < values->size(); ++i) grades.push_back(eval_membership(t->aspects[i].membership, (*values)[i]));
  return combine(t->combinator, grades);
}

inline TestAbnormalityVector assemble_test_vector(const KnowledgeBase& kb, const std::vector<TestResult>& results) {
  std::set<std::string> seen;
  for (const auto& r : results) {
    if (!kb.test(r.test)) throw DomainError("unknown test '" + r.test + "'");
    if (!seen.insert(r.test).second) throw DomainError("duplicate result for test '" + r.test + "'");
  }
  TestAbnormalityVector z;
  for (const auto& t : kb.tests) {
    z.tests.push_back(t.id);
    std::optional<Grade> entry;
    for (const auto& r : results) {
      if (r.test != t.id) continue;
      entry = t.multi_aspect() ? multi_aspect_abnormality(kb, r) : abnormality(kb, r);
    }
    z.entries.push_back(entry);
  }
  return z;
}

}  // namespace triage
