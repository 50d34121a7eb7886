#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace triage;

namespace {

json golden(const std::string& name) { return parse_json(fixtures::slurp(fixtures::data("golden/" + name))); }

std::vector<double> values(const std::vector<Grade>& gs) {
  std::vector<double> out;
  for (auto g : gs) out.push_back(g.value());
  return out;
}

KnowledgeBase demo_with(const std::function<void(json&)>& edit) {
  json j = parse_json(fixtures::slurp(fixtures::data("demo.kb")));
  edit(j);
  return load_knowledge_base(std::string_view(j.dump()));
}

}  // namespace

TEST(ProblemMatrix, Empty) {
  auto b = build_problem_matrix(fixtures::demo_kb(), {});
  EXPECT_TRUE(b.columns.empty());
  EXPECT_EQ(b.rows.size(), 10u);
}

TEST(ProblemMatrix, SingleReport) {
  auto b = build_problem_matrix(fixtures::demo_kb(),
                                {{"chest_pain", {{"site", std::string("substernal")}, {"pain_intensity", Grade{0.7}}}}});
  ASSERT_EQ(b.columns.size(), 1u);
  EXPECT_EQ(b.columns[0].cells.size(), 2u);
  EXPECT_EQ(std::get<std::string>(b.columns[0].cells.at("site")), "substernal");
  EXPECT_EQ(std::get<Grade>(b.columns[0].cells.at("pain_intensity")).value(), 0.7);
}

TEST(ProblemMatrix, DemoMatchesGolden) {
  auto b = build_problem_matrix(fixtures::demo_kb(), fixtures::demo_record().problem_reports);
  json want = golden("demo.problem_matrix.json");
  EXPECT_EQ(json(b.rows), want["rows"]);
  ASSERT_EQ(b.columns.size(), want["columns"].size());
  for (std::size_t i = 0; i < b.columns.size(); ++i) {
    EXPECT_EQ(b.columns[i].problem, want["columns"][i]["problem"]);
    EXPECT_EQ(detail::column_to_json(b.columns[i].cells), want["columns"][i]["cells"]);
  }
}

TEST(ProblemMatrix, RejectsBadReports) {
  const auto& kb = fixtures::demo_kb();
  EXPECT_THROW(build_problem_matrix(kb, {{"headache", {}}}), DomainError);
  EXPECT_THROW(build_problem_matrix(kb, {{"cough", {}}, {"cough", {}}}), DomainError);
  EXPECT_THROW(build_problem_matrix(kb, {{"cough", {{"site", std::string("substernal")}}}}), DomainError);
  EXPECT_THROW(build_problem_matrix(kb, {{"cough", {{"pattern", std::string("sometimes")}}}}), DomainError);
}

TEST(SymptomMatrix, ZeroColumnsGiveZeros) {
  const auto& kb = fixtures::demo_kb();
  auto a = assemble_symptom_matrix(kb, build_problem_matrix(kb, {}));
  EXPECT_EQ(values(a.entries), std::vector<double>(kb.symptom_count(), 0.0));
}

TEST(SymptomMatrix, Demo) {
  const auto& kb = fixtures::demo_kb();
  auto a = assemble_symptom_matrix(kb, build_problem_matrix(kb, fixtures::demo_record().problem_reports));
  EXPECT_EQ(a.symptoms, (std::vector<std::string>{"angina", "chronic_cough", "productive_cough", "dyspnea"}));
  ASSERT_EQ(a.entries.size(), 4u);
  EXPECT_EQ(a.entries[0].value(), 1.0);
  EXPECT_EQ(a.entries[1].value(), 1.0);
  EXPECT_NEAR(a.entries[2].value(), (2 * 0.6 + 1 * 0.3) / 3.0, oracle::kTol);
  EXPECT_NEAR(a.entries[3].value(), std::max(0.4, 0.6 * 0.3), oracle::kTol);
}

TEST(SymptomMatrix, RulesOnSameTargetCombineByMax) {
  const auto& kb = fixtures::demo_kb();
  // dyspnea: passthrough from breathlessness 0.4, product from cough 0.9 * 1.0.
  auto b = build_problem_matrix(kb, {{"cough", {{"cough_intensity", Grade{0.9}}, {"sputum_blood", Grade{1.0}}}},
                                     {"breathlessness", {{"dyspnea_grade", Grade{0.4}}}}});
  EXPECT_NEAR(assemble_symptom_matrix(kb, b).entries[3].value(), 0.9, oracle::kTol);
}

TEST(ObservablesMatrix, EmptyAndTranscription) {
  const auto& kb = fixtures::demo_kb();
  auto empty = build_observables_matrix(kb, {});
  EXPECT_EQ(empty.columns.size(), kb.sign_count());
  for (const auto& c : empty.columns) EXPECT_TRUE(c.empty());
  EXPECT_EQ(values(assemble_sign_matrix(kb, empty).entries), std::vector<double>(kb.sign_count(), 0.0));

  auto one = build_observables_matrix(kb, {{"murmur", {{"loudness", Grade{0.6}}, {"timing", std::string("systolic")}}}});
  EXPECT_EQ(one.columns[0].size(), 2u);
  EXPECT_TRUE(one.columns[1].empty());
}

TEST(ObservablesMatrix, DemoMatchesGolden) {
  auto d = build_observables_matrix(fixtures::demo_kb(), fixtures::demo_record().observations);
  json want = golden("demo.observables_matrix.json");
  EXPECT_EQ(d.rows, want["rows"].get<std::size_t>());
  EXPECT_EQ(json(d.signs), want["signs"]);
  ASSERT_EQ(d.columns.size(), want["columns"].size());
  for (std::size_t i = 0; i < d.columns.size(); ++i) EXPECT_EQ(detail::column_to_json(d.columns[i]), want["columns"][i]);
}

TEST(ObservablesMatrix, RejectsUndeclared) {
  const auto& kb = fixtures::demo_kb();
  EXPECT_THROW(build_observables_matrix(kb, {{"rub", {}}}), DomainError);
  EXPECT_THROW(build_observables_matrix(kb, {{"murmur", {{"pitch", Grade{0.1}}}}}), DomainError);
}

TEST(SignMatrix, Demo) {
  const auto& kb = fixtures::demo_kb();
  auto s = assemble_sign_matrix(kb, build_observables_matrix(kb, fixtures::demo_record().observations));
  EXPECT_EQ(values(s.entries), (std::vector<double>{std::max(0.6, 0.8), 0.0}));
}

TEST(SignMatrix, BinarySignPresent) {
  const auto& kb = fixtures::demo_kb();
  auto s = assemble_sign_matrix(
      kb, build_observables_matrix(kb, {{"crackles", {{"location", std::string("apex")}, {"on_inspiration", std::string("yes")}}}}));
  EXPECT_EQ(s.entries[1].value(), 1.0);
}

TEST(TestAbnormality, Cholesterol) {
  const auto& kb = fixtures::demo_kb();
  EXPECT_EQ(abnormality(kb, {"serum_cholesterol", 250.0}).value(), 0.0);
  EXPECT_EQ(abnormality(kb, {"serum_cholesterol", 650.0}).value(), 1.0);
  EXPECT_NEAR(abnormality(kb, {"serum_cholesterol", 345.0}).value(), (345.0 - 260.0) / (600.0 - 260.0), oracle::kTol);
  EXPECT_NEAR(abnormality(kb, {"serum_cholesterol", 345.0}).value(), 0.25, oracle::kTol);
  EXPECT_THROW(abnormality(kb, {"chest_xray", 1.0}), DomainError);
  EXPECT_THROW(abnormality(kb, {"biopsy", 1.0}), DomainError);
}

TEST(TestAbnormality, MultiAspectMaximum) {
  const auto& kb = fixtures::demo_kb();
  EXPECT_EQ(multi_aspect_abnormality(kb, {"chest_xray", std::vector<double>{0, 0}}).value(), 0.0);
  // opacity (22.5 - 5) / 35 = 0.5, cavity 5 / 20 = 0.25
  EXPECT_NEAR(multi_aspect_abnormality(kb, {"chest_xray", std::vector<double>{22.5, 5}}).value(), 0.5, oracle::kTol);
  EXPECT_THROW(multi_aspect_abnormality(kb, {"chest_xray", 3.0}), DomainError);
  EXPECT_THROW(multi_aspect_abnormality(kb, {"serum_cholesterol", std::vector<double>{1}}), DomainError);
}

TEST(TestAbnormality, MultiAspectWeightedMean) {
  auto kb = demo_with([](json& j) { j["tests"][1]["combinator"] = {{"kind", "weighted_mean"}, {"weights", {3, 1}}}; });
  // opacity 12 -> 0.2, cavity 18 -> 0.9
  EXPECT_NEAR(multi_aspect_abnormality(kb, {"chest_xray", std::vector<double>{12, 18}}).value(),
              (3 * 0.2 + 1 * 0.9) / 4.0, oracle::kTol);
  EXPECT_NEAR(multi_aspect_abnormality(kb, {"chest_xray", std::vector<double>{12, 18}}).value(), 0.375, oracle::kTol);
}

TEST(TestAbnormality, SingleAspectReducesToScalar) {
  auto kb = demo_with([](json& j) {
    json aspect = {{"id", "total"}, {"membership", {{"breakpoints", {{260, 0}, {600, 1}}}}}};
    j["tests"].push_back({{"id", "lipid_panel"}, {"aspects", json::array({aspect})}});
  });
  oracle::Gen gen(23);
  for (int i = 0; i < 200; ++i) {
    const double x = gen.uniform(0, 1000);
    EXPECT_EQ(multi_aspect_abnormality(kb, {"lipid_panel", std::vector<double>{x}}),
              abnormality(kb, {"serum_cholesterol", x}));
  }
}

TEST(TestVector, AbsentAndPerformed) {
  const auto& kb = fixtures::demo_kb();
  auto none = assemble_test_vector(kb, {});
  EXPECT_EQ(none.tests, (std::vector<std::string>{"serum_cholesterol", "chest_xray"}));
  EXPECT_EQ(none.performed(), 0u);
  for (const auto& e : none.entries) EXPECT_FALSE(e.has_value());

  auto both = assemble_test_vector(kb, {{"chest_xray", std::vector<double>{50, 30}}, {"serum_cholesterol", 100.0}});
  ASSERT_TRUE(both.entries[0] && both.entries[1]);
  EXPECT_EQ(both.entries[0]->value(), 0.0);
  EXPECT_EQ(both.entries[1]->value(), 1.0);

  EXPECT_THROW(assemble_test_vector(kb, {{"serum_cholesterol", 1.0}, {"serum_cholesterol", 2.0}}), DomainError);
}

TEST(TestVector, Demo) {
  auto z = assemble_test_vector(fixtures::demo_kb(), fixtures::demo_record().test_results);
  ASSERT_TRUE(z.entries[0] && z.entries[1]);
  EXPECT_NEAR(z.entries[0]->value(), 0.25, oracle::kTol);
  EXPECT_NEAR(z.entries[1]->value(), 0.5, oracle::kTol);
}
