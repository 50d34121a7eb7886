#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace triage;

namespace {

std::vector<double> values(const std::vector<Grade>& gs) {
  std::vector<double> out;
  for (auto g : gs) out.push_back(g.value());
  return out;
}

}  // namespace

TEST(Evaluate, EmptyRecord) {
  const auto& kb = fixtures::demo_kb();
  auto m = evaluate(kb, PatientRecord{});
  EXPECT_EQ(m.history.entries, std::vector<std::uint8_t>(kb.history_count(), 0));
  EXPECT_EQ(values(m.symptoms.entries), std::vector<double>(kb.symptom_count(), 0.0));
  EXPECT_EQ(values(m.signs.entries), std::vector<double>(kb.sign_count(), 0.0));
  EXPECT_EQ(m.tests.entries.size(), kb.test_count());
  EXPECT_EQ(m.tests.performed(), 0u);
  EXPECT_EQ(m.unanswered.history_aspects.size(), kb.history_count());
  EXPECT_EQ(m.unanswered.problems.size(), kb.problem_count());
  EXPECT_EQ(m.unanswered.signs.size(), kb.sign_count());
  EXPECT_EQ(m.unanswered.tests.size(), kb.test_count());
  EXPECT_EQ(m.alpha, kb.alpha);
}

TEST(Evaluate, DemoHandValues) {
  auto m = evaluate(fixtures::demo_kb(), fixtures::demo_record());
  EXPECT_EQ(m.history.entries, (std::vector<std::uint8_t>{1, 0, 1, 0, 0, 0}));
  EXPECT_EQ(m.history.split, 2u);
  const std::vector<double> a{1.0, 1.0, 0.5, 0.4};
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(m.symptoms.entries[i].value(), a[i], oracle::kTol);
  EXPECT_NEAR(m.signs.entries[0].value(), 0.8, oracle::kTol);
  EXPECT_EQ(m.signs.entries[1].value(), 0.0);
  EXPECT_NEAR(m.tests.entries[0]->value(), 0.25, oracle::kTol);
  EXPECT_NEAR(m.tests.entries[1]->value(), 0.5, oracle::kTol);
  EXPECT_EQ(m.unanswered.history_aspects, (std::vector<std::string>{"family_heart_disease", "occupational_dust"}));
  EXPECT_TRUE(m.unanswered.problems.empty());
  EXPECT_EQ(m.unanswered.signs, (std::vector<std::string>{"crackles"}));
  EXPECT_TRUE(m.unanswered.tests.empty());
  ASSERT_EQ(m.warnings.size(), 1u);
}

TEST(Evaluate, DemoMatchesGoldenFiles) {
  auto m = evaluate(fixtures::demo_kb(), fixtures::demo_record());
  EXPECT_EQ(render_report(m, ReportFormat::structured), fixtures::slurp(fixtures::data("golden/demo.report.json")));
  EXPECT_EQ(render_report(m, ReportFormat::text), fixtures::slurp(fixtures::data("golden/demo.report.txt")));
}

TEST(Evaluate, UnknownSymptomNamesPath) {
  json rec = parse_json(fixtures::slurp(fixtures::data("demo.rec")));
  rec["recalled_past_symptoms"]["prior_tuberculosis"].push_back("glowing");
  try {
    load_record(fixtures::demo_kb(), rec.dump());
    FAIL() << "expected a ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].path.rfind("recalled_past_symptoms.prior_tuberculosis[", 0), 0u);
    EXPECT_NE(e.issues()[0].message.find("glowing"), std::string::npos);
  }

  PatientRecord direct;
  direct.recalled_past_symptoms["prior_tuberculosis"] = {"glowing"};
  EXPECT_THROW(evaluate(fixtures::demo_kb(), direct), ValidationError);
}

TEST(Evaluate, AggregatesRecordIssues) {
  json rec = parse_json(fixtures::slurp(fixtures::data("demo.rec")));
  rec["direct_history"]["astrology"] = 1;
  rec["test_results"][0]["value"] = -5;
  rec["observations"]["murmur"]["loudness"] = 3;
  try {
    load_record(fixtures::demo_kb(), rec.dump());
    FAIL() << "expected a ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.issues().size(), 3u);
  }
}

TEST(Evaluate, AlphaOverrideChangesProminence) {
  auto rec = fixtures::demo_record();
  rec.direct_history.erase("prior_rheumatic_fever");
  rec.recalled_past_symptoms["prior_tuberculosis"] = {"fatigue", "night_sweats", "weight_loss"};
  // At the default alpha fatigue is not prominent: 1 + 1 < 3.
  EXPECT_EQ(evaluate(fixtures::demo_kb(), rec).history.entries[0], 0);
  rec.alpha_override = Grade{0.3};
  EXPECT_EQ(evaluate(fixtures::demo_kb(), rec).history.entries[0], 1);
  EXPECT_EQ(evaluate(fixtures::demo_kb(), rec).alpha.value(), 0.3);
}

TEST(Report, StructuredRoundTrip) {
  auto m = evaluate(fixtures::demo_kb(), fixtures::demo_record());
  EXPECT_EQ(matrices_from_json(parse_json(render_report(m, ReportFormat::structured))), m);
  auto empty = evaluate(fixtures::demo_kb(), PatientRecord{});
  EXPECT_EQ(matrices_from_json(to_json(empty)), empty);
}

TEST(Report, FormatNames) {
  EXPECT_EQ(parse_report_format("structured"), ReportFormat::structured);
  EXPECT_EQ(parse_report_format("text"), ReportFormat::text);
  EXPECT_FALSE(parse_report_format("pdf"));
}

TEST(Report, RejectsMalformedStructuredReport) {
  json j = to_json(evaluate(fixtures::demo_kb(), fixtures::demo_record()));
  j["A"]["values"][0] = 2.0;
  EXPECT_THROW(matrices_from_json(j), ValidationError);
  json k = to_json(evaluate(fixtures::demo_kb(), fixtures::demo_record()));
  k.erase("H");
  EXPECT_THROW(matrices_from_json(k), ValidationError);
}

TEST(Record, RoundTrip) {
  const auto rec = fixtures::demo_record();
  const std::string text = serialize(rec);
  const auto again = load_record(fixtures::demo_kb(), text);
  EXPECT_EQ(again, rec);
  EXPECT_EQ(serialize(again), text);
}
