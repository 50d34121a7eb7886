#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace triage;

namespace {

constexpr std::string_view kMini = R"({
  "alpha": 0.5,
  "diseases": [{"id": "d", "history_aspects": ["prior_x", "prior_y", "smoking"], "problems": [], "signs": []}],
  "history_aspects": [{"id": "smoking"}, {"id": "prior_x", "undiagnosed": true}, {"id": "prior_y", "undiagnosed": true}],
  "past_symptoms": [
    {"disease": "prior_x", "symptoms": [{"id": "cough", "grade": 0.8}, {"id": "fever", "grade": 0.6}, {"id": "chills", "grade": 0.1}]},
    {"disease": "prior_y", "symptoms": [{"id": "rash", "grade": 0.9}]}
  ],
  "problems": [], "symptoms": [], "signs": [], "observables": [], "tests": [],
  "rules": [
    {"target_kind": "history", "target": "prior_x", "kind": "weighted_threshold", "weights": {"cough": 1, "fever": 1}, "threshold": 2},
    {"target_kind": "history", "target": "prior_y", "kind": "weighted_threshold", "weights": {"rash": 1}, "threshold": 1}
  ]
})";

const KnowledgeBase& mini() {
  static const KnowledgeBase kb = load_knowledge_base(kMini);
  return kb;
}

using Recalled = std::map<std::string, std::set<std::string>>;

}  // namespace

TEST(PastSymptomVector, MembershipIndicator) {
  auto v = build_past_symptom_vector(mini(), "prior_x", {"fever"});
  EXPECT_EQ(v.symptoms, (std::vector<std::string>{"cough", "fever"}));
  EXPECT_EQ(v.entries, (std::vector<std::uint8_t>{0, 1}));
  EXPECT_EQ(build_past_symptom_vector(mini(), "prior_x", {}).entries, (std::vector<std::uint8_t>{0, 0}));
}

TEST(PastSymptomVector, ForeignSymptomWarns) {
  std::vector<std::string> warnings;
  auto v = build_past_symptom_vector(mini(), "prior_x", {"cough", "rash"}, std::nullopt, &warnings);
  EXPECT_EQ(v.entries, (std::vector<std::uint8_t>{1, 0}));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("rash"), std::string::npos);
}

TEST(PastSymptomVector, NonProminentMemberIgnoredQuietly) {
  std::vector<std::string> warnings;
  auto v = build_past_symptom_vector(mini(), "prior_x", {"chills"}, std::nullopt, &warnings);
  EXPECT_EQ(v.entries, (std::vector<std::uint8_t>{0, 0}));
  EXPECT_TRUE(warnings.empty());
  // At alpha 0 it joins the prominent set.
  auto all = build_past_symptom_vector(mini(), "prior_x", {"chills"}, Grade{0.0}, &warnings);
  EXPECT_EQ(all.symptoms, (std::vector<std::string>{"cough", "fever", "chills"}));
  EXPECT_EQ(all.entries, (std::vector<std::uint8_t>{0, 0, 1}));
}

TEST(PastSymptomVector, UnknownDisease) {
  EXPECT_THROW(build_past_symptom_vector(mini(), "smoking", {}), DomainError);
}

TEST(InferHistory, ThresholdAndWrongRules) {
  const MappingRule* rule = mini().rules_for(TargetKind::history, "prior_x").front();
  EXPECT_EQ(infer_history_entry(*rule, build_past_symptom_vector(mini(), "prior_x", {"cough", "fever"})), 1);
  EXPECT_EQ(infer_history_entry(*rule, build_past_symptom_vector(mini(), "prior_x", {"cough"})), 0);
  EXPECT_THROW(infer_history_entry(*rule, build_past_symptom_vector(mini(), "prior_y", {})), DomainError);
  PastSymptomVector broken{"prior_x", {"cough", "fever"}, {1}};
  EXPECT_THROW(infer_history_entry(*rule, broken), DomainError);
}

TEST(HistoryMatrix, AllZero) {
  auto h = assemble_history_matrix(mini(), {{"smoking", 0}}, {});
  EXPECT_EQ(h.entries, (std::vector<std::uint8_t>{0, 0, 0}));
  EXPECT_EQ(h.split, 2u);
  auto demo = assemble_history_matrix(fixtures::demo_kb(), {}, {});
  EXPECT_EQ(demo.entries, std::vector<std::uint8_t>(6, 0));
}

TEST(HistoryMatrix, DirectAnswerWins) {
  auto h = assemble_history_matrix(mini(), {{"prior_x", 1}}, {});
  EXPECT_EQ(h.entries[0], 1);
  auto h0 = assemble_history_matrix(mini(), {{"prior_x", 0}}, Recalled{{"prior_x", {"cough", "fever"}}});
  EXPECT_EQ(h0.entries[0], 0);
}

TEST(HistoryMatrix, DemoInference) {
  const auto rec = fixtures::demo_record();
  std::vector<std::string> warnings;
  auto h = assemble_history_matrix(fixtures::demo_kb(), rec.direct_history, rec.recalled_past_symptoms, std::nullopt,
                                   &warnings);
  // prior_tuberculosis: persistent_cough (2) + night_sweats (1) = 3 >= 3; fatigue is below alpha.
  // prior_rheumatic_fever: inferred 1, answered 0 directly.
  EXPECT_EQ(h.entries, (std::vector<std::uint8_t>{1, 0, 1, 0, 0, 0}));
  auto part = h.undiagnosed_part();
  EXPECT_EQ(std::vector<std::uint8_t>(part.begin(), part.end()), (std::vector<std::uint8_t>{1, 0}));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("sore_throat"), std::string::npos);
}

TEST(HistoryMatrix, MonotoneInRecalledSymptoms) {
  const auto& kb = fixtures::demo_kb();
  oracle::Gen gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    Recalled base;
    for (const auto& u : kb.past_symptoms)
      for (const auto& m : u.grades.members())
        if (gen.coin()) base[u.disease].insert(m.element);
    auto before = assemble_history_matrix(kb, {}, base);
    for (const auto& u : kb.past_symptoms) {
      for (const auto& m : u.grades.members()) {
        Recalled more = base;
        more[u.disease].insert(m.element);
        auto after = assemble_history_matrix(kb, {}, more);
        for (std::size_t i = 0; i < before.entries.size(); ++i) EXPECT_GE(after.entries[i], before.entries[i]);
      }
    }
  }
}
