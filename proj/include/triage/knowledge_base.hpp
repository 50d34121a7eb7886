#pragma once

// Universes, declarations and mapping rules an evaluation runs against.
// A KnowledgeBase is immutable once loaded and safe to share across threads.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "triage/errors.hpp"
#include "triage/fuzzy.hpp"
#include "triage/rules.hpp"

namespace triage {

enum class ProfileSubset { location, longevity, continuity, intermittency, severity };
enum class ValueType { categorical, numeric, grade };

inline constexpr ProfileSubset kProfileSubsets[] = {ProfileSubset::location, ProfileSubset::longevity,
                                                    ProfileSubset::continuity, ProfileSubset::intermittency,
                                                    ProfileSubset::severity};

inline const char* to_string(ProfileSubset s) {
  switch (s) {
    case ProfileSubset::location: return "location";
    case ProfileSubset::longevity: return "longevity";
    case ProfileSubset::continuity: return "continuity";
    case ProfileSubset::intermittency: return "intermittency";
    case ProfileSubset::severity: return "severity";
  }
  return "?";
}

inline const char* to_string(ValueType t) {
  switch (t) {
    case ValueType::categorical: return "categorical";
    case ValueType::numeric: return "numeric";
    case ValueType::grade: return "grade";
  }
  return "?";
}

// A profile factor or an observable: what a single cell may hold.
struct ValueDecl {
  std::string id;
  ValueType type = ValueType::categorical;
  // Allowed labels for categorical values; empty means unrestricted.
  std::vector<std::string> values;

  bool operator==(const ValueDecl&) const = default;
};

struct FactorDecl : ValueDecl {
  ProfileSubset subset = ProfileSubset::location;

  bool operator==(const FactorDecl&) const = default;
};

struct ProblemDecl {
  std::string id;
  std::vector<FactorDecl> factors;

  const FactorDecl* factor(const std::string& factor_id) const {
    for (const auto& f : factors)
      if (f.id == factor_id) return &f;
    return nullptr;
  }

  std::vector<const FactorDecl*> subset(ProfileSubset s) const {
    std::vector<const FactorDecl*> out;
    for (const auto& f : factors)
      if (f.subset == s) out.push_back(&f);
    return out;
  }

  bool operator==(const ProblemDecl&) const = default;
};

struct DiseaseDecl {
  std::string id;
  std::vector<std::string> history_aspects;
  std::vector<std::string> problems;
  std::vector<std::string> signs;

  bool operator==(const DiseaseDecl&) const = default;
};

struct HistoryAspect {
  std::string id;
  // Member of the possibly-undiagnosed subset; inferable from recalled symptoms.
  bool undiagnosed = false;

  bool operator==(const HistoryAspect&) const = default;
};

struct PastSymptomUniverse {
  std::string disease;
  std::optional<Grade> alpha;
  FuzzySet grades;

  bool operator==(const PastSymptomUniverse&) const = default;
};

struct SymptomDecl {
  std::string id;
  bool binary = false;

  bool operator==(const SymptomDecl&) const = default;
};

using SignDecl = SymptomDecl;

struct ObservableSchema {
  std::string sign;
  std::vector<ValueDecl> observables;

  const ValueDecl* observable(const std::string& id) const {
    for (const auto& o : observables)
      if (o.id == id) return &o;
    return nullptr;
  }

  bool operator==(const ObservableSchema&) const = default;
};

struct ResultDomain {
  double min;
  double max;

  bool contains(double v) const { return v >= min && v <= max; }
  bool operator==(const ResultDomain&) const = default;
};

struct TestAspect {
  std::string id;
  MembershipFunction membership;
  std::optional<ResultDomain> domain;

  bool operator==(const TestAspect&) const = default;
};

struct TestDecl {
  std::string id;
  // Exactly one of `membership` (scalar test) or `aspects` (multi-aspect test).
  std::optional<MembershipFunction> membership;
  std::vector<TestAspect> aspects;
  GradeCombinator combinator = GradeCombinator::maximum();
  std::optional<ResultDomain> domain;
  // Declares the abnormality function non-decreasing; checked at load.
  bool monotone = false;

  bool multi_aspect() const { return !aspects.empty(); }
  bool operator==(const TestDecl&) const = default;
};

struct KnowledgeBase {
  std::vector<DiseaseDecl> diseases;
  // Canonical order: undiagnosed aspects first, then the rest, each in declaration order.
  std::vector<HistoryAspect> history_aspects;
  std::vector<PastSymptomUniverse> past_symptoms;
  Grade alpha;
  std::vector<ProblemDecl> problems;
  std::vector<SymptomDecl> symptoms;
  std::vector<SignDecl> signs;
  std::vector<ObservableSchema> observables;
  std::vector<TestDecl> tests;
  std::vector<MappingRule> rules;

  bool operator==(const KnowledgeBase&) const = default;

  std::size_t history_count() const { return history_aspects.size(); }
  std::size_t undiagnosed_count() const {
    return static_cast<std::size_t>(std::count_if(history_aspects.begin(), history_aspects.end(),
                                                  [](const auto& a) { return a.undiagnosed; }));
  }
  std::size_t problem_count() const { return problems.size(); }
  std::size_t symptom_count() const { return symptoms.size(); }
  std::size_t sign_count() const { return signs.size(); }
  std::size_t test_count() const { return tests.size(); }

  const HistoryAspect* aspect(const std::string& id) const { return find(history_aspects, id); }
  const ProblemDecl* problem(const std::string& id) const { return find(problems, id); }
  const SymptomDecl* symptom(const std::string& id) const { return find(symptoms, id); }
  const SignDecl* sign(const std::string& id) const { return find(signs, id); }
  const TestDecl* test(const std::string& id) const { return find(tests, id); }

  const PastSymptomUniverse* past_symptom_universe(const std::string& disease) const {
    for (const auto& u : past_symptoms)
      if (u.disease == disease) return &u;
    return nullptr;
  }

  const ObservableSchema* observable_schema(const std::string& sign_id) const {
    for (const auto& s : observables)
      if (s.sign == sign_id) return &s;
    return nullptr;
  }

  std::vector<const MappingRule*> rules_for(TargetKind kind, const std::string& target) const {
    std::vector<const MappingRule*> out;
    for (const auto& r : rules)
      if (r.target_kind == kind && r.target == target) out.push_back(&r);
    return out;
  }

  // Row labels of the problem matrix: union of every declared profile factor.
  std::vector<std::string> profile_rows() const {
    std::vector<std::string> rows;
    std::set<std::string> seen;
    for (ProfileSubset s : kProfileSubsets)
      for (const auto& p : problems)
        for (const auto* f : p.subset(s))
          if (seen.insert(f->id).second) rows.push_back(f->id);
    return rows;
  }

  // Size of the largest observable set.
  std::size_t max_observables() const {
    std::size_t e = 0;
    for (const auto& s : observables) e = std::max(e, s.observables.size());
    return e;
  }

  // Every past-symptom id declared in any universe.
  std::set<std::string> all_past_symptoms() const {
    std::set<std::string> out;
    for (const auto& u : past_symptoms)
      for (const auto& m : u.grades.members()) out.insert(m.element);
    return out;
  }

 private:
  template <typename T>
  static const T* find(const std::vector<T>& items, const std::string& id) {
    for (const auto& i : items)
      if (i.id == id) return &i;
    return nullptr;
  }
};

// Stable reorder placing undiagnosed aspects first, and per-disease data in that order.
inline void canonicalize(KnowledgeBase& kb) {
  std::stable_partition(kb.history_aspects.begin(), kb.history_aspects.end(),
                        [](const HistoryAspect& a) { return a.undiagnosed; });
  auto rank = [&](const std::string& id) {
    for (std::size_t i = 0; i < kb.history_aspects.size(); ++i)
      if (kb.history_aspects[i].id == id) return i;
    return kb.history_aspects.size();
  };
  std::stable_sort(kb.past_symptoms.begin(), kb.past_symptoms.end(),
                   [&](const auto& a, const auto& b) { return rank(a.disease) < rank(b.disease); });
  auto sign_rank = [&](const std::string& id) {
    for (std::size_t i = 0; i < kb.signs.size(); ++i)
      if (kb.signs[i].id == id) return i;
    return kb.signs.size();
  };
  std::stable_sort(kb.observables.begin(), kb.observables.end(),
                   [&](const auto& a, const auto& b) { return sign_rank(a.sign) < sign_rank(b.sign); });
}

inline Grade effective_alpha(const KnowledgeBase& kb, const std::string& disease,
                             std::optional<Grade> alpha_override = std::nullopt) {
  if (alpha_override) return *alpha_override;
  if (const auto* u = kb.past_symptom_universe(disease); u && u->alpha) return *u->alpha;
  return kb.alpha;
}

// Prominent past symptoms of an undiagnosed disease: the alpha-cut of its
// graded symptom set. A session-level alpha override replaces both the global
// and the per-disease threshold.
inline std::vector<std::string> prominent_symptom_set(const KnowledgeBase& kb, const std::string& disease,
                                                      std::optional<Grade> alpha_override = std::nullopt) {
  const auto* u = kb.past_symptom_universe(disease);
  if (!u) throw DomainError("no past-symptom universe for disease '" + disease + "'");
  return alpha_cut(u->grades, effective_alpha(kb, disease, alpha_override));
}

namespace detail {

template <typename T, typename Key>
void check_unique(const std::vector<T>& items, Key key, const std::string& path, const std::string& what,
                  Issues& issues) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string& id = key(items[i]);
    if (id.empty()) issues.add(path + "[" + std::to_string(i) + "]", what + " id is empty");
    if (!seen.insert(id).second) issues.add(path + "[" + std::to_string(i) + "]", "duplicate " + what + " id '" + id + "'");
  }
}

inline void check_match_value(const MatchValue& want, const ValueDecl& decl, const std::string& path,
                              Issues& issues) {
  const bool is_label = std::holds_alternative<std::string>(want);
  if (decl.type == ValueType::categorical) {
    if (!is_label) {
      issues.add(path, "'" + decl.id + "' is categorical; required value must be a label");
    } else if (!decl.values.empty() &&
               std::find(decl.values.begin(), decl.values.end(), std::get<std::string>(want)) == decl.values.end()) {
      issues.add(path, "'" + std::get<std::string>(want) + "' is not a declared value of '" + decl.id + "'");
    }
  } else if (is_label) {
    issues.add(path, "'" + decl.id + "' is " + to_string(decl.type) + "; required value must be a number");
  }
}

// Checks rule sources against the cells available to it. `lookup` returns the
// declaration of a source id or nullptr.
template <typename Lookup>
void check_rule_sources(const RuleBody& body, Lookup lookup, bool allow_grade_match, const std::string& path,
                        Issues& issues) {
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, LocationMatch>) {
          if (r.required.empty()) issues.add(path + ".required", "location_match requires at least one factor");
          for (const auto& [id, want] : r.required) {
            const auto* decl = lookup(id);
            if (!decl) {
              issues.add(path + ".required." + id, "undeclared source '" + id + "'");
              continue;
            }
            if (!allow_grade_match && decl->type == ValueType::grade) {
              issues.add(path + ".required." + id, "location_match cannot test graded source '" + id + "'");
              continue;
            }
            check_match_value(want, *decl, path + ".required." + id, issues);
          }
        } else if constexpr (std::is_same_v<R, WeightedThreshold>) {
          if (!std::isfinite(r.threshold)) issues.add(path + ".threshold", "threshold must be finite");
          for (std::size_t i = 0; i < r.weights.size(); ++i) {
            const auto& w = r.weights[i];
            const std::string wp = path + ".weights[" + std::to_string(i) + "]";
            if (!std::isfinite(w.weight) || w.weight < 0.0) issues.add(wp, "weight must be finite and nonnegative");
            const auto* decl = lookup(w.source);
            if (!decl) issues.add(wp, "undeclared source '" + w.source + "'");
            else if (decl->type == ValueType::categorical)
              issues.add(wp, "weighted source '" + w.source + "' is categorical");
          }
        } else if constexpr (std::is_same_v<R, MembershipPassthrough>) {
          const auto* decl = lookup(r.source);
          if (!decl) issues.add(path + ".source", "undeclared source '" + r.source + "'");
          else if (decl->type != ValueType::grade)
            issues.add(path + ".source", "passthrough source '" + r.source + "' is not graded");
        } else {
          if (r.sources.empty()) issues.add(path + ".sources", "combined rule needs at least one source");
          if (r.combinator.kind() == GradeCombinator::Kind::weighted_mean &&
              r.combinator.weights().size() != r.sources.size()) {
            issues.add(path + ".combinator", "weighted_mean weight count differs from source count");
          }
          for (std::size_t i = 0; i < r.sources.size(); ++i) {
            const auto* decl = lookup(r.sources[i]);
            const std::string sp = path + ".sources[" + std::to_string(i) + "]";
            if (!decl) issues.add(sp, "undeclared source '" + r.sources[i] + "'");
            else if (decl->type != ValueType::grade) issues.add(sp, "combined source '" + r.sources[i] + "' is not graded");
          }
        }
      },
      body);
}

}  // namespace detail

// Every violated structural invariant; empty when the knowledge base is valid.
inline Issues validate(const KnowledgeBase& kb) {
  Issues issues;
  auto by_id = [](const auto& x) -> const std::string& { return x.id; };
  detail::check_unique(kb.diseases, by_id, "diseases", "disease", issues);
  detail::check_unique(kb.history_aspects, by_id, "history_aspects", "history aspect", issues);
  detail::check_unique(kb.problems, by_id, "problems", "problem", issues);
  detail::check_unique(kb.symptoms, by_id, "symptoms", "symptom", issues);
  detail::check_unique(kb.signs, by_id, "signs", "sign", issues);
  detail::check_unique(kb.tests, by_id, "tests", "test", issues);

  // Each universe must be exactly the union of the per-disease subsets.
  std::set<std::string> used_aspects, used_problems, used_signs;
  for (std::size_t i = 0; i < kb.diseases.size(); ++i) {
    const auto& d = kb.diseases[i];
    const std::string path = "diseases[" + std::to_string(i) + "]";
    for (const auto& a : d.history_aspects) {
      if (!kb.aspect(a)) issues.add(path + ".history_aspects", "undeclared history aspect '" + a + "'");
      used_aspects.insert(a);
    }
    for (const auto& p : d.problems) {
      if (!kb.problem(p)) issues.add(path + ".problems", "undeclared problem '" + p + "'");
      used_problems.insert(p);
    }
    for (const auto& s : d.signs) {
      if (!kb.sign(s)) issues.add(path + ".signs", "undeclared sign '" + s + "'");
      used_signs.insert(s);
    }
  }
  for (const auto& a : kb.history_aspects)
    if (!used_aspects.contains(a.id)) issues.add("history_aspects", "aspect '" + a.id + "' belongs to no disease");
  for (const auto& p : kb.problems)
    if (!used_problems.contains(p.id)) issues.add("problems", "problem '" + p.id + "' belongs to no disease");
  for (const auto& s : kb.signs)
    if (!used_signs.contains(s.id)) issues.add("signs", "sign '" + s.id + "' belongs to no disease");

  // Past-symptom universes: exactly one per undiagnosed aspect.
  std::set<std::string> with_universe;
  for (std::size_t i = 0; i < kb.past_symptoms.size(); ++i) {
    const auto& u = kb.past_symptoms[i];
    const std::string path = "past_symptoms[" + std::to_string(i) + "]";
    const auto* a = kb.aspect(u.disease);
    if (!a) issues.add(path + ".disease", "undeclared history aspect '" + u.disease + "'");
    else if (!a->undiagnosed) issues.add(path + ".disease", "aspect '" + u.disease + "' is not marked undiagnosed");
    if (!with_universe.insert(u.disease).second)
      issues.add(path + ".disease", "duplicate past-symptom universe for '" + u.disease + "'");
  }
  for (const auto& a : kb.history_aspects) {
    if (!a.undiagnosed) continue;
    if (!with_universe.contains(a.id))
      issues.add("past_symptoms", "undiagnosed aspect '" + a.id + "' has no past-symptom universe");
    const auto n = kb.rules_for(TargetKind::history, a.id).size();
    if (n != 1)
      issues.add("rules", "undiagnosed aspect '" + a.id + "' needs exactly one history rule, found " + std::to_string(n));
  }

  // Profile schemas. A factor id shared between problems must keep one meaning.
  std::map<std::string, std::pair<ProfileSubset, ValueType>> factor_kinds;
  for (std::size_t i = 0; i < kb.problems.size(); ++i) {
    const auto& p = kb.problems[i];
    const std::string path = "problems[" + std::to_string(i) + "]";
    detail::check_unique(p.factors, by_id, path + ".profile", "factor", issues);
    for (const auto& f : p.factors) {
      if (f.subset == ProfileSubset::severity && f.type != ValueType::grade)
        issues.add(path + ".profile.severity." + f.id, "severity factors must be graded");
      if (f.subset != ProfileSubset::severity && f.type == ValueType::grade)
        issues.add(path + ".profile." + to_string(f.subset) + "." + f.id,
                   "only severity factors may be graded");
      auto [it, inserted] = factor_kinds.emplace(f.id, std::make_pair(f.subset, f.type));
      if (!inserted && it->second != std::make_pair(f.subset, f.type))
        issues.add(path + ".profile." + to_string(f.subset) + "." + f.id,
                   "factor '" + f.id + "' is declared with a different subset or type elsewhere");
    }
  }

  std::set<std::string> with_schema;
  for (std::size_t i = 0; i < kb.observables.size(); ++i) {
    const auto& s = kb.observables[i];
    const std::string path = "observables[" + std::to_string(i) + "]";
    if (!kb.sign(s.sign)) issues.add(path + ".sign", "undeclared sign '" + s.sign + "'");
    if (!with_schema.insert(s.sign).second) issues.add(path + ".sign", "duplicate observable schema for '" + s.sign + "'");
    detail::check_unique(s.observables, by_id, path + ".observables", "observable", issues);
  }

  for (std::size_t i = 0; i < kb.tests.size(); ++i) {
    const auto& t = kb.tests[i];
    const std::string path = "tests[" + std::to_string(i) + "]";
    if (t.membership.has_value() == t.multi_aspect())
      issues.add(path, "test '" + t.id + "' needs exactly one of 'membership' or 'aspects'");
    detail::check_unique(t.aspects, by_id, path + ".aspects", "test aspect", issues);
    if (t.multi_aspect() && t.combinator.kind() == GradeCombinator::Kind::weighted_mean &&
        t.combinator.weights().size() != t.aspects.size())
      issues.add(path + ".combinator", "weighted_mean weight count differs from aspect count");
    if (t.monotone) {
      bool ok = t.membership ? t.membership->non_decreasing() : true;
      for (const auto& a : t.aspects) ok = ok && a.membership.non_decreasing();
      if (!ok) issues.add(path + ".monotone", "test '" + t.id + "' is declared monotone but its grades decrease");
    }
    auto check_domain = [&](const std::optional<ResultDomain>& d, const std::string& dp) {
      if (d && !(d->min <= d->max)) issues.add(dp, "domain minimum exceeds maximum");
    };
    check_domain(t.domain, path + ".domain");
    for (std::size_t a = 0; a < t.aspects.size(); ++a)
      check_domain(t.aspects[a].domain, path + ".aspects[" + std::to_string(a) + "].domain");
  }

  for (std::size_t i = 0; i < kb.rules.size(); ++i) {
    const auto& r = kb.rules[i];
    const std::string path = "rules[" + std::to_string(i) + "]";
    switch (r.target_kind) {
      case TargetKind::history: {
        const auto* a = kb.aspect(r.target);
        if (!a || !a->undiagnosed) {
          issues.add(path + ".target", "history rules must target an undiagnosed aspect; '" + r.target + "' is not one");
          break;
        }
        if (!r.binary_output()) {
          issues.add(path + ".kind", "history rules must be weighted_threshold or location_match");
          break;
        }
        const auto* u = kb.past_symptom_universe(r.target);
        if (!u) break;
        // Past symptoms are binary presence flags.
        std::map<std::string, ValueDecl> decls;
        for (const auto& m : u->grades.members()) decls[m.element] = ValueDecl{m.element, ValueType::numeric, {}};
        auto lookup = [&](const std::string& id) -> const ValueDecl* {
          auto it = decls.find(id);
          return it == decls.end() ? nullptr : &it->second;
        };
        detail::check_rule_sources(r.body, lookup, false, path, issues);
        if (const auto* lm = std::get_if<LocationMatch>(&r.body)) {
          for (const auto& [id, want] : lm->required) {
            const auto* d = std::get_if<double>(&want);
            if (!d || (*d != 0.0 && *d != 1.0))
              issues.add(path + ".required." + id, "history location_match values must be 0 or 1");
          }
        }
        break;
      }
      case TargetKind::symptom: {
        const auto* s = kb.symptom(r.target);
        if (!s) issues.add(path + ".target", "undeclared symptom '" + r.target + "'");
        else if (s->binary && !r.binary_output())
          issues.add(path + ".kind", "binary symptom '" + r.target + "' cannot use " + rule_kind_name(r.body));
        const auto* p = kb.problem(r.problem);
        if (!p) {
          issues.add(path + ".problem", "undeclared problem '" + r.problem + "'");
          break;
        }
        auto lookup = [&](const std::string& id) -> const ValueDecl* { return p->factor(id); };
        detail::check_rule_sources(r.body, lookup, false, path, issues);
        if (const auto* lm = std::get_if<LocationMatch>(&r.body)) {
          for (const auto& [id, want] : lm->required)
            if (const auto* f = p->factor(id); f && f->subset == ProfileSubset::severity)
              issues.add(path + ".required." + id, "location_match may only test location, longevity, continuity or intermittency factors");
        }
        break;
      }
      case TargetKind::sign: {
        const auto* s = kb.sign(r.target);
        if (!s) {
          issues.add(path + ".target", "undeclared sign '" + r.target + "'");
          break;
        }
        if (s->binary && !r.binary_output())
          issues.add(path + ".kind", "binary sign '" + r.target + "' cannot use " + rule_kind_name(r.body));
        if (!r.problem.empty()) issues.add(path + ".problem", "sign rules read their own observables column");
        const auto* schema = kb.observable_schema(r.target);
        auto lookup = [&](const std::string& id) -> const ValueDecl* { return schema ? schema->observable(id) : nullptr; };
        detail::check_rule_sources(r.body, lookup, false, path, issues);
        break;
      }
    }
  }
  return issues;
}

}  // namespace triage
