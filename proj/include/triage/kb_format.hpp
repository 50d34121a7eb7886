#pragma once

// Reading and writing knowledge-base documents (JSON). The document layout is
// described in schemas/kb.schema.json.

#include <istream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "triage/json_support.hpp"
#include "triage/knowledge_base.hpp"

namespace triage {

struct LoadOptions {
  // Unknown keys become warnings instead of validation errors.
  bool lenient = false;
};

namespace kbio {

inline std::optional<Grade> read_grade(JsonReader& rd, const json& v, const std::string& path,
                                       const char* what = "grade") {
  auto d = rd.number_value(v, path);
  if (!d) return std::nullopt;
  if (!Grade::valid(*d)) {
    rd.issues().add(path, std::string(what) + " out of range");
    return std::nullopt;
  }
  return Grade{*d};
}

inline std::optional<MembershipFunction> read_membership(JsonReader& rd, const json& j, const std::string& path) {
  if (!rd.expect_object(j, path)) return std::nullopt;
  rd.check_keys(j, path, {"breakpoints", "below", "above"});
  const json* bps = rd.member(j, "breakpoints", path, true);
  if (!bps) return std::nullopt;
  const std::string bp_path = JsonReader::join(path, "breakpoints");
  if (!rd.expect_array(*bps, bp_path)) return std::nullopt;
  std::vector<Breakpoint> points;
  bool ok = true;
  for (std::size_t i = 0; i < bps->size(); ++i) {
    const json& pt = (*bps)[i];
    const std::string pp = JsonReader::index(bp_path, i);
    if (!pt.is_array() || pt.size() != 2) {
      rd.issues().add(pp, "breakpoint must be [input, grade]");
      ok = false;
      continue;
    }
    auto x = rd.number_value(pt[0], pp + "[0]");
    auto g = read_grade(rd, pt[1], pp + "[1]");
    if (!x || !g) {
      ok = false;
      continue;
    }
    points.push_back({*x, *g});
  }
  std::optional<Grade> below, above;
  if (const json* b = rd.member(j, "below", path, false)) {
    below = read_grade(rd, *b, JsonReader::join(path, "below"));
    ok = ok && below.has_value();
  }
  if (const json* a = rd.member(j, "above", path, false)) {
    above = read_grade(rd, *a, JsonReader::join(path, "above"));
    ok = ok && above.has_value();
  }
  if (!ok) return std::nullopt;
  try {
    MembershipFunction plain(points);
    return MembershipFunction(points, below.value_or(plain.below()), above.value_or(plain.above()));
  } catch (const DomainError& e) {
    rd.issues().add(bp_path, e.what());
    return std::nullopt;
  }
}

inline std::optional<GradeCombinator> read_combinator(JsonReader& rd, const json& j, const std::string& path) {
  if (!rd.expect_object(j, path)) return std::nullopt;
  rd.check_keys(j, path, {"kind", "weights"});
  auto kind = rd.string(j, "kind", path);
  if (!kind) return std::nullopt;
  if (*kind == "minimum") return GradeCombinator::minimum();
  if (*kind == "maximum") return GradeCombinator::maximum();
  if (*kind == "product") return GradeCombinator::product();
  if (*kind == "weighted_mean") {
    auto weights = rd.numbers(j, "weights", path);
    try {
      return GradeCombinator::weighted_mean(weights);
    } catch (const DomainError& e) {
      rd.issues().add(JsonReader::join(path, "weights"), e.what());
      return std::nullopt;
    }
  }
  rd.issues().add(JsonReader::join(path, "kind"), "unknown combinator '" + *kind + "'");
  return std::nullopt;
}

inline std::optional<ValueType> read_value_type(JsonReader& rd, const json& j, const std::string& path,
                                                std::optional<ValueType> fallback) {
  auto t = rd.string(j, "type", path, !fallback.has_value());
  if (!t) return fallback;
  if (*t == "categorical") return ValueType::categorical;
  if (*t == "numeric") return ValueType::numeric;
  if (*t == "grade") return ValueType::grade;
  rd.issues().add(JsonReader::join(path, "type"), "unknown value type '" + *t + "'");
  return std::nullopt;
}

inline std::optional<ValueDecl> read_value_decl(JsonReader& rd, const json& j, const std::string& path,
                                                std::optional<ValueType> fallback = std::nullopt) {
  if (!rd.expect_object(j, path)) return std::nullopt;
  rd.check_keys(j, path, {"id", "type", "values"});
  auto id = rd.string(j, "id", path);
  auto type = read_value_type(rd, j, path, fallback);
  auto values = rd.strings(j, "values", path, false);
  if (!id || !type) return std::nullopt;
  if (!values.empty() && *type != ValueType::categorical)
    rd.issues().add(JsonReader::join(path, "values"), "only categorical values take a label list");
  return ValueDecl{*id, *type, values};
}

inline std::optional<ResultDomain> read_domain(JsonReader& rd, const json& j, const std::string& path) {
  const json* d = rd.member(j, "domain", path, false);
  if (!d) return std::nullopt;
  const std::string dp = JsonReader::join(path, "domain");
  if (!d->is_array() || d->size() != 2) {
    rd.issues().add(dp, "domain must be [min, max]");
    return std::nullopt;
  }
  auto lo = rd.number_value((*d)[0], dp + "[0]");
  auto hi = rd.number_value((*d)[1], dp + "[1]");
  if (!lo || !hi) return std::nullopt;
  return ResultDomain{*lo, *hi};
}

inline std::optional<MatchValue> read_match_value(JsonReader& rd, const json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  if (auto d = rd.number_value(v, path)) return *d;
  return std::nullopt;
}

inline std::optional<MappingRule> read_rule(JsonReader& rd, const json& j, const std::string& path) {
  if (!rd.expect_object(j, path)) return std::nullopt;
  rd.check_keys(j, path, {"target_kind", "target", "problem", "kind", "required", "weights", "threshold", "source",
                          "sources", "combinator"});
  MappingRule rule;
  bool ok = true;
  auto target_kind = rd.string(j, "target_kind", path);
  if (target_kind == "history") rule.target_kind = TargetKind::history;
  else if (target_kind == "symptom") rule.target_kind = TargetKind::symptom;
  else if (target_kind == "sign") rule.target_kind = TargetKind::sign;
  else {
    if (target_kind) rd.issues().add(JsonReader::join(path, "target_kind"), "unknown target kind '" + *target_kind + "'");
    ok = false;
  }
  auto target = rd.string(j, "target", path);
  ok = ok && target.has_value();
  if (target) rule.target = *target;
  if (auto problem = rd.string(j, "problem", path, rule.target_kind == TargetKind::symptom && ok)) rule.problem = *problem;

  auto kind = rd.string(j, "kind", path);
  if (!kind) return std::nullopt;
  auto only = [&](std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : j.items()) {
      bool common = k == "target_kind" || k == "target" || k == "problem" || k == "kind";
      bool listed = false;
      for (auto key : keys) listed = listed || key == k;
      if (!common && !listed) {
        rd.issues().add(JsonReader::join(path, k), "key not used by " + *kind + " rules");
        ok = false;
      }
    }
  };
  if (*kind == "location_match") {
    only({"required"});
    LocationMatch body;
    const json* req = rd.member(j, "required", path, true);
    if (req && rd.expect_object(*req, JsonReader::join(path, "required"))) {
      for (const auto& [k, v] : req->items()) {
        if (auto mv = read_match_value(rd, v, JsonReader::join(JsonReader::join(path, "required"), k)))
          body.required.emplace(k, *mv);
        else
          ok = false;
      }
    } else {
      ok = false;
    }
    rule.body = std::move(body);
  } else if (*kind == "weighted_threshold") {
    only({"weights", "threshold"});
    WeightedThreshold body;
    const json* ws = rd.member(j, "weights", path, true);
    if (ws && rd.expect_object(*ws, JsonReader::join(path, "weights"))) {
      for (const auto& [k, v] : ws->items()) {
        if (auto w = rd.number_value(v, JsonReader::join(JsonReader::join(path, "weights"), k)))
          body.weights.push_back({k, *w});
        else
          ok = false;
      }
    } else {
      ok = false;
    }
    auto tau = rd.number(j, "threshold", path);
    ok = ok && tau.has_value();
    body.threshold = tau.value_or(0.0);
    rule.body = std::move(body);
  } else if (*kind == "membership_passthrough") {
    only({"source"});
    auto source = rd.string(j, "source", path);
    ok = ok && source.has_value();
    rule.body = MembershipPassthrough{source.value_or("")};
  } else if (*kind == "combined") {
    only({"combinator", "sources"});
    Combined body;
    if (const json* c = rd.member(j, "combinator", path, true)) {
      auto comb = read_combinator(rd, *c, JsonReader::join(path, "combinator"));
      ok = ok && comb.has_value();
      if (comb) body.combinator = *comb;
    } else {
      ok = false;
    }
    body.sources = rd.strings(j, "sources", path);
    rule.body = std::move(body);
  } else {
    rd.issues().add(JsonReader::join(path, "kind"), "unknown rule kind '" + *kind + "'");
    return std::nullopt;
  }
  if (!ok) return std::nullopt;
  return rule;
}

template <typename T, typename F>
std::vector<T> read_list(JsonReader& rd, const json& root, const std::string& key, F read_one) {
  std::vector<T> out;
  const json* arr = rd.member(root, key, "", true);
  if (!arr || !rd.expect_array(*arr, key)) return out;
  for (std::size_t i = 0; i < arr->size(); ++i)
    if (auto item = read_one((*arr)[i], JsonReader::index(key, i))) out.push_back(std::move(*item));
  return out;
}

inline KnowledgeBase read_knowledge_base(JsonReader& rd, const json& root) {
  KnowledgeBase kb;
  if (!rd.expect_object(root, "")) return kb;
  rd.check_keys(root, "", {"diseases", "history_aspects", "past_symptoms", "alpha", "problems", "symptoms", "signs",
                           "observables", "tests", "rules"});

  if (const json* a = rd.member(root, "alpha", "", true)) {
    if (auto g = read_grade(rd, *a, "alpha", "alpha")) kb.alpha = *g;
  }

  kb.diseases = read_list<DiseaseDecl>(rd, root, "diseases", [&](const json& j, const std::string& path) {
    std::optional<DiseaseDecl> out;
    if (!rd.expect_object(j, path)) return out;
    rd.check_keys(j, path, {"id", "history_aspects", "problems", "signs"});
    auto id = rd.string(j, "id", path);
    DiseaseDecl d{id.value_or(""), rd.strings(j, "history_aspects", path, false), rd.strings(j, "problems", path, false),
                  rd.strings(j, "signs", path, false)};
    if (id) out = std::move(d);
    return out;
  });

  kb.history_aspects = read_list<HistoryAspect>(rd, root, "history_aspects", [&](const json& j, const std::string& path) {
    std::optional<HistoryAspect> out;
    if (!rd.expect_object(j, path)) return out;
    rd.check_keys(j, path, {"id", "undiagnosed"});
    auto id = rd.string(j, "id", path);
    auto undiagnosed = rd.boolean(j, "undiagnosed", path, false);
    if (id) out = HistoryAspect{*id, undiagnosed.value_or(false)};
    return out;
  });

  kb.past_symptoms = read_list<PastSymptomUniverse>(rd, root, "past_symptoms", [&](const json& j, const std::string& path) {
    std::optional<PastSymptomUniverse> out;
    if (!rd.expect_object(j, path)) return out;
    rd.check_keys(j, path, {"disease", "alpha", "symptoms"});
    auto disease = rd.string(j, "disease", path);
    std::optional<Grade> alpha;
    bool ok = disease.has_value();
    if (const json* a = rd.member(j, "alpha", path, false)) {
      alpha = read_grade(rd, *a, JsonReader::join(path, "alpha"), "alpha");
      ok = ok && alpha.has_value();
    }
    std::vector<FuzzyMember> members;
    if (const json* syms = rd.member(j, "symptoms", path, true); syms && rd.expect_array(*syms, JsonReader::join(path, "symptoms"))) {
      for (std::size_t i = 0; i < syms->size(); ++i) {
        const std::string sp = JsonReader::index(JsonReader::join(path, "symptoms"), i);
        const json& s = (*syms)[i];
        if (!rd.expect_object(s, sp)) {
          ok = false;
          continue;
        }
        rd.check_keys(s, sp, {"id", "grade"});
        auto id = rd.string(s, "id", sp);
        std::optional<Grade> g;
        if (const json* gv = rd.member(s, "grade", sp, true)) g = read_grade(rd, *gv, JsonReader::join(sp, "grade"));
        if (id && g) members.push_back({*id, *g});
        else ok = false;
      }
    } else {
      ok = false;
    }
    if (!ok) return out;
    try {
      out = PastSymptomUniverse{*disease, alpha, FuzzySet("past_symptoms:" + *disease, std::move(members))};
    } catch (const DomainError& e) {
      rd.issues().add(JsonReader::join(path, "symptoms"), e.what());
    }
    return out;
  });

  kb.problems = read_list<ProblemDecl>(rd, root, "problems", [&](const json& j, const std::string& path) {
    std::optional<ProblemDecl> out;
    if (!rd.expect_object(j, path)) return out;
    rd.check_keys(j, path, {"id", "profile"});
    auto id = rd.string(j, "id", path);
    ProblemDecl p{id.value_or(""), {}};
    if (const json* prof = rd.member(j, "profile", path, true); prof && rd.expect_object(*prof, JsonReader::join(path, "profile"))) {
      const std::string pp = JsonReader::join(path, "profile");
      rd.check_keys(*prof, pp, {"location", "longevity", "continuity", "intermittency", "severity"});
      for (ProfileSubset s : kProfileSubsets) {
        const json* list = rd.member(*prof, to_string(s), pp, false);
        if (!list) continue;
        const std::string lp = JsonReader::join(pp, to_string(s));
        if (!rd.expect_array(*list, lp)) continue;
        for (std::size_t i = 0; i < list->size(); ++i) {
          auto fallback = s == ProfileSubset::severity ? std::optional<ValueType>(ValueType::grade) : std::nullopt;
          if (auto decl = read_value_decl(rd, (*list)[i], JsonReader::index(lp, i), fallback)) {
            FactorDecl f;
            static_cast<ValueDecl&>(f) = std::move(*decl);
            f.subset = s;
            p.factors.push_back(std::move(f));
          }
        }
      }
    }
    if (id) out = std::move(p);
    return out;
  });

  auto read_flagged = [&](const json& j, const std::string& path) {
    std::optional<SymptomDecl> out;
    if (!rd.expect_object(j, path)) return out;
    rd.check_keys(j, path, {"id", "binary"});
    auto id = rd.string(j, "id", path);
    auto binary = rd.boolean(j, "binary", path, false);
    if (id) out = SymptomDecl{*id, binary.value_or(false)};
    return out;
  };
  kb.symptoms = read_list<SymptomDecl>(rd, root, "symptoms", read_flagged);
  kb.signs = read_list<SignDecl>(rd, root, "signs", read_flagged);

  kb.observables = read_list<ObservableSchema>(rd, root, "observables", [&](const json& j, const std::string& path) {
    std::optional<ObservableSchema> out;
    if (!rd.expect_object(j, path)) return out;
    rd.check_keys(j, path, {"sign", "observables"});
    auto sign = rd.string(j, "sign", path);
    ObservableSchema schema{sign.value_or(""), {}};
    if (const json* list = rd.member(j, "observables", path, true); list && rd.expect_array(*list, JsonReader::join(path, "observables"))) {
      for (std::size_t i = 0; i < list->size(); ++i)
        if (auto decl = read_value_decl(rd, (*list)[i], JsonReader::index(JsonReader::join(path, "observables"), i)))
          schema.observables.push_back(std::move(*decl));
    }
    if (sign) out = std::move(schema);
    return out;
  });

  kb.tests = read_list<TestDecl>(rd, root, "tests", [&](const json& j, const std::string& path) {
    std::optional<TestDecl> out;
    if (!rd.expect_object(j, path)) return out;
    rd.check_keys(j, path, {"id", "membership", "aspects", "combinator", "domain", "monotone"});
    auto id = rd.string(j, "id", path);
    bool ok = id.has_value();
    TestDecl t{id.value_or(""), std::nullopt, {}, GradeCombinator::maximum(), std::nullopt, false};
    if (const json* m = rd.member(j, "membership", path, false)) {
      t.membership = read_membership(rd, *m, JsonReader::join(path, "membership"));
      ok = ok && t.membership.has_value();
    }
    if (const json* as = rd.member(j, "aspects", path, false); as && rd.expect_array(*as, JsonReader::join(path, "aspects"))) {
      if (as->empty()) rd.issues().add(JsonReader::join(path, "aspects"), "aspect list is empty");
      for (std::size_t i = 0; i < as->size(); ++i) {
        const std::string ap = JsonReader::index(JsonReader::join(path, "aspects"), i);
        const json& a = (*as)[i];
        if (!rd.expect_object(a, ap)) {
          ok = false;
          continue;
        }
        rd.check_keys(a, ap, {"id", "membership", "domain"});
        auto aid = rd.string(a, "id", ap);
        std::optional<MembershipFunction> mf;
        if (const json* m = rd.member(a, "membership", ap, true)) mf = read_membership(rd, *m, JsonReader::join(ap, "membership"));
        auto domain = read_domain(rd, a, ap);
        if (aid && mf) t.aspects.push_back({*aid, *mf, domain});
        else ok = false;
      }
    }
    if (const json* c = rd.member(j, "combinator", path, false)) {
      if (!j.contains("aspects")) rd.issues().add(JsonReader::join(path, "combinator"), "only multi-aspect tests take a combinator");
      auto comb = read_combinator(rd, *c, JsonReader::join(path, "combinator"));
      ok = ok && comb.has_value();
      if (comb) t.combinator = *comb;
    }
    t.domain = read_domain(rd, j, path);
    t.monotone = rd.boolean(j, "monotone", path, false).value_or(false);
    if (ok) out = std::move(t);
    return out;
  });

  kb.rules = read_list<MappingRule>(rd, root, "rules",
                                    [&](const json& j, const std::string& path) { return read_rule(rd, j, path); });
  return kb;
}

inline json membership_to_json(const MembershipFunction& mf) {
  json bps = json::array();
  for (const auto& b : mf.breakpoints()) bps.push_back(json::array({b.input, b.grade.value()}));
  return {{"breakpoints", bps}, {"below", mf.below().value()}, {"above", mf.above().value()}};
}

inline json combinator_to_json(const GradeCombinator& c) {
  json out = {{"kind", to_string(c.kind())}};
  if (c.kind() == GradeCombinator::Kind::weighted_mean) out["weights"] = c.weights();
  return out;
}

inline json value_decl_to_json(const ValueDecl& v) {
  json out = {{"id", v.id}, {"type", to_string(v.type)}};
  if (!v.values.empty()) out["values"] = v.values;
  return out;
}

inline json match_value_to_json(const MatchValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return std::get<double>(v);
}

inline json rule_to_json(const MappingRule& r) {
  json out = {{"target_kind", to_string(r.target_kind)}, {"target", r.target}, {"kind", rule_kind_name(r.body)}};
  if (!r.problem.empty()) out["problem"] = r.problem;
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, LocationMatch>) {
          json req = json::object();
          for (const auto& [k, v] : b.required) req[k] = match_value_to_json(v);
          out["required"] = req;
        } else if constexpr (std::is_same_v<B, WeightedThreshold>) {
          json ws = json::object();
          for (const auto& w : b.weights) ws[w.source] = w.weight;
          out["weights"] = ws;
          out["threshold"] = b.threshold;
        } else if constexpr (std::is_same_v<B, MembershipPassthrough>) {
          out["source"] = b.source;
        } else {
          out["combinator"] = combinator_to_json(b.combinator);
          out["sources"] = b.sources;
        }
      },
      r.body);
  return out;
}

inline json domain_to_json(const ResultDomain& d) { return json::array({d.min, d.max}); }

}  // namespace kbio

inline json to_json(const KnowledgeBase& kb) {
  using namespace kbio;
  json out;
  out["alpha"] = kb.alpha.value();
  out["diseases"] = json::array();
  for (const auto& d : kb.diseases)
    out["diseases"].push_back(
        {{"id", d.id}, {"history_aspects", d.history_aspects}, {"problems", d.problems}, {"signs", d.signs}});
  out["history_aspects"] = json::array();
  for (const auto& a : kb.history_aspects) {
    json item = {{"id", a.id}};
    if (a.undiagnosed) item["undiagnosed"] = true;
    out["history_aspects"].push_back(item);
  }
  out["past_symptoms"] = json::array();
  for (const auto& u : kb.past_symptoms) {
    json syms = json::array();
    for (const auto& m : u.grades.members()) syms.push_back({{"id", m.element}, {"grade", m.grade.value()}});
    json item = {{"disease", u.disease}, {"symptoms", syms}};
    if (u.alpha) item["alpha"] = u.alpha->value();
    out["past_symptoms"].push_back(item);
  }
  out["problems"] = json::array();
  for (const auto& p : kb.problems) {
    json profile = json::object();
    for (ProfileSubset s : kProfileSubsets) {
      json list = json::array();
      for (const auto* f : p.subset(s)) list.push_back(value_decl_to_json(*f));
      if (!list.empty()) profile[to_string(s)] = list;
    }
    out["problems"].push_back({{"id", p.id}, {"profile", profile}});
  }
  auto flagged = [](const auto& items) {
    json list = json::array();
    for (const auto& s : items) list.push_back({{"id", s.id}, {"binary", s.binary}});
    return list;
  };
  out["symptoms"] = flagged(kb.symptoms);
  out["signs"] = flagged(kb.signs);
  out["observables"] = json::array();
  for (const auto& s : kb.observables) {
    json list = json::array();
    for (const auto& o : s.observables) list.push_back(value_decl_to_json(o));
    out["observables"].push_back({{"sign", s.sign}, {"observables", list}});
  }
  out["tests"] = json::array();
  for (const auto& t : kb.tests) {
    json item = {{"id", t.id}};
    if (t.membership) item["membership"] = membership_to_json(*t.membership);
    if (t.multi_aspect()) {
      json aspects = json::array();
      for (const auto& a : t.aspects) {
        json aj = {{"id", a.id}, {"membership", membership_to_json(a.membership)}};
        if (a.domain) aj["domain"] = domain_to_json(*a.domain);
        aspects.push_back(aj);
      }
      item["aspects"] = aspects;
      item["combinator"] = combinator_to_json(t.combinator);
    }
    if (t.domain) item["domain"] = domain_to_json(*t.domain);
    if (t.monotone) item["monotone"] = true;
    out["tests"].push_back(item);
  }
  out["rules"] = json::array();
  for (const auto& r : kb.rules) out["rules"].push_back(rule_to_json(r));
  return out;
}

// Parses, type-checks and validates a knowledge-base document. Throws
// ParseError for malformed text and ValidationError listing every problem.
inline KnowledgeBase load_knowledge_base(std::string_view text, const LoadOptions& options = {},
                                         std::vector<std::string>* warnings = nullptr) {
  json root = parse_json(text);
  Issues issues;
  JsonReader rd(issues, options.lenient, warnings);
  KnowledgeBase kb = kbio::read_knowledge_base(rd, root);
  issues.append(validate(kb));
  throw_if_any(issues);
  canonicalize(kb);
  return kb;
}

inline KnowledgeBase load_knowledge_base(std::istream& in, const LoadOptions& options = {},
                                         std::vector<std::string>* warnings = nullptr) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_knowledge_base(std::string_view(text), options, warnings);
}

inline KnowledgeBase load_knowledge_base_file(const std::string& path, const LoadOptions& options = {},
                                              std::vector<std::string>* warnings = nullptr) {
  return load_knowledge_base(std::string_view(read_file(path)), options, warnings);
}

inline std::string serialize(const KnowledgeBase& kb) { return to_json(kb).dump(2) + "\n"; }

}  // namespace triage
