#pragma once

// JSON-over-HTTP surface for live intake sessions.
//
//   POST /sessions                      -> {session_id, revision, evaluation}
//   GET  /sessions/{id}                 -> session summary with evaluation
//   POST /sessions/{id}/findings        -> {revision, evaluation}
//   PUT  /sessions/{id}/alpha           -> {revision, evaluation}
//   GET  /sessions/{id}/preview?alpha=g -> {revision, evaluation}, nothing committed
//   GET  /sessions/{id}/report?format=structured|text
//   GET  /kb                            -> knowledge base and derived universes
//
// Errors are {code, message, path} with an HTTP 4xx status.

#include <string>

#include <httplib.h>

#include "triage/kb_format.hpp"
#include "triage/session.hpp"

namespace triage {

namespace http {

inline json error_body(const std::string& code, const std::string& message, const std::string& path = "") {
  return {{"code", code}, {"message", message}, {"path", path}};
}

inline void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

inline void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                       const std::string& path = "") {
  send_json(res, status, error_body(code, message, path));
}

// Runs a handler, mapping library exceptions onto error responses.
template <typename F>
void guarded(httplib::Response& res, F&& handler) {
  try {
    handler();
  } catch (const ParseError& e) {
    send_error(res, 400, "parse_error", e.what());
  } catch (const ValidationError& e) {
    json body = error_body("validation_failed", e.issues().empty() ? e.what() : e.issues().front().message,
                           e.issues().empty() ? "" : e.issues().front().path);
    json issues = json::array();
    for (const auto& i : e.issues()) issues.push_back({{"path", i.path}, {"message", i.message}});
    body["issues"] = issues;
    send_json(res, 422, body);
  } catch (const NotFound& e) {
    send_error(res, 404, "not_found", e.what());
  } catch (const DomainError& e) {
    send_error(res, 422, "invalid", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

inline json evaluation_body(std::uint64_t revision, const EvaluationMatrices& m) {
  return {{"revision", revision}, {"evaluation", to_json(m)}};
}

inline json kb_body(const KnowledgeBase& kb) {
  json aspects = json::array();
  for (const auto& a : kb.history_aspects) aspects.push_back({{"id", a.id}, {"undiagnosed", a.undiagnosed}});
  json prominent = json::object();
  for (const auto& u : kb.past_symptoms) prominent[u.disease] = prominent_symptom_set(kb, u.disease);
  return {{"knowledge_base", to_json(kb)},
          {"universes",
           {{"history_aspects", aspects},
            {"problem_rows", kb.profile_rows()},
            {"prominent_symptoms", prominent}}},
          {"counts",
           {{"history_aspects", kb.history_count()},
            {"undiagnosed", kb.undiagnosed_count()},
            {"problems", kb.problem_count()},
            {"symptoms", kb.symptom_count()},
            {"signs", kb.sign_count()},
            {"tests", kb.test_count()},
            {"max_observables", kb.max_observables()}}}};
}

}  // namespace http

inline void mount_routes(httplib::Server& server, SessionStore& store) {
  using httplib::Request;
  using httplib::Response;
  const std::string id = R"(/sessions/([A-Za-z0-9_-]+))";

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(/.*)", [](const Request&, Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.Get("/kb", [&store](const Request&, Response& res) {
    http::guarded(res, [&] { http::send_json(res, 200, http::kb_body(store.knowledge_base())); });
  });

  server.Post("/sessions", [&store](const Request& req, Response& res) {
    http::guarded(res, [&] {
      std::string record_id;
      if (!req.body.empty()) {
        json body = parse_json(req.body);
        if (!body.is_object()) throw ValidationError("", "expected an object");
        if (body.contains("record_id")) {
          if (!body["record_id"].is_string()) throw ValidationError("record_id", "expected a string");
          record_id = body["record_id"].get<std::string>();
        }
      }
      Session s = store.create(record_id);
      json out = http::evaluation_body(s.revision(), s.evaluation());
      out["session_id"] = s.id();
      http::send_json(res, 201, out);
    });
  });

  server.Get(id, [&store](const Request& req, Response& res) {
    http::guarded(res, [&] { http::send_json(res, 200, session_summary(store.get(req.matches[1]))); });
  });

  server.Post(id + "/findings", [&store](const Request& req, Response& res) {
    http::guarded(res, [&] {
      std::string sid = req.matches[1];
      store.get(sid);
      Finding f = finding_from_json(store.knowledge_base(), parse_json(req.body));
      auto [revision, m] = store.apply(sid, f);
      http::send_json(res, 200, http::evaluation_body(revision, m));
    });
  });

  server.Put(id + "/alpha", [&store](const Request& req, Response& res) {
    http::guarded(res, [&] {
      std::string sid = req.matches[1];
      store.get(sid);
      json body = parse_json(req.body);
      if (!body.is_object() || !body.contains("alpha")) throw ValidationError("alpha", "missing required key");
      const json& raw = body["alpha"];
      AlphaFinding finding;
      if (!raw.is_null()) {
        if (!raw.is_number()) throw ValidationError("alpha", "expected a number or null");
        if (!Grade::valid(raw.get<double>())) throw ValidationError("alpha", "alpha out of range");
        finding.alpha = Grade{raw.get<double>()};
      }
      auto [revision, m] = store.apply(sid, finding);
      http::send_json(res, 200, http::evaluation_body(revision, m));
    });
  });

  server.Get(id + "/preview", [&store](const Request& req, Response& res) {
    http::guarded(res, [&] {
      std::string sid = req.matches[1];
      Session s = store.get(sid);
      std::optional<Grade> alpha;
      if (req.has_param("alpha")) {
        const std::string raw = req.get_param_value("alpha");
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(raw, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != raw.size() || !Grade::valid(v)) throw ValidationError("alpha", "alpha out of range");
        alpha = Grade{v};
      }
      http::send_json(res, 200, http::evaluation_body(s.revision(), s.preview_alpha(alpha)));
    });
  });

  server.Get(id + "/report", [&store](const Request& req, Response& res) {
    http::guarded(res, [&] {
      Session s = store.get(req.matches[1]);
      const std::string name = req.has_param("format") ? req.get_param_value("format") : "structured";
      auto format = parse_report_format(name);
      if (!format) {
        http::send_error(res, 400, "bad_format", "unknown report format '" + name + "'", "format");
        return;
      }
      res.status = 200;
      res.set_content(export_report(s, *format), *format == ReportFormat::text ? "text/plain" : "application/json");
    });
  });
}

}  // namespace triage
