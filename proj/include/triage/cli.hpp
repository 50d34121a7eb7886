#pragma once

// Command-line entry point:
//   triage validate --kb <path> [--lenient]
//   triage evaluate --kb <path> --record <path> --out <path|-> [--format structured|text] [--alpha <g>]
//   triage serve    --kb <path> --port <n> --data-dir <path> [--host <addr>]
//
// Exit status: 0 success, 1 invalid document, 2 usage or I/O error, 3 cannot bind.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "triage/engine.hpp"
#include "triage/http_api.hpp"
#include "triage/kb_format.hpp"
#include "triage/record.hpp"
#include "triage/session.hpp"

namespace triage {

enum ExitCode : int { kOk = 0, kInvalid = 1, kUsage = 2, kBind = 3 };

namespace cli {

struct Options {
  std::string kb;
  std::string record;
  std::string out;
  std::string format = "structured";
  std::optional<double> alpha;
  bool lenient = false;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir;
};

inline int report_failure(std::ostream& err, const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e)) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
  err << "error: " << e.what() << "\n";
  return kUsage;
}

inline bool require_file(const std::string& path, const char* what, std::ostream& err) {
  if (std::filesystem::is_regular_file(path)) return true;
  err << "error: " << what << " file '" << path << "' not found\n";
  return false;
}

inline int validate(const Options& o, std::ostream& out, std::ostream& err) {
  if (!require_file(o.kb, "knowledge base", err)) return kUsage;
  try {
    std::vector<std::string> warnings;
    KnowledgeBase kb = load_knowledge_base_file(o.kb, {o.lenient}, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    out << "ok: " << kb.history_count() << " history aspects (" << kb.undiagnosed_count() << " inferable), "
        << kb.problem_count() << " problems, " << kb.symptom_count() << " symptoms, " << kb.sign_count() << " signs, "
        << kb.test_count() << " tests, " << kb.rules.size() << " rules\n";
    return kOk;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

inline int evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  if (!require_file(o.kb, "knowledge base", err) || !require_file(o.record, "record", err)) return kUsage;
  auto format = parse_report_format(o.format);
  if (!format) {
    err << "error: unknown format '" << o.format << "'\n";
    return kUsage;
  }
  try {
    KnowledgeBase kb = load_knowledge_base_file(o.kb);
    PatientRecord rec = load_record_file(kb, o.record);
    if (o.alpha) {
      if (!Grade::valid(*o.alpha)) {
        err << "error: alpha out of range\n";
        return kUsage;
      }
      rec.alpha_override = Grade{*o.alpha};
    }
    const std::string report = render_report(evaluate(kb, rec), *format);
    if (o.out == "-") {
      out << report;
    } else {
      std::ofstream file(o.out, std::ios::binary);
      file << report;
      if (!file) {
        err << "error: cannot write '" << o.out << "'\n";
        return kUsage;
      }
    }
    return kOk;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

inline int serve(Options o, std::ostream& out, std::ostream& err) {
  if (const char* env = std::getenv("TRIAGE_DATA_DIR"); env && *env) o.data_dir = env;
  if (!require_file(o.kb, "knowledge base", err)) return kUsage;
  std::shared_ptr<const KnowledgeBase> kb;
  std::unique_ptr<SessionStore> store;
  try {
    kb = std::make_shared<const KnowledgeBase>(load_knowledge_base_file(o.kb));
    store = std::make_unique<SessionStore>(kb, o.data_dir.empty() ? std::nullopt
                                                                   : std::optional<std::filesystem::path>(o.data_dir));
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
  httplib::Server server;
  // Without SO_REUSEPORT a second instance on the same port fails to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  mount_routes(server, *store);
  if (!server.bind_to_port(o.host, o.port)) {
    err << "error: cannot bind " << o.host << ":" << o.port << "\n";
    return kBind;
  }
  out << "serving on http://" << o.host << ":" << o.port << "\n" << std::flush;
  return server.listen_after_bind() ? kOk : kBind;
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Fuzzy clinical evaluation engine"};
  app.require_subcommand(1);
  cli::Options o;

  auto* validate = app.add_subcommand("validate", "Load and validate a knowledge base");
  validate->add_option("--kb", o.kb, "Knowledge base file")->required();
  validate->add_flag("--lenient", o.lenient, "Treat unknown keys as warnings");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a patient record");
  evaluate->add_option("--kb", o.kb, "Knowledge base file")->required();
  evaluate->add_option("--record", o.record, "Patient record file")->required();
  evaluate->add_option("--out", o.out, "Output path, or - for standard output")->required();
  evaluate->add_option("--format", o.format, "structured or text")->check(CLI::IsMember({"structured", "text"}));
  evaluate->add_option("--alpha", o.alpha, "Prominence threshold override in [0, 1]");

  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--kb", o.kb, "Knowledge base file")->required();
  serve->add_option("--port", o.port, "TCP port")->required()->check(CLI::Range(0, 65535));
  serve->add_option("--data-dir", o.data_dir, "Session snapshot directory (TRIAGE_DATA_DIR overrides)")->required();
  serve->add_option("--host", o.host, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  if (*validate) return cli::validate(o, out, err);
  if (*evaluate) return cli::evaluate(o, out, err);
  return cli::serve(o, out, err);
}

}  // namespace triage
