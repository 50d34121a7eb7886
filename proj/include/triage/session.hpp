#pragma once

// Incremental intake sessions: findings accumulate into a record that is
// fully re-evaluated after every accepted finding.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "triage/engine.hpp"
#include "triage/findings.hpp"

namespace triage {

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks the finding's own references; a withdrawal is checked like a recall.
inline Issues validate_finding(const KnowledgeBase& kb, const Finding& finding) {
  PatientRecord probe;
  if (const auto* r = std::get_if<RecalledSymptom>(&finding)) {
    merge_finding(probe, RecalledSymptom{r->disease, r->symptom, true});
  } else {
    merge_finding(probe, finding);
  }
  return validate_record(kb, probe);
}

class Session {
 public:
  Session(std::string id, std::shared_ptr<const KnowledgeBase> kb, std::string record_id = "")
      : id_(std::move(id)), kb_(std::move(kb)) {
    record_.record_id = std::move(record_id);
    last_ = evaluate(*kb_, record_);
  }

  // Restores a session at a given revision.
  Session(std::string id, std::shared_ptr<const KnowledgeBase> kb, PatientRecord record, std::uint64_t revision,
          std::vector<AuditEntry> audit)
      : id_(std::move(id)), kb_(std::move(kb)), revision_(revision), record_(std::move(record)), audit_(std::move(audit)) {
    canonicalize(*kb_, record_);
    last_ = evaluate(*kb_, record_);
  }

  const std::string& id() const noexcept { return id_; }
  std::uint64_t revision() const noexcept { return revision_; }
  const PatientRecord& record() const noexcept { return record_; }
  const EvaluationMatrices& evaluation() const noexcept { return last_; }
  const std::vector<AuditEntry>& audit() const noexcept { return audit_; }
  const KnowledgeBase& knowledge_base() const noexcept { return *kb_; }

  // Merges one finding and re-evaluates. On any error the session is unchanged.
  const EvaluationMatrices& apply(const Finding& finding) {
    throw_if_any(validate_finding(*kb_, finding));
    PatientRecord candidate = record_;
    std::vector<AuditEntry> changes;
    merge_finding(candidate, finding, &changes);
    canonicalize(*kb_, candidate);
    EvaluationMatrices next = evaluate(*kb_, candidate);

    record_ = std::move(candidate);
    last_ = std::move(next);
    ++revision_;
    for (auto& c : changes) {
      c.revision = revision_;
      audit_.push_back(std::move(c));
    }
    return last_;
  }

  // Evaluation under a different alpha, without committing anything.
  EvaluationMatrices preview_alpha(std::optional<Grade> alpha) const {
    PatientRecord probe = record_;
    probe.alpha_override = alpha;
    return evaluate(*kb_, probe);
  }

 private:
  std::string id_;
  std::shared_ptr<const KnowledgeBase> kb_;
  std::uint64_t revision_ = 0;
  PatientRecord record_;
  EvaluationMatrices last_;
  std::vector<AuditEntry> audit_;
};

inline Session new_session(std::shared_ptr<const KnowledgeBase> kb, std::string id = "session") {
  return Session(std::move(id), std::move(kb));
}

inline std::pair<Session, EvaluationMatrices> apply_finding(const Session& session, const Finding& finding) {
  Session next = session;
  EvaluationMatrices m = next.apply(finding);
  return {std::move(next), std::move(m)};
}

inline const EvaluationMatrices& get_evaluation(const Session& session) { return session.evaluation(); }

inline std::string export_report(const Session& session, ReportFormat format) {
  return render_report(session.evaluation(), format);
}

inline std::string export_report(const Session& session, std::string_view format) {
  auto f = parse_report_format(format);
  if (!f) throw DomainError("unknown report format '" + std::string(format) + "'");
  return export_report(session, *f);
}

inline json audit_to_json(const AuditEntry& a) {
  return {{"revision", a.revision}, {"key", a.key}, {"previous", a.previous}, {"current", a.current}};
}

inline json session_summary(const Session& s) {
  json audit = json::array();
  for (const auto& a : s.audit()) audit.push_back(audit_to_json(a));
  return {{"session_id", s.id()},
          {"revision", s.revision()},
          {"record", to_json(s.record())},
          {"audit", audit},
          {"evaluation", to_json(s.evaluation())}};
}

// Sessions keyed by id. Mutations of one session are serialized; reads see
// the latest committed revision; distinct sessions do not contend.
// With a data directory, every revision is appended as one JSON line to
// <dir>/<session_id>.jsonl and sessions are restored from there at startup.
class SessionStore {
 public:
  explicit SessionStore(std::shared_ptr<const KnowledgeBase> kb, std::optional<std::filesystem::path> data_dir = std::nullopt)
      : kb_(std::move(kb)), data_dir_(std::move(data_dir)), rng_(std::random_device{}()) {
    if (data_dir_) {
      std::filesystem::create_directories(*data_dir_);
      restore();
    }
  }

  Session create(std::string record_id = "") {
    std::string id;
    {
      std::unique_lock lock(map_mutex_);
      do id = next_id(); while (slots_.contains(id));
      auto slot = std::make_shared<Slot>(Session(id, kb_, std::move(record_id)));
      persist(slot->session, nullptr);
      slots_.emplace(id, slot);
      return slot->session;
    }
  }

  Session get(const std::string& id) const {
    auto slot = find(id);
    std::shared_lock lock(slot->mutex);
    return slot->session;
  }

  std::vector<std::string> ids() const {
    std::shared_lock lock(map_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, s] : slots_) out.push_back(id);
    return out;
  }

  // Returns the committed revision and its evaluation.
  std::pair<std::uint64_t, EvaluationMatrices> apply(const std::string& id, const Finding& finding) {
    auto slot = find(id);
    std::unique_lock lock(slot->mutex);
    Session next = slot->session;
    next.apply(finding);
    persist(next, &finding);
    slot->session = std::move(next);
    return {slot->session.revision(), slot->session.evaluation()};
  }

  EvaluationMatrices preview_alpha(const std::string& id, std::optional<Grade> alpha) const {
    auto slot = find(id);
    std::shared_lock lock(slot->mutex);
    return slot->session.preview_alpha(alpha);
  }

  const KnowledgeBase& knowledge_base() const { return *kb_; }

 private:
  struct Slot {
    explicit Slot(Session s) : session(std::move(s)) {}
    mutable std::shared_mutex mutex;
    Session session;
  };

  std::shared_ptr<Slot> find(const std::string& id) const {
    std::shared_lock lock(map_mutex_);
    auto it = slots_.find(id);
    if (it == slots_.end()) throw NotFound("no session '" + id + "'");
    return it->second;
  }

  std::string next_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id;
    auto bits = rng_();
    for (int i = 0; i < 16; ++i, bits >>= 4) id.push_back(kHex[bits & 0xf]);
    return id;
  }

  void persist(const Session& s, const Finding* finding) const {
    if (!data_dir_) return;
    json line = {{"session_id", s.id()}, {"revision", s.revision()}, {"record", to_json(s.record())}};
    line["finding"] = finding ? to_json(*finding) : json(nullptr);
    json audit = json::array();
    for (const auto& a : s.audit())
      if (a.revision == s.revision()) audit.push_back(audit_to_json(a));
    line["audit"] = audit;
    std::ofstream out(*data_dir_ / (s.id() + ".jsonl"), std::ios::app);
    out << line.dump() << "\n";
    out.flush();
    if (!out) throw std::runtime_error("cannot write session snapshot for '" + s.id() + "'");
  }

  void restore() {
    for (const auto& entry : std::filesystem::directory_iterator(*data_dir_)) {
      if (entry.path().extension() != ".jsonl") continue;
      std::ifstream in(entry.path());
      std::string text, last;
      std::vector<AuditEntry> audit;
      while (std::getline(in, text)) {
        if (text.empty()) continue;
        last = text;
        json line = json::parse(text);
        for (const auto& a : line.value("audit", json::array()))
          audit.push_back({a.at("revision").get<std::uint64_t>(), a.at("key").get<std::string>(), a.at("previous"),
                           a.at("current")});
      }
      if (last.empty()) continue;
      json snapshot = json::parse(last);
      std::string id = snapshot.at("session_id").get<std::string>();
      PatientRecord record = record_from_json(*kb_, snapshot.at("record"));
      Session s(id, kb_, std::move(record), snapshot.at("revision").get<std::uint64_t>(), std::move(audit));
      slots_.emplace(id, std::make_shared<Slot>(std::move(s)));
    }
  }

  std::shared_ptr<const KnowledgeBase> kb_;
  std::optional<std::filesystem::path> data_dir_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  std::mt19937_64 rng_;
};

}  // namespace triage
