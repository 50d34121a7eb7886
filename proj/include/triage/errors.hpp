#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace triage {

// Raised by operations whose preconditions are violated at call time
// (empty grade list, unknown identifier, length mismatch, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A malformed document. Line and column are 1-based; zero means unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line, std::size_t column)
      : std::runtime_error(format(message, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return "parse error: " + message;
    return "parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
           message;
  }

  std::size_t line_;
  std::size_t column_;
};

struct Issue {
  std::string path;
  std::string message;

  bool operator==(const Issue&) const = default;
};

// Collects every violated invariant of a document before reporting.
class Issues {
 public:
  void add(std::string path, std::string message) { items_.push_back({std::move(path), std::move(message)}); }
  void append(const Issues& other) { items_.insert(items_.end(), other.items_.begin(), other.items_.end()); }

  bool empty() const noexcept { return items_.empty(); }
  std::size_t size() const noexcept { return items_.size(); }
  const std::vector<Issue>& items() const noexcept { return items_; }

 private:
  std::vector<Issue> items_;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Issue> issues)
      : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}
  ValidationError(std::string path, std::string message)
      : ValidationError(std::vector<Issue>{{std::move(path), std::move(message)}}) {}

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  static std::string summarize(const std::vector<Issue>& issues) {
    std::string out = "validation failed (" + std::to_string(issues.size()) + " issue" +
                      (issues.size() == 1 ? "" : "s") + ")";
    for (const auto& i : issues) {
      out += "\n  ";
      out += i.path.empty() ? std::string("<root>") : i.path;
      out += ": ";
      out += i.message;
    }
    return out;
  }

  std::vector<Issue> issues_;
};

inline void throw_if_any(const Issues& issues) {
  if (!issues.empty()) throw ValidationError(issues.items());
}

}  // namespace triage
