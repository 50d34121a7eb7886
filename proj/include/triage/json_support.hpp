#pragma once

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "triage/errors.hpp"

namespace triage {

using json = nlohmann::json;

namespace detail {

// Converts a 1-based byte offset into a line and column.
inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace detail

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, column] = detail::line_column(text, e.byte);
    std::string what = e.what();
    // Drop nlohmann's own "[json.exception.parse_error.101] parse error at ..." prefix.
    if (auto pos = what.find(": ", what.find("parse error")); pos != std::string::npos) what = what.substr(pos + 2);
    throw ParseError(what, line, column);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Walks a JSON tree, collecting every type or key problem as an Issue.
class JsonReader {
 public:
  JsonReader(Issues& issues, bool lenient = false, std::vector<std::string>* warnings = nullptr)
      : issues_(issues), lenient_(lenient), warnings_(warnings) {}

  Issues& issues() { return issues_; }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

  bool expect_object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    issues_.add(path, "expected an object");
    return false;
  }

  bool expect_array(const json& j, const std::string& path) {
    if (j.is_array()) return true;
    issues_.add(path, "expected an array");
    return false;
  }

  // Unknown keys are errors, or warnings in lenient mode.
  void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
      bool known = false;
      for (auto a : allowed) known = known || a == key;
      if (known) continue;
      if (lenient_) {
        if (warnings_) warnings_->push_back(join(path, key) + ": unknown key ignored");
      } else {
        issues_.add(join(path, key), "unknown key");
      }
    }
  }

  const json* member(const json& obj, const std::string& key, const std::string& path, bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) issues_.add(join(path, key), "missing required key");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string(const json& obj, const std::string& key, const std::string& path,
                                    bool required = true) {
    const json* v = member(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      issues_.add(join(path, key), "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path,
                               bool required = true) {
    const json* v = member(obj, key, path, required);
    if (!v) return std::nullopt;
    return number_value(*v, join(path, key));
  }

  std::optional<double> number_value(const json& v, const std::string& path) {
    if (!v.is_number()) {
      issues_.add(path, "expected a number");
      return std::nullopt;
    }
    double d = v.get<double>();
    if (!std::isfinite(d)) {
      issues_.add(path, "number must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<bool> boolean(const json& obj, const std::string& key, const std::string& path,
                              bool required = true) {
    const json* v = member(obj, key, path, required);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      issues_.add(join(path, key), "expected true or false");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  std::vector<std::string> strings(const json& obj, const std::string& key, const std::string& path,
                                   bool required = true) {
    std::vector<std::string> out;
    const json* v = member(obj, key, path, required);
    if (!v) return out;
    if (!expect_array(*v, join(path, key))) return out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if ((*v)[i].is_string()) out.push_back((*v)[i].get<std::string>());
      else issues_.add(index(join(path, key), i), "expected a string");
    }
    return out;
  }

  std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path,
                              bool required = true) {
    std::vector<double> out;
    const json* v = member(obj, key, path, required);
    if (!v) return out;
    if (!expect_array(*v, join(path, key))) return out;
    for (std::size_t i = 0; i < v->size(); ++i)
      if (auto d = number_value((*v)[i], index(join(path, key), i))) out.push_back(*d);
    return out;
  }

 private:
  Issues& issues_;
  bool lenient_;
  std::vector<std::string>* warnings_;
};

}  // namespace triage
