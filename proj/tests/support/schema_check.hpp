#pragma once

// Validator for the JSON-schema subset used by schemas/: type (string or list),
// properties, required, additionalProperties: false, items, enum, pattern.

#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

namespace schema {

using nlohmann::json;

inline bool has_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  return false;
}

inline void check(const json& v, const json& s, const std::string& path, std::vector<std::string>& errors) {
  if (s.contains("type")) {
    bool ok = false;
    if (s["type"].is_array()) {
      for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
    } else {
      ok = has_type(v, s["type"].get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + s["type"].dump() + ", got " + v.dump());
      return;
    }
  }
  if (s.contains("enum")) {
    bool ok = false;
    for (const auto& e : s["enum"]) ok = ok || e == v;
    if (!ok) errors.push_back(path + ": value " + v.dump() + " not in enum");
  }
  if (s.contains("pattern") && v.is_string() && !std::regex_search(v.get<std::string>(), std::regex(s["pattern"].get<std::string>())))
    errors.push_back(path + ": '" + v.get<std::string>() + "' does not match " + s["pattern"].get<std::string>());
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& r : s["required"])
        if (!v.contains(r.get<std::string>())) errors.push_back(path + ": missing required '" + r.get<std::string>() + "'");
    const json props = s.value("properties", json::object());
    for (const auto& [key, val] : v.items()) {
      if (props.contains(key)) {
        check(val, props[key], path + "." + key, errors);
      } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
        errors.push_back(path + ": unexpected property '" + key + "'");
      }
    }
  }
  if (v.is_array() && s.contains("items"))
    for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], path + "[" + std::to_string(i) + "]", errors);
}

inline std::vector<std::string> validate(const json& instance, const json& schema) {
  std::vector<std::string> errors;
  check(instance, schema, "$", errors);
  return errors;
}

}  // namespace schema
