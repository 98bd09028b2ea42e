#pragma once

// Internal strict-JSON helpers shared by the serialization code. Parsers
// collect every problem into an error list instead of stopping at the first,
// so `validate` can report a complete diagnosis.

#include <string>
#include <vector>

#include <json.hpp>

namespace topolattice::detail {

using json = nlohmann::json;

inline std::string strip_unit_suffix(const std::string& key) {
  auto pos = key.rfind('_');
  if (pos == std::string::npos) return key;
  const std::string suffix = key.substr(pos + 1);
  for (const char* unit : {"ghz", "mhz", "a", "ga"}) {
    if (suffix == unit) return key.substr(0, pos);
  }
  return key;
}

// Rejects unknown keys; wrong unit suffixes get a dedicated message.
inline void check_keys(const json& obj, const std::vector<std::string>& known,
                       const std::string& context,
                       std::vector<std::string>& errors) {
  for (const auto& item : obj.items()) {
    const std::string& key = item.key();
    bool ok = false;
    for (const auto& k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (ok) continue;
    const std::string stem = strip_unit_suffix(key);
    std::string suffix_match;
    for (const auto& k : known) {
      if (strip_unit_suffix(k) == stem) {
        suffix_match = k;
        break;
      }
    }
    if (!suffix_match.empty()) {
      errors.push_back(context + ": key '" + key +
                       "' has the wrong unit suffix (expected '" +
                       suffix_match + "')");
    } else {
      errors.push_back(context + ": unknown key '" + key + "'");
    }
  }
}

inline double get_num(const json& obj, const char* key,
                      const std::string& context,
                      std::vector<std::string>& errors, bool required,
                      double fallback = 0.0) {
  if (!obj.contains(key)) {
    if (required)
      errors.push_back(context + "." + key + ": missing required key");
    return fallback;
  }
  if (!obj[key].is_number()) {
    errors.push_back(context + "." + key + ": expected a number");
    return fallback;
  }
  return obj[key].get<double>();
}

inline long long get_int(const json& obj, const char* key,
                         const std::string& context,
                         std::vector<std::string>& errors, bool required,
                         long long fallback = 0) {
  if (!obj.contains(key)) {
    if (required)
      errors.push_back(context + "." + key + ": missing required key");
    return fallback;
  }
  if (!obj[key].is_number_integer()) {
    errors.push_back(context + "." + key + ": expected an integer");
    return fallback;
  }
  return obj[key].get<long long>();
}

inline json parse_document(const std::string& text,
                           std::vector<std::string>& errors) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    errors.push_back("malformed JSON document");
    return json::object();
  }
  if (!doc.is_object()) {
    errors.push_back("top-level JSON value must be an object");
    return json::object();
  }
  return doc;
}

inline void throw_if_errors(const std::vector<std::string>& errors,
                            const std::string& what) {
  if (errors.empty()) return;
  std::string msg = what + ":";
  for (const auto& e : errors) msg += "\n  - " + e;
  throw std::invalid_argument(msg);
}

}  // namespace topolattice::detail

// Strict object parsers shared with the config module; each appends to the
// error list and returns a best-effort value.
namespace topolattice {
struct LatticeSpec;
struct MagnonSpec;
struct PortConfig;

namespace detail {
LatticeSpec parse_lattice(const json& obj, const std::string& context,
                          std::vector<std::string>& errors);
json lattice_to_json(const LatticeSpec& spec);
MagnonSpec parse_magnon(const json& obj, const std::string& context,
                        std::vector<std::string>& errors);
PortConfig parse_ports(const json& obj, const std::string& context,
                       std::vector<std::string>& errors);
json magnon_to_json(const MagnonSpec& magnon);
json ports_to_json(const PortConfig& ports);
}  // namespace detail
}  // namespace topolattice
