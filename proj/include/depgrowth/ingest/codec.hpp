#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "depgrowth/records.hpp"

namespace depgrowth::ingest {

using json = nlohmann::json;

/// Schema identifiers carried by the optional header line of each dataset file.
inline constexpr std::string_view kRepoSchema = "depgrowth.repo_snapshot/1";
inline constexpr std::string_view kReleaseSchema = "depgrowth.package_release/1";
inline constexpr std::string_view kEdgeSchema = "depgrowth.dependent_edge/1";

inline std::string schema_header(std::string_view schema) {
  return json{{"schema", schema}}.dump();
}

namespace detail {

struct FieldError {
  std::string reason;
};

inline const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FieldError{std::string("missing field '") + key + "'"};
  return *it;
}

inline std::string req_string(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) throw FieldError{std::string("field '") + key + "' must be a string"};
  auto s = v.get<std::string>();
  if (s.empty()) throw FieldError{std::string("field '") + key + "' must be non-empty"};
  return s;
}

inline std::int64_t req_count(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_number_integer())
    throw FieldError{std::string("field '") + key + "' must be an integer"};
  const auto n = v.get<std::int64_t>();
  if (n < 0) throw FieldError{std::string("field '") + key + "' must be non-negative"};
  return n;
}

inline bool req_bool(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_boolean()) throw FieldError{std::string("field '") + key + "' must be a boolean"};
  return v.get<bool>();
}

inline Date req_date(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) throw FieldError{std::string("field '") + key + "' must be a date string"};
  auto d = Date::parse(v.get_ref<const std::string&>());
  if (!d) throw FieldError{std::string("field '") + key + "' is not a YYYY-MM-DD date"};
  return *d;
}

inline std::optional<std::string> opt_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw FieldError{std::string("field '") + key + "' must be a string"};
  return it->get<std::string>();
}

inline std::string req_ecosystem(const json& obj, const char* key) {
  auto s = req_string(obj, key);
  if (s != to_lower(s)) throw FieldError{"ecosystem identifier must be lowercase"};
  return s;
}

template <typename T, typename Fn>
std::variant<T, std::string> decode_with(std::string_view line, Fn&& fn) {
  json obj = json::parse(line.begin(), line.end(), nullptr, false);
  if (obj.is_discarded()) return std::string("invalid JSON");
  if (!obj.is_object()) return std::string("record is not an object");
  try {
    return fn(obj);
  } catch (const FieldError& e) {
    return e.reason;
  }
}

inline json opt_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace detail

inline std::variant<RepoSnapshot, std::string> decode_repo_snapshot(std::string_view line) {
  return detail::decode_with<RepoSnapshot>(line, [](const json& o) {
    RepoSnapshot r;
    r.snapshot_date = detail::req_date(o, "snapshot_date");
    r.owner = detail::req_string(o, "owner");
    r.name = detail::req_string(o, "name");
    r.stars = detail::req_count(o, "stars");
    r.forks = detail::req_count(o, "forks");
    r.is_fork = detail::req_bool(o, "is_fork");
    r.description = detail::opt_string(o, "description");
    r.language = detail::opt_string(o, "language");
    if (auto it = o.find("topics"); it != o.end() && !it->is_null()) {
      if (!it->is_array()) throw detail::FieldError{"field 'topics' must be an array"};
      for (const auto& t : *it) {
        if (!t.is_string()) throw detail::FieldError{"field 'topics' must hold strings"};
        r.topics.push_back(t.get<std::string>());
      }
    }
    return r;
  });
}

inline std::variant<PackageRelease, std::string> decode_release(std::string_view line) {
  return detail::decode_with<PackageRelease>(line, [](const json& o) {
    PackageRelease r;
    r.release_date = detail::req_date(o, "release_date");
    r.ecosystem = detail::req_ecosystem(o, "ecosystem");
    r.package_name = detail::req_string(o, "package_name");
    r.owner = detail::req_string(o, "owner");
    r.repo_name = detail::req_string(o, "repo_name");
    r.version_text = detail::req_string(o, "version");
    r.release_notes = detail::opt_string(o, "release_notes");
    return r;
  });
}

inline std::variant<DependentEdge, std::string> decode_edge(std::string_view line) {
  return detail::decode_with<DependentEdge>(line, [](const json& o) {
    DependentEdge e;
    e.snapshot_date = detail::req_date(o, "snapshot_date");
    e.dependent_owner = detail::req_string(o, "dependent_owner");
    e.dependent_repo = detail::req_string(o, "dependent_repo");
    e.ecosystem = detail::req_ecosystem(o, "ecosystem");
    e.package_name = detail::req_string(o, "package_name");
    return e;
  });
}

inline json to_json(const RepoSnapshot& r) {
  json o{{"snapshot_date", r.snapshot_date.iso()},
         {"owner", r.owner},
         {"name", r.name},
         {"stars", r.stars},
         {"forks", r.forks},
         {"is_fork", r.is_fork}};
  if (r.description) o["description"] = *r.description;
  if (!r.topics.empty()) o["topics"] = r.topics;
  if (r.language) o["language"] = *r.language;
  return o;
}

inline json to_json(const PackageRelease& r) {
  json o{{"release_date", r.release_date.iso()}, {"ecosystem", r.ecosystem},
         {"package_name", r.package_name},      {"owner", r.owner},
         {"repo_name", r.repo_name},            {"version", r.version_text}};
  if (r.release_notes) o["release_notes"] = *r.release_notes;
  return o;
}

inline json to_json(const DependentEdge& e) {
  return json{{"snapshot_date", e.snapshot_date.iso()},
              {"dependent_owner", e.dependent_owner},
              {"dependent_repo", e.dependent_repo},
              {"ecosystem", e.ecosystem},
              {"package_name", e.package_name}};
}

}  // namespace depgrowth::ingest
