#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depgrowth/date.hpp"

namespace depgrowth {

/// Ecosystem identifiers are lowercase strings. npm, pypi and rubygems are the
/// analysed ecosystems; anything else is carried through as "other".
inline constexpr std::array<std::string_view, 3> kDefaultEcosystems{"npm", "pypi", "rubygems"};

/// Identifiers accepted in configuration files.
inline constexpr std::array<std::string_view, 12> kKnownEcosystems{
    "npm",   "pypi", "rubygems", "maven", "nuget", "go",
    "cargo", "composer", "pub", "hex",   "swift", "actions"};

inline bool is_known_ecosystem(std::string_view id) {
  return std::find(kKnownEcosystems.begin(), kKnownEcosystems.end(), id) != kKnownEcosystems.end();
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// Language label used when grouping complexity ratings.
inline std::string ecosystem_language(std::string_view ecosystem) {
  if (ecosystem == "npm") return "JavaScript";
  if (ecosystem == "pypi") return "Python";
  if (ecosystem == "rubygems") return "Ruby";
  return std::string(ecosystem);
}

struct RepoSnapshot {
  Date snapshot_date;
  std::string owner;
  std::string name;
  std::int64_t stars = 0;
  std::int64_t forks = 0;
  bool is_fork = false;
  std::optional<std::string> description;
  std::vector<std::string> topics;
  std::optional<std::string> language;

  std::string full_name() const { return owner + "/" + name; }
};

struct PackageRelease {
  Date release_date;
  std::string ecosystem;
  std::string package_name;
  std::string owner;
  std::string repo_name;
  std::string version_text;
  std::optional<std::string> release_notes;

  /// Unique after same-day dedup: ecosystem, package, version and day.
  std::string key() const {
    return ecosystem + ":" + package_name + "@" + version_text + "#" + release_date.iso();
  }
};

struct DependentEdge {
  Date snapshot_date;
  std::string dependent_owner;
  std::string dependent_repo;
  std::string ecosystem;
  std::string package_name;
};

}  // namespace depgrowth
