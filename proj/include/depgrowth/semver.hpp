#pragma once

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace depgrowth::semver {

/// Numeric MAJOR.MINOR.PATCH triple. Pre-release versions are never
/// constructed; `raw` keeps the text the version was parsed from.
struct Version {
  std::uint64_t major = 0;
  std::uint64_t minor = 0;
  std::uint64_t patch = 0;
  std::string raw;

  friend bool operator==(const Version& a, const Version& b) {
    return a.major == b.major && a.minor == b.minor && a.patch == b.patch;
  }
  friend std::strong_ordering operator<=>(const Version& a, const Version& b) {
    if (auto c = a.major <=> b.major; c != 0) return c;
    if (auto c = a.minor <=> b.minor; c != 0) return c;
    return a.patch <=> b.patch;
  }
};

enum class ReleaseType { Major, Minor, Patch, ZeroMajor, ZeroMinor };
enum class VersionSeries { ZeroVer, OneVer, TwoPlusVer };

/// The three columns of the stratified tables. Zero-major folds into Major and
/// zero-minor into Minor.
enum class ReportColumn { Major, Minor, Patch };

inline constexpr std::array<ReleaseType, 5> kAllReleaseTypes{
    ReleaseType::Major, ReleaseType::Minor, ReleaseType::Patch, ReleaseType::ZeroMajor,
    ReleaseType::ZeroMinor};
inline constexpr std::array<VersionSeries, 3> kAllSeries{
    VersionSeries::ZeroVer, VersionSeries::OneVer, VersionSeries::TwoPlusVer};
inline constexpr std::array<ReportColumn, 3> kAllColumns{ReportColumn::Major, ReportColumn::Minor,
                                                         ReportColumn::Patch};

enum class VersionErrc { MalformedVersion, PreReleaseExcluded };

inline const char* to_string(VersionErrc e) {
  return e == VersionErrc::MalformedVersion ? "MalformedVersion" : "PreReleaseExcluded";
}

class VersionError : public std::invalid_argument {
 public:
  VersionError(VersionErrc code, const std::string& text)
      : std::invalid_argument(std::string(to_string(code)) + ": '" + text + "'"), code_(code) {}
  VersionErrc code() const noexcept { return code_; }

 private:
  VersionErrc code_;
};

namespace detail {

inline bool is_ident_char(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-';
}

// Dot-separated, non-empty identifiers of [0-9A-Za-z-].
inline bool valid_identifiers(std::string_view s) {
  if (s.empty()) return false;
  std::size_t start = 0;
  while (true) {
    const auto dot = s.find('.', start);
    const auto part = s.substr(start, dot == std::string_view::npos ? dot : dot - start);
    if (part.empty()) return false;
    for (char c : part)
      if (!is_ident_char(c)) return false;
    if (dot == std::string_view::npos) return true;
    start = dot + 1;
  }
}

inline std::optional<std::uint64_t> parse_component(std::string_view s) {
  if (s.empty() || (s.size() > 1 && s[0] == '0')) return std::nullopt;
  for (char c : s)
    if (c < '0' || c > '9') return std::nullopt;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::optional<std::array<std::uint64_t, 3>> parse_core(std::string_view s) {
  std::array<std::uint64_t, 3> out{};
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const auto dot = s.find('.', start);
    const bool last = i == 2;
    if (last != (dot == std::string_view::npos)) return std::nullopt;
    const auto part = s.substr(start, last ? std::string_view::npos : dot - start);
    auto v = parse_component(part);
    if (!v) return std::nullopt;
    out[i] = *v;
    start = dot + 1;
  }
  return out;
}

}  // namespace detail

/// Non-throwing parse. An optional leading "v"/"V" and "+build" metadata are
/// stripped; anything with a pre-release suffix is rejected.
inline std::variant<Version, VersionErrc> try_parse_version(std::string_view text) {
  std::string_view s = text;
  if (!s.empty() && (s.front() == 'v' || s.front() == 'V')) s.remove_prefix(1);
  if (s.empty()) return VersionErrc::MalformedVersion;

  if (const auto plus = s.find('+'); plus != std::string_view::npos) {
    if (!detail::valid_identifiers(s.substr(plus + 1))) return VersionErrc::MalformedVersion;
    s = s.substr(0, plus);
  }

  std::string_view prerelease;
  bool has_prerelease = false;
  if (const auto dash = s.find('-'); dash != std::string_view::npos) {
    prerelease = s.substr(dash + 1);
    s = s.substr(0, dash);
    has_prerelease = true;
  }

  const auto core = detail::parse_core(s);
  if (!core) return VersionErrc::MalformedVersion;
  if (has_prerelease) {
    return detail::valid_identifiers(prerelease) ? VersionErrc::PreReleaseExcluded
                                                 : VersionErrc::MalformedVersion;
  }
  return Version{(*core)[0], (*core)[1], (*core)[2], std::string(text)};
}

/// Throws VersionError.
inline Version parse_version(std::string_view text) {
  auto r = try_parse_version(text);
  if (auto* err = std::get_if<VersionErrc>(&r)) throw VersionError(*err, std::string(text));
  return std::get<Version>(std::move(r));
}

inline std::string format(const Version& v) {
  return std::to_string(v.major) + "." + std::to_string(v.minor) + "." + std::to_string(v.patch);
}

/// How 0.y.z versions split between ZeroMajor and ZeroMinor.
enum class ZeroRule {
  PatchSplit,  ///< 0.y.0 -> ZeroMajor, 0.y.z (z > 0) -> ZeroMinor
  MinorSplit,  ///< 0.0.z -> ZeroMajor, 0.y.z (y > 0) -> ZeroMinor
};

inline ReleaseType classify_release(const Version& v, ZeroRule rule = ZeroRule::PatchSplit) {
  if (v.major == 0) {
    const bool zero_major = rule == ZeroRule::PatchSplit ? v.patch == 0 : v.minor == 0;
    return zero_major ? ReleaseType::ZeroMajor : ReleaseType::ZeroMinor;
  }
  if (v.patch > 0) return ReleaseType::Patch;
  return v.minor == 0 ? ReleaseType::Major : ReleaseType::Minor;
}

/// Classification from the component that increased relative to the previous
/// release of the same package. Falls back to classify_release when nothing
/// increased (first release, re-tag, or a downgrade).
inline ReleaseType classify_against_previous(const Version& previous, const Version& current,
                                             ZeroRule rule = ZeroRule::PatchSplit) {
  if (current.major > previous.major) return ReleaseType::Major;
  if (current.major == previous.major) {
    if (current.minor > previous.minor)
      return current.major == 0 ? ReleaseType::ZeroMajor : ReleaseType::Minor;
    if (current.minor == previous.minor && current.patch > previous.patch)
      return current.major == 0 ? ReleaseType::ZeroMinor : ReleaseType::Patch;
  }
  return classify_release(current, rule);
}

inline VersionSeries version_series(const Version& v) {
  if (v.major == 0) return VersionSeries::ZeroVer;
  return v.major == 1 ? VersionSeries::OneVer : VersionSeries::TwoPlusVer;
}

inline ReportColumn report_column(ReleaseType t) {
  switch (t) {
    case ReleaseType::Major:
    case ReleaseType::ZeroMajor:
      return ReportColumn::Major;
    case ReleaseType::Minor:
    case ReleaseType::ZeroMinor:
      return ReportColumn::Minor;
    case ReleaseType::Patch:
      return ReportColumn::Patch;
  }
  return ReportColumn::Patch;
}

inline const char* to_string(ReleaseType t) {
  switch (t) {
    case ReleaseType::Major: return "major";
    case ReleaseType::Minor: return "minor";
    case ReleaseType::Patch: return "patch";
    case ReleaseType::ZeroMajor: return "zero-major";
    case ReleaseType::ZeroMinor: return "zero-minor";
  }
  return "?";
}

inline const char* to_string(VersionSeries s) {
  switch (s) {
    case VersionSeries::ZeroVer: return "zero-ver";
    case VersionSeries::OneVer: return "one-ver";
    case VersionSeries::TwoPlusVer: return "two-plus-ver";
  }
  return "?";
}

inline const char* to_string(ReportColumn c) {
  switch (c) {
    case ReportColumn::Major: return "major";
    case ReportColumn::Minor: return "minor";
    case ReportColumn::Patch: return "patch";
  }
  return "?";
}

inline std::optional<ReleaseType> release_type_from_string(std::string_view s) {
  for (auto t : kAllReleaseTypes)
    if (s == to_string(t)) return t;
  return std::nullopt;
}

inline std::optional<VersionSeries> series_from_string(std::string_view s) {
  for (auto v : kAllSeries)
    if (s == to_string(v)) return v;
  return std::nullopt;
}

}  // namespace depgrowth::semver
