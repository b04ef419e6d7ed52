#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "depgrowth/ingest/dependent_index.hpp"
#include "depgrowth/ingest/repo_index.hpp"
#include "depgrowth/parallel.hpp"
#include "depgrowth/records.hpp"
#include "depgrowth/semver.hpp"

namespace depgrowth::filter {

/// Audit record for one filter stage. Conservation:
/// records_in == records_out + sum(reasons).
struct FilterReport {
  std::string stage_name;
  std::uint64_t records_in = 0;
  std::uint64_t records_out = 0;
  std::map<std::string, std::uint64_t> reasons;

  std::uint64_t dropped() const {
    std::uint64_t n = 0;
    for (const auto& [_, c] : reasons) n += c;
    return n;
  }
  bool conserved() const { return records_out <= records_in && records_in == records_out + dropped(); }

  /// Combines reports of the same stage run over disjoint partitions.
  FilterReport& merge(const FilterReport& other) {
    records_in += other.records_in;
    records_out += other.records_out;
    for (const auto& [reason, c] : other.reasons) reasons[reason] += c;
    return *this;
  }
};

/// A release moving through the cascade. Fields are filled in by the stages
/// that establish them.
struct CandidateRelease {
  PackageRelease release;
  std::optional<semver::Version> version;
  std::optional<semver::ReleaseType> release_type;
  std::optional<std::int64_t> pre_dependents;
};

struct FilterResult {
  std::vector<CandidateRelease> releases;
  FilterReport report;
};

namespace reason {
inline constexpr const char* kNoSnapshot = "NoSnapshot";
inline constexpr const char* kLowEngagement = "LowEngagement";
inline constexpr const char* kForkedRepo = "ForkedRepo";
inline constexpr const char* kMalformedVersion = "MalformedVersion";
inline constexpr const char* kPreReleaseExcluded = "PreReleaseExcluded";
inline constexpr const char* kNameMismatch = "NameMismatch";
inline constexpr const char* kSameDayRelease = "SameDayRelease";
inline constexpr const char* kEcosystemExcluded = "EcosystemExcluded";
inline constexpr const char* kBelowThreshold = "BelowThreshold";
inline constexpr const char* kOutOfCoverage = "OutOfCoverage";
}  // namespace reason

namespace detail {

template <typename Pred>
FilterResult apply(std::string name, std::vector<CandidateRelease> in, Pred&& pred) {
  FilterResult out;
  out.report.stage_name = std::move(name);
  out.report.records_in = in.size();
  out.releases.reserve(in.size());
  for (auto& r : in) {
    if (const char* why = pred(r))
      ++out.report.reasons[why];
    else
      out.releases.push_back(std::move(r));
  }
  out.report.records_out = out.releases.size();
  return out;
}

}  // namespace detail

inline std::vector<CandidateRelease> as_candidates(std::vector<PackageRelease> releases) {
  std::vector<CandidateRelease> out;
  out.reserve(releases.size());
  for (auto& r : releases) out.push_back(CandidateRelease{std::move(r), {}, {}, {}});
  return out;
}

/// Keeps releases whose repository, joined on the release day, is not a fork
/// and has at least one star.
inline FilterResult filter_repo_quality(std::vector<CandidateRelease> releases,
                                        const ingest::RepoIndex& repos) {
  return detail::apply("repo_quality", std::move(releases), [&](const CandidateRelease& c) -> const char* {
    const auto* snap = repos.nearest(c.release.owner, c.release.repo_name, c.release.release_date);
    if (!snap) return reason::kNoSnapshot;
    if (snap->is_fork) return reason::kForkedRepo;
    if (snap->stars < 1) return reason::kLowEngagement;
    return nullptr;
  });
}

enum class Classification { FromVersionString, AgainstPrevious };

struct SemverOptions {
  semver::ZeroRule zero_rule = semver::ZeroRule::PatchSplit;
  Classification classification = Classification::FromVersionString;
};

/// Keeps strictly semantic-versioned releases and attaches Version and
/// ReleaseType.
inline FilterResult filter_semver(std::vector<CandidateRelease> releases, SemverOptions opts = {}) {
  auto out = detail::apply("semver", std::move(releases), [&](CandidateRelease& c) -> const char* {
    auto parsed = semver::try_parse_version(c.release.version_text);
    if (auto* err = std::get_if<semver::VersionErrc>(&parsed))
      return *err == semver::VersionErrc::PreReleaseExcluded ? reason::kPreReleaseExcluded
                                                             : reason::kMalformedVersion;
    c.version = std::get<semver::Version>(std::move(parsed));
    c.release_type = semver::classify_release(*c.version, opts.zero_rule);
    return nullptr;
  });
  if (opts.classification == Classification::AgainstPrevious) {
    // Chronological predecessor per package; same-day ties ordered by version.
    std::vector<std::size_t> order(out.releases.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto& rs = out.releases;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = rs[a];
      const auto& y = rs[b];
      if (x.release.ecosystem != y.release.ecosystem) return x.release.ecosystem < y.release.ecosystem;
      if (x.release.package_name != y.release.package_name)
        return x.release.package_name < y.release.package_name;
      if (x.release.release_date != y.release.release_date)
        return x.release.release_date < y.release.release_date;
      return *x.version < *y.version;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
      const auto& prev = rs[order[k - 1]];
      auto& cur = rs[order[k]];
      if (prev.release.ecosystem == cur.release.ecosystem &&
          prev.release.package_name == cur.release.package_name)
        cur.release_type = semver::classify_against_previous(*prev.version, *cur.version, opts.zero_rule);
    }
  }
  return out;
}

/// Lowercase, with '_' folded onto '-'.
inline std::string normalize_name(std::string_view name) {
  std::string out = to_lower(name);
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

inline FilterResult filter_name_match(std::vector<CandidateRelease> releases) {
  return detail::apply("name_match", std::move(releases), [](const CandidateRelease& c) -> const char* {
    return normalize_name(c.release.repo_name) == normalize_name(c.release.package_name)
               ? nullptr
               : reason::kNameMismatch;
  });
}

/// Removes every release of any package-day that has more than one release.
inline FilterResult dedup_same_day(std::vector<CandidateRelease> releases) {
  std::unordered_map<std::string, std::uint32_t> per_day;
  auto key = [](const CandidateRelease& c) {
    return ingest::package_key(c.release.ecosystem, c.release.package_name) + "#" +
           c.release.release_date.iso();
  };
  for (const auto& c : releases) ++per_day[key(c)];
  return detail::apply("same_day_dedup", std::move(releases), [&](const CandidateRelease& c) -> const char* {
    return per_day[key(c)] > 1 ? reason::kSameDayRelease : nullptr;
  });
}

inline FilterResult filter_ecosystems(std::vector<CandidateRelease> releases,
                                      const std::set<std::string>& allowed) {
  return detail::apply("ecosystems", std::move(releases), [&](const CandidateRelease& c) -> const char* {
    return allowed.count(c.release.ecosystem) ? nullptr : reason::kEcosystemExcluded;
  });
}

inline std::set<std::string> default_ecosystems() {
  return {kDefaultEcosystems.begin(), kDefaultEcosystems.end()};
}

/// Day whose dependents count as "before the release".
inline Date pre_release_day(const PackageRelease& r) { return r.release_date - 1; }

/// Keeps releases with at least `threshold` dependents on the day before the
/// release and records that count. With threshold 0 nothing is dropped;
/// releases outside edge coverage then keep an empty pre_dependents.
inline FilterResult filter_min_dependents(std::vector<CandidateRelease> releases,
                                          const ingest::DependentIndex& edges,
                                          std::int64_t threshold = 5, unsigned workers = 1) {
  // Counting is the expensive part; do it up front in parallel, then filter.
  std::vector<std::optional<std::int64_t>> counts(releases.size());
  parallel_for_slices(releases.size(), workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto& r = releases[i].release;
      const Date day = pre_release_day(r);
      if (edges.covers(day)) counts[i] = edges.count(r.ecosystem, r.package_name, day);
    }
  });
  for (std::size_t i = 0; i < releases.size(); ++i) releases[i].pre_dependents = counts[i];
  return detail::apply("min_dependents", std::move(releases), [&](const CandidateRelease& c) -> const char* {
    if (threshold <= 0) return nullptr;
    if (!c.pre_dependents) return reason::kOutOfCoverage;
    return *c.pre_dependents >= threshold ? nullptr : reason::kBelowThreshold;
  });
}

struct CascadeOptions {
  std::set<std::string> allowed_ecosystems = default_ecosystems();
  std::int64_t dependent_threshold = 5;
  SemverOptions semver;
  unsigned workers = 1;
};

struct CascadeResult {
  std::vector<CandidateRelease> releases;
  std::vector<FilterReport> reports;
};

/// The full cascade in its fixed order: repository quality, semantic
/// versioning, name match, same-day dedup, ecosystem, dependent threshold.
inline CascadeResult run_cascade(std::vector<PackageRelease> releases, const ingest::RepoIndex& repos,
                                 const ingest::DependentIndex& edges, const CascadeOptions& opts) {
  CascadeResult out;
  auto step = [&](FilterResult r) {
    out.reports.push_back(std::move(r.report));
    return std::move(r.releases);
  };
  auto rs = step(filter_repo_quality(as_candidates(std::move(releases)), repos));
  rs = step(filter_semver(std::move(rs), opts.semver));
  rs = step(filter_name_match(std::move(rs)));
  rs = step(dedup_same_day(std::move(rs)));
  rs = step(filter_ecosystems(std::move(rs), opts.allowed_ecosystems));
  rs = step(filter_min_dependents(std::move(rs), edges, opts.dependent_threshold, opts.workers));
  out.releases = std::move(rs);
  return out;
}

}  // namespace depgrowth::filter
