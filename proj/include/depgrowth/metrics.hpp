#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "depgrowth/filter.hpp"
#include "depgrowth/ingest/dependent_index.hpp"
#include "depgrowth/ingest/repo_index.hpp"
#include "depgrowth/parallel.hpp"
#include "depgrowth/semver.hpp"

namespace depgrowth::metrics {

/// Log-scale strata of pre-release dependents.
enum class SizeBin { Small, Medium, Large, Huge };
inline constexpr std::array<SizeBin, 4> kAllSizeBins{SizeBin::Small, SizeBin::Medium,
                                                     SizeBin::Large, SizeBin::Huge};

inline SizeBin size_bin(std::int64_t pre_dependents) {
  if (pre_dependents < 100) return SizeBin::Small;
  if (pre_dependents < 1000) return SizeBin::Medium;
  if (pre_dependents < 10000) return SizeBin::Large;
  return SizeBin::Huge;
}

inline const char* to_string(SizeBin b) {
  switch (b) {
    case SizeBin::Small: return "small";
    case SizeBin::Medium: return "medium";
    case SizeBin::Large: return "large";
    case SizeBin::Huge: return "huge";
  }
  return "?";
}

inline std::optional<SizeBin> size_bin_from_string(std::string_view s) {
  for (auto b : kAllSizeBins)
    if (s == to_string(b)) return b;
  return std::nullopt;
}

enum class Metric { Dependents, Stars, Forks };
inline constexpr std::array<Metric, 3> kAllMetrics{Metric::Dependents, Metric::Stars, Metric::Forks};

inline const char* to_string(Metric m) {
  switch (m) {
    case Metric::Dependents: return "dependents";
    case Metric::Stars: return "stars";
    case Metric::Forks: return "forks";
  }
  return "?";
}

inline std::optional<Metric> metric_from_string(std::string_view s) {
  for (auto m : kAllMetrics)
    if (s == to_string(m)) return m;
  return std::nullopt;
}

/// Look-ahead measurement offsets {step, 2*step, ..., horizon}.
struct LookaheadGrid {
  std::int32_t horizon_days = 365;
  std::int32_t step_days = 90;

  std::vector<std::int32_t> offsets() const {
    std::vector<std::int32_t> out;
    for (std::int32_t o = step_days; o <= horizon_days; o += step_days) out.push_back(o);
    return out;
  }
  bool operator==(const LookaheadGrid&) const = default;
};

inline constexpr LookaheadGrid kSixMonths{180, 45};
inline constexpr LookaheadGrid kOneYear{365, 90};
inline constexpr LookaheadGrid kTwoYears{730, 180};
inline constexpr std::array<LookaheadGrid, 3> kSupportedGrids{kSixMonths, kOneYear, kTwoYears};

inline bool is_supported(const LookaheadGrid& g) {
  for (const auto& s : kSupportedGrids)
    if (s == g) return true;
  return false;
}

inline std::optional<LookaheadGrid> grid_from_name(std::string_view name) {
  if (name == "six-month") return kSixMonths;
  if (name == "one-year") return kOneYear;
  if (name == "two-year") return kTwoYears;
  return std::nullopt;
}

inline const char* grid_name(const LookaheadGrid& g) {
  if (g == kSixMonths) return "six-month";
  if (g == kOneYear) return "one-year";
  if (g == kTwoYears) return "two-year";
  return "custom";
}

/// Day a metric is read for an offset. Offset 0 is the pre-release baseline,
/// the same day the dependent threshold is evaluated on; positive offsets are
/// counted from the release day.
inline Date measurement_day(const PackageRelease& r, std::int32_t offset_days) {
  return offset_days == 0 ? filter::pre_release_day(r) : r.release_date + offset_days;
}

inline std::optional<std::int64_t> lookahead_value(const PackageRelease& r, Metric metric,
                                                   std::int32_t offset_days,
                                                   const ingest::RepoIndex& repos,
                                                   const ingest::DependentIndex& edges) {
  const Date day = measurement_day(r, offset_days);
  if (metric == Metric::Dependents) return edges.lookup(r.ecosystem, r.package_name, day);
  const auto* snap = repos.nearest(r.owner, r.repo_name, day);
  if (!snap) return std::nullopt;
  return metric == Metric::Stars ? snap->stars : snap->forks;
}

class NonPositiveInput : public std::domain_error {
 public:
  NonPositiveInput() : std::domain_error("log-difference needs positive values") {}
};

/// ln(after) - ln(before).
inline double log_difference(std::int64_t before, std::int64_t after) {
  if (before <= 0 || after <= 0) throw NonPositiveInput();
  return std::log(static_cast<double>(after)) - std::log(static_cast<double>(before));
}

struct MetricKey {
  Metric metric;
  std::int32_t offset_days;
  auto operator<=>(const MetricKey&) const = default;
};

/// A release with everything the analysis stratifies on. Look-ahead values
/// that could not be measured are simply not in `metric_values`.
struct ReleaseRecord {
  PackageRelease release;
  semver::Version version;
  semver::ReleaseType release_type = semver::ReleaseType::Major;
  semver::VersionSeries series = semver::VersionSeries::ZeroVer;
  std::int64_t pre_dependents = 0;
  SizeBin size_bin = SizeBin::Small;
  std::map<MetricKey, std::int64_t> metric_values;

  std::optional<std::int64_t> value(Metric m, std::int32_t offset) const {
    auto it = metric_values.find({m, offset});
    if (it == metric_values.end()) return std::nullopt;
    return it->second;
  }
};

/// Offsets measured for a set of grids, always including the baseline 0.
inline std::vector<std::int32_t> measured_offsets(const std::vector<LookaheadGrid>& grids,
                                                  const std::vector<std::int32_t>& extra = {}) {
  std::set<std::int32_t> s(extra.begin(), extra.end());
  s.insert(0);
  for (const auto& g : grids)
    for (auto o : g.offsets()) s.insert(o);
  return {s.begin(), s.end()};
}

struct BuildResult {
  std::vector<ReleaseRecord> records;
  std::uint64_t skipped_unclassified = 0;  // no version or no pre-release count
};

/// Measures every metric at each of `offsets` (which should include 0).
inline BuildResult build_release_records(const std::vector<filter::CandidateRelease>& releases,
                                         const ingest::RepoIndex& repos,
                                         const ingest::DependentIndex& edges,
                                         const std::vector<std::int32_t>& offsets,
                                         unsigned workers = 1) {
  std::vector<std::optional<ReleaseRecord>> slots(releases.size());
  parallel_for_slices(releases.size(), workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto& c = releases[i];
      if (!c.version || !c.release_type || !c.pre_dependents) continue;
      ReleaseRecord r;
      r.release = c.release;
      r.version = *c.version;
      r.release_type = *c.release_type;
      r.series = semver::version_series(*c.version);
      r.pre_dependents = *c.pre_dependents;
      r.size_bin = size_bin(*c.pre_dependents);
      for (auto m : kAllMetrics)
        for (auto o : offsets)
          if (auto v = lookahead_value(c.release, m, o, repos, edges)) r.metric_values[{m, o}] = *v;
      slots[i] = std::move(r);
    }
  });
  BuildResult out;
  for (auto& s : slots) {
    if (s)
      out.records.push_back(std::move(*s));
    else
      ++out.skipped_unclassified;
  }
  return out;
}

inline BuildResult build_release_records(const std::vector<filter::CandidateRelease>& releases,
                                         const ingest::RepoIndex& repos,
                                         const ingest::DependentIndex& edges,
                                         const std::vector<LookaheadGrid>& grids,
                                         unsigned workers = 1) {
  return build_release_records(releases, repos, edges, measured_offsets(grids), workers);
}

struct LogDiffSample {
  std::string release_key;
  std::string ecosystem;
  SizeBin size_bin = SizeBin::Small;
  semver::VersionSeries series = semver::VersionSeries::ZeroVer;
  semver::ReleaseType release_type = semver::ReleaseType::Major;
  Metric metric = Metric::Dependents;
  std::int32_t offset_days = 0;
  double value = 0.0;
};

struct Exclusions {
  std::uint64_t missing_baseline = 0;
  std::uint64_t missing_value = 0;
  std::uint64_t nonpositive = 0;

  std::uint64_t total() const { return missing_baseline + missing_value + nonpositive; }
  Exclusions& operator+=(const Exclusions& o) {
    missing_baseline += o.missing_baseline;
    missing_value += o.missing_value;
    nonpositive += o.nonpositive;
    return *this;
  }
};

struct SampleSet {
  std::vector<LogDiffSample> samples;
  Exclusions excluded;
};

/// One sample per record with both a positive baseline and a positive value
/// at `offset`; everything else is tallied, never smoothed.
inline SampleSet log_diff_samples(const std::vector<ReleaseRecord>& records, Metric metric,
                                  std::int32_t offset_days) {
  SampleSet out;
  for (const auto& r : records) {
    const auto v0 = r.value(metric, 0);
    const auto v1 = r.value(metric, offset_days);
    if (!v0) {
      ++out.excluded.missing_baseline;
      continue;
    }
    if (!v1) {
      ++out.excluded.missing_value;
      continue;
    }
    if (*v0 <= 0 || *v1 <= 0) {
      ++out.excluded.nonpositive;
      continue;
    }
    out.samples.push_back(LogDiffSample{r.release.key(), r.release.ecosystem, r.size_bin, r.series,
                                        r.release_type, metric, offset_days,
                                        log_difference(*v0, *v1)});
  }
  return out;
}

}  // namespace depgrowth::metrics
