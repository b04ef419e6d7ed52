#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "depgrowth/metrics.hpp"
#include "depgrowth/report/summary.hpp"
#include "depgrowth/stats/descriptive.hpp"

namespace depgrowth::report {

struct TimepointRecord {
  std::string ecosystem;
  std::string stratum;
  semver::ReportColumn release_type = semver::ReportColumn::Major;
  std::int32_t offset_days = 0;
  stats::FiveNumber summary;
  double lower_fence = 0.0;  // q1 - 1.5 IQR
  double upper_fence = 0.0;  // q3 + 1.5 IQR
};

/// Box-plot records for every non-empty (ecosystem, stratum, column, offset)
/// cell over the grid's offsets. Each offset uses whatever samples exist for
/// it; nothing is carried between timepoints.
inline std::vector<TimepointRecord> timepoint_distributions(
    const std::vector<metrics::LogDiffSample>& samples, Stratification by,
    const metrics::LookaheadGrid& grid, metrics::Metric metric = metrics::Metric::Dependents) {
  const auto labels = stratum_labels(by);
  const auto offsets = grid.offsets();
  using Key = std::tuple<std::string, std::size_t, std::size_t, std::int32_t>;
  std::map<Key, std::vector<double>> cells;
  for (const auto& s : samples) {
    if (s.metric != metric) continue;
    if (std::find(offsets.begin(), offsets.end(), s.offset_days) == offsets.end()) continue;
    cells[{s.ecosystem, stratum_index(s, by),
           static_cast<std::size_t>(semver::report_column(s.release_type)), s.offset_days}]
        .push_back(s.value);
  }
  std::vector<TimepointRecord> out;
  for (auto& [key, xs] : cells) {
    const auto& [eco, si, col, offset] = key;
    TimepointRecord r;
    r.ecosystem = eco;
    r.stratum = labels[si];
    r.release_type = semver::kAllColumns[col];
    r.offset_days = offset;
    r.summary = stats::five_number_summary(std::move(xs));
    const double iqr = r.summary.q3 - r.summary.q1;
    r.lower_fence = r.summary.q1 - 1.5 * iqr;
    r.upper_fence = r.summary.q3 + 1.5 * iqr;
    out.push_back(std::move(r));
  }
  return out;
}

/// Release counts per ecosystem over all five release types, zeros included.
using Demographics = std::map<std::string, std::array<std::uint64_t, semver::kAllReleaseTypes.size()>>;

inline Demographics release_demographics(const std::vector<metrics::ReleaseRecord>& records) {
  Demographics out;
  for (const auto& r : records) {
    auto [it, inserted] = out.try_emplace(r.release.ecosystem);
    if (inserted) it->second.fill(0);
    ++it->second[static_cast<std::size_t>(r.release_type)];
  }
  return out;
}

}  // namespace depgrowth::report
