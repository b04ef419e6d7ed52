#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "depgrowth/metrics.hpp"
#include "depgrowth/semver.hpp"
#include "depgrowth/stats/tests.hpp"

namespace depgrowth::report {

enum class Stratification { BySize, BySeries };

inline const char* to_string(Stratification s) {
  return s == Stratification::BySize ? "size" : "series";
}

/// Row labels in table order.
inline std::vector<std::string> stratum_labels(Stratification s) {
  std::vector<std::string> out;
  if (s == Stratification::BySize) {
    for (auto b : metrics::kAllSizeBins) out.emplace_back(metrics::to_string(b));
  } else {
    for (auto v : semver::kAllSeries) out.emplace_back(semver::to_string(v));
  }
  return out;
}

inline std::size_t stratum_index(const metrics::LogDiffSample& s, Stratification by) {
  return by == Stratification::BySize ? static_cast<std::size_t>(s.size_bin)
                                      : static_cast<std::size_t>(s.series);
}

inline constexpr std::size_t kColumns = semver::kAllColumns.size();

struct StratumSummary {
  std::string ecosystem;
  std::string stratum;
  semver::ReportColumn release_type = semver::ReportColumn::Major;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> std;  // absent for single-sample cells
  bool significantly_highest = false;
};

struct SummaryRow {
  std::string ecosystem;
  std::string stratum;
  std::array<std::optional<StratumSummary>, kColumns> cells;  // absent when empty
  std::vector<stats::PairwiseEntry> pairwise;                 // indices are column indices
  std::optional<stats::AnovaResult> anova;                    // across the row's cells
  std::string anova_note;
};

struct SummaryTable {
  Stratification by = Stratification::BySize;
  metrics::Metric metric = metrics::Metric::Dependents;
  std::int32_t offset_days = 0;
  double alpha = 0.05;
  std::vector<std::string> ecosystems;
  std::vector<SummaryRow> rows;  // ecosystem-major, strata in label order

  /// Cells flattened in row order, columns major, minor, patch.
  std::vector<StratumSummary> cells() const {
    std::vector<StratumSummary> out;
    for (const auto& r : rows)
      for (const auto& c : r.cells)
        if (c) out.push_back(*c);
    return out;
  }
  const SummaryRow* row(const std::string& eco, const std::string& stratum) const {
    for (const auto& r : rows)
      if (r.ecosystem == eco && r.stratum == stratum) return &r;
    return nullptr;
  }
};

struct SummaryOptions {
  double alpha = 0.05;
  bool bonferroni = false;
  metrics::Metric metric = metrics::Metric::Dependents;
};

/// Groups samples at `offset_days` by ecosystem, stratum and report column.
/// Every stratum of every ecosystem present gets a row; empty cells stay
/// absent. Flags follow stats::pairwise_welch over the row's non-empty cells.
inline SummaryTable summary_table(const std::vector<metrics::LogDiffSample>& samples,
                                  Stratification by, std::int32_t offset_days,
                                  const SummaryOptions& opts = {}) {
  const auto labels = stratum_labels(by);
  std::map<std::string, std::vector<std::array<std::vector<double>, kColumns>>> groups;
  for (const auto& s : samples) {
    if (s.offset_days != offset_days || s.metric != opts.metric) continue;
    auto& eco = groups[s.ecosystem];
    if (eco.empty()) eco.resize(labels.size());
    eco[stratum_index(s, by)][static_cast<std::size_t>(semver::report_column(s.release_type))]
        .push_back(s.value);
  }

  SummaryTable table;
  table.by = by;
  table.metric = opts.metric;
  table.offset_days = offset_days;
  table.alpha = opts.alpha;
  for (const auto& [eco, strata] : groups) {
    table.ecosystems.push_back(eco);
    for (std::size_t si = 0; si < labels.size(); ++si) {
      SummaryRow row;
      row.ecosystem = eco;
      row.stratum = labels[si];
      std::vector<stats::LabeledSample> present;
      std::vector<std::size_t> present_col;
      for (std::size_t c = 0; c < kColumns; ++c) {
        const auto& xs = strata[si][c];
        if (xs.empty()) continue;
        StratumSummary cell;
        cell.ecosystem = eco;
        cell.stratum = labels[si];
        cell.release_type = semver::kAllColumns[c];
        cell.n = xs.size();
        cell.mean = stats::mean(xs);
        if (xs.size() >= 2) cell.std = stats::sample_std(xs);
        row.cells[c] = cell;
        present.push_back({semver::to_string(semver::kAllColumns[c]), xs});
        present_col.push_back(c);
      }
      if (present.size() >= 2) {
        auto pw = stats::pairwise_welch(present, opts.alpha, opts.bonferroni);
        for (auto& e : pw.pairs) {
          e.a = present_col[e.a];
          e.b = present_col[e.b];
          row.pairwise.push_back(std::move(e));
        }
        if (pw.highest) row.cells[present_col[*pw.highest]]->significantly_highest = true;
        std::vector<std::vector<double>> anova_groups;
        for (const auto& p : present) anova_groups.push_back(p.values);
        try {
          row.anova = stats::anova_oneway(anova_groups);
        } catch (const stats::DegenerateInput& e) {
          row.anova_note = e.what();
        }
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

/// ANOVA across report columns over all samples of one ecosystem, ignoring
/// strata. Reported next to the per-stratum tests.
struct GlobalAnova {
  std::string ecosystem;
  std::optional<stats::AnovaResult> anova;
  std::string note;
};

inline std::vector<GlobalAnova> global_anova(const std::vector<metrics::LogDiffSample>& samples,
                                             std::int32_t offset_days,
                                             metrics::Metric metric = metrics::Metric::Dependents) {
  std::map<std::string, std::array<std::vector<double>, kColumns>> groups;
  for (const auto& s : samples)
    if (s.offset_days == offset_days && s.metric == metric)
      groups[s.ecosystem][static_cast<std::size_t>(semver::report_column(s.release_type))]
          .push_back(s.value);
  std::vector<GlobalAnova> out;
  for (const auto& [eco, cols] : groups) {
    GlobalAnova g{eco, std::nullopt, {}};
    std::vector<std::vector<double>> present;
    for (const auto& c : cols)
      if (!c.empty()) present.push_back(c);
    try {
      g.anova = stats::anova_oneway(present);
    } catch (const stats::DegenerateInput& e) {
      g.note = e.what();
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace depgrowth::report
