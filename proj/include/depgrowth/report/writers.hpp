#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "depgrowth/report/complexity.hpp"
#include "depgrowth/report/distributions.hpp"
#include "depgrowth/report/heatmap.hpp"
#include "depgrowth/report/summary.hpp"

namespace depgrowth::report {

using nlohmann::json;

namespace detail {

inline std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// Shortest round-trip representation, for CSV.
inline std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t w) {
  // Width in code points so "±" does not skew alignment.
  std::size_t cps = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++cps;
  return s + std::string(w > cps ? w - cps : 0, ' ');
}

inline std::size_t width(const std::string& s) {
  std::size_t cps = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++cps;
  return cps;
}

inline std::string cell_text(const std::optional<StratumSummary>& c) {
  if (!c) return "-";
  std::string s = num(c->mean) + " ± " + (c->std ? num(*c->std) : std::string("n/a")) + " (n=" +
                  std::to_string(c->n) + ")";
  if (c->significantly_highest) s += " *";
  return s;
}

}  // namespace detail

/// Aligned plain-text table: one row per (ecosystem, stratum), one column per
/// release type, "mean ± std (n=..)" cells, "*" on the significantly highest.
inline std::string render_summary_text(const SummaryTable& t) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"ecosystem", to_string(t.by)});
  for (auto c : semver::kAllColumns) rows.back().push_back(semver::to_string(c));
  for (const auto& r : t.rows) {
    std::vector<std::string> line{r.ecosystem, r.stratum};
    for (const auto& c : r.cells) line.push_back(detail::cell_text(c));
    rows.push_back(std::move(line));
  }
  std::vector<std::size_t> w(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], detail::width(r[i]));
  std::string out = "# mean log-difference of " + std::string(metrics::to_string(t.metric)) + " at +" +
                    std::to_string(t.offset_days) + " days; * = significantly highest (Welch, alpha " +
                    detail::num(t.alpha, 3) + ")\n";
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) line += (i ? "  " : "") + detail::pad(r[i], w[i]);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

inline std::string render_summary_csv(const SummaryTable& t) {
  std::string out = "ecosystem,stratum,release_type,n,mean,std,significantly_highest\n";
  for (const auto& r : t.rows)
    for (const auto& c : r.cells) {
      if (!c) continue;
      out += c->ecosystem + "," + c->stratum + "," + semver::to_string(c->release_type) + "," +
             std::to_string(c->n) + "," + detail::exact(c->mean) + "," +
             (c->std ? detail::exact(*c->std) : std::string()) + "," +
             (c->significantly_highest ? "true" : "false") + "\n";
    }
  return out;
}

inline json to_json(const stats::TTestResult& r) {
  return json{{"t", r.t_statistic}, {"df", r.df},         {"p", r.p_value}, {"mean_a", r.mean_a},
              {"mean_b", r.mean_b}, {"std_a", r.std_a}, {"std_b", r.std_b}};
}

inline json to_json(const stats::AnovaResult& r) {
  return json{{"f", r.f_statistic}, {"df_between", r.df_between}, {"df_within", r.df_within}, {"p", r.p_value}};
}

inline json to_json(const SummaryTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json cells = json::object();
    for (std::size_t c = 0; c < kColumns; ++c) {
      const char* name = semver::to_string(semver::kAllColumns[c]);
      if (!r.cells[c]) {
        cells[name] = nullptr;
        continue;
      }
      const auto& s = *r.cells[c];
      cells[name] = json{{"n", s.n},
                         {"mean", s.mean},
                         {"std", s.std ? json(*s.std) : json(nullptr)},
                         {"significantly_highest", s.significantly_highest}};
    }
    json pairs = json::array();
    for (const auto& p : r.pairwise) {
      json e{{"a", semver::to_string(semver::kAllColumns[p.a])}, {"b", semver::to_string(semver::kAllColumns[p.b])}};
      if (p.result) e["welch"] = to_json(*p.result);
      else e["error"] = p.error;
      pairs.push_back(std::move(e));
    }
    json row{{"ecosystem", r.ecosystem}, {"stratum", r.stratum}, {"cells", cells}, {"pairwise", pairs}};
    if (r.anova) row["anova_within_stratum"] = to_json(*r.anova);
    else if (!r.anova_note.empty()) row["anova_within_stratum"] = json{{"error", r.anova_note}};
    rows.push_back(std::move(row));
  }
  return json{{"stratification", to_string(t.by)},
              {"metric", metrics::to_string(t.metric)},
              {"offset_days", t.offset_days},
              {"alpha", t.alpha},
              {"ecosystems", t.ecosystems},
              {"rows", rows}};
}

inline json to_json(const Heatmap& h) {
  json mats = json::array();
  for (const auto& m : h.matrices) {
    json cells = json::array();
    for (const auto& row : m.cells) {
      json r = json::array();
      for (const auto& v : row) r.push_back(v ? json(*v) : json(nullptr));
      cells.push_back(std::move(r));
    }
    mats.push_back(json{{"ecosystem", m.ecosystem}, {"rows", m.row_labels}, {"columns", m.col_labels}, {"cells", cells}});
  }
  return json{{"lo", h.lo}, {"hi", h.hi}, {"matrices", mats}};
}

inline json to_json(const TimepointRecord& r) {
  return json{{"ecosystem", r.ecosystem},
              {"stratum", r.stratum},
              {"release_type", semver::to_string(r.release_type)},
              {"offset_days", r.offset_days},
              {"n", r.summary.n},
              {"min", r.summary.min},
              {"q1", r.summary.q1},
              {"median", r.summary.median},
              {"q3", r.summary.q3},
              {"max", r.summary.max},
              {"lower_fence", r.lower_fence},
              {"upper_fence", r.upper_fence}};
}

inline std::string render_demographics_csv(const Demographics& d) {
  std::string out = "ecosystem";
  for (auto t : semver::kAllReleaseTypes) out += std::string(",") + semver::to_string(t);
  out += "\n";
  for (const auto& [eco, counts] : d) {
    out += eco;
    for (auto c : counts) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

inline std::string render_complexity_descriptives_csv(const std::vector<ComplexityDescriptives>& rows) {
  std::string out = "language,n,mean,std,min,q1,median,q3,max\n";
  for (const auto& r : rows)
    out += r.language + "," + std::to_string(r.n) + "," + detail::exact(r.mean) + "," +
           (r.std ? detail::exact(*r.std) : std::string()) + "," + detail::exact(r.summary.min) + "," +
           detail::exact(r.summary.q1) + "," + detail::exact(r.summary.median) + "," +
           detail::exact(r.summary.q3) + "," + detail::exact(r.summary.max) + "\n";
  return out;
}

inline std::string render_type_tests_csv(const std::vector<TypeComparison>& rows) {
  std::string out = "language,type_a,type_b,mean_a,std_a,mean_b,std_b,t,df,p,note\n";
  for (const auto& r : rows) {
    out += r.language + "," + semver::to_string(r.a) + "," + semver::to_string(r.b) + ",";
    if (r.result) {
      const auto& t = *r.result;
      out += detail::exact(t.mean_a) + "," + detail::exact(t.std_a) + "," + detail::exact(t.mean_b) + "," +
             detail::exact(t.std_b) + "," + detail::exact(t.t_statistic) + "," + detail::exact(t.df) + "," +
             detail::exact(t.p_value) + ",\n";
    } else {
      out += ",,,,,,," + r.note + "\n";
    }
  }
  return out;
}

}  // namespace depgrowth::report
