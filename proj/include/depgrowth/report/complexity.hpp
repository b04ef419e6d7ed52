#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "depgrowth/metrics.hpp"
#include "depgrowth/semver.hpp"
#include "depgrowth/stats/descriptive.hpp"
#include "depgrowth/stats/tests.hpp"

namespace depgrowth::report {

/// One rated release as the report sees it. Null ratings are not included.
struct RatedRelease {
  std::string release_key;
  std::string ecosystem;
  semver::ReleaseType release_type = semver::ReleaseType::Major;
  int rating = 0;
};

struct ComplexityDescriptives {
  std::string language;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> std;
  stats::FiveNumber summary;
};

inline std::map<std::string, std::vector<double>> ratings_by_language(
    const std::vector<RatedRelease>& ratings) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& r : ratings) out[ecosystem_language(r.ecosystem)].push_back(r.rating);
  return out;
}

/// n / mean / std / quartiles per language; languages without ratings are
/// omitted.
inline std::vector<ComplexityDescriptives> complexity_descriptives(
    const std::vector<RatedRelease>& ratings) {
  std::vector<ComplexityDescriptives> out;
  for (auto& [lang, xs] : ratings_by_language(ratings)) {
    ComplexityDescriptives d;
    d.language = lang;
    d.n = xs.size();
    d.mean = stats::mean(xs);
    if (xs.size() >= 2) d.std = stats::sample_std(xs);
    d.summary = stats::five_number_summary(xs);
    out.push_back(std::move(d));
  }
  return out;
}

struct TypeComparison {
  std::string language;
  semver::ReportColumn a = semver::ReportColumn::Major;
  semver::ReportColumn b = semver::ReportColumn::Minor;
  std::optional<stats::TTestResult> result;
  std::string note;  // why the pair was skipped
};

/// Per language, Welch tests between the major, minor and patch rating
/// groups (zero-* folded as in the stratified tables).
inline std::vector<TypeComparison> complexity_vs_type_tests(const std::vector<RatedRelease>& ratings) {
  std::map<std::string, std::array<std::vector<double>, 3>> groups;
  for (const auto& r : ratings)
    groups[ecosystem_language(r.ecosystem)][static_cast<std::size_t>(semver::report_column(r.release_type))]
        .push_back(r.rating);
  std::vector<TypeComparison> out;
  for (const auto& [lang, cols] : groups) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      for (std::size_t j = i + 1; j < cols.size(); ++j) {
        TypeComparison c{lang, semver::kAllColumns[i], semver::kAllColumns[j], std::nullopt, {}};
        if (cols[i].empty() || cols[j].empty()) {
          c.note = std::string("no ratings for ") +
                   semver::to_string(cols[i].empty() ? c.a : c.b);
        } else {
          try {
            c.result = stats::welch_t_test(cols[i], cols[j]);
          } catch (const stats::DegenerateInput& e) {
            // Both groups constant: equal constants are indistinguishable.
            if (cols[i].size() >= 2 && cols[j].size() >= 2 && cols[i].front() == cols[j].front()) {
              stats::TTestResult t;
              t.mean_a = t.mean_b = cols[i].front();
              t.df = static_cast<double>(cols[i].size() + cols[j].size() - 2);
              t.p_value = 1.0;
              c.result = t;
            } else {
              c.note = e.what();
            }
          }
        }
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

/// ANOVA of ratings across languages, followed by pairwise Welch tests.
struct LanguageComparison {
  std::optional<stats::AnovaResult> anova;
  std::string anova_note;
  std::vector<std::string> languages;
  std::optional<stats::PairwiseResult> pairwise;
  std::string pairwise_note;
};

inline LanguageComparison complexity_between_languages(const std::vector<RatedRelease>& ratings) {
  LanguageComparison out;
  std::vector<stats::LabeledSample> groups;
  std::vector<std::vector<double>> values;
  for (auto& [lang, xs] : ratings_by_language(ratings)) {
    out.languages.push_back(lang);
    groups.push_back({lang, xs});
    values.push_back(xs);
  }
  try {
    out.anova = stats::anova_oneway(values);
  } catch (const stats::DegenerateInput& e) {
    out.anova_note = e.what();
  }
  try {
    out.pairwise = stats::pairwise_welch(groups);
  } catch (const stats::DegenerateInput& e) {
    out.pairwise_note = e.what();
  }
  return out;
}

struct ComplexityAdoption {
  std::string language;
  std::optional<stats::SpearmanResult> result;
  std::string note;
};

/// Spearman correlation of rating against the log-difference at
/// `offset_days`, per language, over releases present in both inputs.
inline std::vector<ComplexityAdoption> complexity_vs_adoption(
    const std::vector<RatedRelease>& ratings, const std::vector<metrics::LogDiffSample>& samples,
    std::int32_t offset_days = 365, metrics::Metric metric = metrics::Metric::Dependents) {
  std::map<std::string, double> by_key;
  for (const auto& s : samples)
    if (s.offset_days == offset_days && s.metric == metric) by_key[s.release_key] = s.value;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> pairs;
  for (const auto& r : ratings) {
    auto it = by_key.find(r.release_key);
    if (it == by_key.end()) continue;
    auto& p = pairs[ecosystem_language(r.ecosystem)];
    p.first.push_back(r.rating);
    p.second.push_back(it->second);
  }
  std::vector<ComplexityAdoption> out;
  for (const auto& [lang, p] : pairs) {
    ComplexityAdoption a{lang, std::nullopt, {}};
    try {
      a.result = stats::spearman(p.first, p.second);
    } catch (const stats::DegenerateInput& e) {
      a.note = e.what();
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace depgrowth::report
