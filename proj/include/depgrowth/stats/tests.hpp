#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "depgrowth/stats/descriptive.hpp"
#include "depgrowth/stats/special.hpp"

namespace depgrowth::stats {

struct AnovaResult {
  double f_statistic = 0.0;
  std::int64_t df_between = 0;
  std::int64_t df_within = 0;
  double p_value = 1.0;
};

struct TTestResult {
  double t_statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  double mean_a = 0.0, mean_b = 0.0;
  double std_a = 0.0, std_b = 0.0;
};

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Classic one-way ANOVA; p from the F upper tail.
inline AnovaResult anova_oneway(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw DegenerateInput("ANOVA needs at least two groups");
  std::size_t total = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw DegenerateInput("ANOVA group with fewer than two values");
    total += g.size();
    for (double x : g) grand_sum += x;
  }
  const double grand_mean = grand_sum / static_cast<double>(total);
  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& g : groups) {
    const double m = mean(g);
    ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
    for (double x : g) ss_within += (x - m) * (x - m);
  }
  if (ss_within == 0.0) throw DegenerateInput("ANOVA with zero within-group variance");
  AnovaResult r;
  r.df_between = static_cast<std::int64_t>(groups.size()) - 1;
  r.df_within = static_cast<std::int64_t>(total - groups.size());
  r.f_statistic = (ss_between / static_cast<double>(r.df_between)) /
                  (ss_within / static_cast<double>(r.df_within));
  r.p_value = f_upper_tail_p(r.f_statistic, static_cast<double>(r.df_between),
                             static_cast<double>(r.df_within));
  return r;
}

inline AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  return anova_oneway(std::span<const std::vector<double>>(groups));
}

namespace detail {

inline TTestResult summary_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw DegenerateInput("t-test needs two values per sample");
  TTestResult r;
  r.mean_a = mean(a);
  r.mean_b = mean(b);
  r.std_a = sample_std(a);
  r.std_b = sample_std(b);
  if (r.std_a == 0.0 && r.std_b == 0.0) throw DegenerateInput("t-test with zero variance in both samples");
  return r;
}

}  // namespace detail

/// Welch's unequal-variance t-test, two-sided, Welch-Satterthwaite df.
inline TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  TTestResult r = detail::summary_pair(a, b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = r.std_a * r.std_a / na;
  const double vb = r.std_b * r.std_b / nb;
  r.t_statistic = (r.mean_a - r.mean_b) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = student_t_two_sided_p(r.t_statistic, r.df);
  return r;
}

/// Student's t-test with pooled variance, two-sided.
inline TTestResult pooled_t_test(std::span<const double> a, std::span<const double> b) {
  TTestResult r = detail::summary_pair(a, b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double pooled =
      ((na - 1.0) * r.std_a * r.std_a + (nb - 1.0) * r.std_b * r.std_b) / (na + nb - 2.0);
  r.t_statistic = (r.mean_a - r.mean_b) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  r.df = na + nb - 2.0;
  r.p_value = student_t_two_sided_p(r.t_statistic, r.df);
  return r;
}

/// Spearman's rho: Pearson correlation of average ranks, p from the
/// t-approximation with n - 2 degrees of freedom.
inline SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DegenerateInput("Spearman needs equal-length vectors");
  if (x.size() < 3) throw DegenerateInput("Spearman needs at least three pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  SpearmanResult r;
  r.n = x.size();
  r.rho = pearson_r(rx, ry);
  const double df = static_cast<double>(r.n) - 2.0;
  if (std::fabs(r.rho) >= 1.0) {
    r.p_value = 0.0;
  } else {
    const double t = r.rho * std::sqrt(df / ((1.0 - r.rho) * (1.0 + r.rho)));
    r.p_value = student_t_two_sided_p(t, df);
  }
  return r;
}

inline constexpr std::size_t kExactSpearmanMaxN = 10;

/// Exact two-sided permutation p for Spearman's rho, enumerating all n!
/// orderings of y against x. Only for n <= kExactSpearmanMaxN.
inline double spearman_exact_p(std::span<const double> x, std::span<const double> y) {
  if (x.size() > kExactSpearmanMaxN)
    throw DegenerateInput("exact Spearman p limited to n <= 10");
  const double observed = std::fabs(spearman(x, y).rho);
  const auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  std::sort(ry.begin(), ry.end());
  const double n = static_cast<double>(x.size());
  const double mx = (n + 1.0) / 2.0;
  double sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - mx) * (ry[i] - mx);
  }
  const double denom = std::sqrt(sxx * syy);
  std::uint64_t hits = 0, total = 0;
  do {
    double sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (rx[i] - mx) * (ry[i] - mx);
    if (std::fabs(sxy / denom) >= observed - 1e-12) ++hits;
    ++total;
  } while (std::next_permutation(ry.begin(), ry.end()));
  // Tied ranks collapse identical orderings; next_permutation already visits
  // each distinct arrangement once, with the right multiplicity ratio.
  return static_cast<double>(hits) / static_cast<double>(total);
}

struct LabeledSample {
  std::string label;
  std::vector<double> values;
};

struct PairwiseEntry {
  std::size_t a = 0, b = 0;  // indices into the input groups
  std::optional<TTestResult> result;
  std::string error;  // set when the pair was degenerate
};

struct PairwiseResult {
  std::vector<PairwiseEntry> pairs;
  std::optional<std::size_t> highest;  // group flagged "significantly highest"
};

/// Welch tests over all unordered pairs. A group is flagged when it holds the
/// strictly largest mean and beats every other group at p < alpha. With
/// `bonferroni`, p-values are multiplied by the number of pairs (capped at 1).
inline PairwiseResult pairwise_welch(std::span<const LabeledSample> groups, double alpha = 0.05,
                                     bool bonferroni = false) {
  if (groups.size() < 2) throw DegenerateInput("pairwise comparison needs two groups");
  PairwiseResult out;
  const std::size_t k = groups.size();
  const double n_pairs = static_cast<double>(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      PairwiseEntry e{i, j, std::nullopt, {}};
      try {
        auto r = welch_t_test(groups[i].values, groups[j].values);
        if (bonferroni) r.p_value = std::min(1.0, r.p_value * n_pairs);
        e.result = r;
      } catch (const DegenerateInput& ex) {
        e.error = ex.what();
      }
      out.pairs.push_back(std::move(e));
    }
  }

  std::optional<std::size_t> best;
  double best_mean = -std::numeric_limits<double>::infinity();
  bool tie = false;
  for (std::size_t i = 0; i < k; ++i) {
    if (groups[i].values.empty()) continue;
    const double m = mean(groups[i].values);
    if (!best || m > best_mean) {
      best = i;
      best_mean = m;
      tie = false;
    } else if (m == best_mean) {
      tie = true;
    }
  }
  if (!best || tie) return out;
  for (const auto& p : out.pairs) {
    if (p.a != *best && p.b != *best) continue;
    if (!p.result || !(p.result->p_value < alpha)) return out;
  }
  out.highest = best;
  return out;
}

inline PairwiseResult pairwise_welch(const std::vector<LabeledSample>& groups, double alpha = 0.05,
                                     bool bonferroni = false) {
  return pairwise_welch(std::span<const LabeledSample>(groups), alpha, bonferroni);
}

}  // namespace depgrowth::stats
