// Independent reference implementations and fixture builders shared by the
// unit tests and the acceptance runner. Nothing here calls into the library
// code it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// Release type by literal rule table, returned by name.
inline std::string rule_table_type(std::uint64_t major, std::uint64_t minor, std::uint64_t patch) {
  if (major >= 1 && minor == 0 && patch == 0) return "major";
  if (major >= 1 && patch == 0 && minor > 0) return "minor";
  if (major >= 1 && patch > 0) return "patch";
  if (major == 0 && patch == 0) return "zero-major";
  return "zero-minor";  // major == 0 && patch > 0
}

inline std::string rule_table_series(std::uint64_t major) {
  return major == 0 ? "zero-ver" : major == 1 ? "one-ver" : "two-plus-ver";
}

/// A version string built from parts, with the outcome known by construction.
struct VersionCase {
  std::string text;
  enum Outcome { Valid, Malformed, PreRelease } outcome = Valid;
  std::uint64_t major = 0, minor = 0, patch = 0;
};

/// Random version strings: canonical triples decorated with prefixes, build
/// metadata, pre-release tags and a handful of corruptions.
inline std::vector<VersionCase> random_versions(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::uint64_t k) { return rng() % k; };
  auto component = [&]() -> std::uint64_t {
    switch (pick(4)) {
      case 0: return 0;
      case 1: return pick(10);
      case 2: return pick(1000);
      default: return pick(1'000'000);
    }
  };
  static const char* kIdents[] = {"alpha", "beta.2", "rc.1", "0", "x-y", "build.11", "sha.5114f85", "001"};
  std::vector<VersionCase> out;
  while (out.size() < n) {
    VersionCase c;
    c.major = component();
    c.minor = component();
    c.patch = component();
    std::string core = std::to_string(c.major) + "." + std::to_string(c.minor) + "." + std::to_string(c.patch);
    switch (pick(10)) {
      case 0:  // leading zero on one component
        core = std::to_string(c.major) + ".0" + std::to_string(c.minor + 1) + "." + std::to_string(c.patch);
        c.outcome = VersionCase::Malformed;
        break;
      case 1:  // too few or too many parts
        core = pick(2) ? std::to_string(c.major) + "." + std::to_string(c.minor)
                       : core + "." + std::to_string(pick(9));
        c.outcome = VersionCase::Malformed;
        break;
      case 2:  // non-numeric part
        core = std::to_string(c.major) + ".x." + std::to_string(c.patch);
        c.outcome = VersionCase::Malformed;
        break;
      default:
        break;
    }
    std::string text = core;
    if (pick(4) == 0) text = (pick(2) ? "v" : "V") + text;
    if (pick(5) == 0) {
      text += std::string("-") + kIdents[pick(std::size(kIdents))];
      if (c.outcome == VersionCase::Valid) c.outcome = VersionCase::PreRelease;
    }
    if (pick(5) == 0) text += std::string("+") + kIdents[pick(std::size(kIdents))];
    if (pick(50) == 0) {  // empty build metadata
      text += "+";
      c.outcome = VersionCase::Malformed;
    }
    c.text = text;
    out.push_back(c);
  }
  return out;
}

/// 200 model/human pairs with exactly `within` pairs at distance <= 1. The
/// remaining pairs differ by 2 or 3. Ratings stay inside 1..7.
inline std::pair<std::vector<int>, std::vector<int>> agreement_fixture(std::size_t n, std::size_t within,
                                                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> model, human;
  for (std::size_t i = 0; i < n; ++i) {
    const int h = 1 + static_cast<int>(rng() % 7);
    int m;
    if (i < within) {
      const int d = static_cast<int>(rng() % 3) - 1;  // -1, 0, 1
      m = std::clamp(h + d, 1, 7);
    } else {
      const int d = 2 + static_cast<int>(rng() % 2);
      m = h + d <= 7 ? h + d : h - d;
    }
    model.push_back(m);
    human.push_back(h);
  }
  // Shuffle both with one permutation so the near and far pairs interleave.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<int> m2(n), h2(n);
  for (std::size_t i = 0; i < n; ++i) {
    m2[i] = model[idx[i]];
    h2[i] = human[idx[i]];
  }
  return {m2, h2};
}

/// Two-sided p of Welch's t by exhaustive relabelling of the pooled sample
/// (all C(na+nb, na) splits). Used to bound the analytic p at n <= 8.
inline double welch_permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  auto tstat = [&](const std::vector<int>& in_a) {
    double sa = 0, sb = 0;
    std::size_t ca = 0, cb = 0;
    for (std::size_t i = 0; i < n; ++i) (in_a[i] ? (sa += pooled[i], ++ca) : (sb += pooled[i], ++cb));
    const double ma = sa / static_cast<double>(ca), mb = sb / static_cast<double>(cb);
    double va = 0, vb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = pooled[i] - (in_a[i] ? ma : mb);
      (in_a[i] ? va : vb) += d * d;
    }
    va /= static_cast<double>(ca - 1);
    vb /= static_cast<double>(cb - 1);
    return (ma - mb) / std::sqrt(va / static_cast<double>(ca) + vb / static_cast<double>(cb));
  };
  std::vector<int> mask(n, 0);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(na), 1);
  const double observed = std::fabs(tstat(mask));
  std::sort(mask.begin(), mask.end());
  std::size_t hits = 0, total = 0;
  do {
    if (std::fabs(tstat(mask)) >= observed * (1 - 1e-12)) ++hits;
    ++total;
  } while (std::next_permutation(mask.begin(), mask.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

/// Upper-tail p of the ANOVA F by enumerating every distinct assignment of
/// group labels to the pooled values.
inline double anova_permutation_p(const std::vector<std::vector<double>>& groups) {
  std::vector<double> pooled;
  std::vector<int> labels;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (double x : groups[g]) {
      pooled.push_back(x);
      labels.push_back(static_cast<int>(g));
    }
  const std::size_t k = groups.size(), n = pooled.size();
  auto fstat = [&](const std::vector<int>& lab) {
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> cnt(k, 0);
    double grand = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sum[static_cast<std::size_t>(lab[i])] += pooled[i];
      ++cnt[static_cast<std::size_t>(lab[i])];
      grand += pooled[i];
    }
    grand /= static_cast<double>(n);
    double ssb = 0, ssw = 0;
    for (std::size_t g = 0; g < k; ++g) {
      const double m = sum[g] / static_cast<double>(cnt[g]);
      ssb += static_cast<double>(cnt[g]) * (m - grand) * (m - grand);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t g = static_cast<std::size_t>(lab[i]);
      const double d = pooled[i] - sum[g] / static_cast<double>(cnt[g]);
      ssw += d * d;
    }
    return (ssb / static_cast<double>(k - 1)) / (ssw / static_cast<double>(n - k));
  };
  const double observed = fstat(labels);
  std::sort(labels.begin(), labels.end());
  std::size_t hits = 0, total = 0;
  do {
    if (fstat(labels) >= observed * (1 - 1e-12)) ++hits;
    ++total;
  } while (std::next_permutation(labels.begin(), labels.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

/// Largest |analytic p - exact permutation p| accepted at n <= 8. Each is
/// the worst gap seen over a seeded scan of at least 5,000 cases of the same
/// design (normal data, or tied integer data for Spearman), rounded up.
inline constexpr double kWelchExactBound = 0.35;  // n = 8, split 3/5 or 4/4; worst seen 0.294
inline constexpr double kAnovaExactBound = 0.35;  // groups 3/3/2; worst seen 0.279
/// Spearman t-approximation with ties, indexed by n = 5..8; worst seen
/// 0.505, 0.459, 0.399, 0.324.
inline double spearman_exact_bound(std::size_t n) {
  switch (n) {
    case 5: return 0.55;
    case 6: return 0.50;
    case 7: return 0.45;
    default: return 0.35;
  }
}

/// Average ranks by counting: rank = 1 + #less + (#equal - 1) / 2.
inline std::vector<double> naive_ranks(const std::vector<double>& xs) {
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double less = 0, equal = 0;
    for (double y : xs) {
      if (y < xs[i]) ++less;
      if (y == xs[i]) ++equal;
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

inline double naive_spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = naive_ranks(x), ry = naive_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Two-sided exact p of Spearman's rho over all n! orderings of y.
inline double spearman_permutation_p(const std::vector<double>& x, const std::vector<double>& y) {
  const double observed = std::fabs(naive_spearman_rho(x, y));
  std::vector<std::size_t> idx(y.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<double> yy(y.size());
  std::size_t hits = 0, total = 0;
  do {
    for (std::size_t i = 0; i < idx.size(); ++i) yy[i] = y[idx[i]];
    if (std::fabs(naive_spearman_rho(x, yy)) >= observed - 1e-12) ++hits;
    ++total;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace oracle
