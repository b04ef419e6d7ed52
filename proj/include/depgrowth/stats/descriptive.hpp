#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace depgrowth::stats {

class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw DegenerateInput("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Sample variance (n - 1 denominator), two-pass.
inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw DegenerateInput("variance needs at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

inline double sample_std(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

/// Median of a sorted range.
inline double sorted_median(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  if (n == 0) throw DegenerateInput("median of empty sample");
  return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

struct FiveNumber {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  std::size_t n = 0;
};

/// Quartiles by the inclusive median-of-halves rule: q1 and q3 are the
/// medians of the lower and upper halves, each half including the overall
/// median when n is odd. A single value is its own quartiles.
inline FiveNumber five_number_summary(std::vector<double> xs) {
  if (xs.empty()) throw DegenerateInput("quartiles of empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  FiveNumber f;
  f.n = n;
  f.min = xs.front();
  f.max = xs.back();
  f.median = sorted_median(xs);
  if (n == 1) {
    f.q1 = f.q3 = xs.front();
    return f;
  }
  const std::size_t half = (n + 1) / 2;  // includes the median when n is odd
  std::span<const double> all(xs);
  f.q1 = sorted_median(all.first(half));
  f.q3 = sorted_median(all.last(half));
  return f;
}

/// 1-based ranks, ties receiving the average of the positions they span.
inline std::vector<double> average_ranks(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Pearson product-moment correlation, centred two-pass form.
inline double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DegenerateInput("correlation needs equal-length vectors");
  if (x.size() < 2) throw DegenerateInput("correlation needs at least two pairs");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("correlation of a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace depgrowth::stats
