#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "depgrowth/stats/tests.hpp"

namespace depgrowth::stats {

/// Uniform integer in [0, bound) from raw 64-bit engine output with
/// rejection, so results do not depend on the standard library's
/// distribution implementation.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do v = rng();
  while (v >= limit);
  return v % bound;
}

template <typename T>
void shuffle_deterministic(std::vector<T>& xs, std::mt19937_64& rng) {
  for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[uniform_below(rng, i)]);
}

struct MonteCarloP {
  double p_value = 1.0;
  std::uint64_t permutations = 0;
  /// sqrt(p (1 - p) / permutations)
  double standard_error() const {
    return std::sqrt(p_value * (1.0 - p_value) / static_cast<double>(permutations));
  }
};

/// Monte Carlo permutation p-value for one-way ANOVA: the share of random
/// relabelings whose F is at least the observed F.
inline MonteCarloP permutation_anova_p(const std::vector<std::vector<double>>& groups,
                                       std::uint64_t permutations, std::uint64_t seed) {
  const double observed = anova_oneway(groups).f_statistic;
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> shuffled(groups.size());
  std::uint64_t hits = 0;
  for (std::uint64_t p = 0; p < permutations; ++p) {
    shuffle_deterministic(pooled, rng);
    std::size_t at = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      shuffled[g].assign(pooled.begin() + static_cast<std::ptrdiff_t>(at),
                         pooled.begin() + static_cast<std::ptrdiff_t>(at + groups[g].size()));
      at += groups[g].size();
    }
    double f = 0.0;
    try {
      f = anova_oneway(shuffled).f_statistic;
    } catch (const DegenerateInput&) {
      continue;
    }
    if (f >= observed * (1.0 - 1e-12)) ++hits;
  }
  return {static_cast<double>(hits) / static_cast<double>(permutations), permutations};
}

}  // namespace depgrowth::stats
