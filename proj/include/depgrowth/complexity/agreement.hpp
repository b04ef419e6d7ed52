#pragma once

#include <cstddef>
#include <cstdlib>
#include <span>
#include <vector>

#include "depgrowth/stats/descriptive.hpp"
#include "depgrowth/stats/tests.hpp"

namespace depgrowth::complexity {

struct AgreementStats {
  std::size_t n = 0;
  double spearman_rho = 0.0;
  double spearman_p = 1.0;
  double pearson_r = 0.0;
  std::size_t within_one = 0;
  double within_one_rank_pct = 0.0;
};

/// Model vs human ratings. Both correlations are reported because the
/// published figure does not say which coefficient it is. Constant vectors
/// leave the correlations undefined and throw DegenerateInput.
inline AgreementStats agreement_stats(std::span<const int> model, std::span<const int> human) {
  if (model.size() != human.size())
    throw stats::DegenerateInput("agreement needs equal-length rating vectors");
  if (model.size() < 3) throw stats::DegenerateInput("agreement needs at least three pairs");
  AgreementStats out;
  out.n = model.size();
  for (std::size_t i = 0; i < out.n; ++i)
    if (std::abs(model[i] - human[i]) <= 1) ++out.within_one;
  out.within_one_rank_pct =
      100.0 * static_cast<double>(out.within_one) / static_cast<double>(out.n);
  std::vector<double> m(model.begin(), model.end());
  std::vector<double> h(human.begin(), human.end());
  const auto s = stats::spearman(m, h);
  out.spearman_rho = s.rho;
  out.spearman_p = s.p_value;
  out.pearson_r = stats::pearson_r(m, h);
  return out;
}

inline AgreementStats agreement_stats(const std::vector<int>& model, const std::vector<int>& human) {
  return agreement_stats(std::span<const int>(model), std::span<const int>(human));
}

}  // namespace depgrowth::complexity
