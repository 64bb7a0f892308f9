#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace graphts {

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double p_value = 1.0;    // two-sided
  int n = 0;               // pairs remaining after dropping zero differences
  bool exact = false;      // exact enumeration (n <= 15) vs normal approx
  bool all_zero = false;   // every difference was zero
};

/// Two-sided Wilcoxon signed-rank test for paired samples. Zero differences
/// are dropped; ties receive average ranks. The null distribution is
/// enumerated exactly for n <= 15 and approximated by a tie-corrected normal
/// with continuity correction otherwise.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("wilcoxon: samples must be paired");
  std::vector<double> diffs;
  diffs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult res;
  res.n = static_cast<int>(diffs.size());
  if (diffs.empty()) {
    res.all_zero = true;
    res.exact = true;
    return res;
  }

  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });
  std::vector<double> ranks(n);
  std::map<double, std::size_t> tie_groups;  // |d| -> group size
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n &&
           std::abs(diffs[order[j]]) == std::abs(diffs[order[i]]))
      ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg_rank;
    tie_groups[std::abs(diffs[order[i]])] = j - i;
    i = j;
  }

  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (diffs[i] > 0.0) w_plus += ranks[i];
  const double total = static_cast<double>(n * (n + 1)) / 2.0;
  res.statistic = std::min(w_plus, total - w_plus);

  if (n <= 15) {
    res.exact = true;
    const std::uint32_t patterns = 1u << n;
    std::uint32_t le = 0, ge = 0;
    for (std::uint32_t mask = 0; mask < patterns; ++mask) {
      double w = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) w += ranks[i];
      if (w <= w_plus + 1e-9) ++le;
      if (w >= w_plus - 1e-9) ++ge;
    }
    const double p_le = static_cast<double>(le) / patterns;
    const double p_ge = static_cast<double>(ge) / patterns;
    res.p_value = std::min(1.0, 2.0 * std::min(p_le, p_ge));
  } else {
    const double nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
    for (const auto& [value, t] : tie_groups) {
      const double td = static_cast<double>(t);
      var -= (td * td * td - td) / 48.0;
    }
    double z = w_plus - mu;
    z -= (z > 0.0 ? 0.5 : (z < 0.0 ? -0.5 : 0.0));  // continuity correction
    z /= std::sqrt(var);
    res.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  }
  return res;
}

}  // namespace graphts
