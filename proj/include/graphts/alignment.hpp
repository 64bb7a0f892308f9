#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphts/graph.hpp"
#include "graphts/matrices.hpp"

namespace graphts {

/// Costs for global affine-gap alignment: a maximal gap of length g costs
/// gap_open + g * gap_extend; a substitution costs 0 for equal labels and
/// `mismatch` otherwise.
struct AlignmentCosts {
  double mismatch = 1.0;
  double gap_open = 0.5;
  double gap_extend = 0.5;

  double substitution(const std::string& a, const std::string& b) const {
    return a == b ? 0.0 : mismatch;
  }

  void check() const {
    if (mismatch < 0.0 || gap_open < 0.0 || gap_extend < 0.0)
      throw std::invalid_argument("AlignmentCosts: costs must be >= 0");
  }
};

/// Minimal-cost global alignment with affine gaps (Gotoh's three-layer
/// recurrence). Symmetric because the substitution cost is.
inline double affine_alignment_distance(const LabeledSequence& a,
                                        const LabeledSequence& b,
                                        const AlignmentCosts& costs = {}) {
  costs.check();
  const std::size_t n = a.tokens.size();
  const std::size_t m = b.tokens.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double open_step = costs.gap_open + costs.gap_extend;

  // layer M: last column is a substitution; layer P: gap consuming a;
  // layer Q: gap consuming b. Rolled over rows.
  std::vector<double> M(m + 1), P(m + 1), Q(m + 1);
  std::vector<double> Mp(m + 1), Pp(m + 1), Qp(m + 1);

  Mp[0] = 0.0;
  Pp[0] = inf;
  Qp[0] = inf;
  for (std::size_t j = 1; j <= m; ++j) {
    Mp[j] = inf;
    Pp[j] = inf;
    Qp[j] = costs.gap_open + static_cast<double>(j) * costs.gap_extend;
  }

  for (std::size_t i = 1; i <= n; ++i) {
    M[0] = inf;
    P[0] = costs.gap_open + static_cast<double>(i) * costs.gap_extend;
    Q[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double diag = std::min({Mp[j - 1], Pp[j - 1], Qp[j - 1]});
      M[j] = costs.substitution(a.tokens[i - 1], b.tokens[j - 1]) + diag;
      P[j] = std::min({Mp[j] + open_step, Pp[j] + costs.gap_extend,
                       Qp[j] + open_step});
      Q[j] = std::min({M[j - 1] + open_step, Q[j - 1] + costs.gap_extend,
                       P[j - 1] + open_step});
    }
    std::swap(M, Mp);
    std::swap(P, Pp);
    std::swap(Q, Qp);
  }
  return std::min({Mp[m], Pp[m], Qp[m]});
}

inline SquareMatrix alignment_distance_matrix(
    const std::vector<LabeledSequence>& seqs,
    const AlignmentCosts& costs = {}) {
  const Eigen::Index n = static_cast<Eigen::Index>(seqs.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = affine_alignment_distance(
          seqs[static_cast<std::size_t>(i)], seqs[static_cast<std::size_t>(j)],
          costs);
  return SquareMatrix{MatrixRole::dissimilarity, std::move(d)};
}

}  // namespace graphts
