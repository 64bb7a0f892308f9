#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphts/graph.hpp"
#include "graphts/matrices.hpp"

namespace graphts {

/// All-pairs shortest path lengths with unit edge weights; infinity marks
/// disconnected pairs. Row/column order follows g.nodes.
inline Eigen::MatrixXd floyd_warshall(const TemporalGraph& g) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.nodes.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
  std::unordered_map<std::string, Eigen::Index> index;
  index.reserve(g.nodes.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    index.emplace(g.nodes[static_cast<std::size_t>(i)], i);
    d(i, i) = 0.0;
  }
  for (const auto& e : g.edges) {
    const Eigen::Index a = index.at(e.first);
    const Eigen::Index b = index.at(e.second);
    d(a, b) = 1.0;
    d(b, a) = 1.0;
  }
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dik = d(i, k);
      if (dik == inf) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double via = dik + d(k, j);
        if (via < d(i, j)) d(i, j) = via;
      }
    }
  return d;
}

/// counts[l-1] = number of unordered node pairs at shortest-path distance l.
/// Self-distances and disconnected pairs contribute to no bin.
struct PathHistogram {
  std::vector<std::int64_t> counts;
};

inline PathHistogram path_histogram(const TemporalGraph& g, int max_len) {
  if (max_len < 1) throw std::invalid_argument("path_histogram: max_len must be >= 1");
  const Eigen::MatrixXd d = floyd_warshall(g);
  PathHistogram h;
  h.counts.assign(static_cast<std::size_t>(max_len), 0);
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
      if (std::isinf(d(i, j))) continue;
      const auto len = static_cast<std::int64_t>(std::llround(d(i, j)));
      if (len > max_len)
        throw std::runtime_error("path_histogram: shortest path of length " +
                                 std::to_string(len) + " exceeds max_len " +
                                 std::to_string(max_len));
      ++h.counts[static_cast<std::size_t>(len - 1)];
    }
  return h;
}

/// Longest finite shortest-path length in g (0 when no pair is connected).
/// The dataset-wide maximum sizes the histogram bins.
inline int max_finite_path_length(const TemporalGraph& g) {
  const Eigen::MatrixXd d = floyd_warshall(g);
  double best = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = i + 1; j < d.cols(); ++j)
      if (!std::isinf(d(i, j)) && d(i, j) > best) best = d(i, j);
  return static_cast<int>(std::llround(best));
}

/// Euclidean distances between equally sized histograms.
inline SquareMatrix histogram_distance_matrix(
    const std::vector<PathHistogram>& hs) {
  const Eigen::Index n = static_cast<Eigen::Index>(hs.size());
  const std::size_t len = hs.empty() ? 0 : hs.front().counts.size();
  for (const auto& h : hs)
    if (h.counts.size() != len)
      throw std::invalid_argument(
          "histogram_distance_matrix: histograms must have equal length");
  SquareMatrix out{MatrixRole::dissimilarity, Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t b = 0; b < len; ++b) {
        const double diff = static_cast<double>(
            hs[static_cast<std::size_t>(i)].counts[b] -
            hs[static_cast<std::size_t>(j)].counts[b]);
        sq += diff * diff;
      }
      out.values(i, j) = out.values(j, i) = std::sqrt(sq);
    }
  return out;
}

}  // namespace graphts
