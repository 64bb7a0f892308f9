#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "graphts/random.hpp"

namespace graphts {

/// Relational clustering result: prototypes live in the same implicit space
/// as the data, represented as convex coefficient rows over the points.
struct RngClustering {
  std::vector<int> assignments;  // point -> cluster
  Eigen::MatrixXd prototypes;    // C x N, rows convex

  int clusters() const { return static_cast<int>(prototypes.rows()); }
};

namespace detail {

// dist(i, c) = (D^2 a_c)_i - 1/2 a_c D^2 a_c^T, the squared point-prototype
// distance of the relational extension.
inline Eigen::MatrixXd prototype_distances(const Eigen::MatrixXd& d2,
                                           const Eigen::MatrixXd& prototypes) {
  Eigen::MatrixXd q = d2 * prototypes.transpose();  // N x C
  for (Eigen::Index c = 0; c < prototypes.rows(); ++c)
    q.col(c).array() -= 0.5 * prototypes.row(c).dot(q.col(c));
  return q;
}

}  // namespace detail

/// Batch relational neural gas over a squared-dissimilarity matrix.
/// Prototypes start on `clusters` distinct random points; every epoch each
/// point ranks all prototypes by distance and prototypes are re-estimated
/// with rank weights exp(-rank/lambda), lambda annealed from C/2 to 0.01.
/// subset_cap > 0 trains the prototypes on at most that many points and then
/// assigns everything to the nearest prototype.
inline RngClustering relational_neural_gas(const Eigen::MatrixXd& d2,
                                           int clusters, int epochs,
                                           std::uint64_t seed,
                                           int subset_cap = 0) {
  const Eigen::Index n = d2.rows();
  if (d2.cols() != n)
    throw std::invalid_argument("relational_neural_gas: matrix must be square");
  if (clusters < 1 || clusters > n)
    throw std::invalid_argument(
        "relational_neural_gas: need 1 <= clusters <= points");
  if (epochs < 1)
    throw std::invalid_argument("relational_neural_gas: epochs must be >= 1");

  Rng rng(seed);

  std::vector<Eigen::Index> train_points(static_cast<std::size_t>(n));
  std::iota(train_points.begin(), train_points.end(), 0);
  if (subset_cap > 0 && subset_cap < n) {
    const std::size_t keep = static_cast<std::size_t>(
        std::max(subset_cap, clusters));
    // partial Fisher-Yates; the prefix is the training subset
    for (std::size_t i = 0; i < keep; ++i) {
      const std::size_t j = i + rng.index(train_points.size() - i);
      std::swap(train_points[i], train_points[j]);
    }
    train_points.resize(keep);
    std::sort(train_points.begin(), train_points.end());
  }
  const Eigen::Index nt = static_cast<Eigen::Index>(train_points.size());

  // init on distinct points of the training subset
  std::vector<Eigen::Index> init(train_points);
  for (int c = 0; c < clusters; ++c) {
    const std::size_t j =
        static_cast<std::size_t>(c) + rng.index(init.size() - static_cast<std::size_t>(c));
    std::swap(init[static_cast<std::size_t>(c)], init[j]);
  }

  Eigen::MatrixXd prototypes = Eigen::MatrixXd::Zero(clusters, n);
  for (int c = 0; c < clusters; ++c)
    prototypes(c, init[static_cast<std::size_t>(c)]) = 1.0;

  Eigen::MatrixXd d2_train(nt, nt);
  for (Eigen::Index i = 0; i < nt; ++i)
    for (Eigen::Index j = 0; j < nt; ++j)
      d2_train(i, j) = d2(train_points[static_cast<std::size_t>(i)],
                          train_points[static_cast<std::size_t>(j)]);
  Eigen::MatrixXd proto_train(clusters, nt);

  const double lambda0 = static_cast<double>(clusters) / 2.0;
  const double lambda_f = 0.01;
  std::vector<int> order(static_cast<std::size_t>(clusters));
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    const double lambda =
        lambda0 * std::pow(lambda_f / lambda0,
                           static_cast<double>(epoch) /
                               static_cast<double>(epochs));
    for (Eigen::Index i = 0; i < nt; ++i)
      proto_train.col(i) =
          prototypes.col(train_points[static_cast<std::size_t>(i)]);
    const Eigen::MatrixXd dist =
        detail::prototype_distances(d2_train, proto_train);
    Eigen::MatrixXd h(nt, clusters);
    for (Eigen::Index i = 0; i < nt; ++i) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double da = dist(i, a), db = dist(i, b);
        return da < db || (da == db && a < b);
      });
      for (int r = 0; r < clusters; ++r)
        h(i, order[static_cast<std::size_t>(r)]) =
            std::exp(-static_cast<double>(r) / lambda);
    }
    for (int c = 0; c < clusters; ++c) {
      const double total = h.col(c).sum();
      if (total <= 0.0) continue;  // underflowed rank weights: keep prototype
      prototypes.row(c).setZero();
      for (Eigen::Index i = 0; i < nt; ++i)
        prototypes(c, train_points[static_cast<std::size_t>(i)]) =
            h(i, c) / total;
    }
  }

  RngClustering out;
  out.prototypes = std::move(prototypes);
  out.assignments.assign(static_cast<std::size_t>(n), 0);
  const Eigen::MatrixXd dist = detail::prototype_distances(d2, out.prototypes);
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    for (int c = 1; c < clusters; ++c)
      if (dist(i, c) < dist(i, best)) best = c;
    out.assignments[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

}  // namespace graphts
