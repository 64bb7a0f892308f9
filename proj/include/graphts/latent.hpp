#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace graphts {

/// A predicted point expressed as an affine combination of the training
/// points and the test point: all coefficients sum to one. Matrix-based
/// extensions below expect the training points at indices
/// 0..train_coefficients.size()-1 of the supplied matrices.
struct AffinePrediction {
  Eigen::VectorXd train_coefficients;
  double test_coefficient = 0.0;

  double coefficient_sum() const {
    return train_coefficients.sum() + test_coefficient;
  }
};

namespace detail {

inline void check_extension_args(const AffinePrediction& a,
                                 const Eigen::MatrixXd& m,
                                 Eigen::Index target_index,
                                 Eigen::Index test_index) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("extension: matrix must be square");
  if (a.train_coefficients.size() > m.rows())
    throw std::invalid_argument(
        "extension: matrix smaller than coefficient vector");
  if (target_index < 0 || target_index >= m.rows())
    throw std::invalid_argument("extension: target index out of range");
  if (test_index < 0 || test_index >= m.rows())
    throw std::invalid_argument("extension: test index out of range");
}

}  // namespace detail

/// Squared (pseudo-)Euclidean distance between the point at target_index and
/// the affine combination, from squared dissimilarities alone:
///   sum_i alpha_i d(x_target, x_i)^2 - 1/2 alpha D^2 alpha^T.
/// test_index locates the test point's row; it defaults to the row right
/// after the training block.
inline double extend_squared_distance(const AffinePrediction& a,
                                      const Eigen::MatrixXd& d2,
                                      Eigen::Index target_index,
                                      Eigen::Index test_index = -1) {
  const Eigen::Index n = a.train_coefficients.size();
  if (test_index < 0) test_index = n;
  detail::check_extension_args(a, d2, target_index, test_index);
  const auto& w = a.train_coefficients;
  const double c = a.test_coefficient;
  const double linear = w.dot(d2.col(target_index).head(n)) +
                        c * d2(test_index, target_index);
  const double quad = w.dot(d2.topLeftCorner(n, n) * w) +
                      2.0 * c * w.dot(d2.col(test_index).head(n)) +
                      c * c * d2(test_index, test_index);
  return linear - 0.5 * quad;
}

/// Inner product between the point at target_index and the combination in
/// the implicit feature space: sum_i alpha_i k(x_target, x_i).
inline double extend_kernel(const AffinePrediction& a,
                            const Eigen::MatrixXd& k,
                            Eigen::Index target_index,
                            Eigen::Index test_index = -1) {
  const Eigen::Index n = a.train_coefficients.size();
  if (test_index < 0) test_index = n;
  detail::check_extension_args(a, k, target_index, test_index);
  return a.train_coefficients.dot(k.col(target_index).head(n)) +
         a.test_coefficient * k(test_index, target_index);
}

/// Fold error: the root mean squared extended distance between each
/// prediction and the true successor. d2 must hold the training block first
/// and the T snapshots of the test trajectory at rows n_train..n_train+T-1;
/// predictions[t] predicts the successor of test snapshot t. Tiny negative
/// squared distances (pseudo-Euclidean rounding) are clamped to zero.
inline double fold_rmse(const std::vector<AffinePrediction>& predictions,
                        const Eigen::MatrixXd& d2, Eigen::Index n_train) {
  if (d2.rows() != d2.cols())
    throw std::invalid_argument("fold_rmse: matrix must be square");
  const Eigen::Index t_len = d2.rows() - n_train;
  if (t_len < 2)
    throw std::invalid_argument(
        "fold_rmse: test trajectory needs at least 2 snapshots");
  if (static_cast<Eigen::Index>(predictions.size()) != t_len - 1)
    throw std::invalid_argument(
        "fold_rmse: need exactly one prediction per transition");
  double sum = 0.0;
  for (Eigen::Index t = 0; t + 1 < t_len; ++t) {
    const double sq =
        extend_squared_distance(predictions[static_cast<std::size_t>(t)], d2,
                                n_train + t + 1, n_train + t);
    if (sq > 0.0) sum += sq;
  }
  return std::sqrt(sum / static_cast<double>(t_len - 1));
}

}  // namespace graphts
