#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace graphts {

enum class MatrixRole { dissimilarity, squared_dissimilarity, similarity, kernel };

/// A symmetric real matrix tagged with its role in the
/// dissimilarity -> similarity -> kernel conversion chain.
struct SquareMatrix {
  MatrixRole role = MatrixRole::dissimilarity;
  Eigen::MatrixXd values;

  Eigen::Index n() const { return values.rows(); }
};

/// D <- (D + D^T) / 2 with the diagonal forced to zero. Idempotent.
inline SquareMatrix symmetrize(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("symmetrize: matrix must be square");
  SquareMatrix out{MatrixRole::dissimilarity,
                   0.5 * (m + m.transpose())};
  out.values.diagonal().setZero();
  return out;
}

/// Divides every entry by the mean off-diagonal entry and returns that mean
/// (the distance scale anchoring hyperparameter ranges).
inline std::pair<SquareMatrix, double> normalize_distances(
    const SquareMatrix& d) {
  const Eigen::Index n = d.n();
  if (n < 2)
    throw std::invalid_argument(
        "normalize_distances: need at least two points");
  const double mean =
      d.values.sum() / static_cast<double>(n * (n - 1));  // zero diagonal
  if (!(mean > 0.0))
    throw std::invalid_argument(
        "normalize_distances: degenerate input (mean off-diagonal distance "
        "is zero)");
  return {SquareMatrix{d.role, d.values / mean}, mean};
}

/// s(d) = exp(-d^2 / (2 psi^2)); maps 0 to 1 and decreases in d.
inline double rbf_similarity(double d, double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("rbf_similarity: bandwidth must be positive");
  const double z = d / bandwidth;
  return std::exp(-0.5 * z * z);
}

inline SquareMatrix rbf_similarity_matrix(const SquareMatrix& d,
                                          double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("rbf_similarity: bandwidth must be positive");
  SquareMatrix out{MatrixRole::similarity,
                   (-0.5 / (bandwidth * bandwidth) *
                    d.values.array().square())
                       .exp()
                       .matrix()};
  return out;
}

inline double min_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Clip correction: eigendecompose, zero out negative eigenvalues,
/// reconstruct. Already-PSD input is returned unchanged.
inline SquareMatrix eigenvalue_correct_clip(const SquareMatrix& s) {
  if (s.values.rows() != s.values.cols())
    throw std::invalid_argument("eigenvalue_correct_clip: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.values);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue_correct_clip: eigendecomposition failed");
  const Eigen::VectorXd& lambda = es.eigenvalues();
  if (lambda.minCoeff() >= 0.0) return SquareMatrix{MatrixRole::kernel, s.values};
  const Eigen::VectorXd clipped = lambda.cwiseMax(0.0);
  SquareMatrix out{MatrixRole::kernel,
                   es.eigenvectors() * clipped.asDiagonal() *
                       es.eigenvectors().transpose()};
  // exact symmetry survives the reconstruction only up to rounding
  out.values = 0.5 * (out.values + out.values.transpose()).eval();
  return out;
}

}  // namespace graphts
