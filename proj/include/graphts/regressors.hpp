#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "graphts/latent.hpp"

namespace graphts {

/// The (predecessor, successor) pairs extracted from trajectories, indexing
/// into a global ordering of n_points training snapshots. Every snapshot
/// except the last of each trajectory is a predecessor; its successor is the
/// next snapshot of the same trajectory.
struct TrainingIndex {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  Eigen::Index n_points = 0;

  static TrainingIndex from_lengths(
      const std::vector<Eigen::Index>& trajectory_lengths) {
    TrainingIndex out;
    Eigen::Index offset = 0;
    for (const Eigen::Index len : trajectory_lengths) {
      if (len < 1)
        throw std::invalid_argument("TrainingIndex: empty trajectory");
      for (Eigen::Index t = 0; t + 1 < len; ++t)
        out.pairs.emplace_back(offset + t, offset + t + 1);
      offset += len;
    }
    out.n_points = offset;
    return out;
  }

  std::size_t size() const { return pairs.size(); }
};

inline AffinePrediction predict_identity(Eigen::Index n_train_points) {
  return {Eigen::VectorXd::Zero(n_train_points), 1.0};
}

/// Coefficient 1 on the successor of the closest predecessor; ties go to the
/// earliest pair (lowest predecessor index).
inline AffinePrediction predict_1nn(const Eigen::VectorXd& distance_row,
                                    const TrainingIndex& index) {
  if (index.pairs.empty())
    throw std::invalid_argument("predict_1nn: empty training set");
  if (distance_row.size() != static_cast<Eigen::Index>(index.size()))
    throw std::invalid_argument(
        "predict_1nn: distance row must cover every training pair");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < distance_row.size(); ++i)
    if (distance_row(i) < distance_row(best)) best = i;
  AffinePrediction out{Eigen::VectorXd::Zero(index.n_points), 0.0};
  out.train_coefficients(index.pairs[static_cast<std::size_t>(best)].second) =
      1.0;
  return out;
}

/// Nadaraya-Watson: successor weights proportional to the predecessor kernel
/// values. A vanishing denominator degenerates to the identity prediction.
inline AffinePrediction predict_kr(const Eigen::VectorXd& kernel_row,
                                   const TrainingIndex& index) {
  if (kernel_row.size() != static_cast<Eigen::Index>(index.size()))
    throw std::invalid_argument(
        "predict_kr: kernel row must cover every training pair");
  if ((kernel_row.array() < 0.0).any())
    throw std::invalid_argument("predict_kr: kernel values must be >= 0");
  const double denom = kernel_row.sum();
  if (denom < 1e-12) return predict_identity(index.n_points);
  AffinePrediction out{Eigen::VectorXd::Zero(index.n_points), 0.0};
  for (std::size_t p = 0; p < index.pairs.size(); ++p)
    out.train_coefficients(index.pairs[p].second) +=
        kernel_row(static_cast<Eigen::Index>(p)) / denom;
  return out;
}

struct PredictiveDistribution {
  AffinePrediction mean;
  double variance = 0.0;
};

/// Gaussian process over successor displacements with the identity prior:
/// the predictive mean is x + k (K + noise^2 I)^-1 (Y - X), emitted as an
/// affine combination with coefficient 1 on the test point and telescoped
/// +/-gamma weights on successors/predecessors.
class GpModel {
 public:
  static GpModel fit(const Eigen::MatrixXd& k_pred, double noise_std,
                     TrainingIndex index) {
    if (noise_std < 0.0)
      throw std::invalid_argument("GpModel: noise_std must be >= 0");
    const Eigen::Index p = static_cast<Eigen::Index>(index.size());
    if (k_pred.rows() != p || k_pred.cols() != p)
      throw std::invalid_argument(
          "GpModel: kernel matrix must cover exactly the training pairs");
    GpModel model;
    model.index_ = std::move(index);
    model.noise_std_ = noise_std;
    const double base_jitter =
        p > 0 ? 1e-10 * k_pred.trace() / static_cast<double>(p) : 0.0;
    double jitter = 0.0;
    for (int attempt = 0; attempt <= 3; ++attempt) {
      Eigen::MatrixXd system = k_pred;
      system.diagonal().array() += noise_std * noise_std + jitter;
      model.llt_.compute(system);
      if (model.llt_.info() == Eigen::Success) {
        model.jitter_ = jitter;
        return model;
      }
      jitter = (attempt == 0) ? base_jitter : jitter * 10.0;
    }
    std::ostringstream msg;
    msg << "GpModel: kernel not positive definite even with jitter "
        << jitter / 10.0;
    throw std::runtime_error(msg.str());
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != static_cast<Eigen::Index>(index_.size()))
      throw std::invalid_argument("GpModel: rhs size mismatch");
    return llt_.solve(rhs);
  }

  PredictiveDistribution predict(const Eigen::VectorXd& kernel_row,
                                 double k_xx) const {
    const Eigen::VectorXd gamma = solve(kernel_row);
    AffinePrediction mean{Eigen::VectorXd::Zero(index_.n_points), 1.0};
    for (std::size_t p = 0; p < index_.pairs.size(); ++p) {
      const double g = gamma(static_cast<Eigen::Index>(p));
      mean.train_coefficients(index_.pairs[p].second) += g;
      mean.train_coefficients(index_.pairs[p].first) -= g;
    }
    const double variance =
        std::clamp(k_xx - kernel_row.dot(gamma), 0.0, k_xx);
    return {std::move(mean), variance};
  }

  const TrainingIndex& index() const { return index_; }
  double noise_std() const { return noise_std_; }
  double jitter() const { return jitter_; }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  TrainingIndex index_;
  double noise_std_ = 0.0;
  double jitter_ = 0.0;
};

/// Robust Bayesian committee machine: per-cluster GP predictions combined
/// with differential-entropy weights beta_c = (log prior_var - log var_c)/2.
/// Every cluster model must be built over the same global point ordering.
inline PredictiveDistribution predict_rbcm(
    const std::vector<GpModel>& cluster_models,
    const std::vector<Eigen::VectorXd>& cluster_kernel_rows, double k_xx,
    double sigma_prior) {
  if (!(sigma_prior > 0.0))
    throw std::invalid_argument("predict_rbcm: sigma_prior must be positive");
  if (cluster_models.empty())
    throw std::invalid_argument("predict_rbcm: need at least one cluster");
  if (cluster_models.size() != cluster_kernel_rows.size())
    throw std::invalid_argument(
        "predict_rbcm: one kernel row per cluster model required");
  const Eigen::Index n_points = cluster_models.front().index().n_points;
  const double prior_var = sigma_prior * sigma_prior;
  constexpr double min_var = 1e-12;

  std::vector<PredictiveDistribution> parts;
  parts.reserve(cluster_models.size());
  double precision = 0.0;
  double beta_sum = 0.0;
  for (std::size_t c = 0; c < cluster_models.size(); ++c) {
    if (cluster_models[c].index().n_points != n_points)
      throw std::invalid_argument(
          "predict_rbcm: cluster models disagree on the point ordering");
    parts.push_back(cluster_models[c].predict(cluster_kernel_rows[c], k_xx));
    const double var_c = std::max(parts.back().variance, min_var);
    const double beta_c = 0.5 * (std::log(prior_var) - std::log(var_c));
    precision += beta_c / var_c;
    beta_sum += beta_c;
  }
  precision += (1.0 - beta_sum) / prior_var;
  if (!(precision > 0.0)) {
    std::ostringstream msg;
    msg << "predict_rbcm: non-positive combined precision " << precision
        << " (prior_var=" << prior_var << ";";
    for (const auto& part : parts) msg << " var_c=" << part.variance;
    msg << ")";
    throw std::runtime_error(msg.str());
  }
  const double variance = std::max(1.0 / precision, min_var);

  AffinePrediction mean{Eigen::VectorXd::Zero(n_points), 1.0};
  for (auto& part : parts) {
    const double var_c = std::max(part.variance, min_var);
    const double beta_c = 0.5 * (std::log(prior_var) - std::log(var_c));
    mean.train_coefficients += (variance * beta_c / var_c) *
                               part.mean.train_coefficients;
  }
  return {std::move(mean), variance};
}

}  // namespace graphts
