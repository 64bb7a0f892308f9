#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "graphts/alignment.hpp"
#include "graphts/graph.hpp"
#include "graphts/latent.hpp"
#include "graphts/matrices.hpp"
#include "graphts/neural_gas.hpp"
#include "graphts/random.hpp"
#include "graphts/regressors.hpp"
#include "graphts/shortest_paths.hpp"
#include "graphts/wilcoxon.hpp"

namespace graphts {

enum class Method { identity, nn1, kr, gpr, rbcm };

inline const std::vector<Method>& all_methods() {
  static const std::vector<Method> all = {Method::identity, Method::nn1,
                                          Method::kr, Method::gpr,
                                          Method::rbcm};
  return all;
}

inline std::string method_name(Method m) {
  switch (m) {
    case Method::identity: return "identity";
    case Method::nn1: return "1nn";
    case Method::kr: return "kr";
    case Method::gpr: return "gpr";
    case Method::rbcm: return "rbcm";
  }
  throw std::invalid_argument("unknown method");
}

inline std::optional<Method> parse_method(const std::string& name) {
  for (Method m : all_methods())
    if (method_name(m) == name) return m;
  return std::nullopt;
}

inline bool method_uses_kernel(Method m) {
  return m == Method::kr || m == Method::gpr || m == Method::rbcm;
}

inline bool method_uses_noise(Method m) {
  return m == Method::gpr || m == Method::rbcm;
}

/// Hyperparameters in units of the normalized distance scale (the mean
/// off-diagonal training dissimilarity is 1 after normalization).
struct HyperParams {
  double psi = 0.3;          // RBF bandwidth
  double sigma_noise = 0.1;  // GP noise standard deviation
  double sigma_prior = 1.0;  // rBCM prior standard deviation
  int clusters = 1;          // rBCM committee size
};

struct SearchConfig {
  int trials = 10;
  int rng_epochs = 100;
  int rng_subset = 0;        // 0: cluster on all training pairs
  int cluster_divisor = 100; // committee size = max(1, pairs / divisor)
  double psi_lo = 0.05, psi_hi = 1.0;          // x dbar, uniform
  double noise_lo = 1e-3, noise_hi = 1.0;      // x dbar, log-uniform
};

struct FoldResult {
  double rmse = 0.0;
  double prediction_ms = 0.0;  // per predicted transition
  int transitions = 0;
  HyperParams params;
};

struct ExperimentResult {
  std::string method;
  std::vector<FoldResult> folds;
  std::map<std::string, std::string> metadata;

  double mean_rmse() const {
    double s = 0.0;
    for (const auto& f : folds) s += f.rmse;
    return folds.empty() ? 0.0 : s / static_cast<double>(folds.size());
  }
  double stddev_rmse() const {
    if (folds.size() < 2) return 0.0;
    const double m = mean_rmse();
    double s = 0.0;
    for (const auto& f : folds) s += (f.rmse - m) * (f.rmse - m);
    return std::sqrt(s / static_cast<double>(folds.size() - 1));
  }
  double mean_runtime_ms() const {
    double s = 0.0;
    for (const auto& f : folds) s += f.prediction_ms;
    return folds.empty() ? 0.0 : s / static_cast<double>(folds.size());
  }
  double stddev_runtime_ms() const {
    if (folds.size() < 2) return 0.0;
    const double m = mean_runtime_ms();
    double s = 0.0;
    for (const auto& f : folds)
      s += (f.prediction_ms - m) * (f.prediction_ms - m);
    return std::sqrt(s / static_cast<double>(folds.size() - 1));
  }
  std::vector<double> fold_rmses() const {
    std::vector<double> out;
    out.reserve(folds.size());
    for (const auto& f : folds) out.push_back(f.rmse);
    return out;
  }
};

/// Representation-agnostic evaluation input: raw pairwise dissimilarities
/// over the global snapshot ordering plus trajectory boundaries.
struct EvaluationInput {
  Eigen::MatrixXd distances;  // symmetric, zero diagonal
  std::vector<Eigen::Index> trajectory_lengths;
  std::vector<std::string> trajectory_ids;
  std::map<std::string, std::string> metadata;

  Eigen::Index points() const { return distances.rows(); }
  Eigen::Index trajectories() const {
    return static_cast<Eigen::Index>(trajectory_lengths.size());
  }
  std::vector<Eigen::Index> offsets() const {
    std::vector<Eigen::Index> out(trajectory_lengths.size() + 1, 0);
    for (std::size_t i = 0; i < trajectory_lengths.size(); ++i)
      out[i + 1] = out[i] + trajectory_lengths[i];
    return out;
  }
};

/// Shortest-path histogram features with Euclidean distances; bins are sized
/// by the dataset-wide maximum finite path length.
inline EvaluationInput build_histogram_input(const Dataset& d) {
  const auto violations = validate_dataset(d);
  if (!violations.empty())
    throw std::invalid_argument("invalid dataset: " + violations.front() +
                                (violations.size() > 1
                                     ? " (+" +
                                           std::to_string(violations.size() - 1) +
                                           " more)"
                                     : ""));
  if (d.trajectories.empty())
    throw std::invalid_argument("dataset has no trajectories");
  int max_len = 1;
  for (const auto& traj : d.trajectories)
    for (const auto& g : traj.snapshots)
      max_len = std::max(max_len, max_finite_path_length(g));
  std::vector<PathHistogram> hists;
  hists.reserve(total_snapshots(d));
  EvaluationInput input;
  for (const auto& traj : d.trajectories) {
    for (const auto& g : traj.snapshots)
      hists.push_back(path_histogram(g, max_len));
    input.trajectory_lengths.push_back(
        static_cast<Eigen::Index>(traj.snapshots.size()));
    input.trajectory_ids.push_back(traj.id);
  }
  input.distances = histogram_distance_matrix(hists).values;
  input.metadata = d.metadata;
  input.metadata["representation"] = "histogram";
  input.metadata["histogram_bins"] = std::to_string(max_len);
  return input;
}

/// Affine-gap alignment distances over labeled sequences. Sequence ids must
/// follow "<trajectory>:<step>"; sequences sharing a prefix form one
/// trajectory ordered by step.
inline EvaluationInput build_alignment_input(
    const std::vector<LabeledSequence>& seqs,
    const AlignmentCosts& costs = {}) {
  struct Group {
    std::string id;
    std::vector<std::pair<long long, const LabeledSequence*>> members;
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> group_of;
  for (const auto& s : seqs) {
    const auto pos = s.id.rfind(':');
    if (pos == std::string::npos)
      throw std::invalid_argument(
          "sequence id '" + s.id +
          "' must follow '<trajectory>:<step>' to define trajectories");
    const std::string traj = s.id.substr(0, pos);
    long long step = 0;
    try {
      std::size_t used = 0;
      step = std::stoll(s.id.substr(pos + 1), &used);
      if (used != s.id.size() - pos - 1) throw std::invalid_argument(s.id);
    } catch (const std::exception&) {
      throw std::invalid_argument("sequence id '" + s.id +
                                  "' has a non-integer step suffix");
    }
    auto [it, inserted] = group_of.emplace(traj, groups.size());
    if (inserted) groups.push_back(Group{traj, {}});
    groups[it->second].members.emplace_back(step, &s);
  }
  EvaluationInput input;
  std::vector<LabeledSequence> flat;
  for (auto& g : groups) {
    std::sort(g.members.begin(), g.members.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < g.members.size(); ++i)
      if (g.members[i].first == g.members[i - 1].first)
        throw std::invalid_argument("trajectory '" + g.id +
                                    "' has duplicate step " +
                                    std::to_string(g.members[i].first));
    if (g.members.size() < 2)
      throw std::invalid_argument("trajectory '" + g.id +
                                  "' needs at least 2 sequences");
    for (const auto& [step, seq] : g.members) flat.push_back(*seq);
    input.trajectory_lengths.push_back(
        static_cast<Eigen::Index>(g.members.size()));
    input.trajectory_ids.push_back(g.id);
  }
  input.distances = symmetrize(alignment_distance_matrix(flat, costs).values).values;
  input.metadata["representation"] = "alignment";
  return input;
}

namespace detail {

/// One leave-one-out fold: training points first (grouped by trajectory),
/// then the held-out trajectory. Distances are normalized by the mean
/// off-diagonal distance of the training block and squared.
struct Fold {
  Eigen::Index n_train = 0;
  Eigen::Index n_test = 0;
  Eigen::MatrixXd d2;  // (n_train + n_test)^2, normalized, squared
  std::vector<Eigen::Index> perm;  // fold index -> global index
  std::vector<Eigen::Index> train_lengths;
  double dbar_raw = 1.0;
  TrainingIndex pairs;      // over the training block
  RngClustering clustering; // populated for rbcm only
  bool use_correction = false;
  // instrumentation: kernel rows built for held-out points; stays zero
  // during hyperparameter search
  mutable long held_out_kernel_builds = 0;
};

inline Fold build_fold(const EvaluationInput& input, Eigen::Index held_out) {
  const auto offsets = input.offsets();
  Fold fold;
  for (Eigen::Index j = 0; j < input.trajectories(); ++j) {
    if (j == held_out) continue;
    for (Eigen::Index t = offsets[static_cast<std::size_t>(j)];
         t < offsets[static_cast<std::size_t>(j) + 1]; ++t)
      fold.perm.push_back(t);
    fold.train_lengths.push_back(
        input.trajectory_lengths[static_cast<std::size_t>(j)]);
  }
  fold.n_train = static_cast<Eigen::Index>(fold.perm.size());
  for (Eigen::Index t = offsets[static_cast<std::size_t>(held_out)];
       t < offsets[static_cast<std::size_t>(held_out) + 1]; ++t)
    fold.perm.push_back(t);
  const Eigen::Index n = static_cast<Eigen::Index>(fold.perm.size());
  fold.n_test = n - fold.n_train;

  Eigen::MatrixXd dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      dist(i, j) = input.distances(fold.perm[static_cast<std::size_t>(i)],
                                   fold.perm[static_cast<std::size_t>(j)]);

  double sum = 0.0;
  for (Eigen::Index i = 0; i < fold.n_train; ++i)
    for (Eigen::Index j = 0; j < fold.n_train; ++j) sum += dist(i, j);
  const double denom =
      static_cast<double>(fold.n_train) * static_cast<double>(fold.n_train - 1);
  fold.dbar_raw = denom > 0.0 ? sum / denom : 0.0;
  if (!(fold.dbar_raw > 0.0))
    throw std::invalid_argument(
        "fold: degenerate training distances (mean is zero)");
  fold.d2 = (dist / fold.dbar_raw).array().square();
  fold.pairs = TrainingIndex::from_lengths(fold.train_lengths);
  return fold;
}

/// Similarity over the training block, clip-corrected when the fold's PSD
/// probe demanded it.
inline Eigen::MatrixXd train_kernel(const Fold& fold, double psi) {
  Eigen::MatrixXd s =
      (-0.5 / (psi * psi) *
       fold.d2.topLeftCorner(fold.n_train, fold.n_train).array())
          .exp()
          .matrix();
  if (fold.use_correction)
    s = eigenvalue_correct_clip(SquareMatrix{MatrixRole::similarity, s}).values;
  return s;
}

/// Checks positive semi-definiteness of the training similarity once per
/// fold, at the widest searched bandwidth (the most indefiniteness-prone).
inline bool needs_correction(const Fold& fold, double psi = 1.0) {
  const Eigen::MatrixXd s =
      (-0.5 / (psi * psi) *
       fold.d2.topLeftCorner(fold.n_train, fold.n_train).array())
          .exp()
          .matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return lo < -1e-8 * std::max(std::abs(lo), std::abs(hi));
}

/// A fitting problem within a fold: fit on `fit_points`, predict the
/// transitions of the trajectory at `eval_points`. d2() is ordered fit
/// points first, then eval points.
struct FitContext {
  std::vector<Eigen::Index> fit_points;   // fold indices
  std::vector<Eigen::Index> eval_points;  // fold indices
  TrainingIndex pairs;                    // local to fit_points
  std::vector<std::size_t> fold_pair_ids; // per local pair: fold pair index
  std::vector<Eigen::Index> pred_fold;    // per local pair: predecessor fold index
  Eigen::MatrixXd d2_storage;             // set for nested contexts only
  bool own_d2 = false;

  const Eigen::MatrixXd& d2(const Fold& fold) const {
    return own_d2 ? d2_storage : fold.d2;
  }
  Eigen::Index n_fit() const {
    return static_cast<Eigen::Index>(fit_points.size());
  }
};

inline FitContext final_context(const Fold& fold) {
  FitContext ctx;
  for (Eigen::Index i = 0; i < fold.n_train; ++i) ctx.fit_points.push_back(i);
  for (Eigen::Index i = 0; i < fold.n_test; ++i)
    ctx.eval_points.push_back(fold.n_train + i);
  ctx.pairs = fold.pairs;
  for (std::size_t p = 0; p < fold.pairs.size(); ++p) {
    ctx.fold_pair_ids.push_back(p);
    ctx.pred_fold.push_back(fold.pairs.pairs[p].first);
  }
  return ctx;
}

/// Nested validation problems: hold out each training trajectory in turn.
/// With a single training trajectory the search degenerates to in-sample
/// validation on that trajectory.
inline std::vector<FitContext> nested_contexts(const Fold& fold) {
  std::vector<Eigen::Index> traj_offsets(fold.train_lengths.size() + 1, 0);
  std::vector<std::size_t> pair_offsets(fold.train_lengths.size() + 1, 0);
  for (std::size_t j = 0; j < fold.train_lengths.size(); ++j) {
    traj_offsets[j + 1] = traj_offsets[j] + fold.train_lengths[j];
    pair_offsets[j + 1] =
        pair_offsets[j] + static_cast<std::size_t>(fold.train_lengths[j] - 1);
  }
  const bool in_sample = fold.train_lengths.size() == 1;
  std::vector<FitContext> out;
  for (std::size_t held = 0; held < fold.train_lengths.size(); ++held) {
    FitContext ctx;
    std::vector<Eigen::Index> fit_lengths;
    for (std::size_t j = 0; j < fold.train_lengths.size(); ++j) {
      if (j == held && !in_sample) continue;
      for (Eigen::Index t = traj_offsets[j]; t < traj_offsets[j + 1]; ++t)
        ctx.fit_points.push_back(t);
      fit_lengths.push_back(fold.train_lengths[j]);
      for (Eigen::Index t = 0; t + 1 < fold.train_lengths[j]; ++t) {
        ctx.fold_pair_ids.push_back(pair_offsets[j] +
                                    static_cast<std::size_t>(t));
        ctx.pred_fold.push_back(traj_offsets[j] + t);
      }
    }
    for (Eigen::Index t = traj_offsets[held]; t < traj_offsets[held + 1]; ++t)
      ctx.eval_points.push_back(t);
    ctx.pairs = TrainingIndex::from_lengths(fit_lengths);

    const Eigen::Index nq =
        ctx.n_fit() + static_cast<Eigen::Index>(ctx.eval_points.size());
    ctx.d2_storage.resize(nq, nq);
    std::vector<Eigen::Index> q = ctx.fit_points;
    q.insert(q.end(), ctx.eval_points.begin(), ctx.eval_points.end());
    for (Eigen::Index i = 0; i < nq; ++i)
      for (Eigen::Index j = 0; j < nq; ++j)
        ctx.d2_storage(i, j) = fold.d2(q[static_cast<std::size_t>(i)],
                                       q[static_cast<std::size_t>(j)]);
    ctx.own_d2 = true;
    out.push_back(std::move(ctx));
    if (in_sample) break;
  }
  return out;
}

/// Kernel values between one fold point and the given predecessors. Pairs
/// inside the training block come from the (possibly corrected) training
/// kernel; rows for held-out points are raw RBF values and are counted by
/// the instrumentation.
inline Eigen::VectorXd kernel_row(const Fold& fold, const Eigen::MatrixXd* ktr,
                                  double psi, Eigen::Index fold_point,
                                  const std::vector<Eigen::Index>& preds) {
  Eigen::VectorXd row(static_cast<Eigen::Index>(preds.size()));
  if (fold_point < fold.n_train && ktr != nullptr) {
    for (std::size_t i = 0; i < preds.size(); ++i)
      row(static_cast<Eigen::Index>(i)) =
          (*ktr)(fold_point, preds[i]);
  } else {
    ++fold.held_out_kernel_builds;
    const double scale = -0.5 / (psi * psi);
    for (std::size_t i = 0; i < preds.size(); ++i)
      row(static_cast<Eigen::Index>(i)) =
          std::exp(scale * fold.d2(fold_point, preds[i]));
  }
  return row;
}

/// Runs one fitted method over every transition of the context's eval
/// trajectory. ktr must be the fold's training kernel at hp.psi for kernel
/// methods; ms_out receives the mean per-transition prediction time.
inline std::vector<AffinePrediction> predict_fit(
    const Fold& fold, const FitContext& ctx, Method method,
    const HyperParams& hp, const Eigen::MatrixXd* ktr,
    double* ms_out = nullptr) {
  const Eigen::Index n_fit = ctx.n_fit();
  const std::size_t transitions = ctx.eval_points.size() - 1;
  std::vector<AffinePrediction> preds;
  preds.reserve(transitions);

  // model setup (not timed; timing covers per-transition prediction only)
  std::optional<GpModel> gp;
  std::vector<GpModel> committee;
  std::vector<std::vector<Eigen::Index>> committee_preds;
  if (method == Method::gpr) {
    Eigen::MatrixXd k_fit(ctx.pred_fold.size(), ctx.pred_fold.size());
    for (std::size_t i = 0; i < ctx.pred_fold.size(); ++i)
      for (std::size_t j = 0; j < ctx.pred_fold.size(); ++j)
        k_fit(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            (*ktr)(ctx.pred_fold[i], ctx.pred_fold[j]);
    gp = GpModel::fit(k_fit, hp.sigma_noise, ctx.pairs);
  } else if (method == Method::rbcm) {
    const int c_count = fold.clustering.clusters();
    std::vector<std::vector<std::size_t>> members(
        static_cast<std::size_t>(c_count));
    for (std::size_t p = 0; p < ctx.fold_pair_ids.size(); ++p)
      members[static_cast<std::size_t>(
                  fold.clustering.assignments[ctx.fold_pair_ids[p]])]
          .push_back(p);
    for (const auto& member : members) {
      if (member.empty()) continue;
      TrainingIndex sub;
      sub.n_points = n_fit;
      std::vector<Eigen::Index> sub_preds;
      for (std::size_t p : member) {
        sub.pairs.push_back(ctx.pairs.pairs[p]);
        sub_preds.push_back(ctx.pred_fold[p]);
      }
      Eigen::MatrixXd k_sub(sub_preds.size(), sub_preds.size());
      for (std::size_t i = 0; i < sub_preds.size(); ++i)
        for (std::size_t j = 0; j < sub_preds.size(); ++j)
          k_sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              (*ktr)(sub_preds[i], sub_preds[j]);
      committee.push_back(GpModel::fit(k_sub, hp.sigma_noise, std::move(sub)));
      committee_preds.push_back(std::move(sub_preds));
    }
  }

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t e = 0; e < transitions; ++e) {
    const Eigen::Index fold_test = ctx.eval_points[e];
    const Eigen::Index local_test =
        n_fit + static_cast<Eigen::Index>(e);
    switch (method) {
      case Method::identity:
        preds.push_back(predict_identity(n_fit));
        break;
      case Method::nn1: {
        Eigen::VectorXd row(static_cast<Eigen::Index>(ctx.pairs.size()));
        for (std::size_t p = 0; p < ctx.pairs.pairs.size(); ++p)
          row(static_cast<Eigen::Index>(p)) =
              ctx.d2(fold)(local_test, ctx.pairs.pairs[p].first);
        preds.push_back(predict_1nn(row, ctx.pairs));
        break;
      }
      case Method::kr:
        preds.push_back(predict_kr(
            kernel_row(fold, ktr, hp.psi, fold_test, ctx.pred_fold),
            ctx.pairs));
        break;
      case Method::gpr:
        preds.push_back(
            gp->predict(
                  kernel_row(fold, ktr, hp.psi, fold_test, ctx.pred_fold),
                  1.0)
                .mean);
        break;
      case Method::rbcm: {
        std::vector<Eigen::VectorXd> rows;
        rows.reserve(committee.size());
        for (const auto& cp : committee_preds)
          rows.push_back(kernel_row(fold, ktr, hp.psi, fold_test, cp));
        preds.push_back(
            predict_rbcm(committee, rows, 1.0, hp.sigma_prior).mean);
        break;
      }
    }
  }
  if (ms_out != nullptr) {
    const auto elapsed = std::chrono::duration<double, std::milli>(
        std::chrono::steady_clock::now() - start);
    *ms_out = transitions > 0
                  ? elapsed.count() / static_cast<double>(transitions)
                  : 0.0;
  }
  return preds;
}

inline double score_fit(const Fold& fold, const FitContext& ctx, Method method,
                        const HyperParams& hp, const Eigen::MatrixXd* ktr,
                        double* ms_out = nullptr) {
  const auto preds = predict_fit(fold, ctx, method, hp, ktr, ms_out);
  return fold_rmse(preds, ctx.d2(fold), ctx.n_fit());
}

inline HyperParams sample_params(Method method, const SearchConfig& cfg,
                                 double dbar, std::size_t n_pairs, Rng& rng) {
  HyperParams hp;
  hp.sigma_prior = dbar;
  hp.clusters = std::max<int>(
      1, static_cast<int>(n_pairs) / std::max(1, cfg.cluster_divisor));
  hp.psi = 0.3 * dbar;
  hp.sigma_noise = 0.1 * dbar;
  if (method_uses_kernel(method))
    hp.psi = rng.uniform(cfg.psi_lo * dbar, cfg.psi_hi * dbar);
  if (method_uses_noise(method))
    hp.sigma_noise = rng.log_uniform(cfg.noise_lo * dbar, cfg.noise_hi * dbar);
  return hp;
}

/// Random hyperparameter search scored by nested leave-one-out RMSE over the
/// fold's training trajectories; ties keep the first-sampled candidate.
inline HyperParams random_search(const Fold& fold,
                                 const std::vector<FitContext>& nested,
                                 Method method, const SearchConfig& cfg,
                                 Rng& rng) {
  const double dbar = 1.0;  // training distances are normalized to unit mean
  if (!method_uses_kernel(method))
    return sample_params(method, cfg, dbar, fold.pairs.size(), rng);
  if (cfg.trials < 1)
    throw std::invalid_argument("random_search: trials must be >= 1");
  HyperParams best;
  double best_score = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const HyperParams hp =
        sample_params(method, cfg, dbar, fold.pairs.size(), rng);
    const Eigen::MatrixXd ktr = train_kernel(fold, hp.psi);
    double score = 0.0;
    for (const auto& ctx : nested)
      score += score_fit(fold, ctx, method, hp, &ktr);
    score /= static_cast<double>(nested.size());
    if (score < best_score) {
      best_score = score;
      best = hp;
    }
  }
  return best;
}

inline FoldResult run_fold(const EvaluationInput& input, Method method,
                           const SearchConfig& cfg, std::uint64_t seed,
                           Eigen::Index fold_index) {
  Fold fold = build_fold(input, fold_index);
  if (method_uses_kernel(method)) fold.use_correction = needs_correction(fold);
  if (method == Method::rbcm) {
    std::vector<Eigen::Index> preds;
    preds.reserve(fold.pairs.size());
    for (const auto& pr : fold.pairs.pairs) preds.push_back(pr.first);
    Eigen::MatrixXd d2_pred(preds.size(), preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i)
      for (std::size_t j = 0; j < preds.size(); ++j)
        d2_pred(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            fold.d2(preds[i], preds[j]);
    const int clusters = std::max<int>(
        1,
        static_cast<int>(fold.pairs.size()) / std::max(1, cfg.cluster_divisor));
    fold.clustering = relational_neural_gas(
        d2_pred, clusters, cfg.rng_epochs,
        Rng::derive(seed, 2 * static_cast<std::uint64_t>(fold_index) + 1),
        cfg.rng_subset);
  }
  const auto nested = nested_contexts(fold);
  Rng rng(Rng::derive(seed, 2 * static_cast<std::uint64_t>(fold_index)));
  const HyperParams hp = random_search(fold, nested, method, cfg, rng);

  const FitContext ctx = final_context(fold);
  Eigen::MatrixXd ktr;
  const Eigen::MatrixXd* ktr_ptr = nullptr;
  if (method_uses_kernel(method)) {
    ktr = train_kernel(fold, hp.psi);
    ktr_ptr = &ktr;
  }
  FoldResult result;
  result.params = hp;
  result.transitions = static_cast<int>(fold.n_test - 1);
  result.rmse =
      score_fit(fold, ctx, method, hp, ktr_ptr, &result.prediction_ms);
  return result;
}

}  // namespace detail

/// Leave-one-out cross-validation over trajectories with nested random
/// hyperparameter search. Deterministic given (input, method, config, seed);
/// folds may run concurrently with jobs > 1.
inline ExperimentResult loo_cv(const EvaluationInput& input, Method method,
                               const SearchConfig& cfg, std::uint64_t seed,
                               int jobs = 1) {
  const Eigen::Index m = input.trajectories();
  if (m < 2)
    throw std::invalid_argument("loo_cv: need at least 2 trajectories");
  for (std::size_t j = 0; j < input.trajectory_lengths.size(); ++j)
    if (input.trajectory_lengths[j] < 2)
      throw std::invalid_argument("loo_cv: trajectory '" +
                                  input.trajectory_ids[j] +
                                  "' has fewer than 2 snapshots");
  ExperimentResult result;
  result.method = method_name(method);
  result.folds.resize(static_cast<std::size_t>(m));
  result.metadata = input.metadata;
  result.metadata["seed"] = std::to_string(seed);
  result.metadata["trials"] = std::to_string(cfg.trials);

  if (jobs <= 1) {
    for (Eigen::Index j = 0; j < m; ++j)
      result.folds[static_cast<std::size_t>(j)] =
          detail::run_fold(input, method, cfg, seed, j);
  } else {
    std::atomic<Eigen::Index> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        const Eigen::Index j = next.fetch_add(1);
        if (j >= m) return;
        try {
          result.folds[static_cast<std::size_t>(j)] =
              detail::run_fold(input, method, cfg, seed, j);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(jobs, static_cast<int>(m));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

/// Per-fold rows: method,fold,rmse,runtime_ms,psi,sigma_noise. Fields a
/// method does not use stay empty. include_runtime=false drops the
/// wall-clock column (the only non-deterministic field).
inline std::string results_csv(const std::vector<ExperimentResult>& results,
                               bool include_runtime = true) {
  std::ostringstream out;
  out.precision(17);
  out << "method,fold,rmse" << (include_runtime ? ",runtime_ms" : "")
      << ",psi,sigma_noise\n";
  for (const auto& r : results) {
    const auto method = parse_method(r.method);
    for (std::size_t f = 0; f < r.folds.size(); ++f) {
      const auto& fold = r.folds[f];
      out << r.method << ',' << f << ',' << fold.rmse;
      if (include_runtime) out << ',' << fold.prediction_ms;
      out << ',';
      if (method && method_uses_kernel(*method)) out << fold.params.psi;
      out << ',';
      if (method && method_uses_noise(*method)) out << fold.params.sigma_noise;
      out << '\n';
    }
  }
  return out.str();
}

struct ReportTable {
  std::string text;
  std::string csv;
};

/// Table 1-style summary: one row per method, mean RMSE (std) and mean
/// per-prediction runtime (std); the lowest mean RMSE is flagged with '*'
/// (first row wins ties, which are noted).
inline ReportTable report_table(const std::vector<ExperimentResult>& results) {
  if (results.empty())
    throw std::invalid_argument("report_table: no results");
  std::size_t best = 0;
  bool tie = false;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].mean_rmse() < results[best].mean_rmse()) {
      best = i;
      tie = false;
    } else if (results[i].mean_rmse() == results[best].mean_rmse()) {
      tie = true;
    }
  }
  std::ostringstream text;
  text << std::left << std::setw(10) << "method"
       << std::setw(22) << "RMSE" << "runtime [ms]\n";
  std::ostringstream csv;
  csv << "method,mean_rmse,std_rmse,mean_runtime_ms,std_runtime_ms,best\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::ostringstream rmse, runtime;
    rmse << std::fixed << std::setprecision(4) << r.mean_rmse() << " ("
         << r.stddev_rmse() << ")" << (i == best ? " *" : "");
    runtime << std::fixed << std::setprecision(4) << r.mean_runtime_ms()
            << " (" << r.stddev_runtime_ms() << ")";
    text << std::left << std::setw(10) << r.method << std::setw(22)
         << rmse.str() << runtime.str() << '\n';
    csv << r.method << ',' << r.mean_rmse() << ',' << r.stddev_rmse() << ','
        << r.mean_runtime_ms() << ',' << r.stddev_runtime_ms() << ','
        << (i == best ? 1 : 0) << '\n';
  }
  if (tie) text << "(tie on lowest mean RMSE; first listed method flagged)\n";
  return {text.str(), csv.str()};
}

/// Pairwise two-sided Wilcoxon signed-rank tests over per-fold RMSEs.
inline std::string wilcoxon_csv(const std::vector<ExperimentResult>& results) {
  std::ostringstream out;
  out.precision(12);
  out << "method_a,method_b,statistic,p_value,n,exact\n";
  for (std::size_t i = 0; i < results.size(); ++i)
    for (std::size_t j = i + 1; j < results.size(); ++j) {
      const auto w = wilcoxon_signed_rank(results[i].fold_rmses(),
                                          results[j].fold_rmses());
      out << results[i].method << ',' << results[j].method << ','
          << w.statistic << ',' << w.p_value << ',' << w.n << ','
          << (w.exact ? 1 : 0) << '\n';
    }
  return out.str();
}

}  // namespace graphts
