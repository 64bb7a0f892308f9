// Command-line front end: dataset generation, matrix export, and the
// leave-one-out evaluation pipeline. Exit codes: 0 success, 1 runtime or
// numerical failure, 2 usage error.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "graphts/graphts.hpp"

namespace {

using namespace graphts;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string valid_method_names() {
  std::string out;
  for (Method m : all_methods()) {
    if (!out.empty()) out += ", ";
    out += method_name(m);
  }
  return out;
}

// A data file is either a graph dataset ({"trajectories": ...}) or a labeled
// sequence file ({"sequences": ...}).
enum class DataKind { dataset, sequences };

DataKind detect_kind(const std::string& path, const std::string& representation) {
  if (representation == "histogram") return DataKind::dataset;
  if (representation == "alignment") return DataKind::sequences;
  const auto j = graphts::detail::load_json_file(path, "data file");
  if (j.contains("trajectories")) return DataKind::dataset;
  if (j.contains("sequences")) return DataKind::sequences;
  throw ParseError("data file '" + path +
                   "': expected a 'trajectories' or 'sequences' key");
}

EvaluationInput load_input(const std::string& path,
                           const std::string& representation,
                           const AlignmentCosts& costs) {
  switch (detect_kind(path, representation)) {
    case DataKind::dataset:
      return build_histogram_input(load_dataset(path));
    case DataKind::sequences:
      return build_alignment_input(load_sequences(path), costs);
  }
  throw std::logic_error("unreachable");
}

int cmd_generate(const std::string& model, int trajectories,
                 std::optional<int> m0, std::optional<int> k,
                 std::optional<int> m, std::optional<int> grid,
                 std::optional<int> steps, double noise,
                 const std::string& pattern, bool drop_initial,
                 std::uint64_t seed, const std::string& out_path) {
  Dataset dataset;
  if (model == "ba") {
    if (!m0 || !k || !m)
      throw UsageError("--model ba requires --m0, --k and --m");
    dataset = generate_ba_dataset(BaParams{*m0, *k, *m, 0}, trajectories, seed);
  } else if (model == "gol") {
    if (!grid || !steps)
      throw UsageError("--model gol requires --grid and --steps");
    GolParams base;
    base.width = base.height = *grid;
    base.steps = *steps;
    base.noise_rate = noise;
    if (!pattern.empty()) {
      const auto p = parse_pattern(pattern);
      if (!p) throw UsageError("unknown pattern '" + pattern + "'");
      base.pattern = *p;
      Dataset d;
      for (int i = 0; i < trajectories; ++i) {
        GolParams pi = base;
        pi.seed = Rng::derive(seed, static_cast<std::uint64_t>(i));
        d.trajectories.push_back(generate_gol_trajectory(
            pi, !drop_initial, "gol-" + std::to_string(i) + "-" + pattern));
      }
      d.metadata = {{"generator", "game-of-life"},
                    {"pattern", pattern},
                    {"seed", std::to_string(seed)}};
      dataset = std::move(d);
    } else {
      dataset = generate_gol_dataset(base, trajectories, !drop_initial, seed);
    }
  } else {
    throw UsageError("unknown model '" + model + "' (expected ba or gol)");
  }
  save_dataset(dataset, out_path);
  std::cout << "wrote " << out_path << ": trajectories="
            << dataset.trajectories.size()
            << " snapshots=" << total_snapshots(dataset) << "\n";
  return 0;
}

int cmd_matrix(const std::string& data_path, const std::string& representation,
               double psi, bool check_psd, const AlignmentCosts& costs,
               const std::string& out_prefix) {
  const EvaluationInput input = load_input(data_path, representation, costs);
  auto [normalized, dbar] =
      normalize_distances(SquareMatrix{MatrixRole::dissimilarity,
                                       input.distances});
  const SquareMatrix similarity = rbf_similarity_matrix(normalized, psi);
  nlohmann::json meta = {{"n", normalized.n()},
                         {"dbar", dbar},
                         {"psi", psi},
                         {"representation",
                          input.metadata.at("representation")}};
  SquareMatrix kernel = eigenvalue_correct_clip(similarity);
  if (check_psd) {
    const double lo = min_eigenvalue(similarity.values);
    const bool corrected = lo < 0.0;
    meta["min_eigenvalue"] = lo;
    meta["corrected"] = corrected;
    std::cout << "min eigenvalue of similarity: " << lo
              << (corrected ? " (clip correction applied)"
                            : " (no correction required)")
              << "\n";
  }
  save_matrix_csv(normalized.values, out_prefix + ".distance.csv");
  save_matrix_csv(similarity.values, out_prefix + ".similarity.csv");
  save_matrix_csv(kernel.values, out_prefix + ".kernel.csv");
  graphts::detail::write_file(out_prefix + ".meta.json", meta.dump(2) + "\n");
  std::cout << "wrote " << out_prefix << ".{distance,similarity,kernel}.csv"
            << " and " << out_prefix << ".meta.json (dbar=" << dbar << ")\n";
  return 0;
}

int cmd_evaluate(const std::string& data_path,
                 const std::string& representation,
                 const std::string& methods_arg, int trials, int rng_subset,
                 int jobs, std::uint64_t seed, const AlignmentCosts& costs,
                 const std::string& out_dir) {
  std::vector<Method> methods;
  for (const auto& name : split_csv(methods_arg)) {
    const auto m = parse_method(name);
    if (!m)
      throw UsageError("unknown method '" + name + "' (valid: " +
                       valid_method_names() + ")");
    methods.push_back(*m);
  }
  if (methods.empty()) throw UsageError("--methods must name at least one method");

  const EvaluationInput input = load_input(data_path, representation, costs);
  SearchConfig cfg;
  cfg.trials = trials;
  cfg.rng_subset = rng_subset;

  std::vector<ExperimentResult> results;
  for (Method m : methods) {
    results.push_back(loo_cv(input, m, cfg, seed, jobs));
    std::cout << method_name(m) << ": mean RMSE " << results.back().mean_rmse()
              << " over " << results.back().folds.size() << " folds\n";
  }
  std::filesystem::create_directories(out_dir);
  const auto table = report_table(results);
  graphts::detail::write_file(out_dir + "/results.csv", results_csv(results));
  graphts::detail::write_file(out_dir + "/summary.txt", table.text);
  graphts::detail::write_file(out_dir + "/summary.csv", table.csv);
  if (results.size() > 1)
    graphts::detail::write_file(out_dir + "/wilcoxon.csv",
                                wilcoxon_csv(results));
  std::cout << "\n" << table.text;
  std::cout << "wrote results to " << out_dir << "/\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time series prediction for graphs in kernel spaces"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset");
  std::string model, pattern, gen_out;
  int trajectories = 0;
  std::optional<int> m0, k, m, grid, steps;
  double noise = 0.05;
  bool drop_initial = false;
  std::uint64_t gen_seed = 0;
  gen->add_option("--model", model, "ba | gol")->required();
  gen->add_option("--trajectories", trajectories, "number of trajectories")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--m0", m0, "BA: seed clique size");
  gen->add_option("--k", k, "BA: edges per new node");
  gen->add_option("--m", m, "BA: final node count");
  gen->add_option("--grid", grid, "GoL: grid side length");
  gen->add_option("--steps", steps, "GoL: simulation steps T");
  gen->add_option("--noise", noise, "GoL: dead-cell activation rate");
  gen->add_option("--pattern", pattern,
                  "GoL: fix one pattern instead of cycling all six");
  gen->add_flag("--drop-initial", drop_initial,
                "GoL: drop the initial placement snapshot");
  gen->add_option("--seed", gen_seed, "RNG seed")->required();
  gen->add_option("--out", gen_out, "output dataset file")->required();

  // matrix
  auto* mat = app.add_subcommand(
      "matrix", "Export distance/similarity/kernel matrices");
  std::string mat_data, mat_repr = "auto", mat_prefix;
  double mat_psi = 0.3;
  bool check_psd = false;
  AlignmentCosts mat_costs;
  mat->add_option("--data", mat_data, "dataset or sequence file")->required();
  mat->add_option("--representation", mat_repr, "auto | histogram | alignment")
      ->check(CLI::IsMember({"auto", "histogram", "alignment"}));
  mat->add_option("--psi", mat_psi,
                  "RBF bandwidth in units of the mean distance")
      ->check(CLI::PositiveNumber);
  mat->add_flag("--check-psd", check_psd,
                "report the minimum eigenvalue of the similarity matrix");
  mat->add_option("--gap-open", mat_costs.gap_open, "alignment gap open cost");
  mat->add_option("--gap-extend", mat_costs.gap_extend,
                  "alignment gap extend cost");
  mat->add_option("--mismatch", mat_costs.mismatch,
                  "alignment substitution cost for unequal labels");
  mat->add_option("--out-prefix", mat_prefix, "output path prefix")->required();

  // evaluate
  auto* eval = app.add_subcommand(
      "evaluate", "Leave-one-out cross-validation of prediction methods");
  std::string eval_data, eval_repr = "auto", eval_methods, eval_out = ".";
  int trials = 10, rng_subset = 0, jobs = 1;
  std::uint64_t eval_seed = 0;
  AlignmentCosts eval_costs;
  eval->add_option("--data", eval_data, "dataset or sequence file")->required();
  eval->add_option("--representation", eval_repr,
                   "auto | histogram | alignment")
      ->check(CLI::IsMember({"auto", "histogram", "alignment"}));
  eval->add_option("--methods", eval_methods,
                   "comma-separated list: " + valid_method_names())
      ->required();
  eval->add_option("--trials", trials, "random search trials")
      ->check(CLI::PositiveNumber);
  eval->add_option("--rng-subset", rng_subset,
                   "cap on points used to train clustering prototypes (0 = all)");
  eval->add_option("--jobs", jobs, "worker threads across folds")
      ->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_seed, "RNG seed")->required();
  eval->add_option("--gap-open", eval_costs.gap_open, "alignment gap open cost");
  eval->add_option("--gap-extend", eval_costs.gap_extend,
                   "alignment gap extend cost");
  eval->add_option("--mismatch", eval_costs.mismatch,
                   "alignment substitution cost for unequal labels");
  eval->add_option("--out-dir", eval_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed())
      return cmd_generate(model, trajectories, m0, k, m, grid, steps, noise,
                          pattern, drop_initial, gen_seed, gen_out);
    if (mat->parsed())
      return cmd_matrix(mat_data, mat_repr, mat_psi, check_psd, mat_costs,
                        mat_prefix);
    if (eval->parsed())
      return cmd_evaluate(eval_data, eval_repr, eval_methods, trials,
                          rng_subset, jobs, eval_seed, eval_costs, eval_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
