#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "graphts/generators.hpp"
#include "graphts/graph.hpp"
#include "graphts/io.hpp"
#include "graphts/random.hpp"

using namespace graphts;

namespace {

TemporalGraph simple_graph() {
  TemporalGraph g;
  g.nodes = {"a", "b", "c"};
  g.add_edge("a", "b");
  g.add_edge("b", "c");
  g.canonicalize();
  return g;
}

Dataset minimal_dataset() {
  Dataset d;
  Trajectory t;
  t.id = "t0";
  t.snapshots = {simple_graph(), simple_graph()};
  t.snapshots[1].add_edge("a", "c");
  t.snapshots[1].canonicalize();
  d.trajectories.push_back(t);
  d.metadata["generator"] = "test";
  return d;
}

std::filesystem::path temp_path(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("edges are stored canonically") {
  CHECK(make_edge("b", "a") == Edge{"a", "b"});
  TemporalGraph g;
  g.nodes = {"a", "b"};
  g.add_edge("b", "a");
  g.add_edge("a", "b");
  g.canonicalize();
  CHECK(g.edges == std::vector<Edge>{{"a", "b"}});
}

TEST_CASE("validate_dataset accepts a minimal valid dataset") {
  CHECK(validate_dataset(minimal_dataset()).empty());
}

TEST_CASE("validate_dataset flags a length-1 trajectory") {
  Dataset d = minimal_dataset();
  d.trajectories[0].snapshots.resize(1);
  const auto violations = validate_dataset(d);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("t0") != std::string::npos);
  CHECK(violations[0].find("fewer than 2") != std::string::npos);
}

TEST_CASE("validate_dataset flags an edge with a missing endpoint") {
  Dataset d = minimal_dataset();
  d.trajectories[0].snapshots[0].add_edge("a", "zz");
  d.trajectories[0].snapshots[0].canonicalize();
  const auto violations = validate_dataset(d);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("zz") != std::string::npos);
  CHECK(violations[0].find("missing node") != std::string::npos);
}

TEST_CASE("validate_dataset detects every injected violation") {
  // randomized mutation testing over the violation catalogue
  Rng rng(20240815);
  for (int trial = 0; trial < 200; ++trial) {
    Dataset d = generate_ba_dataset(BaParams{3, 2, 8, 0}, 3, rng.next());
    REQUIRE(validate_dataset(d).empty());
    auto& traj = d.trajectories[rng.index(d.trajectories.size())];
    auto& g = traj.snapshots[rng.index(traj.snapshots.size())];
    switch (rng.index(5)) {
      case 0:  // self-loop
        g.edges.push_back({g.nodes[0], g.nodes[0]});
        break;
      case 1:  // duplicate edge
        g.edges.push_back(g.edges[rng.index(g.edges.size())]);
        break;
      case 2:  // dangling endpoint
        g.edges.push_back(make_edge(g.nodes[0], "missing"));
        break;
      case 3:  // duplicate trajectory id
        d.trajectories[1].id = d.trajectories[0].id;
        break;
      case 4:  // too-short trajectory
        traj.snapshots.resize(1);
        break;
    }
    CHECK(!validate_dataset(d).empty());
  }
}

TEST_CASE("dataset save/load round-trips") {
  const Dataset d = minimal_dataset();
  const auto path = temp_path("graphts_roundtrip.json");
  save_dataset(d, path.string());
  const Dataset loaded = load_dataset(path.string());
  CHECK(loaded == d);
  std::filesystem::remove(path);
}

TEST_CASE("dataset round-trip preserves labels and metadata") {
  Dataset d = minimal_dataset();
  d.trajectories[0].snapshots[0].labels = {{"a", "first"}, {"b", "second"}};
  d.metadata["note"] = "labeled";
  const auto path = temp_path("graphts_roundtrip_labels.json");
  save_dataset(d, path.string());
  CHECK(load_dataset(path.string()) == d);
  std::filesystem::remove(path);
}

TEST_CASE("generated BA dataset round-trips with 500 snapshots") {
  const Dataset d = generate_ba_dataset(BaParams{3, 2, 27, 0}, 20, 1);
  REQUIRE(total_snapshots(d) == 500);
  const auto path = temp_path("graphts_roundtrip_ba.json");
  save_dataset(d, path.string());
  const Dataset loaded = load_dataset(path.string());
  CHECK(loaded == d);
  CHECK(total_snapshots(loaded) == 500);
  std::filesystem::remove(path);
}

TEST_CASE("loading rejects a file without trajectories") {
  const auto path = temp_path("graphts_missing_key.json");
  std::ofstream(path) << "{\"format_version\": 1, \"metadata\": {}}\n";
  CHECK_THROWS_AS(load_dataset(path.string()), ParseError);
  CHECK_THROWS_WITH(load_dataset(path.string()),
                    Catch::Matchers::ContainsSubstring("trajectories"));
  std::filesystem::remove(path);
}

TEST_CASE("loading rejects malformed JSON with context") {
  const auto path = temp_path("graphts_malformed.json");
  std::ofstream(path) << "{\"format_version\": 1,";
  CHECK_THROWS_AS(load_dataset(path.string()), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("loading rejects a format_version mismatch") {
  const auto path = temp_path("graphts_version.json");
  std::ofstream(path)
      << "{\"format_version\": 2, \"metadata\": {}, \"trajectories\": []}\n";
  CHECK_THROWS_WITH(load_dataset(path.string()),
                    Catch::Matchers::ContainsSubstring("format_version"));
  std::filesystem::remove(path);
}

TEST_CASE("sequence files round-trip") {
  std::vector<LabeledSequence> seqs = {{"s:0", {"x", "y"}}, {"s:1", {}}};
  const auto path = temp_path("graphts_sequences.json");
  save_sequences(seqs, path.string());
  CHECK(load_sequences(path.string()) == seqs);
  std::filesystem::remove(path);
}

TEST_CASE("matrix csv round-trips and rejects non-finite entries") {
  Eigen::MatrixXd m(2, 3);
  m << 1.5, -2.25, 0.0, 3.125, 4.0, -0.5;
  const auto path = temp_path("graphts_matrix.csv");
  save_matrix_csv(m, path.string());
  CHECK(load_matrix_csv(path.string()) == m);
  m(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS(save_matrix_csv(m, path.string()));
  std::filesystem::remove(path);
}
