#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace graphts {

// Undirected edges are stored canonically as (min, max) so that pair
// equality matches unordered-edge equality.
using Edge = std::pair<std::string, std::string>;

inline Edge make_edge(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

/// One temporal subgraph: the nodes and edges present at a single time step.
struct TemporalGraph {
  std::vector<std::string> nodes;             // ordered node identifiers
  std::vector<Edge> edges;                    // canonical, sorted, unique
  std::map<std::string, std::string> labels;  // optional node labels

  void add_edge(const std::string& a, const std::string& b) {
    edges.push_back(make_edge(a, b));
  }

  // Restores the canonical edge representation after bulk insertion.
  void canonicalize() {
    for (auto& e : edges)
      if (e.second < e.first) std::swap(e.first, e.second);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }

  bool operator==(const TemporalGraph&) const = default;
};

/// An observed sequence of temporal subgraphs; consecutive snapshots form
/// (predecessor, successor) training pairs.
struct Trajectory {
  std::string id;
  std::vector<TemporalGraph> snapshots;

  bool operator==(const Trajectory&) const = default;
};

struct Dataset {
  std::vector<Trajectory> trajectories;
  std::map<std::string, std::string> metadata;

  bool operator==(const Dataset&) const = default;
};

/// A graph serialized as the sequence of its node labels in order of
/// appearance; empty sequences are allowed.
struct LabeledSequence {
  std::string id;
  std::vector<std::string> tokens;

  bool operator==(const LabeledSequence&) const = default;
};

inline std::size_t total_snapshots(const Dataset& d) {
  std::size_t n = 0;
  for (const auto& t : d.trajectories) n += t.snapshots.size();
  return n;
}

/// Checks every structural invariant and returns one description per
/// violation; an empty result means the dataset is valid.
inline std::vector<std::string> validate_dataset(const Dataset& d) {
  std::vector<std::string> violations;
  std::set<std::string> ids;
  for (const auto& traj : d.trajectories) {
    if (!ids.insert(traj.id).second)
      violations.push_back("duplicate trajectory id '" + traj.id + "'");
    if (traj.snapshots.size() < 2)
      violations.push_back("trajectory '" + traj.id +
                           "' has fewer than 2 snapshots");
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
      const auto& g = traj.snapshots[s];
      const std::string where =
          "trajectory '" + traj.id + "' snapshot " + std::to_string(s);
      std::set<std::string> node_set(g.nodes.begin(), g.nodes.end());
      if (node_set.size() != g.nodes.size())
        violations.push_back(where + ": duplicate node identifier");
      std::set<Edge> seen;
      for (const auto& e : g.edges) {
        if (e.first == e.second) {
          violations.push_back(where + ": self-loop on node '" + e.first +
                               "'");
          continue;
        }
        if (!node_set.count(e.first) || !node_set.count(e.second))
          violations.push_back(where + ": edge (" + e.first + ", " + e.second +
                               ") references a missing node");
        if (!seen.insert(make_edge(e.first, e.second)).second)
          violations.push_back(where + ": duplicate edge (" + e.first + ", " +
                               e.second + ")");
      }
    }
  }
  return violations;
}

}  // namespace graphts
