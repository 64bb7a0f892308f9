#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphts/graph.hpp"
#include "graphts/random.hpp"

namespace graphts {

// ---------------------------------------------------------------------------
// Barabasi-Albert growth
// ---------------------------------------------------------------------------

struct BaParams {
  int m0 = 3;              // seed clique size, >= 2
  int k = 2;               // edges per new node, 1 <= k <= m0
  int m = 27;              // final node count, > m0
  std::uint64_t seed = 0;
};

inline void check_params(const BaParams& p) {
  if (p.m0 < 2) throw std::invalid_argument("BA: m0 must be >= 2");
  if (p.k < 1 || p.k > p.m0)
    throw std::invalid_argument("BA: k must satisfy 1 <= k <= m0");
  if (p.m <= p.m0) throw std::invalid_argument("BA: m must be > m0");
}

namespace detail {

// Runs the growth process, invoking sink(node_count, edges) after the seed
// clique and after each attachment step. Nodes are 0..n-1; new node t
// attaches to k distinct existing nodes drawn proportionally to degree,
// without replacement.
template <typename Sink>
void grow_ba(const BaParams& p, Sink&& sink) {
  check_params(p);
  Rng rng(p.seed);
  std::vector<std::pair<int, int>> edges;
  std::vector<long long> degree(static_cast<std::size_t>(p.m), 0);
  for (int i = 0; i < p.m0; ++i)
    for (int j = i + 1; j < p.m0; ++j) {
      edges.emplace_back(i, j);
      ++degree[i];
      ++degree[j];
    }
  sink(p.m0, edges);
  std::vector<char> chosen(static_cast<std::size_t>(p.m), 0);
  for (int t = p.m0; t < p.m; ++t) {
    std::fill(chosen.begin(), chosen.begin() + t, 0);
    long long total = 0;
    for (int u = 0; u < t; ++u) total += degree[u];
    for (int pick = 0; pick < p.k; ++pick) {
      const double r = rng.uniform() * static_cast<double>(total);
      double acc = 0;
      int target = -1;
      for (int u = 0; u < t; ++u) {
        if (chosen[u]) continue;
        acc += static_cast<double>(degree[u]);
        if (r < acc) {
          target = u;
          break;
        }
      }
      if (target < 0) {  // numerical edge of the cumulative walk
        for (int u = t - 1; u >= 0; --u)
          if (!chosen[u]) {
            target = u;
            break;
          }
      }
      chosen[target] = 1;
      total -= degree[target];
      edges.emplace_back(target, t);
      ++degree[target];
      ++degree[t];
    }
    sink(t + 1, edges);
  }
}

inline TemporalGraph ba_snapshot(int n_nodes,
                                 const std::vector<std::pair<int, int>>& edges) {
  TemporalGraph g;
  g.nodes.reserve(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) g.nodes.push_back(std::to_string(i));
  for (const auto& [a, b] : edges)
    g.add_edge(std::to_string(a), std::to_string(b));
  g.canonicalize();
  return g;
}

}  // namespace detail

/// Grows one trajectory of length m - m0 + 1: the seed clique followed by
/// one snapshot per attached node.
inline Trajectory generate_ba_trajectory(const BaParams& p,
                                         std::string id = "ba") {
  Trajectory traj;
  traj.id = std::move(id);
  detail::grow_ba(p, [&](int n, const std::vector<std::pair<int, int>>& e) {
    traj.snapshots.push_back(detail::ba_snapshot(n, e));
  });
  return traj;
}

/// Final graph only; avoids materializing the whole trajectory for large m.
inline TemporalGraph generate_ba_graph(const BaParams& p) {
  int last_n = 0;
  const std::vector<std::pair<int, int>>* last_edges = nullptr;
  detail::grow_ba(p, [&](int n, const std::vector<std::pair<int, int>>& e) {
    last_n = n;
    last_edges = &e;
  });
  return detail::ba_snapshot(last_n, *last_edges);
}

inline Dataset generate_ba_dataset(const BaParams& base, int n_trajectories,
                                   std::uint64_t seed) {
  if (n_trajectories < 1)
    throw std::invalid_argument("BA: need at least one trajectory");
  Dataset d;
  for (int i = 0; i < n_trajectories; ++i) {
    BaParams p = base;
    p.seed = Rng::derive(seed, static_cast<std::uint64_t>(i));
    d.trajectories.push_back(
        generate_ba_trajectory(p, "ba-" + std::to_string(i)));
  }
  d.metadata = {{"generator", "barabasi-albert"},
                {"m0", std::to_string(base.m0)},
                {"k", std::to_string(base.k)},
                {"m", std::to_string(base.m)},
                {"trajectories", std::to_string(n_trajectories)},
                {"seed", std::to_string(seed)}};
  return d;
}

// ---------------------------------------------------------------------------
// Conway's Game of Life
// ---------------------------------------------------------------------------

enum class GolPattern {
  blinker,
  beacon,
  toad,
  block,
  glider,
  block_and_glider,
};

inline const std::vector<GolPattern>& all_gol_patterns() {
  static const std::vector<GolPattern> all = {
      GolPattern::blinker, GolPattern::beacon, GolPattern::toad,
      GolPattern::block,   GolPattern::glider, GolPattern::block_and_glider};
  return all;
}

inline std::string pattern_name(GolPattern p) {
  switch (p) {
    case GolPattern::blinker: return "blinker";
    case GolPattern::beacon: return "beacon";
    case GolPattern::toad: return "toad";
    case GolPattern::block: return "block";
    case GolPattern::glider: return "glider";
    case GolPattern::block_and_glider: return "block_and_glider";
  }
  throw std::invalid_argument("unknown pattern");
}

inline std::optional<GolPattern> parse_pattern(const std::string& name) {
  for (GolPattern p : all_gol_patterns())
    if (pattern_name(p) == name) return p;
  return std::nullopt;
}

/// Live-cell coordinates (x, y) of the standard patterns, anchored at the
/// top-left of their bounding box. block_and_glider is the 6-cell chaotic
/// starter that settles into a block plus an escaping glider after ~105
/// generations.
inline const std::vector<std::pair<int, int>>& pattern_cells(GolPattern p) {
  static const std::vector<std::pair<int, int>> blinker = {
      {0, 0}, {1, 0}, {2, 0}};
  static const std::vector<std::pair<int, int>> beacon = {
      {0, 0}, {1, 0}, {0, 1}, {3, 2}, {2, 3}, {3, 3}};
  static const std::vector<std::pair<int, int>> toad = {
      {1, 0}, {2, 0}, {3, 0}, {0, 1}, {1, 1}, {2, 1}};
  static const std::vector<std::pair<int, int>> block = {
      {0, 0}, {1, 0}, {0, 1}, {1, 1}};
  static const std::vector<std::pair<int, int>> glider = {
      {1, 0}, {2, 1}, {0, 2}, {1, 2}, {2, 2}};
  static const std::vector<std::pair<int, int>> block_and_glider = {
      {0, 0}, {1, 0}, {0, 1}, {2, 1}, {2, 2}, {3, 2}};
  switch (p) {
    case GolPattern::blinker: return blinker;
    case GolPattern::beacon: return beacon;
    case GolPattern::toad: return toad;
    case GolPattern::block: return block;
    case GolPattern::glider: return glider;
    case GolPattern::block_and_glider: return block_and_glider;
  }
  throw std::invalid_argument("unknown pattern");
}

struct GolParams {
  int width = 20;
  int height = 20;
  GolPattern pattern = GolPattern::blinker;
  int steps = 10;           // T >= 1
  double noise_rate = 0.05; // probability of activating each dead cell
  std::uint64_t seed = 0;
};

// Row-major binary grid of width*height cells.
using GridState = std::vector<std::uint8_t>;

/// One synchronous update. Cells outside the grid are dead. A cell is live
/// at t iff 5 <= psi(t-1) + 2 * (live 8-neighbors at t-1) <= 7.
inline GridState gol_step(const GridState& g, int width, int height) {
  if (static_cast<int>(g.size()) != width * height)
    throw std::invalid_argument("gol_step: grid size mismatch");
  GridState out(g.size(), 0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      int live = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
          live += g[static_cast<std::size_t>(ny * width + nx)];
        }
      const int s = g[static_cast<std::size_t>(y * width + x)] + 2 * live;
      out[static_cast<std::size_t>(y * width + x)] = (s >= 5 && s <= 7) ? 1 : 0;
    }
  return out;
}

/// Live cells become nodes (ids are row-major cell indices); 8-adjacent live
/// pairs become edges.
inline TemporalGraph grid_to_graph(const GridState& g, int width, int height) {
  TemporalGraph out;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y * width + x);
      if (!g[idx]) continue;
      out.nodes.push_back(std::to_string(idx));
      // connect to live neighbors that precede (x, y) in row-major order
      for (int dy = -1; dy <= 0; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dy == 0 && dx >= 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny * width + nx);
          if (g[nidx])
            out.add_edge(std::to_string(nidx), std::to_string(idx));
        }
    }
  out.canonicalize();
  return out;
}

/// Places the pattern uniformly at random among valid positions, then runs
/// `steps` updates. After each update every dead cell is activated with
/// probability noise_rate, and the noisy state both is recorded and feeds
/// the next update. Returns steps+1 snapshots, or steps when keep_initial
/// is false.
inline Trajectory generate_gol_trajectory(const GolParams& p,
                                          bool keep_initial = true,
                                          std::string id = "gol") {
  if (p.steps < 1) throw std::invalid_argument("GoL: steps must be >= 1");
  if (p.noise_rate < 0.0 || p.noise_rate > 1.0)
    throw std::invalid_argument("GoL: noise_rate must lie in [0, 1]");
  const auto& cells = pattern_cells(p.pattern);
  int bw = 0, bh = 0;
  for (const auto& [x, y] : cells) {
    bw = std::max(bw, x + 1);
    bh = std::max(bh, y + 1);
  }
  if (bw > p.width || bh > p.height)
    throw std::invalid_argument("GoL: pattern '" + pattern_name(p.pattern) +
                                "' does not fit a " + std::to_string(p.width) +
                                "x" + std::to_string(p.height) + " grid");
  Rng rng(p.seed);
  const int px = static_cast<int>(rng.index(
      static_cast<std::size_t>(p.width - bw + 1)));
  const int py = static_cast<int>(rng.index(
      static_cast<std::size_t>(p.height - bh + 1)));

  GridState state(static_cast<std::size_t>(p.width * p.height), 0);
  for (const auto& [x, y] : cells)
    state[static_cast<std::size_t>((py + y) * p.width + (px + x))] = 1;

  Trajectory traj;
  traj.id = std::move(id);
  if (keep_initial)
    traj.snapshots.push_back(grid_to_graph(state, p.width, p.height));
  for (int t = 0; t < p.steps; ++t) {
    state = gol_step(state, p.width, p.height);
    for (auto& cell : state)
      if (!cell && rng.bernoulli(p.noise_rate)) cell = 1;
    traj.snapshots.push_back(grid_to_graph(state, p.width, p.height));
  }
  return traj;
}

/// Trajectory i uses the i-th standard pattern, cycling through all six.
inline Dataset generate_gol_dataset(const GolParams& base, int n_trajectories,
                                    bool keep_initial, std::uint64_t seed) {
  if (n_trajectories < 1)
    throw std::invalid_argument("GoL: need at least one trajectory");
  Dataset d;
  const auto& patterns = all_gol_patterns();
  for (int i = 0; i < n_trajectories; ++i) {
    GolParams p = base;
    p.pattern = patterns[static_cast<std::size_t>(i) % patterns.size()];
    p.seed = Rng::derive(seed, static_cast<std::uint64_t>(i));
    d.trajectories.push_back(generate_gol_trajectory(
        p, keep_initial,
        "gol-" + std::to_string(i) + "-" + pattern_name(p.pattern)));
  }
  d.metadata = {{"generator", "game-of-life"},
                {"width", std::to_string(base.width)},
                {"height", std::to_string(base.height)},
                {"steps", std::to_string(base.steps)},
                {"noise_rate", std::to_string(base.noise_rate)},
                {"keep_initial", keep_initial ? "true" : "false"},
                {"trajectories", std::to_string(n_trajectories)},
                {"seed", std::to_string(seed)}};
  return d;
}

}  // namespace graphts
