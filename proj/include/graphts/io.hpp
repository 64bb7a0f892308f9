#pragma once

#include <Eigen/Core>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphts/graph.hpp"

namespace graphts {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kDatasetFormatVersion = 1;

namespace detail {

inline nlohmann::json load_json_file(const std::string& path,
                                     const char* what) {
  std::ifstream in(path);
  if (!in)
    throw ParseError(std::string(what) + " '" + path + "': cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(what) + " '" + path + "': " + e.what());
  }
}

inline const nlohmann::json& require_key(const nlohmann::json& j,
                                         const char* key,
                                         const std::string& context) {
  if (!j.contains(key))
    throw ParseError(context + ": missing '" + std::string(key) + "' key");
  return j.at(key);
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << body;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace detail

inline nlohmann::json dataset_to_json(const Dataset& d) {
  nlohmann::json trajectories = nlohmann::json::array();
  for (const auto& traj : d.trajectories) {
    nlohmann::json snapshots = nlohmann::json::array();
    for (const auto& g : traj.snapshots) {
      nlohmann::json jg;
      jg["nodes"] = g.nodes;
      nlohmann::json edges = nlohmann::json::array();
      for (const auto& e : g.edges)
        edges.push_back(nlohmann::json::array({e.first, e.second}));
      jg["edges"] = std::move(edges);
      if (!g.labels.empty()) jg["labels"] = g.labels;
      snapshots.push_back(std::move(jg));
    }
    trajectories.push_back(
        {{"id", traj.id}, {"snapshots", std::move(snapshots)}});
  }
  return {{"format_version", kDatasetFormatVersion},
          {"metadata", d.metadata},
          {"trajectories", std::move(trajectories)}};
}

inline Dataset dataset_from_json(const nlohmann::json& j,
                                 const std::string& context) {
  const auto& version = detail::require_key(j, "format_version", context);
  if (!version.is_number_integer() ||
      version.get<int>() != kDatasetFormatVersion)
    throw ParseError(context + ": unsupported format_version " +
                     version.dump() + " (expected " +
                     std::to_string(kDatasetFormatVersion) + ")");
  Dataset d;
  if (j.contains("metadata"))
    d.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  const auto& trajectories = detail::require_key(j, "trajectories", context);
  if (!trajectories.is_array())
    throw ParseError(context + ": 'trajectories' must be an array");
  for (const auto& jt : trajectories) {
    Trajectory traj;
    traj.id = detail::require_key(jt, "id", context).get<std::string>();
    const std::string tctx = context + ", trajectory '" + traj.id + "'";
    for (const auto& jg : detail::require_key(jt, "snapshots", tctx)) {
      TemporalGraph g;
      g.nodes = detail::require_key(jg, "nodes", tctx)
                    .get<std::vector<std::string>>();
      for (const auto& je : detail::require_key(jg, "edges", tctx)) {
        if (!je.is_array() || je.size() != 2)
          throw ParseError(tctx + ": edge must be a 2-element array, got " +
                           je.dump());
        g.add_edge(je.at(0).get<std::string>(), je.at(1).get<std::string>());
      }
      g.canonicalize();
      if (jg.contains("labels"))
        g.labels =
            jg.at("labels").get<std::map<std::string, std::string>>();
      traj.snapshots.push_back(std::move(g));
    }
    d.trajectories.push_back(std::move(traj));
  }
  return d;
}

inline void save_dataset(const Dataset& d, const std::string& path) {
  detail::write_file(path, dataset_to_json(d).dump(2) + "\n");
}

inline Dataset load_dataset(const std::string& path) {
  return dataset_from_json(detail::load_json_file(path, "dataset file"),
                           "dataset file '" + path + "'");
}

inline void save_sequences(const std::vector<LabeledSequence>& seqs,
                           const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : seqs)
    arr.push_back({{"id", s.id}, {"tokens", s.tokens}});
  detail::write_file(path,
                     nlohmann::json{{"sequences", std::move(arr)}}.dump(2) +
                         "\n");
}

inline std::vector<LabeledSequence> load_sequences(const std::string& path) {
  const std::string context = "sequence file '" + path + "'";
  nlohmann::json j = detail::load_json_file(path, "sequence file");
  std::vector<LabeledSequence> out;
  for (const auto& js : detail::require_key(j, "sequences", context)) {
    LabeledSequence s;
    s.id = detail::require_key(js, "id", context).get<std::string>();
    s.tokens = detail::require_key(js, "tokens", context)
                   .get<std::vector<std::string>>();
    out.push_back(std::move(s));
  }
  return out;
}

// Matrix interchange format: comma-separated numeric grid, row-major, no
// header. Non-finite entries are rejected on write.
inline void save_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
  std::ostringstream body;
  body.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j)))
        throw std::runtime_error("matrix entry (" + std::to_string(i) + "," +
                                 std::to_string(j) +
                                 ") is not finite; refusing to persist");
      if (j) body << ',';
      body << m(i, j);
    }
    body << '\n';
  }
  detail::write_file(path, body.str());
}

inline Eigen::MatrixXd load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("matrix file '" + path + "': cannot open file");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("matrix file '" + path + "' line " +
                         std::to_string(lineno) + ": bad number '" + cell +
                         "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("matrix file '" + path + "' line " +
                       std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace graphts
