// Dataset bundle ingestion. A bundle is a directory with five plain-text
// files: edges.tsv, features.csv, labels.txt, splits.json, meta.json.
#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spgc/graph.hpp"
#include "spgc/textio.hpp"

namespace spgc {

struct DatasetBundle {
  std::string name;
  Graph graph;
  int class_count = 0;
  std::string provenance;
};

namespace detail {
inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("missing file: " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline std::vector<std::size_t> parse_index_array(const nlohmann::json& j, const char* key,
                                                  std::size_t n) {
  if (!j.contains(key)) throw std::runtime_error(std::string("splits.json missing key: ") + key);
  std::vector<std::size_t> out;
  for (const auto& e : j.at(key)) {
    const long long v = e.get<long long>();
    if (v < 0 || static_cast<std::size_t>(v) >= n)
      throw std::runtime_error(std::string(key) + " split index out of range: " + std::to_string(v));
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}
}  // namespace detail

inline DatasetBundle load_dataset(const std::string& dir_path) {
  namespace fs = std::filesystem;
  const fs::path dir(dir_path);

  const auto meta = nlohmann::json::parse(detail::read_file(dir / "meta.json"));
  DatasetBundle bundle;
  bundle.name = meta.at("name").get<std::string>();
  const std::size_t n = meta.at("n").get<std::size_t>();
  const std::size_t c = meta.at("c").get<std::size_t>();
  bundle.class_count = meta.at("C").get<int>();
  if (meta.contains("provenance")) bundle.provenance = meta.at("provenance").get<std::string>();
  if (n > 250000)
    throw std::runtime_error("dataset has " + std::to_string(n) +
                             " nodes; graphs beyond desk scale are out of scope for this loader");

  // features.csv: n rows of c comma-separated reals
  DenseMatrix x(n, c);
  {
    const std::string text = detail::read_file(dir / "features.csv");
    std::size_t row = 0;
    for (std::string_view line : split(text, '\n')) {
      line = trim(line);
      if (line.empty()) continue;
      if (row >= n) throw std::runtime_error("features.csv row count exceeds meta n");
      const auto cells = split(line, ',');
      if (cells.size() != c)
        throw std::runtime_error("features.csv row " + std::to_string(row) + " has " +
                                 std::to_string(cells.size()) + " columns, expected " +
                                 std::to_string(c));
      for (std::size_t j = 0; j < c; ++j) x(row, j) = parse_double(trim(cells[j]));
      ++row;
    }
    if (row != n)
      throw std::runtime_error("features.csv has " + std::to_string(row) + " rows, meta says " +
                               std::to_string(n));
  }

  // labels.txt: n integers in [0, C)
  std::vector<int> y;
  {
    const std::string text = detail::read_file(dir / "labels.txt");
    for (std::string_view line : split(text, '\n')) {
      line = trim(line);
      if (line.empty()) continue;
      const long long v = parse_int(line);
      if (v < 0 || v >= bundle.class_count)
        throw std::runtime_error("label out of range [0, C): " + std::to_string(v));
      y.push_back(static_cast<int>(v));
    }
    if (y.size() != n)
      throw std::runtime_error("labels.txt has " + std::to_string(y.size()) +
                               " entries, meta says " + std::to_string(n));
  }

  // edges.tsv: one "u<TAB>v" pair per line, 0-indexed
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  {
    const std::string text = detail::read_file(dir / "edges.tsv");
    for (std::string_view line : split(text, '\n')) {
      line = trim(line);
      if (line.empty()) continue;
      const auto cells = split(line, '\t');
      if (cells.size() != 2) throw std::runtime_error("edges.tsv line is not 'u<TAB>v': " + std::string(line));
      const long long u = parse_int(trim(cells[0]));
      const long long v = parse_int(trim(cells[1]));
      if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
        throw std::runtime_error("edge endpoint out of range: " + std::string(line));
      edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    }
  }

  const auto splits = nlohmann::json::parse(detail::read_file(dir / "splits.json"));
  auto train = detail::parse_index_array(splits, "train", n);
  auto val = detail::parse_index_array(splits, "val", n);
  auto test = detail::parse_index_array(splits, "test", n);

  bundle.graph = make_graph(n, std::move(edges), std::move(x), std::move(y), std::move(train),
                            std::move(val), std::move(test));
  if (bundle.graph.num_classes() > bundle.class_count)
    throw std::runtime_error("labels exceed meta class count");
  return bundle;
}

// Writes the bundle back out in the same five-file schema (UTF-8, LF,
// shortest-roundtrip reals). load -> save -> load is a deep-equality round trip.
inline void save_dataset(const DatasetBundle& bundle, const std::string& dir_path) {
  namespace fs = std::filesystem;
  const fs::path dir(dir_path);
  fs::create_directories(dir);
  const Graph& g = bundle.graph;

  {
    nlohmann::json meta;
    meta["name"] = bundle.name;
    meta["n"] = g.n;
    meta["c"] = g.feature_dim();
    meta["C"] = bundle.class_count;
    if (!bundle.provenance.empty()) meta["provenance"] = bundle.provenance;
    std::ofstream os(dir / "meta.json", std::ios::binary | std::ios::trunc);
    os << meta.dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "features.csv", std::ios::binary | std::ios::trunc);
    for (std::size_t r = 0; r < g.n; ++r) {
      for (std::size_t j = 0; j < g.feature_dim(); ++j) {
        if (j) os << ',';
        os << format_double(g.X(r, j));
      }
      os << '\n';
    }
  }
  {
    std::ofstream os(dir / "labels.txt", std::ios::binary | std::ios::trunc);
    for (int label : g.y) os << label << '\n';
  }
  {
    std::ofstream os(dir / "edges.tsv", std::ios::binary | std::ios::trunc);
    for (auto [u, v] : g.edges) os << u << '\t' << v << '\n';
  }
  {
    nlohmann::json splits;
    splits["train"] = g.train_mask;
    splits["val"] = g.val_mask;
    splits["test"] = g.test_mask;
    std::ofstream os(dir / "splits.json", std::ios::binary | std::ios::trunc);
    os << splits.dump(2) << '\n';
  }
}

struct BundleDiagnostics {
  std::size_t isolated_nodes = 0;
  double feature_sparsity = 0.0;  // fraction of zero feature entries
  std::vector<std::size_t> train_per_class;
  std::vector<std::size_t> val_per_class;
  std::vector<std::size_t> test_per_class;
  std::vector<std::string> warnings;
};

inline BundleDiagnostics validate_bundle(const DatasetBundle& bundle) {
  const Graph& g = bundle.graph;
  BundleDiagnostics d;
  std::vector<std::size_t> degree(g.n, 0);
  for (auto [u, v] : g.edges) {
    ++degree[u];
    ++degree[v];
  }
  for (std::size_t v = 0; v < g.n; ++v)
    if (degree[v] == 0) ++d.isolated_nodes;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < g.X.size(); ++i)
    if (g.X.data()[i] == 0.0) ++zeros;
  d.feature_sparsity = g.X.size() ? static_cast<double>(zeros) / static_cast<double>(g.X.size()) : 0.0;
  const std::size_t n_classes = static_cast<std::size_t>(bundle.class_count);
  d.train_per_class.assign(n_classes, 0);
  d.val_per_class.assign(n_classes, 0);
  d.test_per_class.assign(n_classes, 0);
  for (std::size_t v : g.train_mask) ++d.train_per_class[static_cast<std::size_t>(g.y[v])];
  for (std::size_t v : g.val_mask) ++d.val_per_class[static_cast<std::size_t>(g.y[v])];
  for (std::size_t v : g.test_mask) ++d.test_per_class[static_cast<std::size_t>(g.y[v])];
  if (d.isolated_nodes > 0)
    d.warnings.push_back(std::to_string(d.isolated_nodes) + " isolated node(s); they propagate nothing");
  for (std::size_t cls = 0; cls < n_classes; ++cls)
    if (d.train_per_class[cls] == 0)
      d.warnings.push_back("class " + std::to_string(cls) + " has no training examples");
  return d;
}

}  // namespace spgc
