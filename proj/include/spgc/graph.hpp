// Undirected graph with node features, labels and split masks, plus the
// propagation operators derived from its adjacency matrix.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spgc/dense.hpp"
#include "spgc/sparse.hpp"

namespace spgc {

struct Graph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // u < v, deduplicated, no self-loops
  DenseMatrix X;                                           // n x c node features
  std::vector<int> y;                                      // length n, values in [0, C)
  std::vector<std::size_t> train_mask;
  std::vector<std::size_t> val_mask;
  std::vector<std::size_t> test_mask;

  std::size_t feature_dim() const { return X.cols(); }
  int num_classes() const {
    int c = 0;
    for (int label : y) c = std::max(c, label + 1);
    return c;
  }
};

namespace detail {
inline void check_mask(const Graph& g, const std::vector<std::size_t>& mask, const char* name) {
  for (std::size_t v : mask) {
    if (v >= g.n) throw std::invalid_argument(std::string(name) + " mask index out of range");
    if (g.y[v] < 0) throw std::invalid_argument(std::string(name) + " mask node has no label");
  }
}
}  // namespace detail

// Canonicalizes raw edges (symmetrize, deduplicate, drop self-loops) and
// validates masks and labels.
inline Graph make_graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> raw_edges,
                        DenseMatrix x, std::vector<int> y, std::vector<std::size_t> train,
                        std::vector<std::size_t> val, std::vector<std::size_t> test) {
  if (x.rows() != n) throw std::invalid_argument("make_graph: feature row count != n");
  if (y.size() != n) throw std::invalid_argument("make_graph: label count != n");
  Graph g;
  g.n = n;
  for (auto [u, v] : raw_edges) {
    if (u >= n || v >= n) throw std::invalid_argument("make_graph: edge endpoint out of range");
    if (u == v) continue;
    g.edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.X = std::move(x);
  g.y = std::move(y);
  g.train_mask = std::move(train);
  g.val_mask = std::move(val);
  g.test_mask = std::move(test);
  detail::check_mask(g, g.train_mask, "train");
  detail::check_mask(g, g.val_mask, "val");
  detail::check_mask(g, g.test_mask, "test");
  std::vector<char> seen(n, 0);
  for (const auto* mask : {&g.train_mask, &g.val_mask, &g.test_mask})
    for (std::size_t v : *mask) {
      if (seen[v]) throw std::invalid_argument("make_graph: masks overlap at node " + std::to_string(v));
      seen[v] = 1;
    }
  return g;
}

inline SparseMatrix adjacency(const Graph& g) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(2 * g.edges.size());
  for (auto [u, v] : g.edges) {
    t.emplace_back(u, v, 1.0);
    t.emplace_back(v, u, 1.0);
  }
  return sparse_from_triplets(g.n, g.n, std::move(t));
}

namespace detail {
inline std::vector<double> degrees(const Graph& g) {
  std::vector<double> d(g.n, 0.0);
  for (auto [u, v] : g.edges) {
    d[u] += 1.0;
    d[v] += 1.0;
  }
  return d;
}
// 1/sqrt(d_u d_v) with the pseudo-inverse convention for zero degree.
// Computed from the product (not as two separate rsqrt factors) so that
// hand-checkable entries like 1/sqrt(4) come out exact.
inline double norm_weight(double du, double dv) {
  return (du > 0.0 && dv > 0.0) ? 1.0 / std::sqrt(du * dv) : 0.0;
}
}  // namespace detail

// D^(-1/2) A D^(-1/2); rows of isolated nodes are zero.
inline SparseMatrix normalized_adjacency(const Graph& g) {
  const auto d = detail::degrees(g);
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(2 * g.edges.size());
  for (auto [u, v] : g.edges) {
    const double w = detail::norm_weight(d[u], d[v]);
    t.emplace_back(u, v, w);
    t.emplace_back(v, u, w);
  }
  return sparse_from_triplets(g.n, g.n, std::move(t));
}

// L = I - D^(-1/2) A D^(-1/2); the row of an isolated node is an identity row.
inline SparseMatrix normalized_laplacian(const Graph& g) {
  const auto d = detail::degrees(g);
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(2 * g.edges.size() + g.n);
  for (std::size_t i = 0; i < g.n; ++i) t.emplace_back(i, i, 1.0);
  for (auto [u, v] : g.edges) {
    const double w = -detail::norm_weight(d[u], d[v]);
    t.emplace_back(u, v, w);
    t.emplace_back(v, u, w);
  }
  return sparse_from_triplets(g.n, g.n, std::move(t));
}

// S = D~^(-1/2) (A + I) D~^(-1/2) with D~ the degree matrix of A + I.
inline SparseMatrix renormalized_adjacency(const Graph& g) {
  auto d = detail::degrees(g);
  for (double& di : d) di += 1.0;
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(2 * g.edges.size() + g.n);
  for (std::size_t i = 0; i < g.n; ++i) t.emplace_back(i, i, 1.0 / d[i]);
  for (auto [u, v] : g.edges) {
    const double w = detail::norm_weight(d[u], d[v]);
    t.emplace_back(u, v, w);
    t.emplace_back(v, u, w);
  }
  return sparse_from_triplets(g.n, g.n, std::move(t));
}

}  // namespace spgc
