// Synthetic graph generators used by the verification suites and tests.
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "spgc/graph.hpp"
#include "spgc/rng.hpp"

namespace spgc {

// Erdos-Renyi style random graph with random features, labels and a
// train/val/test split over all nodes.
inline Graph random_graph(std::uint64_t seed, std::size_t n, std::size_t c,
                          std::size_t n_classes, double edge_prob = 0.3) {
  Rng rng(seed);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.next_double() < edge_prob) edges.emplace_back(u, v);
  DenseMatrix x(n, c);
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
  std::vector<int> y(n);
  for (std::size_t v = 0; v < n; ++v)
    y[v] = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n_classes));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[rng.next_u64() % i]);
  const std::size_t third = std::max<std::size_t>(1, n / 3);
  std::vector<std::size_t> train(order.begin(), order.begin() + third);
  std::vector<std::size_t> val(order.begin() + third, order.begin() + 2 * third);
  std::vector<std::size_t> test(order.begin() + 2 * third, order.end());
  return make_graph(n, std::move(edges), std::move(x), std::move(y), std::move(train),
                    std::move(val), std::move(test));
}

// Two disconnected cliques with clique-indicator features; linearly separable
// by construction, so training should reach full accuracy everywhere.
inline Graph two_clique_graph(std::size_t per_clique = 10) {
  const std::size_t n = 2 * per_clique;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t clique = 0; clique < 2; ++clique) {
    const std::size_t base = clique * per_clique;
    for (std::size_t u = 0; u < per_clique; ++u)
      for (std::size_t v = u + 1; v < per_clique; ++v)
        edges.emplace_back(base + u, base + v);
  }
  DenseMatrix x(n, 2);
  std::vector<int> y(n);
  for (std::size_t v = 0; v < n; ++v) {
    const int clique = v < per_clique ? 0 : 1;
    x(v, static_cast<std::size_t>(clique)) = 1.0;
    y[v] = clique;
  }
  std::vector<std::size_t> train, val, test;
  for (std::size_t clique = 0; clique < 2; ++clique) {
    const std::size_t base = clique * per_clique;
    train.push_back(base + 0);
    train.push_back(base + 1);
    val.push_back(base + 2);
    val.push_back(base + 3);
    for (std::size_t v = 4; v < per_clique; ++v) test.push_back(base + v);
  }
  return make_graph(n, std::move(edges), std::move(x), std::move(y), std::move(train),
                    std::move(val), std::move(test));
}

}  // namespace spgc
