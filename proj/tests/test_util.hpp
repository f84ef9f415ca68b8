// Shared helpers for the test suites: tiny fixture graphs, dense brute-force
// oracles, and a finite-difference gradient checker.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "spgc/dense.hpp"
#include "spgc/graph.hpp"
#include "spgc/models.hpp"
#include "spgc/propagation.hpp"
#include "spgc/rng.hpp"
#include "spgc/synthetic.hpp"
#include "spgc/training.hpp"

namespace spgc::test {

inline Graph triangle_graph() {
  DenseMatrix x(3, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 1.0;
  x(2, 0) = 0.5;
  x(2, 1) = 0.5;
  return make_graph(3, {{0, 1}, {1, 2}, {2, 0}}, x, {0, 1, 0}, {0}, {1}, {2});
}

inline Graph path_graph(std::size_t n) {
  DenseMatrix x(n, 1);
  for (std::size_t i = 0; i < n; ++i) x(i, 0) = static_cast<double>(i);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  std::vector<int> y(n, 0);
  return make_graph(n, std::move(edges), x, std::move(y), {0}, {1}, {n - 1});
}

inline Graph edgeless_graph(std::size_t n) {
  DenseMatrix x(n, 1);
  std::vector<int> y(n, 0);
  return make_graph(n, {}, x, std::move(y), {0}, {}, {});
}

// Dense A^i X computed entirely through the dense routines.
inline DenseMatrix dense_power_times(const DenseMatrix& a, std::size_t power, const DenseMatrix& x) {
  DenseMatrix r = x;
  for (std::size_t i = 0; i < power; ++i) r = matmul(a, r);
  return r;
}

inline DenseMatrix random_dense(std::uint64_t seed, std::size_t rows, std::size_t cols,
                                double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

// Mutable views over every trainable scalar of a parameter set, in a fixed
// order matched by gradient_values below.
inline std::vector<double*> trainable_entries(ModelParams& p) {
  std::vector<double*> out;
  for (std::size_t i = 0; i < p.theta.size(); ++i) out.push_back(p.theta.data() + i);
  if (p.variant == Variant::EGC) out.push_back(&p.beta);
  if (p.variant == Variant::LGC || p.variant == Variant::HLGC)
    for (double& a : p.alpha) out.push_back(&a);
  if (p.variant == Variant::HLGC)
    for (auto& gate : p.gates) {
      for (std::size_t i = 0; i < gate.w1.size(); ++i) out.push_back(gate.w1.data() + i);
      for (std::size_t i = 0; i < gate.w2.size(); ++i) out.push_back(gate.w2.data() + i);
    }
  return out;
}

inline std::vector<double> gradient_values(const ModelParams& p, const Gradients& g) {
  std::vector<double> out;
  for (std::size_t i = 0; i < g.theta.size(); ++i) out.push_back(g.theta.data()[i]);
  if (p.variant == Variant::EGC) out.push_back(g.beta);
  if (p.variant == Variant::LGC || p.variant == Variant::HLGC)
    for (double a : g.alpha) out.push_back(a);
  if (p.variant == Variant::HLGC)
    for (const auto& gate : g.gates) {
      for (std::size_t i = 0; i < gate.w1.size(); ++i) out.push_back(gate.w1.data()[i]);
      for (std::size_t i = 0; i < gate.w2.size(); ++i) out.push_back(gate.w2.data()[i]);
    }
  return out;
}

struct GradCheckResult {
  std::size_t entries = 0;
  std::size_t failures = 0;
  double worst_rel = 0.0;
};

// Central finite differences (h = 1e-6) against the analytic gradients of
// masked mean cross-entropy. Entries below 1e-8 in magnitude are compared
// absolutely at 1e-10.
inline GradCheckResult finite_difference_check(Variant variant, const DiffusionCache& cache,
                                               const Graph& graph, ModelParams params) {
  const auto loss_of = [&](const ModelParams& p) {
    const ForwardTrace t = forward(cache, p);
    return cross_entropy(t.probs, graph.y, graph.train_mask);
  };
  const ForwardTrace trace = forward(cache, params);
  const Gradients grads = gradients(trace, cache, params, graph.y, graph.train_mask);
  const std::vector<double> analytic = gradient_values(params, grads);
  const std::vector<double*> entries = trainable_entries(params);

  GradCheckResult res;
  res.entries = entries.size();
  const double h = 1e-6;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double saved = *entries[i];
    *entries[i] = saved + h;
    const double up = loss_of(params);
    *entries[i] = saved - h;
    const double down = loss_of(params);
    *entries[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[i];
    // Relative comparison at 1e-5; near-zero entries (where central
    // differences are dominated by cancellation noise ~ eps*loss/h ~ 1e-10)
    // fall back to the absolute tolerance.
    const double diff = std::fabs(a - numeric);
    const double scale = std::max(std::fabs(a), std::fabs(numeric));
    bool ok = diff <= 1e-10;
    if (!ok) {
      const double rel = diff / scale;
      res.worst_rel = std::max(res.worst_rel, rel);
      ok = rel <= 1e-5;
    }
    if (!ok) ++res.failures;
  }
  return res;
}

// Random parameters at a generic point (away from the saddle at theta = 0).
inline ModelParams random_params(Variant variant, std::size_t k, std::size_t c,
                                 std::size_t n_classes, std::uint64_t seed) {
  ModelParams p = init_params(variant, k, c, n_classes, seed);
  Rng rng(hash64(seed, 77, 0));
  for (double* e : trainable_entries(p)) *e = rng.uniform(-1.0, 1.0);
  return p;
}

}  // namespace spgc::test
