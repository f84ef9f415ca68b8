// Diffusion cache: the precomputed sequence P^0 X ... P^k X for a chosen
// propagation operator. Training never multiplies by a sparse matrix; every
// model reads hops from a cache built once per (operator, k).
#pragma once

#include <atomic>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spgc/graph.hpp"
#include "spgc/sparse.hpp"

namespace spgc {

enum class OperatorKind : std::uint8_t {
  laplacian = 0,
  renormalized_adjacency = 1,
  normalized_adjacency = 2,
};

inline const char* operator_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::laplacian: return "laplacian";
    case OperatorKind::renormalized_adjacency: return "renormalized_adjacency";
    case OperatorKind::normalized_adjacency: return "normalized_adjacency";
  }
  return "unknown";
}

inline OperatorKind operator_from_name(const std::string& s) {
  if (s == "laplacian") return OperatorKind::laplacian;
  if (s == "renormalized_adjacency") return OperatorKind::renormalized_adjacency;
  if (s == "normalized_adjacency") return OperatorKind::normalized_adjacency;
  throw std::invalid_argument("unknown propagation operator: " + s);
}

struct PropagationOperator {
  OperatorKind kind = OperatorKind::laplacian;
  SparseMatrix matrix;
};

inline PropagationOperator make_operator(const Graph& g, OperatorKind kind) {
  PropagationOperator p;
  p.kind = kind;
  switch (kind) {
    case OperatorKind::laplacian: p.matrix = normalized_laplacian(g); break;
    case OperatorKind::renormalized_adjacency: p.matrix = renormalized_adjacency(g); break;
    case OperatorKind::normalized_adjacency: p.matrix = normalized_adjacency(g); break;
  }
  return p;
}

struct DiffusionCache {
  OperatorKind operator_kind = OperatorKind::laplacian;
  std::size_t k = 0;
  std::size_t feature_dim = 0;
  std::vector<DenseMatrix> terms;  // terms[i] = P^i X, k+1 entries

  std::size_t n() const { return terms.empty() ? 0 : terms[0].rows(); }
};

// Counts cache constructions; grid search must build one cache per distinct
// (operator, k), not one per cell.
inline std::atomic<std::uint64_t>& cache_build_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

inline DiffusionCache build_diffusion_cache(const PropagationOperator& p, const DenseMatrix& x,
                                            std::size_t k) {
  if (p.matrix.n_rows != p.matrix.n_cols) throw std::invalid_argument("operator matrix not square");
  if (p.matrix.n_cols != x.rows()) throw std::invalid_argument("operator/features dimension mismatch");
  cache_build_counter().fetch_add(1, std::memory_order_relaxed);
  DiffusionCache cache;
  cache.operator_kind = p.kind;
  cache.k = k;
  cache.feature_dim = x.cols();
  cache.terms.reserve(k + 1);
  cache.terms.push_back(x);
  for (std::size_t i = 1; i <= k; ++i) cache.terms.push_back(spmm(p.matrix, cache.terms.back()));
  return cache;
}

inline const DenseMatrix& propagated(const DiffusionCache& cache, std::size_t i) {
  if (i > cache.k) throw std::out_of_range("propagated: hop index exceeds cache depth");
  return cache.terms[i];
}

// --- cache file format: magic "SPGC1", operator kind, n, c, k, then k+1
// row-major double matrices. Bit-exact round trip.

namespace detail {
template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("binary file truncated");
}
}  // namespace detail

inline void save_cache(const DiffusionCache& cache, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open cache file for writing: " + path);
  os.write("SPGC1", 5);
  detail::write_pod(os, static_cast<std::uint8_t>(cache.operator_kind));
  detail::write_pod(os, static_cast<std::uint64_t>(cache.n()));
  detail::write_pod(os, static_cast<std::uint64_t>(cache.feature_dim));
  detail::write_pod(os, static_cast<std::uint64_t>(cache.k));
  for (const auto& t : cache.terms)
    os.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (!os) throw std::runtime_error("cache write failed: " + path);
}

inline DiffusionCache load_cache(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open cache file: " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, "SPGC1", 5) != 0)
    throw std::runtime_error("not a diffusion cache file: " + path);
  std::uint8_t kind;
  std::uint64_t n, c, k;
  detail::read_pod(is, kind);
  detail::read_pod(is, n);
  detail::read_pod(is, c);
  detail::read_pod(is, k);
  if (kind > 2) throw std::runtime_error("cache file has unknown operator kind");
  DiffusionCache cache;
  cache.operator_kind = static_cast<OperatorKind>(kind);
  cache.k = static_cast<std::size_t>(k);
  cache.feature_dim = static_cast<std::size_t>(c);
  cache.terms.reserve(cache.k + 1);
  for (std::size_t i = 0; i <= cache.k; ++i) {
    DenseMatrix t(static_cast<std::size_t>(n), static_cast<std::size_t>(c));
    is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!is) throw std::runtime_error("cache file truncated: " + path);
    cache.terms.push_back(std::move(t));
  }
  return cache;
}

}  // namespace spgc
