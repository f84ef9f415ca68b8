// Compressed sparse row matrix, the sparse-dense product that backs every
// diffusion step, and the two matrix norms used by the generalization bounds.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "spgc/dense.hpp"
#include "spgc/rng.hpp"

namespace spgc {

// Counts every sparse-dense product. Training epochs must not increase it:
// all sparse work belongs to cache construction.
inline std::atomic<std::uint64_t>& spmm_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

struct SparseMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets;  // length n_rows + 1
  std::vector<std::size_t> col_indices;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
};

// Canonical CSR from (row, col, value) triplets: sorted columns within each
// row, duplicates summed, explicit zeros dropped.
inline SparseMatrix sparse_from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::vector<std::tuple<std::size_t, std::size_t, double>> t) {
  for (const auto& [r, c, v] : t) {
    (void)v;
    if (r >= n_rows || c >= n_cols) throw std::invalid_argument("triplet index out of range");
  }
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  SparseMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_offsets.assign(n_rows + 1, 0);
  std::size_t i = 0;
  for (std::size_t r = 0; r < n_rows; ++r) {
    while (i < t.size() && std::get<0>(t[i]) == r) {
      const std::size_t c = std::get<1>(t[i]);
      double v = 0.0;
      while (i < t.size() && std::get<0>(t[i]) == r && std::get<1>(t[i]) == c) {
        v += std::get<2>(t[i]);
        ++i;
      }
      if (v != 0.0) {
        m.col_indices.push_back(c);
        m.values.push_back(v);
      }
    }
    m.row_offsets[r + 1] = m.col_indices.size();
  }
  return m;
}

// Sparse-dense product with a fixed row-major accumulation order, so results
// are bitwise reproducible.
inline DenseMatrix spmm(const SparseMatrix& m, const DenseMatrix& x) {
  if (m.n_cols != x.rows()) throw std::invalid_argument("spmm: dimension mismatch");
  spmm_counter().fetch_add(1, std::memory_order_relaxed);
  DenseMatrix y(m.n_rows, x.cols());
  for (std::size_t r = 0; r < m.n_rows; ++r) {
    double* yr = y.row(r);
    for (std::size_t idx = m.row_offsets[r]; idx < m.row_offsets[r + 1]; ++idx) {
      const double v = m.values[idx];
      const double* xr = x.row(m.col_indices[idx]);
      for (std::size_t j = 0; j < x.cols(); ++j) yr[j] += v * xr[j];
    }
  }
  return y;
}

// Maximum column sum of absolute values.
inline double matrix_one_norm(const SparseMatrix& m) {
  std::vector<double> col_sum(m.n_cols, 0.0);
  for (std::size_t i = 0; i < m.nnz(); ++i) col_sum[m.col_indices[i]] += std::fabs(m.values[i]);
  double best = 0.0;
  for (double s : col_sum) best = std::max(best, s);
  return best;
}

inline DenseMatrix to_dense(const SparseMatrix& m) {
  DenseMatrix d(m.n_rows, m.n_cols);
  for (std::size_t r = 0; r < m.n_rows; ++r)
    for (std::size_t idx = m.row_offsets[r]; idx < m.row_offsets[r + 1]; ++idx)
      d(r, m.col_indices[idx]) = m.values[idx];
  return d;
}

inline bool is_symmetric(const SparseMatrix& m, double tol = 0.0) {
  if (m.n_rows != m.n_cols) return false;
  const DenseMatrix d = to_dense(m);
  for (std::size_t i = 0; i < m.n_rows; ++i)
    for (std::size_t j = i + 1; j < m.n_cols; ++j)
      if (std::fabs(d(i, j) - d(j, i)) > tol) return false;
  return true;
}

struct SpectralNormEstimate {
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

// Power iteration for the largest absolute eigenvalue of a symmetric matrix.
inline SpectralNormEstimate spectral_norm_estimate(const SparseMatrix& m, std::size_t iters,
                                                   std::uint64_t seed) {
  if (m.n_rows != m.n_cols) throw std::invalid_argument("spectral_norm_estimate: not square");
  const std::size_t n = m.n_rows;
  SpectralNormEstimate est;
  if (n == 0) {
    est.converged = true;
    return est;
  }
  Rng rng(seed);
  DenseMatrix v(n, 1);
  for (std::size_t i = 0; i < n; ++i) v(i, 0) = rng.uniform(-1.0, 1.0);
  double prev = 0.0;
  for (std::size_t it = 1; it <= iters; ++it) {
    DenseMatrix w = spmm(m, v);
    double norm = frobenius_norm(w);
    if (norm == 0.0) {  // v in the null space; the whole estimate is 0
      est.value = 0.0;
      est.converged = true;
      est.iterations = it;
      return est;
    }
    for (std::size_t i = 0; i < n; ++i) v(i, 0) = w(i, 0) / norm;
    est.value = norm;
    est.iterations = it;
    if (it > 1 && std::fabs(norm - prev) <= 1e-9 * std::max(1.0, std::fabs(norm))) {
      est.converged = true;
      return est;
    }
    prev = norm;
  }
  return est;
}

}  // namespace spgc
