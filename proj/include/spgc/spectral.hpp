// Dense small-graph spectral machinery used as independent ground truth:
// cyclic Jacobi eigendecomposition, graph Fourier transform, spectral
// polynomial filtering, and the matrix exponential in the eigenbasis.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "spgc/dense.hpp"

namespace spgc {

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // ascending
  DenseMatrix eigenvectors;         // orthonormal columns, same order
};

// Cyclic Jacobi rotations on a symmetric matrix. Self-contained on purpose:
// the oracle must not share code with anything it verifies.
inline SpectralDecomposition dense_eigendecomposition(DenseMatrix a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("eigendecomposition: matrix not square");
  if (n > 2000) throw std::invalid_argument("eigendecomposition: oracle capped at n <= 2000");
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) asym = std::max(asym, std::fabs(a(i, j) - a(j, i)));
  if (asym > 1e-12) throw std::invalid_argument("eigendecomposition: matrix not symmetric");

  DenseMatrix u = DenseMatrix::identity(n);
  double frob0 = frobenius_norm(a);
  const double tol = 1e-12 * std::max(frob0, 1.0);
  const std::size_t max_sweeps = 100;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= tol) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const double urp = u(r, p), urq = u(r, q);
          u(r, p) = urp - s * (urq + tau * urp);
          u(r, q) = urq + s * (urp - tau * urq);
          if (r == p || r == q) continue;
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
          a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
        }
      }
    }
  }

  SpectralDecomposition dec;
  dec.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) dec.eigenvalues[i] = a(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&dec](std::size_t i, std::size_t j) { return dec.eigenvalues[i] < dec.eigenvalues[j]; });
  SpectralDecomposition sorted;
  sorted.eigenvalues.resize(n);
  sorted.eigenvectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    sorted.eigenvalues[j] = dec.eigenvalues[order[j]];
    for (std::size_t r = 0; r < n; ++r) sorted.eigenvectors(r, j) = u(r, order[j]);
  }
  return sorted;
}

// x_hat = U^T x.
inline DenseMatrix graph_fourier(const SpectralDecomposition& dec, const DenseMatrix& x) {
  return matmul_at_b(dec.eigenvectors, x);
}

// x = U x_hat.
inline DenseMatrix inverse_graph_fourier(const SpectralDecomposition& dec, const DenseMatrix& coeffs) {
  return matmul(dec.eigenvectors, coeffs);
}

// U diag(sum_i theta_i lambda^i) U^T x.
inline DenseMatrix spectral_polynomial_filter(const SpectralDecomposition& dec,
                                              const std::vector<double>& theta, const DenseMatrix& x) {
  DenseMatrix xhat = graph_fourier(dec, x);
  for (std::size_t r = 0; r < xhat.rows(); ++r) {
    // Horner evaluation of the filter at eigenvalue r.
    double f = 0.0;
    for (std::size_t i = theta.size(); i-- > 0;) f = f * dec.eigenvalues[r] + theta[i];
    for (std::size_t j = 0; j < xhat.cols(); ++j) xhat(r, j) *= f;
  }
  return inverse_graph_fourier(dec, xhat);
}

// U diag(exp(beta * lambda)) U^T.
inline DenseMatrix dense_matrix_exponential(const SpectralDecomposition& dec, double beta) {
  const std::size_t n = dec.eigenvalues.size();
  DenseMatrix scaled = dec.eigenvectors;  // columns scaled by exp(beta lambda)
  for (std::size_t j = 0; j < n; ++j) {
    const double e = std::exp(beta * dec.eigenvalues[j]);
    for (std::size_t r = 0; r < n; ++r) scaled(r, j) *= e;
  }
  return matmul_a_bt(scaled, dec.eigenvectors);
}

// Spectral norm (largest singular value) of a dense rectangular matrix via
// the eigendecomposition of G^T G.
inline double dense_spectral_norm(const DenseMatrix& g) {
  const DenseMatrix gram = matmul_at_b(g, g);
  const SpectralDecomposition dec = dense_eigendecomposition(gram);
  const double lmax = dec.eigenvalues.empty() ? 0.0 : dec.eigenvalues.back();
  return std::sqrt(std::max(lmax, 0.0));
}

}  // namespace spgc
