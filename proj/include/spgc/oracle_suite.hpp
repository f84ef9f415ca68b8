// Randomized verification suites tying the sparse/spatial implementation to
// the dense spectral oracle: filter equivalence, EGC truncation bound, and
// empirical vs theoretical Rademacher complexity.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spgc/bounds.hpp"
#include "spgc/graph.hpp"
#include "spgc/propagation.hpp"
#include "spgc/rng.hpp"
#include "spgc/spectral.hpp"
#include "spgc/synthetic.hpp"

namespace spgc {

struct SpectralEquivalenceResult {
  std::size_t graphs = 0;
  double max_filter_residual = 0.0;      // spectral vs graph-domain filter
  double max_orthonormality_residual = 0.0;
  double max_reconstruction_residual = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  std::size_t violations = 0;
};

// Polynomial filtering in the eigenbasis must match the hop-domain sum of
// sparse products on random graphs (n <= 50, k <= 5) to 1e-10.
inline SpectralEquivalenceResult spectral_equivalence_suite(std::uint64_t seed,
                                                            std::size_t n_graphs = 50) {
  SpectralEquivalenceResult res;
  res.graphs = n_graphs;
  res.min_eigenvalue = 1e300;
  res.max_eigenvalue = -1e300;
  for (std::size_t g = 0; g < n_graphs; ++g) {
    Rng rng(hash64(seed, 0x73706563ULL, g));
    const std::size_t n = 5 + rng.next_u64() % 46;  // 5..50
    const Graph graph = random_graph(hash64(seed, g, 1), n, 1, 2, 0.25);
    const SparseMatrix lap = normalized_laplacian(graph);
    const SpectralDecomposition dec = dense_eigendecomposition(to_dense(lap));

    for (double lambda : dec.eigenvalues) {
      res.min_eigenvalue = std::min(res.min_eigenvalue, lambda);
      res.max_eigenvalue = std::max(res.max_eigenvalue, lambda);
    }
    const DenseMatrix utu = matmul_at_b(dec.eigenvectors, dec.eigenvectors);
    res.max_orthonormality_residual =
        std::max(res.max_orthonormality_residual, max_abs_diff(utu, DenseMatrix::identity(n)));
    DenseMatrix scaled = dec.eigenvectors;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < n; ++r) scaled(r, j) *= dec.eigenvalues[j];
    res.max_reconstruction_residual = std::max(
        res.max_reconstruction_residual, max_abs_diff(matmul_a_bt(scaled, dec.eigenvectors), to_dense(lap)));

    const std::size_t k = 1 + rng.next_u64() % 5;  // 1..5
    std::vector<double> theta(k + 1);
    for (double& t : theta) t = rng.uniform(-1.0, 1.0);
    DenseMatrix x(n, 1);
    for (std::size_t i = 0; i < n; ++i) x(i, 0) = rng.uniform(-1.0, 1.0);

    const DenseMatrix spectral = spectral_polynomial_filter(dec, theta, x);
    // Graph-domain route through the sparse implementation.
    DenseMatrix spatial(n, 1);
    DenseMatrix power = x;
    for (std::size_t i = 0; i <= k; ++i) {
      if (i > 0) power = spmm(lap, power);
      add_scaled(spatial, theta[i], power);
    }
    const double resid = max_abs_diff(spectral, spatial);
    res.max_filter_residual = std::max(res.max_filter_residual, resid);
    if (resid > 1e-10) ++res.violations;
    if (res.max_orthonormality_residual > 1e-10 || res.max_reconstruction_residual > 1e-9)
      ++res.violations;
    if (res.min_eigenvalue < -1e-9 || res.max_eigenvalue > 2.0 + 1e-9) ++res.violations;
  }
  return res;
}

struct TruncationResult {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double max_gap_over_bound = 0.0;  // worst measured gap / bound ratio
};

// Measured ||e^{beta L} X Theta - H^(k)|| (dense oracle, spectral norm) must
// stay below the truncation bound for beta in {0.5, 1} and k in 2..10.
inline TruncationResult truncation_suite(std::uint64_t seed, std::size_t n_graphs = 8) {
  TruncationResult res;
  for (std::size_t g = 0; g < n_graphs; ++g) {
    Rng rng(hash64(seed, 0x7472756eULL, g));
    const std::size_t n = 5 + rng.next_u64() % 16;  // 5..20
    const Graph graph = random_graph(hash64(seed, g, 2), n, 3, 2, 0.3);
    const SparseMatrix lap = normalized_laplacian(graph);
    const SpectralDecomposition dec = dense_eigendecomposition(to_dense(lap));
    double spec_norm = 0.0;
    for (double lambda : dec.eigenvalues) spec_norm = std::max(spec_norm, std::fabs(lambda));

    DenseMatrix theta(3, 2);
    for (std::size_t i = 0; i < theta.size(); ++i) theta.data()[i] = rng.uniform(-1.0, 1.0);
    const DenseMatrix xtheta = matmul(graph.X, theta);
    const double xtheta_norm = dense_spectral_norm(xtheta);

    const PropagationOperator op{OperatorKind::laplacian, lap};
    const DiffusionCache cache = build_diffusion_cache(op, graph.X, 10);

    for (double beta : {0.5, 1.0}) {
      const DenseMatrix h_inf = matmul(dense_matrix_exponential(dec, beta), xtheta);
      for (std::size_t k = 2; k <= 10; ++k) {
        const auto coeffs = egc_coefficients(beta, k);
        DenseMatrix h_k(n, 2);
        for (std::size_t i = 0; i <= k; ++i)
          add_scaled(h_k, coeffs[i], matmul(propagated(cache, i), theta));
        DenseMatrix gap_m = h_inf;
        add_scaled(gap_m, -1.0, h_k);
        const double gap = dense_spectral_norm(gap_m);
        const double bound = egc_truncation_bound(beta, spec_norm, k, xtheta_norm);
        ++res.checks;
        if (gap > bound) ++res.violations;
        if (bound > 0.0) res.max_gap_over_bound = std::max(res.max_gap_over_bound, gap / bound);
      }
    }
  }
  return res;
}

struct RademacherSuiteResult {
  std::size_t instances = 0;
  std::size_t violations = 0;
  double max_estimate_over_bound = 0.0;
};

// Monte-Carlo empirical Rademacher estimate must not exceed the theoretical
// bound by more than 3 MC standard errors on small random instances.
inline RademacherSuiteResult rademacher_suite(std::uint64_t seed, std::size_t n_instances = 20,
                                              std::size_t mc_samples = 200) {
  RademacherSuiteResult res;
  res.instances = n_instances;
  for (std::size_t i = 0; i < n_instances; ++i) {
    Rng rng(hash64(seed, 0x72616473ULL, i));
    const std::size_t n = 8 + rng.next_u64() % 13;  // 8..20
    const std::size_t c = 2 + rng.next_u64() % 3;   // 2..4
    const std::size_t k = 1 + rng.next_u64() % 3;   // 1..3
    const Variant variant = (i % 2 == 0) ? Variant::LGC : Variant::EGC;
    const Graph graph = random_graph(hash64(seed, i, 3), n, c, 2, 0.3);
    const SparseMatrix lap = normalized_laplacian(graph);
    const PropagationOperator op{OperatorKind::laplacian, lap};
    const DiffusionCache cache = build_diffusion_cache(op, graph.X, k);

    RademacherCaps caps;
    caps.a = rng.uniform(0.3, 1.5);
    caps.b = rng.uniform(0.3, 1.5);
    const EmpiricalRademacher emp =
        empirical_rademacher(cache, graph, variant, caps, mc_samples, hash64(seed, i, 4));

    BoundInputs in;
    in.a = caps.a;
    in.b = caps.b;
    in.M = max_abs(graph.X);
    in.lipschitz = 1.0;  // identity activation
    in.k = k;
    in.l1_norm = matrix_one_norm(lap);
    in.L_samples = n;
    const double bound =
        variant == Variant::LGC ? lgc_rademacher_bound(in) : egc_rademacher_bound(in);
    if (emp.estimate > bound + 3.0 * emp.std_error) ++res.violations;
    if (bound > 0.0)
      res.max_estimate_over_bound = std::max(res.max_estimate_over_bound, emp.estimate / bound);
  }
  return res;
}

}  // namespace spgc
