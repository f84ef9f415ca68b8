#include <catch2/catch_amalgamated.hpp>

#include "spgc/graph.hpp"
#include "spgc/sparse.hpp"
#include "spgc/spectral.hpp"
#include "spgc/synthetic.hpp"
#include "test_util.hpp"

using namespace spgc;
using test::edgeless_graph;
using test::triangle_graph;

TEST_CASE("sparse_from_triplets canonical form") {
  // duplicates summed, explicit zeros dropped, columns sorted
  auto m = sparse_from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {1, 1, 3.0}, {1, 1, -3.0}});
  REQUIRE(m.nnz() == 2);
  REQUIRE(m.row_offsets == std::vector<std::size_t>{0, 2, 2});
  REQUIRE(m.col_indices == std::vector<std::size_t>{0, 2});
  REQUIRE(m.values == std::vector<double>{2.0, 1.5});
  for (std::size_t r = 0; r < m.n_rows; ++r)
    for (std::size_t i = m.row_offsets[r] + 1; i < m.row_offsets[r + 1]; ++i)
      REQUIRE(m.col_indices[i] > m.col_indices[i - 1]);
  REQUIRE_THROWS_AS(sparse_from_triplets(2, 2, {{2, 0, 1.0}}), std::invalid_argument);
}

TEST_CASE("spmm identity, zero and dense oracle") {
  const DenseMatrix x = test::random_dense(11, 8, 3);
  std::vector<std::tuple<std::size_t, std::size_t, double>> eye;
  for (std::size_t i = 0; i < 8; ++i) eye.emplace_back(i, i, 1.0);
  REQUIRE(spmm(sparse_from_triplets(8, 8, std::move(eye)), x) == x);
  REQUIRE(max_abs(spmm(sparse_from_triplets(8, 8, {}), x)) == 0.0);

  // random sparse 8x8 vs dense brute-force product
  Rng rng(99);
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c)
      if (rng.next_double() < 0.4) t.emplace_back(r, c, rng.uniform(-2.0, 2.0));
  const SparseMatrix m = sparse_from_triplets(8, 8, std::move(t));
  const DenseMatrix got = spmm(m, x);
  const DenseMatrix want = matmul(to_dense(m), x);
  REQUIRE(max_abs_diff(got, want) <= 1e-13 * std::max(1.0, max_abs(want)));

  REQUIRE_THROWS_AS(spmm(m, DenseMatrix(7, 2)), std::invalid_argument);
}

TEST_CASE("spmm is bitwise deterministic") {
  const Graph g = random_graph(5, 30, 4, 3);
  const SparseMatrix lap = normalized_laplacian(g);
  REQUIRE(spmm(lap, g.X) == spmm(lap, g.X));
}

TEST_CASE("matrix_one_norm") {
  const Graph tri = triangle_graph();
  REQUIRE(matrix_one_norm(normalized_laplacian(tri)) == 2.0);  // 1 + 0.5 + 0.5
  std::vector<std::tuple<std::size_t, std::size_t, double>> eye;
  for (std::size_t i = 0; i < 4; ++i) eye.emplace_back(i, i, 1.0);
  REQUIRE(matrix_one_norm(sparse_from_triplets(4, 4, std::move(eye))) == 1.0);
  REQUIRE(matrix_one_norm(sparse_from_triplets(4, 4, {})) == 0.0);
}

TEST_CASE("spectral_norm_estimate") {
  std::vector<std::tuple<std::size_t, std::size_t, double>> eye;
  for (std::size_t i = 0; i < 5; ++i) eye.emplace_back(i, i, 1.0);
  const auto est_i = spectral_norm_estimate(sparse_from_triplets(5, 5, std::move(eye)), 200, 3);
  REQUIRE(est_i.converged);
  REQUIRE(est_i.value == Catch::Approx(1.0).margin(1e-12));

  // L of the 3-cycle has eigenvalues {0, 1.5, 1.5}
  const auto est_tri = spectral_norm_estimate(normalized_laplacian(triangle_graph()), 500, 3);
  REQUIRE(est_tri.value == Catch::Approx(1.5).margin(1e-8));

  // L spectrum stays within [0, 2]; cross-check against the dense oracle
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Graph g = random_graph(100 + s, 20 + 3 * s, 2, 2);
    const SparseMatrix lap = normalized_laplacian(g);
    const auto est = spectral_norm_estimate(lap, 2000, s);
    REQUIRE(est.value <= 2.0 + 1e-9);
    const auto dec = dense_eigendecomposition(to_dense(lap));
    double want = 0.0;
    for (double l : dec.eigenvalues) want = std::max(want, std::fabs(l));
    REQUIRE(est.value == Catch::Approx(want).margin(1e-6));
  }
}

TEST_CASE("adjacency of the 3-cycle and single node") {
  const SparseMatrix a = adjacency(triangle_graph());
  REQUIRE(a.nnz() == 6);
  const DenseMatrix d = to_dense(a);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(d(i, i) == 0.0);
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) REQUIRE(d(i, j) == 1.0);
  }
  REQUIRE(adjacency(edgeless_graph(1)).nnz() == 0);
}

TEST_CASE("normalized_laplacian hand values and conventions") {
  const DenseMatrix l = to_dense(normalized_laplacian(triangle_graph()));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(l(i, j) == (i == j ? 1.0 : -0.5));

  // edgeless graph: zero-degree convention gives identity rows
  REQUIRE(to_dense(normalized_laplacian(edgeless_graph(4))) == DenseMatrix::identity(4));
}

TEST_CASE("renormalized_adjacency hand values") {
  REQUIRE(to_dense(renormalized_adjacency(edgeless_graph(1)))(0, 0) == 1.0);
  const DenseMatrix s = to_dense(renormalized_adjacency(triangle_graph()));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(s(i, j) == Catch::Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("normalized_adjacency hand values and Laplacian identity") {
  const Graph tri = triangle_graph();
  const DenseMatrix na = to_dense(normalized_adjacency(tri));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(na(i, j) == (i == j ? 0.0 : 0.5));
  REQUIRE(normalized_adjacency(edgeless_graph(3)).nnz() == 0);

  // L + D^(-1/2) A D^(-1/2) = I, entrywise exact
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Graph g = random_graph(s, 10 + s, 2, 2);
    DenseMatrix sum = to_dense(normalized_laplacian(g));
    add_scaled(sum, 1.0, to_dense(normalized_adjacency(g)));
    REQUIRE(sum == DenseMatrix::identity(g.n));
  }
}

TEST_CASE("operators are symmetric with correct spectra") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Graph g = random_graph(1000 + s, 10 + 4 * s, 2, 2);
    for (auto kind : {OperatorKind::laplacian, OperatorKind::renormalized_adjacency,
                      OperatorKind::normalized_adjacency}) {
      const SparseMatrix m = make_operator(g, kind).matrix;
      REQUIRE(is_symmetric(m));
      const auto dec = dense_eigendecomposition(to_dense(m));
      if (kind == OperatorKind::laplacian) {
        REQUIRE(dec.eigenvalues.front() >= -1e-9);
        REQUIRE(dec.eigenvalues.back() <= 2.0 + 1e-9);
      } else if (kind == OperatorKind::renormalized_adjacency) {
        REQUIRE(dec.eigenvalues.front() >= -1.0 - 1e-9);
        REQUIRE(dec.eigenvalues.back() <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("make_graph canonicalization and validation") {
  DenseMatrix x(3, 1);
  // duplicate edges (both orientations) and a self-loop collapse to one edge
  const Graph g = make_graph(3, {{0, 1}, {1, 0}, {0, 1}, {2, 2}}, x, {0, 0, 1}, {0}, {1}, {2});
  REQUIRE(g.edges.size() == 1);
  REQUIRE(g.edges[0] == std::make_pair<std::size_t, std::size_t>(0, 1));

  REQUIRE_THROWS_AS(make_graph(3, {}, DenseMatrix(3, 1), {0, 0, 1}, {0, 1}, {1}, {2}),
                    std::invalid_argument);  // masks overlap
  REQUIRE_THROWS_AS(make_graph(3, {{0, 5}}, DenseMatrix(3, 1), {0, 0, 1}, {}, {}, {}),
                    std::invalid_argument);  // endpoint out of range
  REQUIRE_THROWS_AS(make_graph(3, {}, DenseMatrix(2, 1), {0, 0, 1}, {}, {}, {}),
                    std::invalid_argument);  // feature rows != n
}
