#include <catch2/catch_amalgamated.hpp>

#include "spgc/bounds.hpp"
#include "spgc/oracle_suite.hpp"
#include "spgc/synthetic.hpp"
#include "test_util.hpp"

using namespace spgc;

TEST_CASE("lgc_rademacher_bound hand values and monotonicity") {
  BoundInputs in;
  in.a = in.b = in.M = in.lipschitz = 1.0;
  in.k = 1;
  in.l1_norm = 2.0;
  in.L_samples = 4;
  REQUIRE(lgc_rademacher_bound(in) == Catch::Approx(1.5).epsilon(1e-12));  // (1/2)(1+2)

  in.k = 0;
  REQUIRE(lgc_rademacher_bound(in) == Catch::Approx(0.5).epsilon(1e-12));  // abM/sqrt(L)

  // closed form must also hold at ||L||_1 = 1 (the removable singularity)
  in.k = 3;
  in.l1_norm = 1.0;
  REQUIRE(lgc_rademacher_bound(in) == Catch::Approx(4.0 / 2.0).epsilon(1e-12));

  // nondecreasing in k on random inputs
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    BoundInputs r;
    r.a = rng.uniform(0.1, 3.0);
    r.b = rng.uniform(0.1, 3.0);
    r.M = rng.uniform(0.1, 3.0);
    r.lipschitz = rng.uniform(0.1, 3.0);
    r.l1_norm = rng.uniform(0.1, 3.0);
    r.L_samples = 1 + rng.next_u64() % 50;
    r.k = rng.next_u64() % 10;
    BoundInputs r2 = r;
    r2.k = r.k + 1 + rng.next_u64() % 5;
    REQUIRE(lgc_rademacher_bound(r2) >= lgc_rademacher_bound(r));
    // nondecreasing in each scale factor
    BoundInputs up = r;
    up.a *= 1.5;
    REQUIRE(lgc_rademacher_bound(up) >= lgc_rademacher_bound(r));
    up = r;
    up.b *= 1.5;
    REQUIRE(lgc_rademacher_bound(up) >= lgc_rademacher_bound(r));
    up = r;
    up.M *= 1.5;
    REQUIRE(lgc_rademacher_bound(up) >= lgc_rademacher_bound(r));
    up = r;
    up.lipschitz *= 1.5;
    REQUIRE(lgc_rademacher_bound(up) >= lgc_rademacher_bound(r));
  }

  BoundInputs bad = in;
  bad.a = 0.0;
  REQUIRE_THROWS_AS(lgc_rademacher_bound(bad), std::invalid_argument);
}

TEST_CASE("egc_rademacher_bound hand values and monotonicity") {
  BoundInputs in;
  in.a = in.b = in.M = in.lipschitz = 1.0;
  in.l1_norm = 2.0;
  in.L_samples = 4;
  REQUIRE(egc_rademacher_bound(in) == Catch::Approx(std::exp(2.0) / 2.0).epsilon(1e-12));

  // a -> 0 limit: exp(0) = 1
  BoundInputs small = in;
  small.a = 1e-300;
  REQUIRE(egc_rademacher_bound(small) == Catch::Approx(0.5).epsilon(1e-12));

  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    BoundInputs r;
    r.a = rng.uniform(0.1, 2.0);
    r.b = rng.uniform(0.1, 2.0);
    r.M = rng.uniform(0.1, 2.0);
    r.lipschitz = rng.uniform(0.1, 2.0);
    r.l1_norm = rng.uniform(0.1, 2.0);
    r.L_samples = 1 + rng.next_u64() % 50;
    for (auto bump : {&BoundInputs::a, &BoundInputs::b, &BoundInputs::M, &BoundInputs::lipschitz}) {
      BoundInputs up = r;
      up.*bump *= 1.5;
      REQUIRE(egc_rademacher_bound(up) >= egc_rademacher_bound(r));
    }
    // numerical comparison at matched caps: exp dominates every truncated sum
    BoundInputs lgc_in = r;
    lgc_in.k = rng.next_u64() % 20;
    REQUIRE(egc_rademacher_bound(r) >= 0.0);
    REQUIRE(lgc_rademacher_bound(lgc_in) >= 0.0);
  }
}

TEST_CASE("egc_truncation_bound hand value, zero case, precondition") {
  // beta=1, ||L||=2, k=10: (2^11/11!) / (1 - 2/12) = (2048/39916800)*1.2
  const double want = 2048.0 / 39916800.0 * 1.2;
  REQUIRE(egc_truncation_bound(1.0, 2.0, 10, 1.0) == Catch::Approx(want).epsilon(1e-12));
  REQUIRE(egc_truncation_bound(0.0, 2.0, 3, 5.0) == 0.0);
  // denominator condition: |beta| ||L|| / (k+2) >= 1 is rejected
  REQUIRE_THROWS_AS(egc_truncation_bound(3.0, 2.0, 2, 1.0), std::invalid_argument);
  // large k stays finite through the log-gamma path
  REQUIRE(std::isfinite(egc_truncation_bound(1.0, 2.0, 80, 1.0)));
}

TEST_CASE("truncation suite: measured gap never exceeds the bound") {
  const TruncationResult res = truncation_suite(11, 4);
  REQUIRE(res.checks == 4 * 2 * 9);
  REQUIRE(res.violations == 0);
}

TEST_CASE("empirical Rademacher: zero caps, bound check, MC convergence") {
  const Graph g = random_graph(101, 12, 3, 2);
  const auto cache = build_diffusion_cache(make_operator(g, OperatorKind::laplacian), g.X, 2);

  RademacherCaps zero_caps{0.0, 0.0};
  const auto z = empirical_rademacher(cache, g, Variant::LGC, zero_caps, 10, 1);
  REQUIRE(z.estimate == 0.0);

  RademacherCaps caps{1.0, 1.0};
  const auto est = empirical_rademacher(cache, g, Variant::LGC, caps, 200, 1);
  BoundInputs in;
  in.a = caps.a;
  in.b = caps.b;
  in.M = max_abs(g.X);
  in.lipschitz = 1.0;
  in.k = 2;
  in.l1_norm = matrix_one_norm(normalized_laplacian(g));
  in.L_samples = g.n;
  REQUIRE(est.estimate <= lgc_rademacher_bound(in) + 3.0 * est.std_error);

  // doubling the draw count moves the estimate by less than 2 standard errors
  const auto e500 = empirical_rademacher(cache, g, Variant::EGC, caps, 500, 2);
  const auto e2000 = empirical_rademacher(cache, g, Variant::EGC, caps, 2000, 2);
  REQUIRE(std::fabs(e2000.estimate - e500.estimate) <= 2.0 * (e500.std_error + e2000.std_error));

  // oracle limits
  const Graph too_big = random_graph(103, 25, 3, 2);
  const auto big_cache =
      build_diffusion_cache(make_operator(too_big, OperatorKind::laplacian), too_big.X, 2);
  REQUIRE_THROWS_AS(empirical_rademacher(big_cache, too_big, Variant::LGC, caps, 10, 1),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(empirical_rademacher(cache, g, Variant::SGC, caps, 10, 1),
                    std::invalid_argument);
}

TEST_CASE("rademacher suite: estimates stay under the theoretical bounds") {
  const RademacherSuiteResult res = rademacher_suite(13, 8, 100);
  REQUIRE(res.instances == 8);
  REQUIRE(res.violations == 0);
}

TEST_CASE("extract_coefficients per variant") {
  const Graph g = random_graph(107, 8, 3, 2);
  const auto cache = build_diffusion_cache(make_operator(g, OperatorKind::laplacian), g.X, 3);

  ModelParams egc = init_params(Variant::EGC, 3, 3, 2, 1);
  egc.beta = 1.0;
  const auto ec = extract_coefficients(egc, cache);
  REQUIRE(ec.size() == 4);
  REQUIRE(ec[0].coefficient == 1.0);
  REQUIRE(ec[1].coefficient == 1.0);
  REQUIRE(ec[2].coefficient == 0.5);
  REQUIRE(ec[3].coefficient == Catch::Approx(1.0 / 6.0).epsilon(1e-12));
  for (const auto& pt : ec) REQUIRE(pt.variance == 0.0);

  const auto cache4 = build_diffusion_cache(make_operator(g, OperatorKind::laplacian), g.X, 4);
  const auto lc = extract_coefficients(init_params(Variant::LGC, 4, 3, 2, 1), cache4);
  REQUIRE(lc.size() == 5);
  for (const auto& pt : lc) REQUIRE(pt.coefficient == 0.2);

  // constant gate: mean 0.5 * alpha_i, variance 0
  ModelParams hlgc = test::random_params(Variant::HLGC, 3, 3, 2, 2);
  for (auto& gate : hlgc.gates)
    for (std::size_t i = 0; i < gate.w2.size(); ++i) gate.w2.data()[i] = 0.0;
  const auto hc = extract_coefficients(hlgc, cache);
  for (std::size_t i = 0; i < hc.size(); ++i) {
    REQUIRE(hc[i].coefficient == Catch::Approx(0.5 * hlgc.alpha[i]).margin(1e-14));
    REQUIRE(hc[i].variance <= 1e-24);
  }

  REQUIRE_THROWS_AS(extract_coefficients(init_params(Variant::SGC, 2, 3, 2, 1), cache),
                    std::invalid_argument);
}
