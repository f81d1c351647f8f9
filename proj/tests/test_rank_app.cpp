#include "test_util.hpp"

using namespace sdcc;
using namespace sdcc::testutil;

TEST_CASE("complementarity-program reformulation") {
  SUBCASE("worked example is feasible at its lifted optimum") {
    const ExampleData ex = example_data();
    CHECK(feasibility_residual(ex.spec, ex.x_star) <= 1e-12);
  }
  SUBCASE("zero loss reduces the objective to the trace term") {
    RankInstance inst;
    inst.n = 2;
    const ProblemSpec spec = build_mpec(inst);
    const Vec origin = pack_point(Mat::Zero(2, 2), Mat::Zero(2, 2));
    CHECK(feasibility_residual(spec, origin) <= 1e-12);
    CHECK(spec.phi.eval(origin) == doctest::Approx(0.0));
    const Vec lifted = pack_point(Mat::Identity(2, 2), Mat::Identity(2, 2));
    CHECK(spec.phi.eval(lifted) == doctest::Approx(2.0));
  }
  SUBCASE("objective gradients match the loss polynomial") {
    std::mt19937_64 rng(51);
    const int n = 4, ns = n * (n + 1) / 2;
    RankInstance inst;
    inst.n = n;
    inst.loss.c = 0.3;
    inst.loss.lin = Vec::Random(ns);
    const Mat q = Mat::Random(ns, ns);
    inst.loss.quad = symmetrize(q);
    const ProblemSpec spec = build_mpec(inst);
    for (int trial = 0; trial < 100; ++trial) {
      const Vec x = Vec::Random(2 * ns);
      const Vec gx = spec.phi.grad(x);
      const Vec gl = inst.loss.grad(x.head(ns));
      CHECK((gx.head(ns) - gl).norm() <= 1e-12);
      // trace part: unit slope on the diagonal entries of the second block
      const auto idx = sym_entry_index(n);
      for (int e = 0; e < ns; ++e)
        CHECK(gx[ns + e] == doctest::Approx(idx[e].first == idx[e].second ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("lifting a candidate matrix") {
  SUBCASE("rank-one diagonal") {
    const LiftedPoint lp = lift_point(diag3(1, 0, 0));
    CHECK(lp.rank == 1);
    CHECK((lp.W - diag3(1, 0, 0)).norm() <= 1e-12);
  }
  SUBCASE("zero matrix lifts to zero") {
    const LiftedPoint lp = lift_point(Mat::Zero(3, 3));
    CHECK(lp.rank == 0);
    CHECK(lp.W.norm() == 0.0);
  }
  SUBCASE("rank-two spectrum gives a rank-two projector") {
    std::mt19937_64 rng(52);
    const Mat p = random_orthogonal(rng, 3);
    Vec ev(3);
    ev << 2, 1, 0;
    const Mat x = symmetrize(p * ev.asDiagonal() * p.transpose());
    const LiftedPoint lp = lift_point(x);
    CHECK(lp.rank == 2);
    CHECK(lp.W.trace() == doctest::Approx(2.0));
    CHECK((lp.W * lp.W - lp.W).norm() <= 1e-10);  // projector
    CHECK(in_omega(lp.X, Mat(lp.W - Mat::Identity(3, 3)), 1e-10).accepted());
  }
  SUBCASE("random psd inputs satisfy the pairing invariant") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 5);
      const Mat a = random_sym(rng, n);
      const Mat x = symmetrize(a * a.transpose());
      const LiftedPoint lp = lift_point(x);
      CHECK(in_omega(lp.X, Mat(lp.W - Mat::Identity(n, n)), 1e-10).accepted());
    }
  }
  SUBCASE("indefinite inputs are rejected") {
    CHECK_THROWS_AS(lift_point(diag2(1, -1)), std::invalid_argument);
  }
}

TEST_CASE("worked-example reproduction clauses") {
  const ExampleReport rep = example1();
  REQUIRE(rep.clauses.size() == 6);
  auto clause = [&](const std::string& name) -> const ExampleClause& {
    for (const auto& c : rep.clauses)
      if (c.name == name) return c;
    REQUIRE(false);
    return rep.clauses.front();
  };
  CHECK(clause("multipliers-stationary").pass);
  CHECK(clause("critical-cone-grid").pass);
  CHECK(clause("tangent2-template").pass);
  CHECK(clause("quadratic-form").pass);
  // the support-function total and margin disagree with the pinned reference
  // constants by 2 + 4 g13^2 on the grid; the computed values themselves are
  // frozen in test_optimality and cross-validated by the sampling maximizer
  CHECK(!clause("sigma-total").pass);
  CHECK(clause("sigma-total").error == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(!clause("margin").pass);
  CHECK(clause("margin").error == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(!rep.pass);
  CHECK(rep.runtime_seconds < 5.0);
}

TEST_CASE("qualification block pattern has only the zero solution") {
  // at the lifted example point, multipliers (H, F, G) with F = 0, H + G = 0,
  // H supported on the null block of W*, G supported on the first row/column
  // pattern: the assembled linear system has full column rank, leaving (0,0,0)
  const ExampleData ex = example_data();
  const Spectral sw = eig_sym(ex.Ws);
  const Range null_w = sw.beta_range();
  REQUIRE(null_w.size == 2);
  // unknowns: vec of H-null-block (3 entries), vec of G-row entries (3)
  // equations: H + G = 0 entrywise (6 upper-triangle equations on 3x3)
  Mat system = Mat::Zero(6, 6);
  const Mat e = sw.P.middleCols(null_w.start, null_w.size);
  const auto idx2 = sym_entry_index(2);
  const auto idx3 = sym_entry_index(3);
  for (int k = 0; k < 3; ++k) {  // H basis: e [E_k] e^T
    Mat basis2 = Mat::Zero(2, 2);
    basis2(idx2[k].first, idx2[k].second) = basis2(idx2[k].second, idx2[k].first) = 1.0;
    const Mat hk = symmetrize(e * basis2 * e.transpose());
    for (int r = 0; r < 6; ++r)
      system(r, k) = hk(idx3[r].first, idx3[r].second);
  }
  // G basis: first row/column entries (1,1), (1,2), (1,3)
  for (int k = 0; k < 3; ++k) {
    Mat gk = Mat::Zero(3, 3);
    gk(0, k) = gk(k, 0) = 1.0;
    for (int r = 0; r < 6; ++r)
      system(r, 3 + k) = gk(idx3[r].first, idx3[r].second);
  }
  const Eigen::JacobiSVD<Mat> svd(system);
  CHECK(svd.singularValues().minCoeff() > 1e-10);  // only the trivial solution
}

TEST_CASE("hard-thresholded minimizers of a quadratic loss are stationary") {
  // desk-scale search scaffolding: for the separable loss |X - M|^2/2 the
  // rank-penalized minimizer keeps eigenvalues with lambda^2/2 >= 1
  std::mt19937_64 rng(54);
  int tested = 0;
  for (int trial = 0; trial < 12 && tested < 4; ++trial) {
    const int n = 3;
    const Mat a = random_sym(rng, n, 1.2);
    const Mat m = symmetrize(a * a.transpose());
    const Spectral sm = eig_sym(m);
    bool borderline = false;
    for (int i = 0; i < n; ++i)
      if (std::abs(sm.lambda[i] - std::sqrt(2.0)) < 0.4) borderline = true;
    if (borderline) continue;
    ++tested;
    Vec kept = sm.lambda;
    for (int i = 0; i < n; ++i)
      if (kept[i] < std::sqrt(2.0)) kept[i] = 0.0;
    const Mat xstar = symmetrize(sm.P * kept.asDiagonal() * sm.P.transpose());

    const int ns = n * (n + 1) / 2;
    RankInstance inst;
    inst.n = n;
    // |X - M|^2/2 over the entry coordinates with the pairing weights
    inst.loss.c = 0.5 * m.squaredNorm();
    inst.loss.lin = Vec::Zero(ns);
    inst.loss.quad = Mat::Zero(ns, ns);
    const auto idx = sym_entry_index(n);
    for (int e = 0; e < ns; ++e) {
      const double w = idx[e].first == idx[e].second ? 1.0 : 2.0;
      inst.loss.lin[e] = -w * m(idx[e].first, idx[e].second);
      inst.loss.quad(e, e) = w;
    }
    const ProblemSpec spec = build_mpec(inst);
    const LiftedPoint lp = lift_point(xstar);
    const Vec x = pack_point(lp.X, lp.W);
    REQUIRE(feasibility_residual(spec, x) <= 1e-9);
    // the unique multiplier tuple of the lifted point: the loss gradient on
    // the first block and the projector split on the second
    MultiplierPair mult;
    mult.gamma1 = m - xstar;
    mult.gamma2 = -lp.W;
    mult.xi = sym_to_entries(Mat(lp.W - Mat::Identity(n, n)));
    CHECK(stationarity_residual(spec, x, mult, Flavor::Clarke, 1e-6).residual <= 1e-6);
    CHECK(stationarity_residual(spec, x, mult, Flavor::Regular, 1e-6).residual <= 1e-6);
    // a plain least-squares fit reaches the same gradient residual
    const MultiplierPair fit = fit_multipliers(spec, x);
    CHECK(lagrangian_jet(spec, x, fit).grad.norm() <= 1e-8);
    SamplerConfig cfg;
    cfg.samples = 12;
    cfg.seed = 1000 + trial;
    const SoncAggregate agg = sonc_check(spec, x, mult, cfg);
    CHECK(agg.min_margin >= -1e-6);
  }
  CHECK(tested >= 3);
}
