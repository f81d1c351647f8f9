#include "test_util.hpp"

using namespace sdcc;
using namespace sdcc::testutil;

TEST_CASE("directional derivatives of the positive part") {
  SUBCASE("first order") {
    CHECK(max_dir1(2, -3) == -3);
    CHECK(max_dir1(0, -3) == 0);
    CHECK(max_dir1(0, 3) == 3);
    CHECK(max_dir1(-1, 5) == 0);
  }
  SUBCASE("second order") {
    CHECK(max_dir2(1, -5, 7) == 7);
    CHECK(max_dir2(0, 0, -4) == 0);
    CHECK(max_dir2(0, 0, 4) == 4);
    CHECK(max_dir2(0, -1, 9) == 0);
    CHECK(max_dir2(0, 1, -9) == -9);
    CHECK(max_dir2(-2, 1, 3) == 0);
  }
  SUBCASE("homogeneity") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 200; ++i) {
      const double mu = (i % 3 == 0) ? 0.0 : nd(rng);
      const double eta = nd(rng), w = nd(rng), s = std::abs(nd(rng));
      CHECK(max_dir1(mu, s * eta) == doctest::Approx(s * max_dir1(mu, eta)));
      CHECK(max_dir2(mu, s * eta, s * s * w) ==
            doctest::Approx(s * s * max_dir2(mu, eta, w)));
    }
  }
}

TEST_CASE("first divided-difference table of the positive part") {
  auto g1_of = [](double a, double b) {
    Mat z = diag2(a, b);
    const Spectral s = eig_sym(z);
    const Mat t = g1_table_max(s);
    // locate the clusters holding a and b
    int ka = -1, kb = -1;
    for (int k = 0; k < s.r(); ++k) {
      if (s.clusters[k].empty()) continue;
      if (std::abs(s.mu[k] - a) < 1e-12) ka = k;
      if (std::abs(s.mu[k] - b) < 1e-12) kb = k;
    }
    REQUIRE(ka >= 0);
    REQUIRE(kb >= 0);
    return t(ka, kb);
  };
  CHECK(g1_of(1, 0) == doctest::Approx(1));
  CHECK(g1_of(1, -1) == doctest::Approx(0.5));
  CHECK(g1_of(-1, -3) == doctest::Approx(0));
}

TEST_CASE("closed-form second divided differences of the positive part") {
  CHECK(g2_max(0, 2, -1) == doctest::Approx(1.0 / 3.0));
  CHECK(g2_max(3, -1, 3) == doctest::Approx(-3.0 / 16.0));  // diagonal variant
  CHECK(g2_max(-1, -2, -3) == 0.0);
  SUBCASE("agrees with the generic table builder exactly") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
      const OracleInstance inst = random_clustered_instance(rng, 3 + trial % 6, trial % 2 == 0);
      const Spectral s = eig_sym(inst.Z);
      const DividedTables tab(s, max_fun());
      for (int k = 0; k < s.r(); ++k)
        for (int j = 0; j < s.r(); ++j)
          for (int l = 0; l < s.r(); ++l)
            CHECK(std::abs(g2_max(s.mu[k], s.mu[j], s.mu[l]) - tab.g2(k, j, l)) <= 1e-12);
    }
  }
  SUBCASE("symmetric in the outer arguments") {
    std::mt19937_64 rng(12);
    const OracleInstance inst = random_clustered_instance(rng, 7, true);
    const Spectral s = eig_sym(inst.Z);
    const DividedTables tab(s, max_fun());
    for (int k = 0; k < s.r(); ++k)
      for (int j = 0; j < s.r(); ++j)
        for (int l = 0; l < s.r(); ++l) {
          CHECK(tab.g2(k, j, l) == doctest::Approx(tab.g2(l, j, k)));
          CHECK(g2_max(s.mu[k], s.mu[j], s.mu[l]) ==
                doctest::Approx(g2_max(s.mu[l], s.mu[j], s.mu[k])));
        }
  }
}

TEST_CASE("coincident arguments match the merge limit of the node interpolant") {
  // independent route: evaluate the flat-top bump interpolant through the
  // node values and take the distinct-argument divided difference with one
  // pair of arguments merged to distance 1e-5
  const std::vector<double> nodes = {2.0, 0.7, 0.0, -1.3};
  const double delta = 0.5;
  for (const ScalarFun* f : {&max_fun(), &abs_fun(), &square_fun()}) {
    BumpInterpolant g;
    g.nodes = nodes;
    g.delta = delta;
    for (double t : nodes) g.values.push_back(f->eval(t));
    auto g1 = [&](double a, double b) { return (g(a) - g(b)) / (a - b); };

    Mat z = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i) z(i, i) = nodes[i];
    const Spectral sp = eig_sym(z);
    // map node -> cluster index
    auto cluster_of = [&](double v) {
      for (int k = 0; k < sp.r(); ++k)
        if (!sp.clusters[k].empty() && std::abs(sp.mu[k] - v) < 1e-9) return k;
      REQUIRE(false);
      return -1;
    };
    const DividedTables tab(sp, *f);
    const double eps = 1e-5;
    for (double a : nodes)
      for (double b : nodes) {
        if (a == b) continue;
        const int ka = cluster_of(a), kb = cluster_of(b);
        // g2(a, a, b) as the two-sided numeric limit of the distinct formula
        auto merged = [&](double e2) {
          return (g1(a, a + e2) - g1(a, b)) / (a + e2 - b);
        };
        const double numeric = 0.5 * (merged(eps) + merged(-eps));
        const double table = tab.g2(ka, ka, kb);
        CHECK(std::abs(numeric - table) <=
              1e-6 * std::max(1.0, std::abs(table)) + 1e-9);
        // diagonal variant g2(a, b, a) with the outer pair merged
        auto merged_diag = [&](double e2) {
          return (g1(a, b) - g1(a, a + e2)) / (b - a - e2);
        };
        const double numeric_diag = 0.5 * (merged_diag(eps) + merged_diag(-eps));
        const double table_diag = tab.g2(ka, kb, ka);
        CHECK(std::abs(numeric_diag - table_diag) <=
              1e-6 * std::max(1.0, std::abs(table_diag)) + 1e-9);
      }
  }
}
