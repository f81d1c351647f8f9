#include "test_util.hpp"

using namespace sdcc;
using namespace sdcc::testutil;

TEST_CASE("eig_sym clusters diagonal inputs") {
  SUBCASE("distinct values with a zero") {
    const Spectral s = eig_sym(diag3(2, 0, -1), 1e-8);
    REQUIRE(s.r() == 3);
    CHECK(s.r0 == 1);
    CHECK(s.clusters[0].size == 1);
    CHECK(s.clusters[1].size == 1);
    CHECK(s.clusters[2].size == 1);
    CHECK(s.mu[0] == doctest::Approx(2));
    CHECK(s.mu[1] == 0.0);
    CHECK(s.mu[2] == doctest::Approx(-1));
  }
  SUBCASE("no zero eigenvalue inserts an empty virtual cluster") {
    const Spectral s = eig_sym(diag3(3, 3, -1), 1e-8);
    REQUIRE(s.r() == 3);
    CHECK(s.r0 == 1);
    CHECK(s.clusters[0].size == 2);
    CHECK(s.clusters[1].size == 0);  // beta empty
    CHECK(s.clusters[2].size == 1);
    CHECK(s.beta_range().empty());
  }
}

TEST_CASE("eig_sym recovers engineered 6x6 clusters") {
  std::mt19937_64 rng(42);
  const Mat p = random_orthogonal(rng, 6);
  Vec ev(6);
  ev << 1, 1, 1e-12, 1e-12, -2, -2;
  const Mat z = symmetrize(p * ev.asDiagonal() * p.transpose());
  const Spectral s = eig_sym(z, 1e-8);
  REQUIRE(s.r() == 3);
  CHECK(s.r0 == 1);
  CHECK(s.clusters[0].size == 2);
  CHECK(s.clusters[1].size == 2);
  CHECK(s.clusters[2].size == 2);
  CHECK(s.alpha_range().size == 2);
  CHECK(s.gamma_range().size == 2);
}

TEST_CASE("reconstruction over random symmetric matrices") {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 11);
    Mat a;
    if (trial % 3 == 0) {
      // deliberately repeated eigenvalues
      const Mat p = random_orthogonal(rng, n);
      Vec ev(n);
      for (int i = 0; i < n; ++i) ev[i] = static_cast<double>((i / 2) - n / 4);
      a = symmetrize(p * ev.asDiagonal() * p.transpose());
    } else {
      a = random_sym(rng, n, 2.0);
    }
    const Spectral s = eig_sym(a);
    worst = std::max(worst, (s.reconstruct() - a).norm() / std::max(1.0, a.norm()));
    CHECK((s.P.transpose() * s.P - Mat::Identity(n, n)).norm() <= 1e-10 * n);
    int covered = 0;
    for (const auto& c : s.clusters) covered += c.size;
    CHECK(covered == n);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("pinv_shifted closed forms") {
  SUBCASE("two point spectrum") {
    const Spectral s = eig_sym(diag2(2, 0));
    CHECK((pinv_shifted(s, 0) - diag2(0, -0.5)).norm() <= 1e-12);
    CHECK((pinv_shifted(s, 1) - diag2(0.5, 0)).norm() <= 1e-12);
  }
  SUBCASE("middle cluster") {
    const Spectral s = eig_sym(diag3(3, 1, -2));
    REQUIRE(s.r() == 4);  // virtual zero cluster between 1 and -2
    CHECK(s.mu[1] == doctest::Approx(1));
    CHECK((pinv_shifted(s, 1) - diag3(0.5, 0, -1.0 / 3.0)).norm() <= 1e-12);
  }
  SUBCASE("annihilator identity") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const OracleInstance inst = random_clustered_instance(rng, 3 + trial % 5, trial % 2 == 0);
      const Spectral s = eig_sym(inst.Z);
      for (int k = 0; k < s.r(); ++k) {
        if (s.clusters[k].empty()) continue;
        const Mat pk = s.cols(k);
        const Mat lhs = pinv_shifted(s, k) * (inst.Z - s.mu[k] * Mat::Identity(s.n(), s.n()));
        CHECK((lhs - (Mat::Identity(s.n(), s.n()) - pk * pk.transpose())).norm() <= 1e-9);
      }
    }
  }
}

TEST_CASE("sub_spectral sign partitions") {
  SUBCASE("one positive one negative") {
    const Spectral s = sub_spectral(diag2(1, -1));
    CHECK(s.alpha_range().size == 1);
    CHECK(s.beta_range().size == 0);
    CHECK(s.gamma_range().size == 1);
  }
  SUBCASE("zero matrix is a single zero cluster") {
    const Spectral s = sub_spectral(Mat::Zero(2, 2));
    REQUIRE(s.r() == 1);
    CHECK(s.r0 == 0);
    CHECK(s.beta_range().size == 2);
  }
  SUBCASE("off-diagonal flip") {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    const Spectral s = sub_spectral(m);
    CHECK(s.lambda[0] == doctest::Approx(1));
    CHECK(s.lambda[1] == doctest::Approx(-1));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(std::abs(s.P(0, 0)) - inv_sqrt2) <= 1e-12);
    CHECK(std::abs(std::abs(s.P(1, 0)) - inv_sqrt2) <= 1e-12);
    CHECK(s.P(0, 0) * s.P(1, 0) > 0);
    CHECK(s.P(0, 1) * s.P(1, 1) < 0);
  }
}

TEST_CASE("symmetry violations are rejected on construction") {
  Mat a(2, 2);
  a << 1, 5, 0, 1;
  CHECK_THROWS_AS(eig_sym(a), std::invalid_argument);
}

TEST_CASE("close cluster gaps carry a conditioning warning") {
  const Spectral s = eig_sym(diag2(1.0, 1.0 - 5e-8), 1e-8);
  if (s.r() == 3 && !s.clusters[0].empty() && s.clusters[0].size == 1) {
    bool warned = false;
    for (const auto& w : s.warnings)
      warned = warned || w.find("ill-conditioned") != std::string::npos;
    CHECK(warned);
  }
}
