#include "test_util.hpp"

using namespace sdcc;
using namespace sdcc::testutil;

TEST_CASE("operator values") {
  CHECK((lowner_apply(eig_sym(diag2(2, -1)), max_fun()) - diag2(2, 0)).norm() <= 1e-12);
  std::mt19937_64 rng(5);
  const Mat z = random_sym(rng, 5);
  CHECK((lowner_apply(eig_sym(z), identity_fun()) - z).norm() <= 1e-12);
  Mat flip(2, 2);
  flip << 0, 1, 1, 0;
  CHECK((lowner_apply(eig_sym(flip), square_fun()) - Mat::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("first directional derivative") {
  SUBCASE("projection is locally the identity on the positive definite side") {
    std::mt19937_64 rng(8);
    const Mat h = random_sym(rng, 2);
    CHECK((lowner_dir1(eig_sym(diag2(1, 2)), max_fun(), h) - h).norm() <= 1e-12);
  }
  SUBCASE("split eigenvalues scale the off-diagonal block by the slope") {
    Mat h(2, 2);
    h << 0, 1, 1, 0;
    Mat expect(2, 2);
    expect << 0, 0.5, 0.5, 0;
    CHECK((lowner_dir1(eig_sym(diag2(1, -1)), max_fun(), h) - expect).norm() <= 1e-12);
  }
  SUBCASE("at the origin the derivative is the projection itself") {
    const Mat h = diag2(1, -1);
    CHECK((lowner_dir1(eig_sym(Mat::Zero(2, 2)), max_fun(), h) - diag2(1, 0)).norm() <= 1e-12);
  }
  SUBCASE("finite-difference oracle across scalar functions") {
    std::mt19937_64 rng(9);
    int checked = 0;
    for (int trial = 0; trial < 210; ++trial) {
      const int n = 3 + trial % 6;
      const OracleInstance inst = random_clustered_instance(rng, n, trial % 2 == 0);
      const ScalarFun& f = trial % 3 == 0 ? max_fun() : (trial % 3 == 1 ? abs_fun() : square_fun());
      const double r3 = fd_dir1_residual(f, inst.Z, inst.H, 1e-3);
      const double r4 = fd_dir1_residual(f, inst.Z, inst.H, 1e-4);
      const double r5 = fd_dir1_residual(f, inst.Z, inst.H, 1e-5);
      CHECK(r4 <= 0.3 * r3 + 1e-8);
      CHECK(r5 <= 0.3 * r4 + 1e-8);
      ++checked;
    }
    CHECK(checked >= 200);
  }
}

TEST_CASE("second directional derivative") {
  SUBCASE("linear scalar functions pass the curvature slot through") {
    // F(Z + tH + t^2 W/2) = Z + tH + t^2 W/2 exactly, so the parabolic
    // second derivative is W itself
    std::mt19937_64 rng(13);
    const OracleInstance inst = random_clustered_instance(rng, 5, true);
    const LownerJet2 jet = lowner_dir2(eig_sym(inst.Z), identity_fun(), inst.H, inst.W);
    CHECK((jet.dir2 - inst.W).norm() <= 1e-11);
    CHECK((jet.dir1 - inst.H).norm() <= 1e-12);
    CHECK(fd_dir2_residual(identity_fun(), inst.Z, inst.H, inst.W, 1e-3) <= 1e-7);
  }
  SUBCASE("projection on the positive definite side passes the second slot through") {
    std::mt19937_64 rng(14);
    const Mat h = random_sym(rng, 3), w = random_sym(rng, 3);
    const LownerJet2 jet = lowner_dir2(eig_sym(diag3(1, 2, 3)), max_fun(), h, w);
    CHECK((jet.dir2 - w).norm() <= 1e-11);
  }
  SUBCASE("frozen kink case validated by a Richardson oracle") {
    Mat h(2, 2);
    h << 0, 1, 1, 0;
    const Mat w = Mat::Zero(2, 2);
    const LownerJet2 jet = lowner_dir2(eig_sym(diag2(1, -1)), max_fun(), h, w);
    CHECK((jet.dir2 - 0.5 * Mat::Identity(2, 2)).norm() <= 1e-11);
    const Mat oracle = fd2_richardson(max_fun(), diag2(1, -1), h, w, 1e-4);
    CHECK((jet.dir2 - oracle).norm() <= 1e-6);
  }
  SUBCASE("finite-difference oracle across scalar functions") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 120; ++trial) {
      const int n = 3 + trial % 6;
      const OracleInstance inst = random_clustered_instance(rng, n, trial % 2 == 1);
      const ScalarFun& f = trial % 3 == 0 ? max_fun() : (trial % 3 == 1 ? abs_fun() : square_fun());
      const double r2 = fd_dir2_residual(f, inst.Z, inst.H, inst.W, 1e-2);
      const double r3 = fd_dir2_residual(f, inst.Z, inst.H, inst.W, 1e-3);
      CHECK(r3 <= 0.3 * r2 + 1e-6);
      CHECK(r3 <= 2e-3 * (1.0 + inst.W.norm()));
    }
  }
  SUBCASE("parabolic scaling") {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 40; ++trial) {
      const OracleInstance inst = random_clustered_instance(rng, 3 + trial % 5, trial % 2 == 0);
      const Spectral sp = eig_sym(inst.Z);
      const ScalarFun& f = trial % 2 == 0 ? max_fun() : abs_fun();
      const LownerJet2 base = lowner_dir2(sp, f, inst.H, inst.W);
      for (double s : {0.5, 2.0, 10.0}) {
        const LownerJet2 scaled = lowner_dir2(sp, f, Mat(s * inst.H), Mat(s * s * inst.W));
        CHECK((scaled.dir2 - s * s * base.dir2).norm() <= 1e-9 * s * s);
        CHECK((scaled.dir1 - s * base.dir1).norm() <= 1e-10 * s);
      }
    }
  }
  SUBCASE("invariant under a different eigenbasis of the same matrix") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
      const OracleInstance inst = random_clustered_instance(rng, 4 + trial % 4, true);
      const Spectral sp = eig_sym(inst.Z);
      const Spectral rotated = rotate_within_clusters(sp, rng);
      CHECK((rotated.reconstruct() - inst.Z).norm() <= 1e-10 * std::max(1.0, inst.Z.norm()));
      const LownerJet2 a = lowner_dir2(sp, max_fun(), inst.H, inst.W);
      const LownerJet2 b = lowner_dir2(rotated, max_fun(), inst.H, inst.W);
      CHECK((a.dir2 - b.dir2).norm() <= 1e-8);
      CHECK((a.dir1 - b.dir1).norm() <= 1e-9);
      CHECK((lowner_dir1(sp, abs_fun(), inst.H) - lowner_dir1(rotated, abs_fun(), inst.H)).norm() <= 1e-9);
    }
  }
}
