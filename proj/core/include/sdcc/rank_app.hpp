#pragma once

#include "sdcc/optimality.hpp"

namespace sdcc {

/// Rank-regularized instance: min over symmetric X of loss(X) + rank(X),
/// with the loss given as a degree-<=2 polynomial over the n(n+1)/2 upper
/// triangle entries of X.
struct RankInstance {
  int n = 0;
  Poly2 loss;
  std::vector<std::string> warnings;  // e.g. nonnegativity of the loss not checked
};

/// Equivalent complementarity program over (X, W):
///   min loss(X) + tr(W)  s.t.  W psd,  (X, W - I) in Omega.
/// Decision coordinates are the stacked upper-triangle entries of X then W.
ProblemSpec build_mpec(const RankInstance& inst);

/// Lift of a candidate matrix: W* is the projector onto the span of the
/// eigenvectors with eigenvalues above rank_tol (numerical rank r), so that
/// (X*, W* - I) lies in the complementarity set.
struct LiftedPoint {
  Mat X, W;
  int rank = 0;
  std::vector<std::string> warnings;
};
LiftedPoint lift_point(const Mat& x_star, double rank_tol = -1.0);

/// Packs matrices (X, W) into the decision vector of build_mpec and back.
Vec pack_point(const Mat& x, const Mat& w);
std::pair<Mat, Mat> unpack_point(const Vec& v, int n);

/// One clause of the worked-example reproduction report.
struct ExampleClause {
  std::string name;
  bool pass = false;
  double error = 0.0;
  std::string detail;
};

/// Full report of the built-in 3x3 worked example: loss
///   (X11 - 1)^2 / 2 + X33 + 2 (X12^2 + X21^2)
/// at the rank-one optimum lifted to (X*, W*).  Checks the canonical
/// multipliers, the critical-cone parameterization, the second-order tangent
/// template, the support-function total, the Lagrangian quadratic form, and
/// the necessary-condition margin against the pinned reference values.
struct ExampleReport {
  std::vector<ExampleClause> clauses;
  bool pass = false;            // all clauses
  double runtime_seconds = 0.0;
  std::vector<std::string> notes;
};
ExampleReport example1(int grid_limit = 1);

/// The instance and canonical data of the worked example, exposed for tests.
struct ExampleData {
  RankInstance inst;
  ProblemSpec spec;
  Vec x_star;          // packed (X*, W*)
  Mat Xs, Ws, Ys;      // X*, W*, Y* = W* - I
  MultiplierPair mult; // xi = Diag(0,-1,-1), Gamma1 = Diag(0,0,-1), Gamma2 = Diag(-1,0,0)
  Vec direction(double g11, double g12, double g13) const;  // packed (G, H)
  Mat gmat(double g11, double g12, double g13) const;
  Mat hmat(double g12, double g13) const;
};
ExampleData example_data();

}  // namespace sdcc
