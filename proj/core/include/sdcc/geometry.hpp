#pragma once

#include "sdcc/projpsd.hpp"

#include <random>
#include <utility>

namespace sdcc {

enum class Verdict { In, Borderline, Out };

std::string to_string(Verdict v);

struct Violation {
  std::string block;
  std::string constraint;
  double magnitude = 0.0;
};

struct MembershipReport {
  Verdict verdict = Verdict::Out;
  double residual = 0.0;
  double tol = 0.0;
  std::vector<Violation> violations;  // sorted by decreasing magnitude
  std::vector<std::string> warnings;

  bool accepted() const { return verdict != Verdict::Out; }
  bool in() const { return verdict == Verdict::In; }
};

MembershipReport make_report(double residual, double tol,
                             std::vector<Violation> violations = {},
                             std::vector<std::string> warnings = {});

/// A point (X, Y) of the complementarity set
///   Omega = { (X, Y) : X psd, Y nsd, <X, Y> = 0 },
/// together with the shared spectral data of Z = X + Y.
struct CCPair {
  Mat X, Y;
  Spectral spec;  // of X + Y
  double tol = 1e-8;
};

/// Membership of (X, Y) in Omega; the residual is ||X - Pi_+(X+Y)||_F.
MembershipReport in_omega(const Mat& x, const Mat& y, double tol = 1e-8);

/// Validated constructor; throws when in_omega rejects.
CCPair make_ccpair(const Mat& x, const Mat& y, double tol = 1e-8);

/// (F, G) in T_Omega(X, Y), tested via Pi'(Z; F+G) = F.
MembershipReport tangent_test(const CCPair& base, const Mat& f, const Mat& g,
                              double tol = 1e-8);

/// (S, T) in T^2_Omega((X,Y); (F,G)), tested via Pi''(Z; F+G, S+T) = S.
/// Rejects with a warning when (F, G) itself fails tangent_test.
MembershipReport tangent2_test(const CCPair& base, const Mat& f, const Mat& g,
                               const Mat& s, const Mat& t, double tol = 1e-8);

/// Structural description of T^2_Omega((X,Y); (F,G)): every (k,l) cluster
/// block of (S~, T~) = (P^T S P, P^T T P) is classified as fixed-value,
/// linearly coupled, part of the zero-cluster sub-structure, or free.
struct Tangent2Data {
  Mat X, Y, F, G, H;  // base pair, direction pair, H = F + G
  Spectral spec;      // of Z = X + Y
  Mat htil;           // P^T H P
  double tol = 1e-8;

  struct OffBlock {
    int k = 0, l = 0;  // k < l, both clusters nonempty
    enum Kind { FixedT, FixedS, Coupled } kind = FixedT;
    Mat fixed;       // fixed value of T~ (FixedT) or S~ (FixedS)
    Mat couple_rhs;  // Coupled: mu_l * S~ + mu_k * T~ = couple_rhs entrywise
  };
  struct DiagBlock {
    int k = 0;
    enum Kind { FixedT, FixedS, Zero } kind = FixedT;
    Mat fixed;
    // Zero-cluster data (kind == Zero): sub-decomposition of Htil_kk and the
    // shifts/slope table entering the beta-block complementarity.
    Spectral sub;
    Mat dplus, dminus;  // in the Q basis of `sub`
    Mat sigma_ag;       // eta-based slopes on alpha^k x gamma^k
  };
  std::vector<OffBlock> off;
  std::vector<DiagBlock> diag;
  std::vector<std::string> warnings;

  /// Structural membership check of a candidate (S, T).
  MembershipReport residual(const Mat& s, const Mat& t) const;

  /// Draws a member of the second-order tangent set.  Free parameters are
  /// scaled by `scale`; scale 0 gives the minimal member (all free blocks and
  /// the beta-block complementarity pair set to zero).
  std::pair<Mat, Mat> sample_member(std::mt19937_64& rng, double scale = 1.0) const;

  /// Perturbs one constraint of a member by `magnitude`, leaving the others
  /// intact; `which` receives the perturbed constraint id.
  std::pair<Mat, Mat> sample_nonmember(std::mt19937_64& rng, double magnitude,
                                       std::string* which = nullptr) const;
};

/// Builds the structural data; throws when the base or direction fails its
/// membership test.
Tangent2Data tangent2_structural(const CCPair& base, const Mat& f, const Mat& g,
                                 double tol = 1e-8);

/// Cross-validation harness: runs tangent2_test and the structural check and
/// reports whether the verdicts agree (disagreement is a test failure
/// upstream, never silently resolved here).
struct Tangent2Agreement {
  MembershipReport derivative;  // via proj_dir2
  MembershipReport structural;  // via Tangent2Data
  bool agree = false;
};
Tangent2Agreement tangent2_agree(const CCPair& base, const Mat& f, const Mat& g,
                                 const Mat& s, const Mat& t, double tol = 1e-8);

/// Clarke tangent cone of Omega at (X, Y) and its polar: zero-block patterns
/// plus the slope-coupled alpha x gamma relation.
MembershipReport clarke_tangent_test(const CCPair& base, const Mat& f,
                                     const Mat& g, double tol = 1e-8);
MembershipReport clarke_polar_test(const CCPair& base, const Mat& df,
                                   const Mat& dg, double tol = 1e-8);

/// Nearby point of Omega along the parabolic arc
///   Z(t) = X + Y + t (F+G) + t^2/2 (S+T),  X(t) = Pi_+(Z(t)), Y(t) = Z(t) - X(t),
/// and the distance bound from the parabolic point to it.
struct CurvePoint {
  Mat Xt, Yt;
  double bound = 0.0;
};
CurvePoint curve_to_omega(const CCPair& base, const Mat& f, const Mat& g,
                          const Mat& s, const Mat& t, double time);

/// Support-function value over a (second-order tangent) set; infinite is a
/// value, not an error.
struct SigmaValue {
  bool finite = false;
  double value = 0.0;
  std::vector<std::string> notes;
};

/// Support of (G1, G2) over T^2_Omega described by `data`: finite iff the
/// multiplier vanishes against every free block, satisfies the coupling
/// relations' row-space conditions, and has the right semidefinite signs on
/// the beta block; see the per-block rules in sigma.cpp.
SigmaValue sigma_tangent2_omega(const Mat& g1, const Mat& g2,
                                const Tangent2Data& data, double tol = 1e-8);

/// Support of xi over T^2_{S+}(A; H) for xi in the normal cone at A and H
/// tangent at A: finite value 2 <xi, H A^+ H> under the support conditions,
/// +infinity otherwise.
SigmaValue sigma_tangent2_psd(const Mat& xi, const Mat& a, const Mat& h,
                              double tol = 1e-8);

/// Mirror statement for the NSD cone.
SigmaValue sigma_tangent2_nsd(const Mat& xi, const Mat& a, const Mat& h,
                              double tol = 1e-8);

/// Random generation helpers (deterministic under a caller-provided engine).
Mat random_sym(std::mt19937_64& rng, int n, double scale = 1.0);
Mat random_orthogonal(std::mt19937_64& rng, int n);
std::pair<Mat, Mat> random_omega_pair(std::mt19937_64& rng, int n, double scale = 1.0);
/// Tangent direction via the projection-derivative split of a random matrix.
std::pair<Mat, Mat> random_tangent(std::mt19937_64& rng, const CCPair& base,
                                   double scale = 1.0);

/// Base/direction templates covering the degenerate geometries (interior in
/// X, interior in Y, the origin, boundary-Y with zero X, boundary-X with zero
/// Y) plus members and single-violation non-members of the corresponding
/// second-order tangent sets.
struct SpecialCaseInstance {
  CCPair base;
  Mat F, G;
  Tangent2Data data;
  std::vector<std::pair<Mat, Mat>> members;
  std::vector<std::pair<Mat, Mat>> nonmembers;
  std::vector<std::string> nonmember_tags;
};
SpecialCaseInstance special_case_generator(int which, int n, std::uint64_t seed,
                                           int n_members = 3, int n_nonmembers = 3);

/// Generic base (no special structure; optional nonempty zero cluster) with a
/// random tangent direction.
SpecialCaseInstance generic_case_generator(int n, bool with_zero_cluster,
                                           std::uint64_t seed, int n_members = 3,
                                           int n_nonmembers = 3);

}  // namespace sdcc
