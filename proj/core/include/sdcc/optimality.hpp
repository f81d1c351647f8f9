#pragma once

#include "sdcc/geometry.hpp"

namespace sdcc {

/// Degree-<=2 polynomial on R^m: c + lin.x + x^T quad x / 2.
struct Poly2 {
  double c = 0.0;
  Vec lin;
  Mat quad;

  double eval(const Vec& x) const;
  Vec grad(const Vec& x) const;
  double dir(const Vec& x, const Vec& d) const { return grad(x).dot(d); }
  double dir2(const Vec& d) const { return quad.size() ? d.dot(quad * d) : 0.0; }
  void validate(int m, const std::string& what) const;
};

struct ConeFactor {
  enum Type { Psd, Orthant, Zero, Free } type = Psd;
  int dim = 0;  // matrix order for Psd, vector length otherwise
  int entries() const { return type == Psd ? dim * (dim + 1) / 2 : dim; }
};

/// Instance data: min phi(x) s.t. h(x) in K, (theta(x), zeta(x)) in Omega,
/// all maps given as per-entry polynomials of degree <= 2 so that gradients
/// and Hessians are exact.  Symmetric-matrix outputs are stacked as upper
/// triangle entries (i <= j, row-major).
struct ProblemSpec {
  int m = 0;
  int n = 0;
  std::vector<ConeFactor> K;
  Poly2 phi;
  std::vector<Poly2> h;
  std::vector<Poly2> theta;
  std::vector<Poly2> zeta;

  int h_entries() const;
  void validate() const;
};

/// Upper-triangle entry indexing shared by every symmetric-matrix map.
std::vector<std::pair<int, int>> sym_entry_index(int n);
Mat sym_from_entries(const Vec& e, int n);
Vec sym_to_entries(const Mat& m);

/// Candidate Lagrange multipliers: xi stacked like h, (gamma1, gamma2) for
/// the complementarity pair.
struct MultiplierPair {
  Vec xi;
  Mat gamma1, gamma2;
};

enum class Flavor { Clarke, Limiting, Regular };
Flavor flavor_from_string(const std::string& s);
std::string to_string(Flavor f);

struct Jet {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

/// L(x, xi, Gamma) = phi(x) + <xi, h(x)> + <Gamma1, theta(x)> + <Gamma2, zeta(x)>.
Jet lagrangian_jet(const ProblemSpec& spec, const Vec& x, const MultiplierPair& mult);

/// Constraint-map evaluations and directional data.
Vec eval_h(const ProblemSpec& spec, const Vec& x);
Vec h_dir(const ProblemSpec& spec, const Vec& x, const Vec& d);
Mat eval_theta(const ProblemSpec& spec, const Vec& x);
Mat eval_zeta(const ProblemSpec& spec, const Vec& x);
Mat theta_dir(const ProblemSpec& spec, const Vec& x, const Vec& d);
Mat zeta_dir(const ProblemSpec& spec, const Vec& x, const Vec& d);

/// Feasibility residual: cone distances of h(x) plus the complementarity
/// residual of (theta(x), zeta(x)).
double feasibility_residual(const ProblemSpec& spec, const Vec& x);

struct StationarityReport {
  Flavor flavor = Flavor::Clarke;
  double grad_norm = 0.0;       // ||grad_x L||
  double feasibility = 0.0;
  double cone_residual = 0.0;   // normal-cone membership deficit
  double residual = 0.0;        // grad_norm + cone_residual
  bool sampled = false;         // limiting flavor is a sampled approximation
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
};

/// Residual of (xi, Gamma) as a multiplier of the chosen flavor at x.
/// Throws when x is far from feasible (residual above 100x tol).
StationarityReport stationarity_residual(const ProblemSpec& spec, const Vec& x,
                                         const MultiplierPair& mult, Flavor flavor,
                                         double tol = 1e-8);

/// d in the critical cone: phi'(x) d <= tol, h'(x) d tangent to K at h(x),
/// (theta'(x) d, zeta'(x) d) tangent to Omega at (theta(x), zeta(x)).
MembershipReport critical_cone_test(const ProblemSpec& spec, const Vec& x,
                                    const Vec& d, double tol = 1e-8);

struct ConditionReport {
  Vec d;
  double stationarity = 0.0;         // Clarke-flavor residual of the multipliers
  double stationarity_regular = 0.0;
  double feasibility = 0.0;
  double critical_residual = 0.0;
  double quad = 0.0;                 // <d, hess_x L d>
  SigmaValue sigma;                  // over T^2_{K x Omega}(Y(x); Y'(x) d)
  double margin = 0.0;               // quad - sigma.value, meaningful when sigma finite
  bool vacuous = false;              // sigma infinite for this (xi, Gamma, d)
  std::vector<std::string> warnings; // includes the CQ-assumed banner
};

/// Second-order necessary-condition margin at a critical direction:
///   <d, hess_x L(x, xi, Gamma) d> - sigma((xi, Gamma) | T^2_{K x Omega}).
/// Constraint qualifications are assumed, not verified (reported as such).
ConditionReport sonc_margin(const ProblemSpec& spec, const Vec& x,
                            const MultiplierPair& mult, const Vec& d,
                            double tol = 1e-8);

enum class SoscVariant { Tight, Relaxed };

struct SamplerConfig {
  int samples = 64;
  std::uint64_t seed = 0x5DCC;
  double tol = 1e-8;
  int jobs = 1;
};

struct SoncAggregate {
  double min_margin = 0.0;
  Vec worst_d;
  int evaluated = 0;
  int vacuous = 0;
  bool violated = false;  // min margin < -margin_tol: x certified non-optimal
  double margin_tol = 1e-6;
  std::vector<std::string> warnings;
};

/// Samples unit critical directions (null-space parameterization of the
/// linear tangency constraints, conic parts by rejection) and aggregates
/// sonc_margin.  Deterministic for a fixed config.
SoncAggregate sonc_check(const ProblemSpec& spec, const Vec& x,
                         const MultiplierPair& mult, const SamplerConfig& cfg);

struct SoscAggregate {
  double estimate = 0.0;  // inf over sampled d of sup over multipliers
  Vec worst_d;
  int evaluated = 0;
  SoscVariant variant = SoscVariant::Tight;
  bool positive = false;  // sampled lower-confidence check, never a proof
  std::vector<std::string> warnings;
};

/// Sampled sufficient-condition estimate.  variant selects the support set:
/// tight uses T^2 of the complementarity set, relaxed uses the product-cone
/// second-order set (larger, hence smaller margins).
SoscAggregate sosc_check(const ProblemSpec& spec, const Vec& x,
                         const std::vector<MultiplierPair>& mults,
                         const SamplerConfig& cfg,
                         SoscVariant variant = SoscVariant::Tight);

/// Least-squares fit of (xi, Gamma) to grad_x L = 0 at x (convenience only;
/// callers still validate via stationarity_residual).
MultiplierPair fit_multipliers(const ProblemSpec& spec, const Vec& x);

}  // namespace sdcc
