#pragma once

#include "sdcc/spectral.hpp"

#include <functional>

namespace sdcc {

/// Scalar function data underlying a Loewner operator: value, first and
/// second directional derivatives.  dir1(mu, eta) = f'(mu; eta) and
/// dir2(z, d, w) = f''(z; d, w) in the parabolic sense
///   f(z + t d + t^2 w / 2) = f(z) + t f'(z; d) + t^2/2 f''(z; d, w) + o(t^2).
struct ScalarFun {
  std::string name;
  std::function<double(double)> eval;
  std::function<double(double, double)> dir1;
  std::function<double(double, double, double)> dir2;
};

const ScalarFun& max_fun();       // t -> max(0, t)
const ScalarFun& min_fun();       // t -> min(0, t)
const ScalarFun& abs_fun();       // t -> |t|
const ScalarFun& square_fun();    // t -> t^2
const ScalarFun& identity_fun();  // t -> t

/// f'(mu; eta) for f = max(0, .).
double max_dir1(double mu, double eta);

/// f''(z; d, w) for f = max(0, .).
double max_dir2(double z, double d, double w);

/// Divided differences of the node interpolant g with g(mu_k) = f(mu_k) and
/// g'(mu_k) = 0, evaluated on the cluster values of a Spectral object.
/// Coincident arguments are resolved by the continuity limits; equality of
/// cluster values is exact by construction, so the tables switch on indices.
class DividedTables {
 public:
  DividedTables(const Spectral& spec, const ScalarFun& f);

  /// g^[1](mu_k, mu_l); zero on the diagonal (zero-derivative convention).
  double g1(int k, int l) const { return g1_(k, l); }
  const Mat& g1_table() const { return g1_; }

  /// g^[2](mu_k, mu_j, mu_l), symmetric in (k, l).
  double g2(int k, int j, int l) const;

 private:
  Vec mu_;
  Vec fval_;
  Mat g1_;
};

/// First divided-difference table of the plain max interpolant on the
/// cluster values: entries (f(mu_k) - f(mu_l)) / (mu_k - mu_l), 0 on the
/// diagonal.  For f = max this is the one / slope / zero block pattern.
Mat g1_table_max(const Spectral& spec);

/// Closed-form second divided difference for f = max(0, .), covering every
/// sign configuration of the three cluster values (arguments are assumed to
/// come from a common cluster table, so equality tests are exact).
double g2_max(double mu_k, double mu_j, double mu_l);

}  // namespace sdcc
