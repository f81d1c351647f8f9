#pragma once

#include "sdcc/scalarfun.hpp"

namespace sdcc {

/// Value and first/second directional derivatives of a Loewner operator at a
/// point, in a common direction pair (H, W):
///   F(Z + tH + t^2 W/2) = value + t dir1 + t^2/2 dir2 + o(t^2).
struct LownerJet2 {
  Mat value;
  Mat dir1;
  Mat dir2;
  std::vector<std::string> warnings;
};

/// F(Z) = P Diag(f(lambda_i)) P^T.
Mat lowner_apply(const Spectral& spec, const ScalarFun& f);

/// First directional derivative F'(Z; H): divided-difference scaling of the
/// off-diagonal blocks plus the per-cluster spectral map of the diagonal
/// blocks.
Mat lowner_dir1(const Spectral& spec, const ScalarFun& f, const Mat& h);

/// Second directional derivative F''(Z; H, W), assembled blockwise from the
/// sub-decompositions of the diagonal direction blocks, the first/second
/// divided-difference tables and the curvature kernels (Z - mu_k I)^dagger.
LownerJet2 lowner_dir2(const Spectral& spec, const ScalarFun& f, const Mat& h,
                       const Mat& w);

}  // namespace sdcc
