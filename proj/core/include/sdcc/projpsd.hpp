#pragma once

#include "sdcc/spectral.hpp"

namespace sdcc {

/// Projection onto the PSD / NSD cone.
Mat proj_psd(const Mat& a);
Mat proj_nsd(const Mat& a);
Mat proj_psd(const Spectral& spec);
Mat proj_nsd(const Spectral& spec);

/// First directional derivative of the PSD projection at Z in direction H.
Mat proj_dir1(const Mat& z, const Mat& h);
Mat proj_dir1(const Spectral& spec, const Mat& h);

/// Second directional derivative of the PSD projection,
///   Pi(Z + tH + t^2 W/2) = Pi(Z) + t Pi'(Z;H) + t^2/2 Pi''(Z;H,W) + o(t^2),
/// assembled from the eight closed-form block cases (five off-diagonal by the
/// position of the cluster pair relative to the zero cluster, three
/// diagonal).  Kept independent of the generic Loewner engine so that the two
/// implementations validate each other.
Mat proj_dir2(const Mat& z, const Mat& h, const Mat& w);
Mat proj_dir2(const Spectral& spec, const Mat& h, const Mat& w);

/// Second directional derivative of the NSD projection via the complement
/// identity Pi_+'' + Pi_-'' = W.
Mat proj_nsd_dir2(const Mat& z, const Mat& h, const Mat& w);

}  // namespace sdcc
