#pragma once

#include "sdcc/types.hpp"

namespace sdcc {

/// Ordered symmetric eigendecomposition Z = P Diag(lambda) P^T with the
/// eigenvalues grouped into distinct-value clusters mu_0 > mu_1 > ... and a
/// designated zero cluster at position r0.  When no eigenvalue lies within
/// cluster_tol of zero, an empty virtual cluster is inserted between the
/// positive and negative groups so that every case split k<r0 / k=r0 / k>r0
/// is well defined.
struct Spectral {
  Mat P;                       // orthogonal, columns ordered by nonincreasing eigenvalue
  Vec lambda;                  // nonincreasing
  std::vector<Range> clusters; // contiguous in the eigenvalue ordering
  Vec mu;                      // cluster values, mu[r0] == 0 exactly
  int r0 = 0;                  // index of the zero cluster
  double cluster_tol = 0.0;
  std::vector<std::string> warnings;

  int n() const { return static_cast<int>(P.rows()); }
  int r() const { return static_cast<int>(mu.size()); }

  /// P_{a_k}, the n x |a_k| eigenvector block of cluster k.
  Mat cols(int k) const { return P.middleCols(clusters[k].start, clusters[k].size); }

  /// Index ranges of the positive, zero, negative eigenvalue groups.
  Range alpha_range() const { return {0, clusters[r0].start}; }
  Range beta_range() const { return clusters[r0]; }
  Range gamma_range() const {
    const int s = clusters[r0].start + clusters[r0].size;
    return {s, n() - s};
  }

  /// Block (a_k, a_l) of an n x n matrix already expressed in the P basis.
  Eigen::Block<const Mat> block(const Mat& m, int k, int l) const {
    return m.block(clusters[k].start, clusters[l].start,
                   clusters[k].size, clusters[l].size);
  }

  Mat reconstruct() const { return P * lambda.asDiagonal() * P.transpose(); }
};

/// Default clustering tolerance 1e-8 * max(1, ||A||_F).
double default_cluster_tol(const Mat& a);

/// Eigendecomposition with nonincreasing ordering and eigenvalue clustering.
/// cluster_tol <= 0 selects the default.  Throws on solver failure.
Spectral eig_sym(const Mat& a, double cluster_tol = -1.0);

/// Identical contract to eig_sym; used for the sub-decompositions of
/// diagonal direction blocks (produces Q^k, eta^k, b^k_j and the sign split).
Spectral sub_spectral(const Mat& m, double cluster_tol = -1.0);

/// (Z - mu_k I)^dagger = sum_{j != k} (mu_j - mu_k)^{-1} P_{a_j} P_{a_j}^T.
/// The a_k block of the result is exactly zero.
Mat pinv_shifted(const Spectral& spec, int k);

/// Moore-Penrose pseudo-inverse assembled from the clustered decomposition
/// (the zero cluster is dropped).
Mat pinv_spectral(const Spectral& spec);

}  // namespace sdcc
