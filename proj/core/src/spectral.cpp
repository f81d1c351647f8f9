#include "sdcc/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sdcc {

double default_cluster_tol(const Mat& a) {
  return 1e-8 * std::max(1.0, a.norm());
}

Spectral eig_sym(const Mat& a, double cluster_tol) {
  const Mat as = require_symmetric(a, "eig_sym");
  const int n = static_cast<int>(as.rows());
  if (cluster_tol <= 0.0) cluster_tol = default_cluster_tol(as);
  if (n == 0) {
    Spectral s;
    s.P = Mat(0, 0);
    s.lambda = Vec(0);
    s.clusters = {{0, 0}};
    s.mu = Vec::Zero(1);
    s.r0 = 0;
    s.cluster_tol = cluster_tol;
    return s;
  }

  Eigen::SelfAdjointEigenSolver<Mat> es(as);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error(
        "eig_sym: eigensolver did not converge (n=" + std::to_string(n) +
        ", ||A||_F=" + std::to_string(as.norm()) +
        ", ||A||_inf=" + std::to_string(as.cwiseAbs().maxCoeff()) + ")");
  }

  Spectral s;
  s.cluster_tol = cluster_tol;
  s.lambda = es.eigenvalues().reverse();
  s.P = es.eigenvectors().rowwise().reverse();

  // Indices within cluster_tol of zero form the (possibly empty) zero group;
  // positives and negatives are chained by adjacent gaps <= cluster_tol.
  int zero_begin = 0;
  while (zero_begin < n && s.lambda[zero_begin] > cluster_tol) ++zero_begin;
  int zero_end = zero_begin;
  while (zero_end < n && std::abs(s.lambda[zero_end]) <= cluster_tol) ++zero_end;

  std::vector<Range> clusters;
  std::vector<double> values;
  auto chain = [&](int lo, int hi) {
    int start = lo;
    for (int i = lo + 1; i <= hi; ++i) {
      if (i == hi || s.lambda[i - 1] - s.lambda[i] > cluster_tol) {
        clusters.push_back({start, i - start});
        double v = 0.0;
        for (int j = start; j < i; ++j) v += s.lambda[j];
        values.push_back(v / (i - start));
        start = i;
      }
    }
  };

  chain(0, zero_begin);
  s.r0 = static_cast<int>(clusters.size());
  clusters.push_back({zero_begin, zero_end - zero_begin});
  values.push_back(0.0);
  chain(zero_end, n);

  s.clusters = std::move(clusters);
  s.mu = Eigen::Map<Vec>(values.data(), static_cast<Eigen::Index>(values.size()));

  for (int k = 0; k + 1 < s.r(); ++k) {
    if (s.clusters[k].empty() || s.clusters[k + 1].empty()) continue;
    const double gap = s.mu[k] - s.mu[k + 1];
    if (gap <= 10.0 * cluster_tol)
      s.warnings.push_back("ill-conditioned cluster gap " + std::to_string(gap) +
                           " between clusters " + std::to_string(k) + " and " +
                           std::to_string(k + 1));
  }
  for (int k = 0; k < s.r(); ++k) {
    const Range& c = s.clusters[k];
    if (c.size > 1 && s.lambda[c.start] - s.lambda[c.start + c.size - 1] > cluster_tol)
      s.warnings.push_back("cluster " + std::to_string(k) +
                           " spread exceeds cluster_tol (chained grouping)");
  }
  return s;
}

Spectral sub_spectral(const Mat& m, double cluster_tol) {
  return eig_sym(m, cluster_tol);
}

Mat pinv_shifted(const Spectral& spec, int k) {
  if (k < 0 || k >= spec.r())
    throw std::invalid_argument("pinv_shifted: cluster index out of range");
  Mat out = Mat::Zero(spec.n(), spec.n());
  for (int j = 0; j < spec.r(); ++j) {
    if (j == k || spec.clusters[j].empty()) continue;
    const Mat pj = spec.cols(j);
    out += (1.0 / (spec.mu[j] - spec.mu[k])) * pj * pj.transpose();
  }
  return out;
}

Mat pinv_spectral(const Spectral& spec) {
  Mat out = Mat::Zero(spec.n(), spec.n());
  for (int j = 0; j < spec.r(); ++j) {
    if (j == spec.r0 || spec.clusters[j].empty()) continue;
    const Mat pj = spec.cols(j);
    out += (1.0 / spec.mu[j]) * pj * pj.transpose();
  }
  return out;
}

}  // namespace sdcc
