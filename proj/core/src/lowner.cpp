#include "sdcc/lowner.hpp"

namespace sdcc {

namespace {

// Phi_k(M) = sum_j f'(mu_k; eta_j) Q_j Q_j^T over the sub-clusters of M.
Mat phi_cluster(const Spectral& sub, const ScalarFun& f, double mu_k) {
  Mat out = Mat::Zero(sub.n(), sub.n());
  for (int j = 0; j < sub.r(); ++j) {
    if (sub.clusters[j].empty()) continue;
    const Mat qj = sub.cols(j);
    out += f.dir1(mu_k, sub.mu[j]) * qj * qj.transpose();
  }
  return out;
}

// Entrywise divided differences of phi_k at the eigenvalues of the diagonal
// direction block; zero within a sub-cluster (the Psi term covers those).
Mat phi1_table(const Spectral& sub, const ScalarFun& f, double mu_k) {
  const int m = sub.n();
  std::vector<int> cluster_of(m);
  for (int j = 0; j < sub.r(); ++j)
    for (int i = 0; i < sub.clusters[j].size; ++i)
      cluster_of[sub.clusters[j].start + i] = j;
  Mat t = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const int ci = cluster_of[i], cj = cluster_of[j];
      if (ci == cj) continue;
      t(i, j) = (f.dir1(mu_k, sub.mu[ci]) - f.dir1(mu_k, sub.mu[cj])) /
                (sub.mu[ci] - sub.mu[cj]);
    }
  return t;
}

}  // namespace

Mat lowner_apply(const Spectral& spec, const ScalarFun& f) {
  Vec fv(spec.n());
  for (int i = 0; i < spec.n(); ++i) fv[i] = f.eval(spec.lambda[i]);
  return symmetrize(spec.P * fv.asDiagonal() * spec.P.transpose());
}

Mat lowner_dir1(const Spectral& spec, const ScalarFun& f, const Mat& h) {
  const Mat hs = require_symmetric(h, "lowner_dir1");
  require_same_size(spec.P, hs, "lowner_dir1");
  const Mat htil = spec.P.transpose() * hs * spec.P;
  const DividedTables tab(spec, f);
  const int r = spec.r();
  Mat m = Mat::Zero(spec.n(), spec.n());
  for (int k = 0; k < r; ++k) {
    const Range& ak = spec.clusters[k];
    if (ak.empty()) continue;
    const Mat hkk = symmetrize(spec.block(htil, k, k));
    const Spectral sub = sub_spectral(hkk);
    m.block(ak.start, ak.start, ak.size, ak.size) = phi_cluster(sub, f, spec.mu[k]);
    for (int l = k + 1; l < r; ++l) {
      if (spec.clusters[l].empty()) continue;
      const Range& al = spec.clusters[l];
      const Mat blk = tab.g1(k, l) * spec.block(htil, k, l);
      m.block(ak.start, al.start, ak.size, al.size) = blk;
      m.block(al.start, ak.start, al.size, ak.size) = blk.transpose();
    }
  }
  return symmetrize(spec.P * m * spec.P.transpose());
}

LownerJet2 lowner_dir2(const Spectral& spec, const ScalarFun& f, const Mat& h,
                       const Mat& w) {
  const Mat hs = require_symmetric(h, "lowner_dir2(H)");
  const Mat ws = require_symmetric(w, "lowner_dir2(W)");
  require_same_size(spec.P, hs, "lowner_dir2");
  require_same_size(spec.P, ws, "lowner_dir2");

  LownerJet2 jet;
  jet.warnings = spec.warnings;
  jet.value = lowner_apply(spec, f);
  jet.dir1 = lowner_dir1(spec, f, hs);

  const int n = spec.n();
  const int r = spec.r();
  const Mat htil = spec.P.transpose() * hs * spec.P;
  const Mat wtil = spec.P.transpose() * ws * spec.P;
  const DividedTables tab(spec, f);

  // Per-cluster data: eigenvector block, sub-decomposition of Htil_kk, Phi_k,
  // and V_k = P_k^T (W - 2 H (Z - mu_k I)^+ H) P_k.
  std::vector<Mat> pk(r), phi(r), vk(r);
  std::vector<Spectral> sub(r);
  for (int k = 0; k < r; ++k) {
    if (spec.clusters[k].empty()) continue;
    pk[k] = spec.cols(k);
    const Mat hkk = symmetrize(spec.block(htil, k, k));
    sub[k] = sub_spectral(hkk);
    for (const auto& warning : sub[k].warnings)
      jet.warnings.push_back("cluster " + std::to_string(k) + ": " + warning);
    phi[k] = phi_cluster(sub[k], f, spec.mu[k]);
    vk[k] = symmetrize(pk[k].transpose() *
                       (ws - 2.0 * hs * pinv_shifted(spec, k) * hs) * pk[k]);
  }

  Mat b = Mat::Zero(n, n);
  for (int k = 0; k < r; ++k) {
    const Range& ak = spec.clusters[k];
    if (ak.empty()) continue;

    // Diagonal block: Hadamard part, curvature kernel, Psi part.
    {
      const Mat& q = sub[k].P;
      const Mat vhat = q.transpose() * vk[k] * q;
      Mat blk = q * phi1_table(sub[k], f, spec.mu[k]).cwiseProduct(vhat) * q.transpose();

      Mat kern = Mat::Zero(n, n);
      for (int j = 0; j < r; ++j) {
        if (j == k || spec.clusters[j].empty()) continue;
        kern += tab.g2(k, j, k) * pk[j] * pk[j].transpose();
      }
      blk += 2.0 * pk[k].transpose() * hs * kern * hs * pk[k];

      Mat psi = Mat::Zero(ak.size, ak.size);
      for (int p = 0; p < sub[k].r(); ++p) {
        const Range& bp = sub[k].clusters[p];
        if (bp.empty()) continue;
        const Mat qp = sub[k].cols(p);
        const Spectral es = sub_spectral(symmetrize(qp.transpose() * vk[k] * qp));
        Vec ev(es.n());
        for (int i = 0; i < es.n(); ++i)
          ev[i] = f.dir2(spec.mu[k], sub[k].mu[p], es.lambda[i]);
        psi += qp * (es.P * ev.asDiagonal() * es.P.transpose()) * qp.transpose();
      }
      blk += psi;
      b.block(ak.start, ak.start, ak.size, ak.size) = symmetrize(blk);
    }

    for (int l = k + 1; l < r; ++l) {
      const Range& al = spec.clusters[l];
      if (al.empty()) continue;
      Mat kern = Mat::Zero(n, n);
      for (int j = 0; j < r; ++j) {
        if (spec.clusters[j].empty()) continue;
        kern += tab.g2(k, j, l) * pk[j] * pk[j].transpose();
      }
      const Mat hkl = spec.block(htil, k, l);
      Mat blk = tab.g1(k, l) * spec.block(wtil, k, l) +
                2.0 * pk[k].transpose() * hs * kern * hs * pk[l] +
                2.0 / (spec.mu[l] - spec.mu[k]) * hkl * phi[l] +
                2.0 / (spec.mu[k] - spec.mu[l]) * phi[k] * hkl;
      b.block(ak.start, al.start, ak.size, al.size) = blk;
      b.block(al.start, ak.start, al.size, ak.size) = blk.transpose();
    }
  }

  jet.dir2 = symmetrize(spec.P * b * spec.P.transpose());
  return jet;
}

}  // namespace sdcc
