#include "sdcc/projpsd.hpp"

#include "sdcc/scalarfun.hpp"

namespace sdcc {

namespace {

Mat apply_scalar(const Spectral& spec, double (*f)(double)) {
  Vec fv(spec.n());
  for (int i = 0; i < spec.n(); ++i) fv[i] = f(spec.lambda[i]);
  return symmetrize(spec.P * fv.asDiagonal() * spec.P.transpose());
}

double pos(double t) { return t > 0.0 ? t : 0.0; }
double neg(double t) { return t < 0.0 ? t : 0.0; }

// eta-based slope table on alpha^k x gamma^k of a sub-decomposition:
// Sigma_ij = eta_i / (eta_i - eta_j) for eta_i > 0 > eta_j.
Mat sigma_sub_table(const Spectral& sub) {
  const Range a = sub.alpha_range(), g = sub.gamma_range();
  Mat s(a.size, g.size);
  for (int i = 0; i < a.size; ++i)
    for (int j = 0; j < g.size; ++j) {
      const double ei = sub.lambda[a.start + i], ej = sub.lambda[g.start + j];
      s(i, j) = ei / (ei - ej);
    }
  return s;
}

}  // namespace

Mat proj_psd(const Spectral& spec) { return apply_scalar(spec, pos); }
Mat proj_nsd(const Spectral& spec) { return apply_scalar(spec, neg); }
Mat proj_psd(const Mat& a) { return proj_psd(eig_sym(a)); }
Mat proj_nsd(const Mat& a) { return proj_nsd(eig_sym(a)); }

Mat proj_dir1(const Spectral& spec, const Mat& h) {
  const Mat hs = require_symmetric(h, "proj_dir1");
  require_same_size(spec.P, hs, "proj_dir1");
  const Mat htil = spec.P.transpose() * hs * spec.P;
  const Mat g1 = g1_table_max(spec);
  const int r = spec.r();
  Mat m = Mat::Zero(spec.n(), spec.n());
  for (int k = 0; k < r; ++k) {
    const Range& ak = spec.clusters[k];
    if (ak.empty()) continue;
    const Mat hkk = symmetrize(spec.block(htil, k, k));
    if (k < spec.r0)
      m.block(ak.start, ak.start, ak.size, ak.size) = hkk;
    else if (k == spec.r0)
      m.block(ak.start, ak.start, ak.size, ak.size) = proj_psd(hkk);
    for (int l = k + 1; l < r; ++l) {
      const Range& al = spec.clusters[l];
      if (al.empty()) continue;
      const Mat blk = g1(k, l) * spec.block(htil, k, l);
      m.block(ak.start, al.start, ak.size, al.size) = blk;
      m.block(al.start, ak.start, al.size, ak.size) = blk.transpose();
    }
  }
  return symmetrize(spec.P * m * spec.P.transpose());
}

Mat proj_dir1(const Mat& z, const Mat& h) { return proj_dir1(eig_sym(z), h); }

Mat proj_dir2(const Spectral& spec, const Mat& h, const Mat& w) {
  const Mat hs = require_symmetric(h, "proj_dir2(H)");
  const Mat ws = require_symmetric(w, "proj_dir2(W)");
  require_same_size(spec.P, hs, "proj_dir2");
  require_same_size(spec.P, ws, "proj_dir2");

  const int n = spec.n();
  const int r = spec.r();
  const int r0 = spec.r0;
  const Vec& mu = spec.mu;
  const Mat htil = spec.P.transpose() * hs * spec.P;
  const Mat wtil = spec.P.transpose() * ws * spec.P;

  std::vector<Mat> pk(r);
  for (int k = 0; k < r; ++k)
    if (!spec.clusters[k].empty()) pk[k] = spec.cols(k);

  // Each curvature sum is materialized once per block as an n x n kernel and
  // sandwiched as P_k^T H [kernel] H P_l.
  auto sandwich = [&](int k, const Mat& kern, int l) -> Mat {
    return pk[k].transpose() * hs * kern * hs * pk[l];
  };

  Mat b = Mat::Zero(n, n);
  for (int k = 0; k < r; ++k) {
    const Range& ak = spec.clusters[k];
    if (ak.empty()) continue;

    {  // diagonal block
      Mat blk;
      if (k < r0) {
        Mat kern = Mat::Zero(n, n);
        for (int j = r0 + 1; j < r; ++j) {
          if (spec.clusters[j].empty()) continue;
          const double d = mu[j] - mu[k];
          kern += mu[j] / (d * d) * pk[j] * pk[j].transpose();
        }
        blk = spec.block(wtil, k, k) - 2.0 * sandwich(k, kern, k);
      } else if (k > r0) {
        Mat kern = Mat::Zero(n, n);
        for (int j = 0; j < r0; ++j) {
          if (spec.clusters[j].empty()) continue;
          const double d = mu[j] - mu[k];
          kern += mu[j] / (d * d) * pk[j] * pk[j].transpose();
        }
        blk = 2.0 * sandwich(k, kern, k);
      } else {
        // zero cluster: spectral split of the diagonal direction block
        const Mat hkk = symmetrize(spec.block(htil, k, k));
        const Spectral sub = sub_spectral(hkk);
        const Mat vk = symmetrize(
            pk[k].transpose() * (ws - 2.0 * hs * pinv_shifted(spec, k) * hs) * pk[k]);
        const Mat vhat = symmetrize(sub.P.transpose() * vk * sub.P);
        const Range sa = sub.alpha_range(), sb = sub.beta_range(), sg = sub.gamma_range();
        Mat core = Mat::Zero(ak.size, ak.size);
        core.block(sa.start, sa.start, sa.size, sa.size) =
            vhat.block(sa.start, sa.start, sa.size, sa.size);
        core.block(sa.start, sb.start, sa.size, sb.size) =
            vhat.block(sa.start, sb.start, sa.size, sb.size);
        core.block(sb.start, sa.start, sb.size, sa.size) =
            vhat.block(sb.start, sa.start, sb.size, sa.size);
        const Mat sg_tab = sigma_sub_table(sub);
        core.block(sa.start, sg.start, sa.size, sg.size) =
            sg_tab.cwiseProduct(vhat.block(sa.start, sg.start, sa.size, sg.size));
        core.block(sg.start, sa.start, sg.size, sa.size) =
            core.block(sa.start, sg.start, sa.size, sg.size).transpose();
        if (!sb.empty())
          core.block(sb.start, sb.start, sb.size, sb.size) =
              proj_psd(symmetrize(vhat.block(sb.start, sb.start, sb.size, sb.size)));
        Mat kern = Mat::Zero(n, n);
        for (int j = 0; j < r0; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += 1.0 / mu[j] * pk[j] * pk[j].transpose();
        }
        blk = sub.P * core * sub.P.transpose() + 2.0 * sandwich(k, kern, k);
      }
      b.block(ak.start, ak.start, ak.size, ak.size) = symmetrize(blk);
    }

    for (int l = k + 1; l < r; ++l) {
      const Range& al = spec.clusters[l];
      if (al.empty()) continue;
      const Mat hkl = spec.block(htil, k, l);
      Mat blk;
      if (l < r0) {
        Mat kern = Mat::Zero(n, n);
        for (int j = r0 + 1; j < r; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += mu[j] / ((mu[k] - mu[j]) * (mu[j] - mu[l])) * pk[j] * pk[j].transpose();
        }
        blk = spec.block(wtil, k, l) + 2.0 * sandwich(k, kern, l);
      } else if (l == r0) {
        Mat kern = Mat::Zero(n, n);
        for (int j = r0 + 1; j < r; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += 1.0 / (mu[k] - mu[j]) * pk[j] * pk[j].transpose();
        }
        const Mat hll = symmetrize(spec.block(htil, l, l));
        blk = spec.block(wtil, k, l) + 2.0 * sandwich(k, kern, l) +
              2.0 / mu[k] * hkl * proj_nsd(hll);
      } else if (k == r0) {
        Mat kern = Mat::Zero(n, n);
        for (int j = 0; j < r0; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += 1.0 / (mu[j] - mu[l]) * pk[j] * pk[j].transpose();
        }
        const Mat hkk = symmetrize(spec.block(htil, k, k));
        blk = 2.0 * sandwich(k, kern, l) - 2.0 / mu[l] * proj_psd(hkk) * hkl;
      } else if (k > r0) {
        Mat kern = Mat::Zero(n, n);
        for (int j = 0; j < r0; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += mu[j] / ((mu[j] - mu[k]) * (mu[j] - mu[l])) * pk[j] * pk[j].transpose();
        }
        blk = 2.0 * sandwich(k, kern, l);
      } else {
        // k < r0 < l
        Mat kern = Mat::Zero(n, n);
        for (int j = 0; j < r; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += g2_max(mu[k], mu[j], mu[l]) * pk[j] * pk[j].transpose();
        }
        const double sigma = mu[k] / (mu[k] - mu[l]);
        const Mat hkk = symmetrize(spec.block(htil, k, k));
        blk = sigma * spec.block(wtil, k, l) + 2.0 * sandwich(k, kern, l) +
              2.0 / (mu[k] - mu[l]) * hkk * hkl;
      }
      b.block(ak.start, al.start, ak.size, al.size) = blk;
      b.block(al.start, ak.start, al.size, ak.size) = blk.transpose();
    }
  }
  return symmetrize(spec.P * b * spec.P.transpose());
}

Mat proj_dir2(const Mat& z, const Mat& h, const Mat& w) {
  return proj_dir2(eig_sym(z), h, w);
}

Mat proj_nsd_dir2(const Mat& z, const Mat& h, const Mat& w) {
  return symmetrize(w) - proj_dir2(z, h, w);
}

}  // namespace sdcc
