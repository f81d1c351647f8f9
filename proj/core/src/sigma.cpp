#include "sdcc/geometry.hpp"

#include <cmath>

namespace sdcc {

namespace {

Eigen::Block<const Mat> range_block(const Mat& m, const Range& a, const Range& b) {
  return m.block(a.start, b.start, a.size, b.size);
}

}  // namespace

// Support of (G1, G2) over the structured second-order tangent set.  Rules,
// per block of the classification:
//   * a free block forces the paired multiplier block to zero, else +inf;
//   * a fixed block contributes a plain inner product;
//   * a linearly coupled block is finite iff the multiplier pair lies in the
//     row space of the coupling relation, and then contributes the pairing of
//     any particular solution;
//   * the shifted beta-block pair ranges over a translate of a smaller
//     complementarity set, whose support is 0 under G1_bb psd-negative and
//     G2_bb psd-positive and +inf otherwise; the translation contributes the
//     pairing with the shifts.
SigmaValue sigma_tangent2_omega(const Mat& g1, const Mat& g2,
                                const Tangent2Data& data, double tol) {
  const Mat g1s = require_symmetric(g1, "sigma_tangent2_omega(G1)");
  const Mat g2s = require_symmetric(g2, "sigma_tangent2_omega(G2)");
  const Spectral& spec = data.spec;
  const Mat g1t = spec.P.transpose() * g1s * spec.P;
  const Mat g2t = spec.P.transpose() * g2s * spec.P;
  const double vtol = tol * std::max(1.0, std::max(g1s.norm(), g2s.norm()));

  SigmaValue out;
  out.finite = true;
  double value = 0.0;
  auto infinity = [&](const std::string& why) {
    out.finite = false;
    out.notes.push_back(why);
  };

  for (const auto& ob : data.off) {
    const Mat a = spec.block(g1t, ob.k, ob.l);
    const Mat b = spec.block(g2t, ob.k, ob.l);
    switch (ob.kind) {
      case Tangent2Data::OffBlock::FixedT:
        if (a.norm() > vtol)
          infinity("G1 nonzero on free S block (" + std::to_string(ob.k) + "," +
                   std::to_string(ob.l) + ")");
        value += 2.0 * frob_inner(b, ob.fixed);
        break;
      case Tangent2Data::OffBlock::FixedS:
        if (b.norm() > vtol)
          infinity("G2 nonzero on free T block (" + std::to_string(ob.k) + "," +
                   std::to_string(ob.l) + ")");
        value += 2.0 * frob_inner(a, ob.fixed);
        break;
      case Tangent2Data::OffBlock::Coupled: {
        const double mk = spec.mu[ob.k], ml = spec.mu[ob.l];
        if ((mk * a - ml * b).norm() > vtol * (std::abs(mk) + std::abs(ml)))
          infinity("multiplier pair outside the coupling row space on block (" +
                   std::to_string(ob.k) + "," + std::to_string(ob.l) + ")");
        value += 2.0 * frob_inner(a, ob.couple_rhs) / ml;
        break;
      }
    }
  }

  for (const auto& db : data.diag) {
    const Mat a = symmetrize(spec.block(g1t, db.k, db.k));
    const Mat b = symmetrize(spec.block(g2t, db.k, db.k));
    switch (db.kind) {
      case Tangent2Data::DiagBlock::FixedT:
        if (a.norm() > vtol)
          infinity("G1 nonzero on free S block (" + std::to_string(db.k) + "," +
                   std::to_string(db.k) + ")");
        value += frob_inner(b, db.fixed);
        break;
      case Tangent2Data::DiagBlock::FixedS:
        if (b.norm() > vtol)
          infinity("G2 nonzero on free T block (" + std::to_string(db.k) + "," +
                   std::to_string(db.k) + ")");
        value += frob_inner(a, db.fixed);
        break;
      case Tangent2Data::DiagBlock::Zero: {
        const Mat& q = db.sub.P;
        const Mat ah = symmetrize(q.transpose() * a * q);
        const Mat bh = symmetrize(q.transpose() * b * q);
        const Range al = db.sub.alpha_range(), be = db.sub.beta_range(),
                    ga = db.sub.gamma_range();
        if (range_block(ah, al, al).norm() > vtol)
          infinity("G1 nonzero on free S sub-block [aa] of the zero cluster");
        if (range_block(ah, al, be).norm() > vtol)
          infinity("G1 nonzero on free S sub-block [ab] of the zero cluster");
        if (range_block(bh, be, ga).norm() > vtol)
          infinity("G2 nonzero on free T sub-block [bg] of the zero cluster");
        if (range_block(bh, ga, ga).norm() > vtol)
          infinity("G2 nonzero on free T sub-block [gg] of the zero cluster");
        const Mat had = db.sigma_ag.cwiseProduct(range_block(ah, al, ga)) +
                        (1.0 - db.sigma_ag.array()).matrix().cwiseProduct(range_block(bh, al, ga));
        if (had.norm() > vtol)
          infinity("multiplier pair outside the slope-coupling row space on [ag]");
        if (!be.empty()) {
          const Spectral e1 = eig_sym(symmetrize(range_block(ah, be, be)));
          const Spectral e2 = eig_sym(symmetrize(range_block(bh, be, be)));
          if (e1.lambda.size() > 0 && e1.lambda.maxCoeff() > vtol)
            infinity("G1 beta-block not negative semidefinite");
          if (e2.lambda.size() > 0 && e2.lambda.minCoeff() < -vtol)
            infinity("G2 beta-block not positive semidefinite");
        }
        value += frob_inner(bh.block(al.start, al.start, al.size, al.size),
                            range_block(db.dminus, al, al));
        value += 2.0 * frob_inner(bh.block(al.start, be.start, al.size, be.size),
                                  range_block(db.dminus, al, be));
        value += 2.0 * (frob_inner(ah.block(al.start, ga.start, al.size, ga.size),
                                   range_block(db.dplus, al, ga)) +
                        frob_inner(bh.block(al.start, ga.start, al.size, ga.size),
                                   range_block(db.dminus, al, ga)));
        value += 2.0 * frob_inner(ah.block(be.start, ga.start, be.size, ga.size),
                                  range_block(db.dplus, be, ga));
        value += frob_inner(ah.block(ga.start, ga.start, ga.size, ga.size),
                            range_block(db.dplus, ga, ga));
        value += frob_inner(ah.block(be.start, be.start, be.size, be.size),
                            range_block(db.dplus, be, be));
        value += frob_inner(bh.block(be.start, be.start, be.size, be.size),
                            range_block(db.dminus, be, be));
        break;
      }
    }
  }

  out.value = out.finite ? value : 0.0;
  return out;
}

SigmaValue sigma_tangent2_psd(const Mat& xi, const Mat& a, const Mat& h, double tol) {
  const Mat xs = require_symmetric(xi, "sigma_tangent2_psd(xi)");
  const Mat as = require_symmetric(a, "sigma_tangent2_psd(A)");
  const Mat hs = require_symmetric(h, "sigma_tangent2_psd(H)");
  require_same_size(xs, as, "sigma_tangent2_psd");
  require_same_size(xs, hs, "sigma_tangent2_psd");

  SigmaValue out;
  out.finite = true;
  const double vtol = tol * std::max(1.0, xs.norm());
  auto infinity = [&](const std::string& why) {
    out.finite = false;
    out.notes.push_back(why);
  };

  const Spectral sa = eig_sym(as);
  if (sa.n() > 0 && sa.lambda.minCoeff() < -tol * std::max(1.0, as.norm()))
    infinity("base matrix not positive semidefinite");

  // xi in the normal cone at A: xi nsd, <xi, A> = 0.
  const Spectral sx = eig_sym(xs);
  if (sx.n() > 0 && sx.lambda.maxCoeff() > vtol)
    infinity("multiplier not negative semidefinite");
  if (std::abs(frob_inner(xs, as)) > vtol * std::max(1.0, as.norm()))
    infinity("multiplier not complementary to the base matrix");

  // H tangent at A: the null-space compression must be psd.
  const Range be = sa.beta_range();
  const Mat e = sa.P.middleCols(be.start, be.size);
  const Mat hn = symmetrize(e.transpose() * hs * e);
  const Spectral sh = sub_spectral(hn);
  if (sh.n() > 0 && sh.lambda.minCoeff() < -tol * std::max(1.0, hs.norm()))
    infinity("direction not tangent at the base matrix");

  // Support is finite only when xi acts within the null space of the
  // compressed direction.
  const Range be2 = sh.beta_range();
  const Mat f = e * sh.P.middleCols(be2.start, be2.size);
  const Mat proj = f * f.transpose();
  if ((xs - proj * xs * proj).norm() > vtol)
    infinity("multiplier not supported on the second-order active subspace");

  if (out.finite) out.value = 2.0 * frob_inner(xs, hs * pinv_spectral(sa) * hs);
  return out;
}

SigmaValue sigma_tangent2_nsd(const Mat& xi, const Mat& a, const Mat& h, double tol) {
  return sigma_tangent2_psd(Mat(-xi), Mat(-a), Mat(-h), tol);
}

}  // namespace sdcc
