#include "sdcc/geometry.hpp"

#include "sdcc/scalarfun.hpp"

#include <algorithm>
#include <cmath>

namespace sdcc {

namespace {

void sort_violations(std::vector<Violation>& v) {
  std::sort(v.begin(), v.end(),
            [](const Violation& a, const Violation& b) { return a.magnitude > b.magnitude; });
}

double aggregate(const std::vector<Violation>& v) {
  double s = 0.0;
  for (const auto& e : v) s += e.magnitude * e.magnitude;
  return std::sqrt(s);
}

std::string block_id(int k, int l) {
  return "(" + std::to_string(k) + "," + std::to_string(l) + ")";
}

// mu-based slope table at eigenvalue level for rows in `ra`, cols in `rg`,
// entries mu_i / (mu_i - mu_j) taken from the cluster values.
Mat sigma_alpha_gamma(const Spectral& spec) {
  const Range ra = spec.alpha_range(), rg = spec.gamma_range();
  std::vector<double> val(spec.n());
  for (int k = 0; k < spec.r(); ++k)
    for (int i = 0; i < spec.clusters[k].size; ++i)
      val[spec.clusters[k].start + i] = spec.mu[k];
  Mat s(ra.size, rg.size);
  for (int i = 0; i < ra.size; ++i)
    for (int j = 0; j < rg.size; ++j) {
      const double a = val[ra.start + i], g = val[rg.start + j];
      s(i, j) = a / (a - g);
    }
  return s;
}

// eta-based slope table on alpha^k x gamma^k of a sub-decomposition.
Mat sigma_sub(const Spectral& sub) {
  const Range a = sub.alpha_range(), g = sub.gamma_range();
  std::vector<double> val(sub.n());
  for (int k = 0; k < sub.r(); ++k)
    for (int i = 0; i < sub.clusters[k].size; ++i)
      val[sub.clusters[k].start + i] = sub.mu[k];
  Mat s(a.size, g.size);
  for (int i = 0; i < a.size; ++i)
    for (int j = 0; j < g.size; ++j) {
      const double ea = val[a.start + i], eg = val[g.start + j];
      s(i, j) = ea / (ea - eg);
    }
  return s;
}

Eigen::Block<const Mat> range_block(const Mat& m, const Range& a, const Range& b) {
  return m.block(a.start, b.start, a.size, b.size);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::In: return "in";
    case Verdict::Borderline: return "borderline";
    case Verdict::Out: return "out";
  }
  return "out";
}

MembershipReport make_report(double residual, double tol,
                             std::vector<Violation> violations,
                             std::vector<std::string> warnings) {
  MembershipReport r;
  r.residual = residual;
  r.tol = tol;
  sort_violations(violations);
  r.violations = std::move(violations);
  r.warnings = std::move(warnings);
  if (residual <= tol) {
    r.verdict = Verdict::In;
  } else if (residual <= 10.0 * tol) {
    r.verdict = Verdict::Borderline;
    r.warnings.push_back("residual within 10x tolerance, verdict borderline");
  } else {
    r.verdict = Verdict::Out;
  }
  return r;
}

MembershipReport in_omega(const Mat& x, const Mat& y, double tol) {
  const Mat xs = require_symmetric(x, "in_omega(X)");
  const Mat ys = require_symmetric(y, "in_omega(Y)");
  require_same_size(xs, ys, "in_omega");
  const Spectral spec = eig_sym(xs + ys);
  std::vector<Violation> viol;
  const double residual = (xs - proj_psd(spec)).norm();
  viol.push_back({"X", "X = proj_psd(X+Y)", residual});
  const Spectral sx = eig_sym(xs);
  if (sx.n() > 0 && sx.lambda.minCoeff() < -tol)
    viol.push_back({"X", "psd", -sx.lambda.minCoeff()});
  const Spectral sy = eig_sym(ys);
  if (sy.n() > 0 && sy.lambda.maxCoeff() > tol)
    viol.push_back({"Y", "nsd", sy.lambda.maxCoeff()});
  const double ip = std::abs(frob_inner(xs, ys));
  if (ip > tol * std::max(1.0, xs.norm() * ys.norm()))
    viol.push_back({"XY", "complementarity <X,Y> = 0", ip});
  return make_report(residual, tol, std::move(viol), spec.warnings);
}

CCPair make_ccpair(const Mat& x, const Mat& y, double tol) {
  MembershipReport r = in_omega(x, y, tol);
  if (!r.accepted())
    throw std::invalid_argument("make_ccpair: (X,Y) not in the complementarity set, residual " +
                                std::to_string(r.residual));
  CCPair p;
  p.X = symmetrize(x);
  p.Y = symmetrize(y);
  p.spec = eig_sym(p.X + p.Y);
  p.tol = tol;
  return p;
}

MembershipReport tangent_test(const CCPair& base, const Mat& f, const Mat& g,
                              double tol) {
  const Mat fs = require_symmetric(f, "tangent_test(F)");
  const Mat gs = require_symmetric(g, "tangent_test(G)");
  const Mat d1 = proj_dir1(base.spec, fs + gs);
  const double res_f = (d1 - fs).norm();
  // complementary form through proj_nsd_dir1 is algebraically identical,
  // kept as a reported cross-check
  const double res_g = ((fs + gs - d1) - gs).norm();
  std::vector<Violation> viol;
  viol.push_back({"F", "proj_dir1(Z;F+G) = F", res_f});
  viol.push_back({"G", "complement form", res_g});
  return make_report(res_f, tol, std::move(viol), base.spec.warnings);
}

MembershipReport tangent2_test(const CCPair& base, const Mat& f, const Mat& g,
                               const Mat& s, const Mat& t, double tol) {
  const Mat fs = require_symmetric(f, "tangent2_test(F)");
  const Mat gs = require_symmetric(g, "tangent2_test(G)");
  const Mat ss = require_symmetric(s, "tangent2_test(S)");
  const Mat ts = require_symmetric(t, "tangent2_test(T)");
  MembershipReport dir = tangent_test(base, fs, gs, tol);
  if (!dir.accepted()) {
    MembershipReport r = make_report(dir.residual, tol);
    r.verdict = Verdict::Out;
    r.violations.push_back({"(F,G)", "direction not tangent, second-order set empty", dir.residual});
    r.warnings.push_back("(F,G) fails tangent_test");
    return r;
  }
  const Mat d2 = proj_dir2(base.spec, fs + gs, ss + ts);
  const double res = (d2 - ss).norm();
  std::vector<Violation> viol{{"S", "proj_dir2(Z;F+G,S+T) = S", res}};
  return make_report(res, tol, std::move(viol), base.spec.warnings);
}

Tangent2Data tangent2_structural(const CCPair& base, const Mat& f, const Mat& g,
                                 double tol) {
  MembershipReport dir = tangent_test(base, f, g, tol);
  if (!dir.accepted())
    throw std::invalid_argument(
        "tangent2_structural: (F,G) not tangent at the base pair, residual " +
        std::to_string(dir.residual));

  Tangent2Data d;
  d.X = base.X;
  d.Y = base.Y;
  d.F = symmetrize(f);
  d.G = symmetrize(g);
  d.H = d.F + d.G;
  d.spec = base.spec;
  d.htil = d.spec.P.transpose() * d.H * d.spec.P;
  d.tol = tol;
  d.warnings = d.spec.warnings;

  const Spectral& spec = d.spec;
  const int n = spec.n();
  const int r = spec.r();
  const int r0 = spec.r0;
  const Vec& mu = spec.mu;

  std::vector<Mat> pk(r);
  for (int k = 0; k < r; ++k)
    if (!spec.clusters[k].empty()) pk[k] = spec.cols(k);
  auto sandwich = [&](int k, const Mat& kern, int l) -> Mat {
    return pk[k].transpose() * d.H * kern * d.H * pk[l];
  };

  for (int k = 0; k < r; ++k) {
    if (spec.clusters[k].empty()) continue;
    Tangent2Data::DiagBlock db;
    db.k = k;
    if (k < r0) {
      Mat kern = Mat::Zero(n, n);
      for (int j = r0 + 1; j < r; ++j) {
        if (spec.clusters[j].empty()) continue;
        const double g2 = mu[j] - mu[k];
        kern += mu[j] / (g2 * g2) * pk[j] * pk[j].transpose();
      }
      db.kind = Tangent2Data::DiagBlock::FixedT;
      db.fixed = symmetrize(2.0 * sandwich(k, kern, k));
    } else if (k > r0) {
      Mat kern = Mat::Zero(n, n);
      for (int j = 0; j < r0; ++j) {
        if (spec.clusters[j].empty()) continue;
        const double g2 = mu[j] - mu[k];
        kern += mu[j] / (g2 * g2) * pk[j] * pk[j].transpose();
      }
      db.kind = Tangent2Data::DiagBlock::FixedS;
      db.fixed = symmetrize(2.0 * sandwich(k, kern, k));
    } else {
      db.kind = Tangent2Data::DiagBlock::Zero;
      const Mat hkk = symmetrize(spec.block(d.htil, k, k));
      db.sub = sub_spectral(hkk);
      for (const auto& w : db.sub.warnings)
        d.warnings.push_back("zero-cluster sub-decomposition: " + w);
      Mat kp = Mat::Zero(n, n), km = Mat::Zero(n, n);
      for (int j = 0; j < r; ++j) {
        if (j == r0 || spec.clusters[j].empty()) continue;
        (j < r0 ? kp : km) += 1.0 / mu[j] * pk[j] * pk[j].transpose();
      }
      const Mat& q = db.sub.P;
      db.dplus = symmetrize(2.0 * q.transpose() * sandwich(k, kp, k) * q);
      db.dminus = symmetrize(2.0 * q.transpose() * sandwich(k, km, k) * q);
      db.sigma_ag = sigma_sub(db.sub);
    }
    d.diag.push_back(std::move(db));

    for (int l = k + 1; l < r; ++l) {
      if (spec.clusters[l].empty()) continue;
      Tangent2Data::OffBlock ob;
      ob.k = k;
      ob.l = l;
      const Mat hkl = spec.block(d.htil, k, l);
      if (l < r0) {
        Mat kern = Mat::Zero(n, n);
        for (int j = r0 + 1; j < r; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += mu[j] / ((mu[k] - mu[j]) * (mu[j] - mu[l])) * pk[j] * pk[j].transpose();
        }
        ob.kind = Tangent2Data::OffBlock::FixedT;
        ob.fixed = -2.0 * sandwich(k, kern, l);
      } else if (l == r0) {
        Mat kern = Mat::Zero(n, n);
        for (int j = r0 + 1; j < r; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += 1.0 / (mu[k] - mu[j]) * pk[j] * pk[j].transpose();
        }
        const Mat hll = symmetrize(spec.block(d.htil, l, l));
        ob.kind = Tangent2Data::OffBlock::FixedT;
        ob.fixed = -2.0 * sandwich(k, kern, l) - 2.0 / mu[k] * hkl * proj_nsd(hll);
      } else if (k == r0) {
        Mat kern = Mat::Zero(n, n);
        for (int j = 0; j < r0; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += 1.0 / (mu[j] - mu[l]) * pk[j] * pk[j].transpose();
        }
        const Mat hkk = symmetrize(spec.block(d.htil, k, k));
        ob.kind = Tangent2Data::OffBlock::FixedS;
        ob.fixed = 2.0 * sandwich(k, kern, l) - 2.0 / mu[l] * proj_psd(hkk) * hkl;
      } else if (k > r0) {
        Mat kern = Mat::Zero(n, n);
        for (int j = 0; j < r0; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += mu[j] / ((mu[j] - mu[k]) * (mu[j] - mu[l])) * pk[j] * pk[j].transpose();
        }
        ob.kind = Tangent2Data::OffBlock::FixedS;
        ob.fixed = 2.0 * sandwich(k, kern, l);
      } else {
        // k < r0 < l: the linear coupling mu_l S~ + mu_k T~ = rhs
        Mat kern = Mat::Zero(n, n);
        for (int j = 0; j < r; ++j) {
          if (spec.clusters[j].empty()) continue;
          kern += g2_max(mu[k], mu[j], mu[l]) * pk[j] * pk[j].transpose();
        }
        const Mat hkk = symmetrize(spec.block(d.htil, k, k));
        const Mat rterm =
            2.0 * sandwich(k, kern, l) + 2.0 / (mu[k] - mu[l]) * hkk * hkl;
        ob.kind = Tangent2Data::OffBlock::Coupled;
        ob.couple_rhs = -(mu[k] - mu[l]) * rterm;
      }
      d.off.push_back(std::move(ob));
    }
  }
  return d;
}

MembershipReport Tangent2Data::residual(const Mat& s, const Mat& t) const {
  const Mat ss = require_symmetric(s, "Tangent2Data::residual(S)");
  const Mat ts = require_symmetric(t, "Tangent2Data::residual(T)");
  const Mat stil = spec.P.transpose() * ss * spec.P;
  const Mat ttil = spec.P.transpose() * ts * spec.P;
  const double sqrt2 = std::sqrt(2.0);
  std::vector<Violation> viol;

  for (const auto& ob : off) {
    const Mat sb = spec.block(stil, ob.k, ob.l);
    const Mat tb = spec.block(ttil, ob.k, ob.l);
    switch (ob.kind) {
      case OffBlock::FixedT:
        viol.push_back({"T" + block_id(ob.k, ob.l), "fixed value",
                        sqrt2 * (tb - ob.fixed).norm()});
        break;
      case OffBlock::FixedS:
        viol.push_back({"S" + block_id(ob.k, ob.l), "fixed value",
                        sqrt2 * (sb - ob.fixed).norm()});
        break;
      case OffBlock::Coupled: {
        const double den = std::abs(spec.mu[ob.k]) + std::abs(spec.mu[ob.l]);
        viol.push_back({"ST" + block_id(ob.k, ob.l), "linear coupling",
                        sqrt2 * (spec.mu[ob.l] * sb + spec.mu[ob.k] * tb - ob.couple_rhs).norm() / den});
        break;
      }
    }
  }

  for (const auto& db : diag) {
    const Mat sb = symmetrize(spec.block(stil, db.k, db.k));
    const Mat tb = symmetrize(spec.block(ttil, db.k, db.k));
    switch (db.kind) {
      case DiagBlock::FixedT:
        viol.push_back({"T" + block_id(db.k, db.k), "fixed value", (tb - db.fixed).norm()});
        break;
      case DiagBlock::FixedS:
        viol.push_back({"S" + block_id(db.k, db.k), "fixed value", (sb - db.fixed).norm()});
        break;
      case DiagBlock::Zero: {
        const Mat shat = symmetrize(db.sub.P.transpose() * sb * db.sub.P) - db.dplus;
        const Mat that = symmetrize(db.sub.P.transpose() * tb * db.sub.P) - db.dminus;
        const Range a = db.sub.alpha_range(), be = db.sub.beta_range(), ga = db.sub.gamma_range();
        viol.push_back({"T_hat[aa]", "fixed shift", range_block(that, a, a).norm()});
        viol.push_back({"T_hat[ab]", "fixed shift", sqrt2 * range_block(that, a, be).norm()});
        viol.push_back({"S_hat[bg]", "fixed shift", sqrt2 * range_block(shat, be, ga).norm()});
        viol.push_back({"S_hat[gg]", "fixed shift", range_block(shat, ga, ga).norm()});
        const Mat had = (db.sigma_ag.array() - 1.0).matrix().cwiseProduct(range_block(shat, a, ga)) +
                        db.sigma_ag.cwiseProduct(range_block(that, a, ga));
        viol.push_back({"ST_hat[ag]", "slope coupling", sqrt2 * had.norm()});
        if (!be.empty()) {
          const Mat u = symmetrize(range_block(shat, be, be));
          const Mat v = symmetrize(range_block(that, be, be));
          viol.push_back({"ST_hat[bb]", "shifted complementarity pair",
                          (u - proj_psd(u + v)).norm()});
        }
        break;
      }
    }
  }

  const double total = aggregate(viol);
  return make_report(total, tol, std::move(viol), warnings);
}

std::pair<Mat, Mat> Tangent2Data::sample_member(std::mt19937_64& rng, double scale) const {
  const int n = spec.n();
  Mat stil = Mat::Zero(n, n), ttil = Mat::Zero(n, n);
  auto set_off = [&](int k, int l, const Mat& m, Mat& target) {
    target.block(spec.clusters[k].start, spec.clusters[l].start,
                 spec.clusters[k].size, spec.clusters[l].size) = m;
    target.block(spec.clusters[l].start, spec.clusters[k].start,
                 spec.clusters[l].size, spec.clusters[k].size) = m.transpose();
  };
  auto rnd = [&](int rows, int cols) {
    std::normal_distribution<double> nd;
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = nd(rng);
    return m;
  };

  for (const auto& ob : off) {
    const int mk = spec.clusters[ob.k].size, ml = spec.clusters[ob.l].size;
    switch (ob.kind) {
      case OffBlock::FixedT:
        set_off(ob.k, ob.l, ob.fixed, ttil);
        set_off(ob.k, ob.l, Mat(scale * rnd(mk, ml)), stil);
        break;
      case OffBlock::FixedS:
        set_off(ob.k, ob.l, ob.fixed, stil);
        set_off(ob.k, ob.l, Mat(scale * rnd(mk, ml)), ttil);
        break;
      case OffBlock::Coupled: {
        const Mat tb = scale * rnd(mk, ml);
        set_off(ob.k, ob.l, tb, ttil);
        set_off(ob.k, ob.l, Mat((ob.couple_rhs - spec.mu[ob.k] * tb) / spec.mu[ob.l]), stil);
        break;
      }
    }
  }

  for (const auto& db : diag) {
    const Range& ak = spec.clusters[db.k];
    switch (db.kind) {
      case DiagBlock::FixedT:
        ttil.block(ak.start, ak.start, ak.size, ak.size) = db.fixed;
        stil.block(ak.start, ak.start, ak.size, ak.size) =
            symmetrize(scale * rnd(ak.size, ak.size));
        break;
      case DiagBlock::FixedS:
        stil.block(ak.start, ak.start, ak.size, ak.size) = db.fixed;
        ttil.block(ak.start, ak.start, ak.size, ak.size) =
            symmetrize(scale * rnd(ak.size, ak.size));
        break;
      case DiagBlock::Zero: {
        const int m = ak.size;
        const Range a = db.sub.alpha_range(), be = db.sub.beta_range(), ga = db.sub.gamma_range();
        Mat shat = db.dplus, that = db.dminus;
        auto put = [&](Mat& dst, const Range& ra, const Range& rb, const Mat& v) {
          dst.block(ra.start, rb.start, ra.size, rb.size) += v;
          if (ra.start != rb.start)
            dst.block(rb.start, ra.start, rb.size, ra.size) += v.transpose();
        };
        put(shat, a, a, symmetrize(scale * rnd(a.size, a.size)) - Mat(range_block(db.dplus, a, a)));
        put(shat, a, be, scale * rnd(a.size, be.size) - Mat(range_block(db.dplus, a, be)));
        put(that, be, ga, scale * rnd(be.size, ga.size) - Mat(range_block(db.dminus, be, ga)));
        put(that, ga, ga, symmetrize(scale * rnd(ga.size, ga.size)) - Mat(range_block(db.dminus, ga, ga)));
        const Mat tau = scale * rnd(a.size, ga.size);
        put(shat, a, ga, db.sigma_ag.cwiseProduct(tau));
        put(that, a, ga, ((1.0 - db.sigma_ag.array()).matrix()).cwiseProduct(tau));
        if (!be.empty()) {
          auto [u, v] = random_omega_pair(rng, be.size, scale);
          put(shat, be, be, u);
          put(that, be, be, v);
        }
        stil.block(ak.start, ak.start, m, m) = db.sub.P * symmetrize(shat) * db.sub.P.transpose();
        ttil.block(ak.start, ak.start, m, m) = db.sub.P * symmetrize(that) * db.sub.P.transpose();
        break;
      }
    }
  }

  return {symmetrize(spec.P * stil * spec.P.transpose()),
          symmetrize(spec.P * ttil * spec.P.transpose())};
}

std::pair<Mat, Mat> Tangent2Data::sample_nonmember(std::mt19937_64& rng, double magnitude,
                                                   std::string* which) const {
  auto [s, t] = sample_member(rng, 1.0);
  Mat stil = spec.P.transpose() * s * spec.P;
  Mat ttil = spec.P.transpose() * t * spec.P;

  // Enumerate perturbable constraints, then hit exactly one.
  struct Slot {
    enum What { OffT, OffS, OffCouple, DiagT, DiagS, ZeroFixedT, ZeroFixedS, Hadamard, OmegaBeta } what;
    int idx;
  };
  std::vector<Slot> slots;
  for (int i = 0; i < static_cast<int>(off.size()); ++i) {
    switch (off[i].kind) {
      case OffBlock::FixedT: slots.push_back({Slot::OffT, i}); break;
      case OffBlock::FixedS: slots.push_back({Slot::OffS, i}); break;
      case OffBlock::Coupled: slots.push_back({Slot::OffCouple, i}); break;
    }
  }
  for (int i = 0; i < static_cast<int>(diag.size()); ++i) {
    switch (diag[i].kind) {
      case DiagBlock::FixedT: slots.push_back({Slot::DiagT, i}); break;
      case DiagBlock::FixedS: slots.push_back({Slot::DiagS, i}); break;
      case DiagBlock::Zero: {
        const auto& db = diag[i];
        if (!db.sub.alpha_range().empty()) slots.push_back({Slot::ZeroFixedT, i});
        if (!db.sub.gamma_range().empty()) slots.push_back({Slot::ZeroFixedS, i});
        if (!db.sub.alpha_range().empty() && !db.sub.gamma_range().empty())
          slots.push_back({Slot::Hadamard, i});
        if (!db.sub.beta_range().empty()) slots.push_back({Slot::OmegaBeta, i});
        break;
      }
    }
  }
  if (slots.empty())
    throw std::runtime_error("sample_nonmember: no constraints to violate");
  std::uniform_int_distribution<size_t> pick(0, slots.size() - 1);
  const Slot slot = slots[pick(rng)];
  std::normal_distribution<double> nd;
  auto unit = [&](int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = nd(rng);
    const double nn = m.norm();
    return Mat(m / (nn > 0 ? nn : 1.0));
  };
  auto sym_unit = [&](int m) {
    Mat u = symmetrize(unit(m, m));
    double nn = u.norm();
    if (nn < 1e-9) {
      u = Mat::Identity(m, m);
      nn = u.norm();
    }
    return Mat(u / nn);
  };
  auto bump_off = [&](Mat& target, int k, int l, const Mat& delta) {
    target.block(spec.clusters[k].start, spec.clusters[l].start,
                 spec.clusters[k].size, spec.clusters[l].size) += delta;
    target.block(spec.clusters[l].start, spec.clusters[k].start,
                 spec.clusters[l].size, spec.clusters[k].size) += delta.transpose();
  };
  std::string tag;
  switch (slot.what) {
    case Slot::OffT: {
      const auto& ob = off[slot.idx];
      bump_off(ttil, ob.k, ob.l,
               magnitude * unit(spec.clusters[ob.k].size, spec.clusters[ob.l].size));
      tag = "T" + block_id(ob.k, ob.l);
      break;
    }
    case Slot::OffS: {
      const auto& ob = off[slot.idx];
      bump_off(stil, ob.k, ob.l,
               magnitude * unit(spec.clusters[ob.k].size, spec.clusters[ob.l].size));
      tag = "S" + block_id(ob.k, ob.l);
      break;
    }
    case Slot::OffCouple: {
      const auto& ob = off[slot.idx];
      const double hk = spec.mu[ob.k], hl = spec.mu[ob.l];
      const double w = std::hypot(hk, hl);
      const Mat rdm = unit(spec.clusters[ob.k].size, spec.clusters[ob.l].size);
      bump_off(stil, ob.k, ob.l, Mat(magnitude * hl / w * rdm));
      bump_off(ttil, ob.k, ob.l, Mat(magnitude * hk / w * rdm));
      tag = "ST" + block_id(ob.k, ob.l);
      break;
    }
    case Slot::DiagT: {
      const auto& db = diag[slot.idx];
      const Range& ak = spec.clusters[db.k];
      ttil.block(ak.start, ak.start, ak.size, ak.size) += magnitude * sym_unit(ak.size);
      tag = "T" + block_id(db.k, db.k);
      break;
    }
    case Slot::DiagS: {
      const auto& db = diag[slot.idx];
      const Range& ak = spec.clusters[db.k];
      stil.block(ak.start, ak.start, ak.size, ak.size) += magnitude * sym_unit(ak.size);
      tag = "S" + block_id(db.k, db.k);
      break;
    }
    case Slot::ZeroFixedT:
    case Slot::ZeroFixedS:
    case Slot::Hadamard:
    case Slot::OmegaBeta: {
      const auto& db = diag[slot.idx];
      const Range& ak = spec.clusters[db.k];
      const Range a = db.sub.alpha_range(), be = db.sub.beta_range(), ga = db.sub.gamma_range();
      Mat shat = symmetrize(db.sub.P.transpose() * stil.block(ak.start, ak.start, ak.size, ak.size) * db.sub.P);
      Mat that = symmetrize(db.sub.P.transpose() * ttil.block(ak.start, ak.start, ak.size, ak.size) * db.sub.P);
      if (slot.what == Slot::ZeroFixedT) {
        that.block(a.start, a.start, a.size, a.size) += magnitude * sym_unit(a.size);
        tag = "T_hat[aa]";
      } else if (slot.what == Slot::ZeroFixedS) {
        shat.block(ga.start, ga.start, ga.size, ga.size) += magnitude * sym_unit(ga.size);
        tag = "S_hat[gg]";
      } else if (slot.what == Slot::Hadamard) {
        const Mat rdm = unit(a.size, ga.size);
        Mat ds(a.size, ga.size), dt(a.size, ga.size);
        for (int i = 0; i < a.size; ++i)
          for (int j = 0; j < ga.size; ++j) {
            const double sg = db.sigma_ag(i, j);
            const double w = std::hypot(sg - 1.0, sg);
            ds(i, j) = magnitude * (sg - 1.0) / w * rdm(i, j);
            dt(i, j) = magnitude * sg / w * rdm(i, j);
          }
        shat.block(a.start, ga.start, a.size, ga.size) += ds;
        shat.block(ga.start, a.start, ga.size, a.size) += ds.transpose();
        that.block(a.start, ga.start, a.size, ga.size) += dt;
        that.block(ga.start, a.start, ga.size, a.size) += dt.transpose();
        tag = "ST_hat[ag]";
      } else {
        // replace the complementarity pair by one violating the projection
        // equation by exactly `magnitude`
        Vec u = Vec::Zero(be.size);
        u[0] = 1.0;
        shat.block(be.start, be.start, be.size, be.size) =
            range_block(db.dplus, be, be) - magnitude * u * u.transpose();
        that.block(be.start, be.start, be.size, be.size) = range_block(db.dminus, be, be);
        tag = "ST_hat[bb]";
      }
      stil.block(ak.start, ak.start, ak.size, ak.size) = db.sub.P * shat * db.sub.P.transpose();
      ttil.block(ak.start, ak.start, ak.size, ak.size) = db.sub.P * that * db.sub.P.transpose();
      break;
    }
  }
  if (which != nullptr) *which = tag;
  return {symmetrize(spec.P * stil * spec.P.transpose()),
          symmetrize(spec.P * ttil * spec.P.transpose())};
}

Tangent2Agreement tangent2_agree(const CCPair& base, const Mat& f, const Mat& g,
                                 const Mat& s, const Mat& t, double tol) {
  Tangent2Agreement a;
  a.derivative = tangent2_test(base, f, g, s, t, tol);
  const Tangent2Data data = tangent2_structural(base, f, g, tol);
  a.structural = data.residual(s, t);
  a.agree = a.derivative.accepted() == a.structural.accepted();
  return a;
}

MembershipReport clarke_tangent_test(const CCPair& base, const Mat& f, const Mat& g,
                                     double tol) {
  const Mat fs = require_symmetric(f, "clarke_tangent_test(F)");
  const Mat gs = require_symmetric(g, "clarke_tangent_test(G)");
  const Spectral& spec = base.spec;
  const Mat ftil = spec.P.transpose() * fs * spec.P;
  const Mat gtil = spec.P.transpose() * gs * spec.P;
  const Range a = spec.alpha_range(), b = spec.beta_range(), c = spec.gamma_range();
  const double sqrt2 = std::sqrt(2.0);
  std::vector<Violation> viol;
  viol.push_back({"F[bb]", "zero block", range_block(ftil, b, b).norm()});
  viol.push_back({"F[bg]", "zero block", sqrt2 * range_block(ftil, b, c).norm()});
  viol.push_back({"F[gg]", "zero block", range_block(ftil, c, c).norm()});
  viol.push_back({"G[aa]", "zero block", range_block(gtil, a, a).norm()});
  viol.push_back({"G[ab]", "zero block", sqrt2 * range_block(gtil, a, b).norm()});
  viol.push_back({"G[bb]", "zero block", range_block(gtil, b, b).norm()});
  const Mat sig = sigma_alpha_gamma(spec);
  const Mat had = (sig.array() - 1.0).matrix().cwiseProduct(range_block(ftil, a, c)) +
                  sig.cwiseProduct(range_block(gtil, a, c));
  viol.push_back({"FG[ag]", "slope coupling", sqrt2 * had.norm()});
  const double total = aggregate(viol);
  return make_report(total, tol, std::move(viol), spec.warnings);
}

MembershipReport clarke_polar_test(const CCPair& base, const Mat& df, const Mat& dg,
                                   double tol) {
  const Mat fs = require_symmetric(df, "clarke_polar_test(dF)");
  const Mat gs = require_symmetric(dg, "clarke_polar_test(dG)");
  const Spectral& spec = base.spec;
  const Mat ftil = spec.P.transpose() * fs * spec.P;
  const Mat gtil = spec.P.transpose() * gs * spec.P;
  const Range a = spec.alpha_range(), c = spec.gamma_range();
  const Range b = spec.beta_range();
  const double sqrt2 = std::sqrt(2.0);
  std::vector<Violation> viol;
  viol.push_back({"dF[aa]", "zero block", range_block(ftil, a, a).norm()});
  viol.push_back({"dF[ab]", "zero block", sqrt2 * range_block(ftil, a, b).norm()});
  viol.push_back({"dG[bg]", "zero block", sqrt2 * range_block(gtil, b, c).norm()});
  viol.push_back({"dG[gg]", "zero block", range_block(gtil, c, c).norm()});
  const Mat sig = sigma_alpha_gamma(spec);
  const Mat had = sig.cwiseProduct(range_block(ftil, a, c)) +
                  (1.0 - sig.array()).matrix().cwiseProduct(range_block(gtil, a, c));
  viol.push_back({"dFdG[ag]", "slope coupling", sqrt2 * had.norm()});
  const double total = aggregate(viol);
  return make_report(total, tol, std::move(viol), spec.warnings);
}

CurvePoint curve_to_omega(const CCPair& base, const Mat& f, const Mat& g,
                          const Mat& s, const Mat& t, double time) {
  if (time == 0.0) return {base.X, base.Y, 0.0};
  const Mat zt = base.X + base.Y + time * (f + g) + 0.5 * time * time * (s + t);
  CurvePoint cp;
  cp.Xt = proj_psd(zt);
  cp.Yt = zt - cp.Xt;
  const Mat xp = base.X + time * f + 0.5 * time * time * s;
  const Mat yp = base.Y + time * g + 0.5 * time * time * t;
  cp.bound = std::sqrt((cp.Xt - xp).squaredNorm() + (cp.Yt - yp).squaredNorm());
  return cp;
}

Mat random_sym(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> nd;
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
  return scale * symmetrize(m);
}

Mat random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

std::pair<Mat, Mat> random_omega_pair(std::mt19937_64& rng, int n, double scale) {
  if (n == 0) return {Mat::Zero(0, 0), Mat::Zero(0, 0)};
  const Mat a = random_sym(rng, n, scale);
  const Spectral sp = eig_sym(a);
  return {proj_psd(sp), proj_nsd(sp)};
}

std::pair<Mat, Mat> random_tangent(std::mt19937_64& rng, const CCPair& base, double scale) {
  const Mat d = random_sym(rng, base.spec.n(), scale);
  const Mat f = proj_dir1(base.spec, d);
  return {f, d - f};
}

namespace {

SpecialCaseInstance finish_instance(CCPair base, Mat f, Mat g, std::mt19937_64& rng,
                                    int n_members, int n_nonmembers) {
  SpecialCaseInstance inst;
  inst.base = std::move(base);
  inst.F = std::move(f);
  inst.G = std::move(g);
  inst.data = tangent2_structural(inst.base, inst.F, inst.G);
  for (int i = 0; i < n_members; ++i)
    inst.members.push_back(inst.data.sample_member(rng, 1.0));
  for (int i = 0; i < n_nonmembers; ++i) {
    std::string tag;
    inst.nonmembers.push_back(inst.data.sample_nonmember(rng, 1e-2, &tag));
    inst.nonmember_tags.push_back(tag);
  }
  return inst;
}

Vec decreasing_values(std::mt19937_64& rng, int count, double lo, double hi,
                      bool allow_repeat) {
  std::uniform_real_distribution<double> ud(lo, hi);
  std::vector<double> v(count);
  for (auto& x : v) x = ud(rng);
  if (allow_repeat && count >= 2) v[1] = v[0];  // engineered repeated eigenvalue
  std::sort(v.begin(), v.end(), std::greater<>());
  return Eigen::Map<Vec>(v.data(), count);
}

// Block with well-separated eigenvalues, each either zero or of magnitude
// >= 0.5; near-degenerate sub-spectra would push the curve asymptotics
// below the test ladder.  sign > 0 psd, sign < 0 nsd, 0 mixed.
Mat controlled_spectrum_block(std::mt19937_64& rng, int m, int sign) {
  if (m == 0) return Mat::Zero(0, 0);
  std::uniform_real_distribution<double> ud(0.5, 1.2);
  std::uniform_int_distribution<int> coin(0, 1);
  Vec ev(m);
  for (int i = 0; i < m; ++i) {
    if (coin(rng) == 0) {
      ev[i] = 0.0;
    } else {
      const double mag = ud(rng) + 0.7 * i;
      ev[i] = (sign != 0 ? sign : (coin(rng) ? 1 : -1)) * mag;
    }
  }
  const Mat q = random_orthogonal(rng, m);
  return symmetrize(q * ev.asDiagonal() * q.transpose());
}

}  // namespace

SpecialCaseInstance special_case_generator(int which, int n, std::uint64_t seed,
                                           int n_members, int n_nonmembers) {
  if (n < 2 || n > 8) throw std::invalid_argument("special_case_generator: n must be in [2,8]");
  std::mt19937_64 rng(seed);
  const Mat p = random_orthogonal(rng, n);
  const Mat zero = Mat::Zero(n, n);
  const bool rep = (seed % 2) == 0;

  switch (which) {
    case 1: {  // X positive definite, Y = 0, direction (F, 0)
      const Vec ev = decreasing_values(rng, n, 0.5, 2.0, rep);
      const Mat x = symmetrize(p * ev.asDiagonal() * p.transpose());
      return finish_instance(make_ccpair(x, zero), random_sym(rng, n), zero, rng,
                             n_members, n_nonmembers);
    }
    case 2: {  // Y negative definite, X = 0, direction (0, G)
      const Vec ev = -decreasing_values(rng, n, 0.5, 2.0, rep);
      const Mat y = symmetrize(p * ev.asDiagonal() * p.transpose());
      return finish_instance(make_ccpair(zero, y), zero, random_sym(rng, n), rng,
                             n_members, n_nonmembers);
    }
    case 3: {  // origin; tangent cone is the set itself
      const Spectral sd = eig_sym(controlled_spectrum_block(rng, n, 0));
      return finish_instance(make_ccpair(zero, zero), proj_psd(sd), proj_nsd(sd), rng,
                             n_members, n_nonmembers);
    }
    case 4: {  // X = F = 0, Y on the boundary of the NSD cone
      const int nz = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(n - 1));
      Vec ev = Vec::Zero(n);
      ev.tail(n - nz) = -decreasing_values(rng, n - nz, 0.5, 2.0, rep);
      const Mat y = symmetrize(p * ev.asDiagonal() * p.transpose());
      Mat gtil = random_sym(rng, n);
      gtil.topLeftCorner(nz, nz) = controlled_spectrum_block(rng, nz, -1);
      const Mat g = symmetrize(p * gtil * p.transpose());
      return finish_instance(make_ccpair(zero, y), zero, g, rng, n_members, n_nonmembers);
    }
    case 5: {  // Y = G = 0, X on the boundary of the PSD cone
      const int nz = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(n - 1));
      Vec ev = Vec::Zero(n);
      ev.head(n - nz) = decreasing_values(rng, n - nz, 0.5, 2.0, rep);
      const Mat x = symmetrize(p * ev.asDiagonal() * p.transpose());
      Mat ftil = random_sym(rng, n);
      ftil.bottomRightCorner(nz, nz) = controlled_spectrum_block(rng, nz, +1);
      const Mat f = symmetrize(p * ftil * p.transpose());
      return finish_instance(make_ccpair(x, zero), f, zero, rng, n_members, n_nonmembers);
    }
    default:
      throw std::invalid_argument("special_case_generator: case must be 1..5");
  }
}

SpecialCaseInstance generic_case_generator(int n, bool with_zero_cluster,
                                           std::uint64_t seed, int n_members,
                                           int n_nonmembers) {
  if (n < 3 || n > 8) throw std::invalid_argument("generic_case_generator: n must be in [3,8]");
  std::mt19937_64 rng(seed);
  const Mat p = random_orthogonal(rng, n);
  const int nb = with_zero_cluster ? 1 + static_cast<int>(seed % 2) : 0;
  const int na = 1 + static_cast<int>((seed / 3) % static_cast<std::uint64_t>(n - nb - 1));
  const int ng = n - na - nb;
  const bool rep = (seed % 2) == 0;

  Vec evx = Vec::Zero(n), evy = Vec::Zero(n);
  evx.head(na) = decreasing_values(rng, na, 0.5, 2.0, rep);
  evy.tail(ng) = -decreasing_values(rng, ng, 0.5, 2.0, rep);
  const Mat x = symmetrize(p * evx.asDiagonal() * p.transpose());
  const Mat y = symmetrize(p * evy.asDiagonal() * p.transpose());
  CCPair base = make_ccpair(x, y);

  Mat d = random_sym(rng, n);
  if (nb > 0 && (seed % 3) != 0) {
    // make the zero-cluster block of the direction singular so the shifted
    // complementarity sub-block is exercised
    const Range b = base.spec.beta_range();
    Mat dtil = base.spec.P.transpose() * d * base.spec.P;
    dtil.block(b.start, b.start, b.size, b.size) = controlled_spectrum_block(rng, b.size, 0);
    d = symmetrize(base.spec.P * dtil * base.spec.P.transpose());
  }
  const Mat f = proj_dir1(base.spec, d);
  const Mat g = d - f;
  std::mt19937_64 rng2(seed ^ 0x9e3779b97f4a7c15ULL);
  return finish_instance(std::move(base), f, g, rng2, n_members, n_nonmembers);
}

}  // namespace sdcc
