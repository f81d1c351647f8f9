#include "sdcc/selftest.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

namespace sdcc {

namespace {

// Deterministic parallel map: results land in index order, reduction after.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> threads;
  const int k = std::min(jobs, count);
  threads.reserve(k);
  for (int t = 0; t < k; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t i) {
  // splitmix64 step; decorrelates per-instance streams
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

OracleInstance random_clustered_instance(std::mt19937_64& rng, int n, bool with_zero) {
  std::uniform_int_distribution<int> coin(0, 1);
  const int nz = with_zero ? std::min(1 + coin(rng), n - 2) : 0;
  const int span = n - nz - 1;
  int npos = 1 + (span > 1 ? static_cast<int>(rng() % static_cast<std::uint64_t>(span)) : 0);
  int nneg = n - nz - npos;
  if (nneg == 0) {
    --npos;
    ++nneg;
  }

  // well-separated cluster values with random multiplicities
  auto fill = [&](int count, double sign, std::vector<double>& out) {
    int left = count;
    double v = 0.6 + 0.2 * std::uniform_real_distribution<double>(0, 1)(rng);
    while (left > 0) {
      int mult = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(left));
      if (coin(rng)) mult = std::min(left, 2);
      for (int i = 0; i < mult; ++i) out.push_back(sign * v);
      left -= mult;
      v += 0.7;
    }
  };
  std::vector<double> ev;
  fill(npos, 1.0, ev);
  for (int i = 0; i < nz; ++i) ev.push_back(0.0);
  fill(nneg, -1.0, ev);

  const Mat p = random_orthogonal(rng, n);
  OracleInstance inst;
  inst.Z = symmetrize(p * Eigen::Map<Vec>(ev.data(), n).asDiagonal() * p.transpose());
  inst.H = random_sym(rng, n);
  inst.W = random_sym(rng, n);
  const double hn = inst.H.norm(), wn = inst.W.norm();
  if (hn > 0) inst.H /= hn;
  if (wn > 0) inst.W /= wn;
  return inst;
}

double fd_dir1_residual(const ScalarFun& f, const Mat& z, const Mat& h, double t) {
  const Spectral sp = eig_sym(z);
  const Mat d1 = lowner_dir1(sp, f, h);
  const Mat fd = (lowner_apply(eig_sym(z + t * h), f) - lowner_apply(sp, f)) / t;
  return (fd - d1).norm();
}

double fd_dir2_residual(const ScalarFun& f, const Mat& z, const Mat& h, const Mat& w,
                        double t) {
  const Spectral sp = eig_sym(z);
  const LownerJet2 jet = lowner_dir2(sp, f, h, w);
  const Mat fd = 2.0 / (t * t) *
                 (lowner_apply(eig_sym(z + t * h + 0.5 * t * t * w), f) - jet.value -
                  t * jet.dir1);
  return (fd - jet.dir2).norm();
}

double fd_dir1_residual(const Mat& z, const Mat& h, double t) {
  const Spectral sp = eig_sym(z);
  const Mat d1 = proj_dir1(sp, h);
  const Mat fd = (proj_psd(z + t * h) - proj_psd(sp)) / t;
  return (fd - d1).norm();
}

double fd_dir2_residual(const Mat& z, const Mat& h, const Mat& w, double t) {
  const Spectral sp = eig_sym(z);
  const Mat d1 = proj_dir1(sp, h);
  const Mat d2 = proj_dir2(sp, h, w);
  const Mat fd =
      2.0 / (t * t) * (proj_psd(z + t * h + 0.5 * t * t * w) - proj_psd(sp) - t * d1);
  return (fd - d2).norm();
}

SuiteResult suite_fd_second_order(std::uint64_t seed, int instances, int jobs) {
  SuiteResult res;
  res.name = "fd-second-order";
  res.count = instances;
  std::vector<double> finals(instances, 0.0);
  std::vector<int> decay_ok(instances, 1);
  std::vector<double> identity(instances, 0.0);
  parallel_for(instances, jobs, [&](int i) {
    std::mt19937_64 rng(mix(seed, i));
    const int n = 3 + i % 6;
    const OracleInstance inst = random_clustered_instance(rng, n, i % 2 == 0);
    const double r2 = fd_dir2_residual(inst.Z, inst.H, inst.W, 1e-2);
    const double r3 = fd_dir2_residual(inst.Z, inst.H, inst.W, 1e-3);
    const double r4 = fd_dir2_residual(inst.Z, inst.H, inst.W, 1e-4);
    decay_ok[i] = (r3 <= 0.3 * r2 + 1e-6) && (r4 <= 0.3 * r3 + 1e-6);
    finals[i] = r4 / (1.0 + inst.W.norm());
    identity[i] =
        (proj_dir2(inst.Z, inst.H, inst.W) + proj_nsd_dir2(inst.Z, inst.H, inst.W) -
         inst.W)
            .norm();
  });
  res.pass = true;
  for (int i = 0; i < instances; ++i) {
    res.worst = std::max(res.worst, finals[i]);
    if (!decay_ok[i]) {
      res.pass = false;
      res.details.push_back("no linear decay at instance " + std::to_string(i));
    }
    if (finals[i] > 1e-4) res.pass = false;
    if (identity[i] > 1e-12) {
      res.pass = false;
      res.details.push_back("complement identity broken at instance " + std::to_string(i));
    }
  }
  return res;
}

SuiteResult suite_engine_equivalence(std::uint64_t seed, int instances, int jobs) {
  SuiteResult res;
  res.name = "engine-equivalence";
  res.count = instances;
  std::vector<double> diff(instances, 0.0);
  parallel_for(instances, jobs, [&](int i) {
    std::mt19937_64 rng(mix(seed, 7777 + i));
    const int n = 3 + i % 6;
    const OracleInstance inst = random_clustered_instance(rng, n, i % 2 == 1);
    const LownerJet2 jet = lowner_dir2(eig_sym(inst.Z), max_fun(), inst.H, inst.W);
    diff[i] = (jet.dir2 - proj_dir2(inst.Z, inst.H, inst.W)).norm();
  });
  res.pass = true;
  for (double d : diff) {
    res.worst = std::max(res.worst, d);
    if (d > 1e-10) res.pass = false;
  }
  return res;
}

SuiteResult suite_complement_identity(std::uint64_t seed, int instances, int jobs) {
  SuiteResult res;
  res.name = "complement-identity";
  res.count = instances;
  std::vector<double> diff(instances, 0.0);
  parallel_for(instances, jobs, [&](int i) {
    std::mt19937_64 rng(mix(seed, 555 + i));
    const int n = 3 + i % 6;
    const OracleInstance inst = random_clustered_instance(rng, n, i % 3 != 0);
    const Mat nsd2 = proj_nsd_dir2(inst.Z, inst.H, inst.W);
    const LownerJet2 jet = lowner_dir2(eig_sym(inst.Z), min_fun(), inst.H, inst.W);
    diff[i] = (nsd2 - jet.dir2).norm();
  });
  res.pass = true;
  for (double d : diff) {
    res.worst = std::max(res.worst, d);
    if (d > 1e-9) res.pass = false;
  }
  return res;
}

namespace {

SpecialCaseInstance instance_for(int idx, std::uint64_t seed, int n_members,
                                 int n_nonmembers) {
  const int kind = idx % 7;
  const int n = 3 + (idx / 7) % 5;
  const std::uint64_t s = mix(seed, idx);
  if (kind < 5) return special_case_generator(kind + 1, n, s, n_members, n_nonmembers);
  return generic_case_generator(n + 1, kind == 6, s, n_members, n_nonmembers);
}

}  // namespace

SuiteResult suite_tangent_dual_oracle(std::uint64_t seed, int members, int nonmembers,
                                      bool with_curve_ladder, int jobs) {
  SuiteResult res;
  res.name = "tangent2-dual-oracle";
  const int per = 2;
  const int tasks = std::max(members, nonmembers) / per + 1;
  std::vector<int> disagreements(tasks, 0), member_count(tasks, 0), nonmember_count(tasks, 0);
  std::vector<int> curve_literal(tasks, 0), curve_substance(tasks, 0);
  std::vector<double> worst(tasks, 0.0), worst_ratio(tasks, 0.0);
  parallel_for(tasks, jobs, [&](int ti) {
    const SpecialCaseInstance inst = instance_for(ti, seed, per, per);
    for (size_t mi = 0; mi < inst.members.size(); ++mi) {
      const auto& [s, t] = inst.members[mi];
      const Tangent2Agreement agr =
          tangent2_agree(inst.base, inst.F, inst.G, s, t, 1e-7);
      ++member_count[ti];
      if (!agr.agree || !agr.derivative.accepted() || !agr.structural.accepted())
        ++disagreements[ti];
      worst[ti] = std::max(worst[ti], std::max(agr.derivative.residual,
                                               agr.structural.residual));
      if (with_curve_ladder) {
        // normalized bound q(t) = bound(t) / t^2 on the ladder
        // {1e-1, 1e-2, 1e-3}: the literal per-decade factor-0.1 comparison,
        // and the two-decade shrink witnessing bound = o(t^2)
        // eigensolver noise in bound(t) is ~1e-15 * scale; divided by t^2 at
        // the bottom rung it reaches ~1e-8, hence the absolute floor
        const double scale = 1.0 + s.norm() + t.norm();
        const double floor_q = 1e-7 * scale;
        std::vector<double> q;
        for (double time : {1e-1, 1e-2, 1e-3}) {
          const CurvePoint cp = curve_to_omega(inst.base, inst.F, inst.G, s, t, time);
          q.push_back(cp.bound / (time * time));
        }
        for (size_t r2 = 1; r2 < q.size(); ++r2) {
          if (q[r2] > 0.1 * q[r2 - 1] + floor_q) ++curve_literal[ti];
          if (q[r2 - 1] > 10.0 * floor_q && q[r2] > floor_q)
            worst_ratio[ti] = std::max(worst_ratio[ti], q[r2] / q[r2 - 1]);
        }
        // bottom-rung witness: members decay ~0.1 per decade there, while a
        // non-member's normalized bound flattens out near a positive constant
        if (q[2] > 0.15 * q[1] + floor_q) ++curve_substance[ti];
      }
    }
    for (const auto& [s, t] : inst.nonmembers) {
      const Tangent2Agreement agr =
          tangent2_agree(inst.base, inst.F, inst.G, s, t, 1e-7);
      ++nonmember_count[ti];
      if (!agr.agree || agr.derivative.accepted() || agr.structural.accepted())
        ++disagreements[ti];
    }
  });
  int disagree = 0, m = 0, nm = 0, cl = 0, cs = 0;
  double wr = 0.0;
  for (int ti = 0; ti < tasks; ++ti) {
    disagree += disagreements[ti];
    m += member_count[ti];
    nm += nonmember_count[ti];
    cl += curve_literal[ti];
    cs += curve_substance[ti];
    wr = std::max(wr, worst_ratio[ti]);
    res.worst = std::max(res.worst, worst[ti]);
  }
  res.count = m + nm;
  res.metrics = {{"disagreements", static_cast<double>(disagree)},
                 {"members", static_cast<double>(m)},
                 {"nonmembers", static_cast<double>(nm)},
                 {"curve_literal_violations", static_cast<double>(cl)},
                 {"curve_substance_violations", static_cast<double>(cs)},
                 {"worst_ladder_ratio", wr}};
  res.pass = disagree == 0 && cs == 0 && m >= members && nm >= nonmembers;
  if (disagree > 0)
    res.details.push_back(std::to_string(disagree) + " oracle disagreements");
  if (cs > 0)
    res.details.push_back(std::to_string(cs) + " two-decade curve-shrink failures");
  if (cl > 0)
    res.details.push_back(std::to_string(cl) +
                          " per-decade factor-0.1 ladder violations (worst ratio " +
                          std::to_string(wr) + ")");
  return res;
}

SuiteResult suite_clarke_polarity(std::uint64_t seed, int samples, int jobs) {
  SuiteResult res;
  res.name = "clarke-polarity";
  res.count = samples;
  std::vector<double> pairing(samples, 0.0), sum_res(samples, 0.0), member_res(samples, 0.0);
  parallel_for(samples, jobs, [&](int i) {
    std::mt19937_64 rng(mix(seed, 31 + i));
    const int n = 4 + i % 4;
    const SpecialCaseInstance gi = generic_case_generator(n, i % 2 == 0, mix(seed, i), 0, 0);
    const CCPair& base = gi.base;
    const Spectral& sp = base.spec;
    const Range a = sp.alpha_range(), b = sp.beta_range(), c = sp.gamma_range();
    std::vector<double> val(sp.n());
    for (int k = 0; k < sp.r(); ++k)
      for (int q = 0; q < sp.clusters[k].size; ++q) val[sp.clusters[k].start + q] = sp.mu[k];

    auto rnd = [&](int rows, int cols) {
      std::normal_distribution<double> nd;
      Mat mm(rows, cols);
      for (int r2 = 0; r2 < rows; ++r2)
        for (int c2 = 0; c2 < cols; ++c2) mm(r2, c2) = nd(rng);
      return mm;
    };
    auto place = [&](Mat& m, const Range& ra, const Range& rb, const Mat& v) {
      m.block(ra.start, rb.start, ra.size, rb.size) = v;
      if (ra.start != rb.start)
        m.block(rb.start, ra.start, rb.size, ra.size) = v.transpose();
    };

    // Clarke-cone element: F on the alpha rows, G on the gamma rows, slope
    // coupling on alpha x gamma.
    Mat ftil = Mat::Zero(sp.n(), sp.n()), gtil = Mat::Zero(sp.n(), sp.n());
    place(ftil, a, a, symmetrize(rnd(a.size, a.size)));
    place(ftil, a, b, rnd(a.size, b.size));
    place(gtil, b, c, rnd(b.size, c.size));
    place(gtil, c, c, symmetrize(rnd(c.size, c.size)));
    const Mat tau = rnd(a.size, c.size);
    Mat fac(a.size, c.size), gac(a.size, c.size);
    for (int r2 = 0; r2 < a.size; ++r2)
      for (int c2 = 0; c2 < c.size; ++c2) {
        const double sg = val[a.start + r2] / (val[a.start + r2] - val[c.start + c2]);
        fac(r2, c2) = sg * tau(r2, c2);
        gac(r2, c2) = (1.0 - sg) * tau(r2, c2);
      }
    place(ftil, a, c, fac);
    place(gtil, a, c, gac);
    const Mat fc = symmetrize(sp.P * ftil * sp.P.transpose());
    const Mat gc = symmetrize(sp.P * gtil * sp.P.transpose());
    member_res[i] = clarke_tangent_test(base, fc, gc, 1e-8).residual;

    // polar element (beta blocks free)
    Mat dftil = Mat::Zero(sp.n(), sp.n()), dgtil = Mat::Zero(sp.n(), sp.n());
    place(dftil, b, b, symmetrize(rnd(b.size, b.size)));
    place(dftil, b, c, rnd(b.size, c.size));
    place(dftil, c, c, symmetrize(rnd(c.size, c.size)));
    place(dgtil, a, a, symmetrize(rnd(a.size, a.size)));
    place(dgtil, a, b, rnd(a.size, b.size));
    place(dgtil, b, b, symmetrize(rnd(b.size, b.size)));
    const Mat rho = rnd(a.size, c.size);
    Mat dfac(a.size, c.size), dgac(a.size, c.size);
    for (int r2 = 0; r2 < a.size; ++r2)
      for (int c2 = 0; c2 < c.size; ++c2) {
        const double sg = val[a.start + r2] / (val[a.start + r2] - val[c.start + c2]);
        dfac(r2, c2) = (1.0 - sg) * rho(r2, c2);
        dgac(r2, c2) = -sg * rho(r2, c2);
      }
    place(dftil, a, c, dfac);
    place(dgtil, a, c, dgac);
    const Mat dfc = symmetrize(sp.P * dftil * sp.P.transpose());
    const Mat dgc = symmetrize(sp.P * dgtil * sp.P.transpose());
    member_res[i] = std::max(member_res[i],
                             clarke_polar_test(base, dfc, dgc, 1e-8).residual);

    pairing[i] = std::abs(frob_inner(fc, dfc) + frob_inner(gc, dgc));

    // the tangent cone absorbs Clarke-cone translations
    auto [tf, tg] = random_tangent(rng, base);
    sum_res[i] = tangent_test(base, tf + fc, tg + gc, 1e-8).residual;
  });
  res.pass = true;
  for (int i = 0; i < samples; ++i) {
    res.worst = std::max(res.worst, pairing[i]);
    if (pairing[i] > 1e-10) {
      res.pass = false;
      res.details.push_back("pairing violation at sample " + std::to_string(i));
    }
    if (sum_res[i] > 1e-8) {
      res.pass = false;
      res.details.push_back("translation left the tangent cone at sample " +
                            std::to_string(i));
    }
    if (member_res[i] > 1e-8) {
      res.pass = false;
      res.details.push_back("constructed element failed its own pattern test at sample " +
                            std::to_string(i));
    }
  }
  return res;
}

namespace {

// Projects a random multiplier pair onto the finite-support cone of the
// structured set (zero on free blocks, row-space component on coupled blocks,
// signed parts on the beta block).
std::pair<Mat, Mat> finite_multiplier(std::mt19937_64& rng, const Tangent2Data& data) {
  const Spectral& sp = data.spec;
  const int n = sp.n();
  Mat g1 = Mat::Zero(n, n), g2 = Mat::Zero(n, n);
  std::normal_distribution<double> nd;
  auto rnd = [&](int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = nd(rng);
    return m;
  };
  auto place = [&](Mat& m, int k, int l, const Mat& v) {
    m.block(sp.clusters[k].start, sp.clusters[l].start, sp.clusters[k].size,
            sp.clusters[l].size) = v;
    if (k != l)
      m.block(sp.clusters[l].start, sp.clusters[k].start, sp.clusters[l].size,
              sp.clusters[k].size) = v.transpose();
  };

  for (const auto& ob : data.off) {
    const int mk = sp.clusters[ob.k].size, ml = sp.clusters[ob.l].size;
    switch (ob.kind) {
      case Tangent2Data::OffBlock::FixedT:
        place(g2, ob.k, ob.l, rnd(mk, ml));
        break;
      case Tangent2Data::OffBlock::FixedS:
        place(g1, ob.k, ob.l, rnd(mk, ml));
        break;
      case Tangent2Data::OffBlock::Coupled: {
        // row space of mu_l S + mu_k T: (G1, G2) = r (mu_k, mu_l)... the
        // finiteness condition is mu_k G1 = mu_l G2, so take G1 = mu_l R,
        // G2 = mu_k R
        const Mat r = rnd(mk, ml);
        place(g1, ob.k, ob.l, Mat(sp.mu[ob.l] * r));
        place(g2, ob.k, ob.l, Mat(sp.mu[ob.k] * r));
        break;
      }
    }
  }
  for (const auto& db : data.diag) {
    const int mk = sp.clusters[db.k].size;
    switch (db.kind) {
      case Tangent2Data::DiagBlock::FixedT:
        place(g2, db.k, db.k, symmetrize(rnd(mk, mk)));
        break;
      case Tangent2Data::DiagBlock::FixedS:
        place(g1, db.k, db.k, symmetrize(rnd(mk, mk)));
        break;
      case Tangent2Data::DiagBlock::Zero: {
        const Range a = db.sub.alpha_range(), be = db.sub.beta_range(),
                    ga = db.sub.gamma_range();
        Mat a1 = Mat::Zero(mk, mk), a2 = Mat::Zero(mk, mk);
        auto put = [&](Mat& dst, const Range& ra, const Range& rb, const Mat& v) {
          dst.block(ra.start, rb.start, ra.size, rb.size) = v;
          if (ra.start != rb.start)
            dst.block(rb.start, ra.start, rb.size, ra.size) = v.transpose();
        };
        put(a2, a, a, symmetrize(rnd(a.size, a.size)));
        put(a2, a, be, rnd(a.size, be.size));
        put(a1, be, ga, rnd(be.size, ga.size));
        put(a1, ga, ga, symmetrize(rnd(ga.size, ga.size)));
        // slope-coupling row space: (G1, G2) = ((1 - sigma) r, -sigma r)
        // satisfies sigma G1 + (1 - sigma) G2 = ... use the orthogonal of the
        // constraint: need sigma G1 + (1-sigma) G2 = 0
        const Mat r = rnd(a.size, ga.size);
        Mat c1(a.size, ga.size), c2(a.size, ga.size);
        for (int i = 0; i < a.size; ++i)
          for (int j = 0; j < ga.size; ++j) {
            const double sg = db.sigma_ag(i, j);
            c1(i, j) = (1.0 - sg) * r(i, j);
            c2(i, j) = -sg * r(i, j);
          }
        put(a1, a, ga, c1);
        put(a2, a, ga, c2);
        if (!be.empty()) {
          const Mat raw1 = symmetrize(rnd(be.size, be.size));
          const Mat raw2 = symmetrize(rnd(be.size, be.size));
          put(a1, be, be, proj_nsd(raw1));
          put(a2, be, be, proj_psd(raw2));
        }
        place(g1, db.k, db.k, Mat(db.sub.P * a1 * db.sub.P.transpose()));
        place(g2, db.k, db.k, Mat(db.sub.P * a2 * db.sub.P.transpose()));
        break;
      }
    }
  }
  return {symmetrize(sp.P * g1 * sp.P.transpose()),
          symmetrize(sp.P * g2 * sp.P.transpose())};
}

}  // namespace

SuiteResult suite_sigma_support(std::uint64_t seed, int instances, int samples, int jobs) {
  SuiteResult res;
  res.name = "sigma-support";
  res.count = instances;
  std::vector<double> gap(instances, 0.0), overshoot(instances, 0.0);
  std::vector<int> ok(instances, 1);
  parallel_for(instances, jobs, [&](int i) {
    std::mt19937_64 rng(mix(seed, 91 + i));
    const SpecialCaseInstance inst = instance_for(i, mix(seed, 1234 + i), 0, 0);
    const Tangent2Data& data = inst.data;

    // finite case: multiplier projected onto the support cone
    auto [g1, g2] = finite_multiplier(rng, data);
    const SigmaValue sv = sigma_tangent2_omega(g1, g2, data);
    if (!sv.finite) {
      ok[i] = 0;
      return;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
      const double scale = (s % 5 == 0) ? 0.0 : ((s % 5 == 1) ? 0.1 : (s % 5 == 2 ? 1.0 : (s % 5 == 3 ? 3.0 : 10.0)));
      const auto [sm, tm] = data.sample_member(rng, scale);
      best = std::max(best, frob_inner(g1, sm) + frob_inner(g2, tm));
    }
    gap[i] = sv.value - best;            // must be in [0, 1e-3]
    overshoot[i] = best - sv.value;      // must be <= ~0

    // infinite case: a raw random multiplier almost surely pairs with a free
    // block; verify the rule says infinite and the sampled values grow
    std::mt19937_64 rng2(mix(seed, 4321 + i));
    const Mat r1 = random_sym(rng2, data.spec.n());
    const Mat r2 = random_sym(rng2, data.spec.n());
    const SigmaValue si = sigma_tangent2_omega(r1, r2, data);
    if (si.finite) {
      // degenerate geometry can make a random pair support-finite; skip
      return;
    }
    double v1 = -1e300, v3 = -1e300;
    for (int s = 0; s < 64; ++s) {
      const auto [sm1, tm1] = data.sample_member(rng2, 1.0);
      v1 = std::max(v1, frob_inner(r1, sm1) + frob_inner(r2, tm1));
      const auto [sm3, tm3] = data.sample_member(rng2, 100.0);
      v3 = std::max(v3, frob_inner(r1, sm3) + frob_inner(r2, tm3));
    }
    if (v3 < 10.0 * std::max(1.0, std::abs(v1))) ok[i] = 0;
  });
  res.pass = true;
  for (int i = 0; i < instances; ++i) {
    res.worst = std::max(res.worst, std::max(gap[i], overshoot[i]));
    if (!ok[i]) {
      res.pass = false;
      res.details.push_back("support rule / sampler mismatch at instance " + std::to_string(i));
    }
    if (gap[i] > 1e-3 || overshoot[i] > 1e-9) {
      res.pass = false;
      res.details.push_back("support value gap at instance " + std::to_string(i));
    }
  }
  return res;
}

SuiteResult suite_sonc_sanity(std::uint64_t seed) {
  SuiteResult res;
  res.name = "sonc-sanity";
  res.count = 2;
  res.pass = true;

  // A stationary but non-optimal point: concave objective along a feasible
  // parabolic arc; the margin must come back negative.
  {
    ProblemSpec spec;
    spec.m = 1;
    spec.n = 1;
    spec.phi.quad = Mat::Constant(1, 1, -2.0);
    Poly2 th;
    th.lin = Vec::Ones(1);
    spec.theta = {th};
    Poly2 ze;
    ze.lin = Vec::Zero(1);
    spec.zeta = {ze};
    spec.validate();
    MultiplierPair mult;
    mult.xi = Vec(0);
    mult.gamma1 = Mat::Zero(1, 1);
    mult.gamma2 = Mat::Zero(1, 1);
    SamplerConfig cfg;
    cfg.samples = 16;
    cfg.seed = seed;
    const SoncAggregate agg = sonc_check(spec, Vec::Zero(1), mult, cfg);
    if (!agg.violated || agg.min_margin > -1.0) {
      res.pass = false;
      res.details.push_back("descent parabola not detected (min margin " +
                            std::to_string(agg.min_margin) + ")");
    }
    res.worst = std::max(res.worst, -agg.min_margin);
  }

  // Strongly convex objective with the complementarity constraint inactive:
  // every sampled margin stays nonnegative.
  {
    ProblemSpec spec;
    spec.m = 2;
    spec.n = 2;
    spec.phi.quad = 2.0 * Mat::Identity(2, 2);
    const auto idx = sym_entry_index(2);
    for (int e = 0; e < 3; ++e) {
      Poly2 th;
      th.c = idx[e].first == idx[e].second ? (idx[e].first == 0 ? 1.0 : 2.0) : 0.0;
      th.lin = Vec::Zero(2);
      if (e == 0) th.lin[0] = 1.0;
      spec.theta.push_back(th);
      Poly2 ze;
      ze.lin = Vec::Zero(2);
      spec.zeta.push_back(ze);
    }
    ConeFactor orth;
    orth.type = ConeFactor::Orthant;
    orth.dim = 1;
    spec.K = {orth};
    Poly2 h;
    h.lin = Vec::Zero(2);
    h.lin[1] = 1.0;
    spec.h = {h};
    spec.validate();
    MultiplierPair mult;
    mult.xi = Vec::Zero(1);
    mult.gamma1 = Mat::Zero(2, 2);
    mult.gamma2 = Mat::Zero(2, 2);
    SamplerConfig cfg;
    cfg.samples = 32;
    cfg.seed = seed ^ 0x77;
    const SoncAggregate agg = sonc_check(spec, Vec::Zero(2), mult, cfg);
    if (agg.evaluated == 0 || agg.min_margin < -1e-8) {
      res.pass = false;
      res.details.push_back("convex instance produced a negative margin (" +
                            std::to_string(agg.min_margin) + ")");
    }
  }
  return res;
}

SuiteResult suite_example_internal() {
  SuiteResult res;
  res.name = "example-internal";
  const ExampleReport rep = example1(1);
  res.count = static_cast<int>(rep.clauses.size());
  res.pass = true;
  for (const auto& c : rep.clauses) {
    // the pinned reference constants for the support total and margin are
    // checked by the acceptance suite; the install check covers the clauses
    // with independent in-library validation
    if (c.name == "sigma-total" || c.name == "margin") continue;
    if (!c.pass) {
      res.pass = false;
      res.details.push_back(c.name + " failed (error " + std::to_string(c.error) + ")");
    }
    res.worst = std::max(res.worst, c.error);
  }

  // margin / support consistency: margin == quad - sigma on the grid, and the
  // support total matches a direct sampling maximizer of the two parts
  const ExampleData ex = example_data();
  std::mt19937_64 rng(0x5DCC);
  for (double a : {-1.0, 1.0})
    for (double c : {-1.0, 0.0, 1.0}) {
      const Vec d = ex.direction(a, 0.5, c);
      const ConditionReport rep2 = sonc_margin(ex.spec, ex.x_star, ex.mult, d);
      if (!rep2.sigma.finite) {
        res.pass = false;
        res.details.push_back("support total unexpectedly infinite");
        continue;
      }
      const double err = std::abs(rep2.margin - (rep2.quad - rep2.sigma.value));
      if (err > 1e-12) {
        res.pass = false;
        res.details.push_back("margin identity broken");
      }
      // sampling maximizer over the complementarity part
      const CCPair base = make_ccpair(ex.Xs, ex.Ys);
      const Tangent2Data data =
          tangent2_structural(base, ex.gmat(a, 0.5, c), ex.hmat(0.5, c));
      const SigmaValue sv = sigma_tangent2_omega(ex.mult.gamma1, ex.mult.gamma2, data);
      double best = -1e300;
      for (int s = 0; s < 200; ++s) {
        const auto [sm, tm] = data.sample_member(rng, s % 5 == 0 ? 0.0 : 1.0);
        best = std::max(best, frob_inner(ex.mult.gamma1, sm) +
                                  frob_inner(ex.mult.gamma2, tm));
      }
      if (!sv.finite || std::abs(best - sv.value) > 1e-6) {
        res.pass = false;
        res.details.push_back("complementarity-part support does not match its sampler");
      }
    }
  return res;
}

SelftestReport run_selftest(const SelftestConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SelftestReport rep;
  rep.config = cfg;
  const int f = cfg.quick ? 1 : 4;
  rep.suites.push_back(suite_fd_second_order(cfg.seed, 10 * f, cfg.jobs));
  rep.suites.push_back(suite_engine_equivalence(cfg.seed, 10 * f, cfg.jobs));
  rep.suites.push_back(suite_complement_identity(cfg.seed, 8 * f, cfg.jobs));
  rep.suites.push_back(
      suite_tangent_dual_oracle(cfg.seed, 30 * f, 30 * f, true, cfg.jobs));
  rep.suites.push_back(suite_clarke_polarity(cfg.seed, 25 * f, cfg.jobs));
  rep.suites.push_back(suite_sigma_support(cfg.seed, 4 * f, 400, cfg.jobs));
  rep.suites.push_back(suite_sonc_sanity(cfg.seed));
  rep.suites.push_back(suite_example_internal());
  rep.pass = true;
  for (const auto& s : rep.suites) rep.pass = rep.pass && s.pass;
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace sdcc
