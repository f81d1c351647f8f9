#include "sdcc/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdcc {

namespace {

double entry_weight(const std::pair<int, int>& e) { return e.first == e.second ? 1.0 : 2.0; }

struct FactorView {
  ConeFactor f;
  int offset = 0;
};

std::vector<FactorView> factor_views(const ProblemSpec& spec) {
  std::vector<FactorView> v;
  int off = 0;
  for (const auto& f : spec.K) {
    v.push_back({f, off});
    off += f.entries();
  }
  return v;
}

Vec eval_stack(const std::vector<Poly2>& ps, const Vec& x) {
  Vec out(static_cast<Eigen::Index>(ps.size()));
  for (size_t i = 0; i < ps.size(); ++i) out[static_cast<Eigen::Index>(i)] = ps[i].eval(x);
  return out;
}

Vec dir_stack(const std::vector<Poly2>& ps, const Vec& x, const Vec& d) {
  Vec out(static_cast<Eigen::Index>(ps.size()));
  for (size_t i = 0; i < ps.size(); ++i) out[static_cast<Eigen::Index>(i)] = ps[i].dir(x, d);
  return out;
}

Mat factor_matrix(const ConeFactor& f, const Vec& stacked, int offset) {
  return sym_from_entries(stacked.segment(offset, f.entries()), f.dim);
}

// Per-coordinate matrices of the linear map d -> P^T M'(x)[d] P.
std::vector<Mat> basis_images(const std::vector<Poly2>& ps, const Vec& x, int n,
                              const Mat& p) {
  const int m = static_cast<int>(x.size());
  std::vector<Mat> images(m);
  const auto idx = sym_entry_index(n);
  std::vector<Vec> grads(ps.size());
  for (size_t e = 0; e < ps.size(); ++e) grads[e] = ps[e].grad(x);
  for (int t = 0; t < m; ++t) {
    Mat mt = Mat::Zero(n, n);
    for (size_t e = 0; e < ps.size(); ++e) {
      const auto [i, j] = idx[e];
      mt(i, j) = grads[e][t];
      mt(j, i) = grads[e][t];
    }
    images[t] = p.transpose() * mt * p;
  }
  return images;
}

// Orthant-factor support: zero when the multiplier vanishes on inactive
// coordinates and is nonpositive on fully active ones, +inf otherwise.
void orthant_sigma(const Vec& xi, const Vec& a, const Vec& e, double tol,
                   SigmaValue& out) {
  const double vtol = tol * std::max(1.0, xi.norm());
  for (int i = 0; i < xi.size(); ++i) {
    const bool free_coord = a[i] > tol || (std::abs(a[i]) <= tol && e[i] > tol);
    if (free_coord) {
      if (std::abs(xi[i]) > vtol) {
        out.finite = false;
        out.notes.push_back("orthant multiplier nonzero on inactive coordinate " +
                            std::to_string(i));
      }
    } else if (xi[i] > vtol) {
      out.finite = false;
      out.notes.push_back("orthant multiplier positive on active coordinate " +
                          std::to_string(i));
    }
  }
}

}  // namespace

double Poly2::eval(const Vec& x) const {
  double v = c;
  if (lin.size()) v += lin.dot(x);
  if (quad.size()) v += 0.5 * x.dot(quad * x);
  return v;
}

Vec Poly2::grad(const Vec& x) const {
  Vec g = Vec::Zero(x.size());
  if (lin.size()) g += lin;
  if (quad.size()) g += quad * x;
  return g;
}

void Poly2::validate(int m, const std::string& what) const {
  if (lin.size() != 0 && lin.size() != m)
    throw std::invalid_argument(what + ": linear coefficient size mismatch");
  if (quad.size() != 0) {
    if (quad.rows() != m || quad.cols() != m)
      throw std::invalid_argument(what + ": quadratic coefficient size mismatch");
    if (sym_defect(quad) > 1e-12 * std::max(1.0, quad.norm()))
      throw std::invalid_argument(what + ": quadratic coefficients not symmetric");
  }
}

int ProblemSpec::h_entries() const {
  int s = 0;
  for (const auto& f : K) s += f.entries();
  return s;
}

void ProblemSpec::validate() const {
  if (m <= 0) throw std::invalid_argument("ProblemSpec: m must be positive");
  if (n <= 0) throw std::invalid_argument("ProblemSpec: n must be positive");
  phi.validate(m, "phi");
  if (static_cast<int>(h.size()) != h_entries())
    throw std::invalid_argument("ProblemSpec: h entry count does not match K");
  const int ns = n * (n + 1) / 2;
  if (static_cast<int>(theta.size()) != ns || static_cast<int>(zeta.size()) != ns)
    throw std::invalid_argument("ProblemSpec: theta/zeta entry count mismatch");
  for (size_t i = 0; i < h.size(); ++i) h[i].validate(m, "h[" + std::to_string(i) + "]");
  for (size_t i = 0; i < theta.size(); ++i) theta[i].validate(m, "theta[" + std::to_string(i) + "]");
  for (size_t i = 0; i < zeta.size(); ++i) zeta[i].validate(m, "zeta[" + std::to_string(i) + "]");
}

std::vector<std::pair<int, int>> sym_entry_index(int n) {
  std::vector<std::pair<int, int>> idx;
  idx.reserve(n * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) idx.emplace_back(i, j);
  return idx;
}

Mat sym_from_entries(const Vec& e, int n) {
  if (e.size() != n * (n + 1) / 2)
    throw std::invalid_argument("sym_from_entries: entry count mismatch");
  Mat m(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      m(i, j) = e[k];
      m(j, i) = e[k];
      ++k;
    }
  return m;
}

Vec sym_to_entries(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Vec e(n * (n + 1) / 2);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) e[k++] = 0.5 * (m(i, j) + m(j, i));
  return e;
}

Flavor flavor_from_string(const std::string& s) {
  if (s == "c" || s == "clarke") return Flavor::Clarke;
  if (s == "limiting") return Flavor::Limiting;
  if (s == "regular") return Flavor::Regular;
  throw std::invalid_argument("unknown multiplier flavor: " + s);
}

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::Clarke: return "c";
    case Flavor::Limiting: return "limiting";
    case Flavor::Regular: return "regular";
  }
  return "c";
}

Jet lagrangian_jet(const ProblemSpec& spec, const Vec& x, const MultiplierPair& mult) {
  spec.validate();
  if (x.size() != spec.m) throw std::invalid_argument("lagrangian_jet: point size mismatch");
  if (mult.xi.size() != spec.h_entries())
    throw std::invalid_argument("lagrangian_jet: xi size mismatch");
  if (mult.gamma1.rows() != spec.n || mult.gamma2.rows() != spec.n)
    throw std::invalid_argument("lagrangian_jet: Gamma size mismatch");

  Jet jet;
  jet.value = spec.phi.eval(x);
  jet.grad = spec.phi.grad(x);
  jet.hess = spec.phi.quad.size() ? Mat(spec.phi.quad) : Mat(Mat::Zero(spec.m, spec.m));

  auto accumulate = [&](const std::vector<Poly2>& ps, auto weight_of, auto coef_of) {
    for (size_t e = 0; e < ps.size(); ++e) {
      const double cw = weight_of(e) * coef_of(e);
      if (cw == 0.0) continue;
      jet.value += cw * ps[e].eval(x);
      jet.grad += cw * ps[e].grad(x);
      if (ps[e].quad.size()) jet.hess += cw * ps[e].quad;
    }
  };

  const auto views = factor_views(spec);
  for (const auto& view : views) {
    if (view.f.type == ConeFactor::Psd) {
      const auto idx = sym_entry_index(view.f.dim);
      for (int e = 0; e < view.f.entries(); ++e) {
        const double cw = entry_weight(idx[e]) * mult.xi[view.offset + e];
        if (cw == 0.0) continue;
        const Poly2& p = spec.h[view.offset + e];
        jet.value += cw * p.eval(x);
        jet.grad += cw * p.grad(x);
        if (p.quad.size()) jet.hess += cw * p.quad;
      }
    } else {
      for (int e = 0; e < view.f.entries(); ++e) {
        const double cw = mult.xi[view.offset + e];
        if (cw == 0.0) continue;
        const Poly2& p = spec.h[view.offset + e];
        jet.value += cw * p.eval(x);
        jet.grad += cw * p.grad(x);
        if (p.quad.size()) jet.hess += cw * p.quad;
      }
    }
  }

  const auto idx = sym_entry_index(spec.n);
  auto theta_coef = [&](size_t e) { return mult.gamma1(idx[e].first, idx[e].second); };
  auto zeta_coef = [&](size_t e) { return mult.gamma2(idx[e].first, idx[e].second); };
  auto w = [&](size_t e) { return entry_weight(idx[e]); };
  accumulate(spec.theta, w, theta_coef);
  accumulate(spec.zeta, w, zeta_coef);
  jet.hess = symmetrize(jet.hess);
  return jet;
}

Vec eval_h(const ProblemSpec& spec, const Vec& x) { return eval_stack(spec.h, x); }
Vec h_dir(const ProblemSpec& spec, const Vec& x, const Vec& d) { return dir_stack(spec.h, x, d); }
Mat eval_theta(const ProblemSpec& spec, const Vec& x) {
  return sym_from_entries(eval_stack(spec.theta, x), spec.n);
}
Mat eval_zeta(const ProblemSpec& spec, const Vec& x) {
  return sym_from_entries(eval_stack(spec.zeta, x), spec.n);
}
Mat theta_dir(const ProblemSpec& spec, const Vec& x, const Vec& d) {
  return sym_from_entries(dir_stack(spec.theta, x, d), spec.n);
}
Mat zeta_dir(const ProblemSpec& spec, const Vec& x, const Vec& d) {
  return sym_from_entries(dir_stack(spec.zeta, x, d), spec.n);
}

double feasibility_residual(const ProblemSpec& spec, const Vec& x) {
  double s = 0.0;
  const Vec hv = eval_h(spec, x);
  for (const auto& view : factor_views(spec)) {
    switch (view.f.type) {
      case ConeFactor::Psd: {
        const Spectral sa = eig_sym(factor_matrix(view.f, hv, view.offset));
        if (sa.n() > 0) s += std::max(0.0, -sa.lambda.minCoeff());
        break;
      }
      case ConeFactor::Orthant: {
        const Vec v = hv.segment(view.offset, view.f.dim);
        s += v.cwiseMin(0.0).norm();
        break;
      }
      case ConeFactor::Zero:
        s += hv.segment(view.offset, view.f.dim).norm();
        break;
      case ConeFactor::Free:
        break;
    }
  }
  s += in_omega(eval_theta(spec, x), eval_zeta(spec, x)).residual;
  return s;
}

namespace {

// Regular normal cone residual of (Gamma1, Gamma2) at a base pair: the polar
// pattern of the tangent cone plus the semidefinite sign conditions on the
// zero-eigenvalue block.
double regular_normal_residual(const CCPair& base, const Mat& g1, const Mat& g2,
                               std::vector<Violation>* viol) {
  MembershipReport polar = clarke_polar_test(base, g1, g2, 1.0);
  double sq = polar.residual * polar.residual;
  if (viol)
    for (const auto& v : polar.violations) viol->push_back(v);
  const Range be = base.spec.beta_range();
  if (!be.empty()) {
    const Mat g1t = base.spec.P.transpose() * g1 * base.spec.P;
    const Mat g2t = base.spec.P.transpose() * g2 * base.spec.P;
    const Mat b1 = symmetrize(g1t.block(be.start, be.start, be.size, be.size));
    const Mat b2 = symmetrize(g2t.block(be.start, be.start, be.size, be.size));
    const double v1 = proj_psd(b1).norm();
    const double v2 = proj_nsd(b2).norm();
    if (viol) {
      viol->push_back({"G1[bb]", "negative semidefinite", v1});
      viol->push_back({"G2[bb]", "positive semidefinite", v2});
    }
    sq += v1 * v1 + v2 * v2;
  }
  return std::sqrt(sq);
}

}  // namespace

StationarityReport stationarity_residual(const ProblemSpec& spec, const Vec& x,
                                         const MultiplierPair& mult, Flavor flavor,
                                         double tol) {
  StationarityReport rep;
  rep.flavor = flavor;
  rep.feasibility = feasibility_residual(spec, x);
  if (rep.feasibility > 100.0 * tol)
    throw std::invalid_argument("stationarity_residual: point infeasible, residual " +
                                std::to_string(rep.feasibility));

  const Jet jet = lagrangian_jet(spec, x, mult);
  rep.grad_norm = jet.grad.norm();
  rep.violations.push_back({"grad", "grad_x L = 0", rep.grad_norm});

  double sq = 0.0;
  const Vec hv = eval_h(spec, x);
  for (const auto& view : factor_views(spec)) {
    double v = 0.0;
    switch (view.f.type) {
      case ConeFactor::Psd: {
        const Mat a = factor_matrix(view.f, hv, view.offset);
        const Mat xi = factor_matrix(view.f, mult.xi, view.offset);
        v = proj_psd(xi).norm() +
            std::abs(frob_inner(xi, a)) / std::max(1.0, a.norm());
        break;
      }
      case ConeFactor::Orthant: {
        const Vec a = hv.segment(view.offset, view.f.dim);
        const Vec xi = mult.xi.segment(view.offset, view.f.dim);
        v = xi.cwiseMax(0.0).norm() + std::abs(xi.dot(a)) / std::max(1.0, a.norm());
        break;
      }
      case ConeFactor::Zero:
        v = 0.0;  // normal cone is the whole space
        break;
      case ConeFactor::Free:
        v = mult.xi.segment(view.offset, view.f.dim).norm();
        break;
    }
    rep.violations.push_back({"K-factor@" + std::to_string(view.offset), "normal cone", v});
    sq += v * v;
  }

  const CCPair base = make_ccpair(eval_theta(spec, x), eval_zeta(spec, x),
                                  std::max(tol, rep.feasibility + tol));
  double omega_res = 0.0;
  switch (flavor) {
    case Flavor::Clarke:
      omega_res = clarke_polar_test(base, mult.gamma1, mult.gamma2, tol).residual;
      break;
    case Flavor::Regular:
      omega_res = regular_normal_residual(base, mult.gamma1, mult.gamma2, &rep.violations);
      break;
    case Flavor::Limiting: {
      // Sampled outer approximation: regular residual minimized over nearby
      // base points of the complementarity set.
      rep.sampled = true;
      rep.warnings.push_back(
          "limiting flavor approximated by sampled regular tests at perturbed base points");
      std::mt19937_64 rng(0x5DCC);
      omega_res = regular_normal_residual(base, mult.gamma1, mult.gamma2, nullptr);
      const Mat z = base.X + base.Y;
      for (double scale : {1e-6, 1e-4, 1e-2}) {
        for (int trial = 0; trial < 8; ++trial) {
          const Mat zp = z + random_sym(rng, spec.n, scale * std::max(1.0, z.norm()));
          const Spectral sp = eig_sym(zp);
          CCPair nearby;
          nearby.X = proj_psd(sp);
          nearby.Y = zp - nearby.X;
          nearby.spec = sp;
          nearby.tol = base.tol;
          omega_res = std::min(
              omega_res, regular_normal_residual(nearby, mult.gamma1, mult.gamma2, nullptr));
        }
      }
      break;
    }
  }
  rep.violations.push_back({"Omega", "normal cone (" + to_string(flavor) + ")", omega_res});
  sq += omega_res * omega_res;

  rep.cone_residual = std::sqrt(sq);
  rep.residual = rep.grad_norm + rep.cone_residual;
  std::sort(rep.violations.begin(), rep.violations.end(),
            [](const Violation& a, const Violation& b) { return a.magnitude > b.magnitude; });
  return rep;
}

MembershipReport critical_cone_test(const ProblemSpec& spec, const Vec& x,
                                    const Vec& d, double tol) {
  spec.validate();
  std::vector<Violation> viol;
  const double slope = spec.phi.dir(x, d);
  viol.push_back({"phi", "phi'(x) d <= 0", std::max(0.0, slope)});

  const Vec hv = eval_h(spec, x);
  const Vec hd = h_dir(spec, x, d);
  for (const auto& view : factor_views(spec)) {
    double v = 0.0;
    switch (view.f.type) {
      case ConeFactor::Psd: {
        const Spectral sa = eig_sym(factor_matrix(view.f, hv, view.offset));
        const Mat dd = factor_matrix(view.f, hd, view.offset);
        const Range be = sa.beta_range();
        if (!be.empty()) {
          const Mat e = sa.P.middleCols(be.start, be.size);
          const Spectral sn = eig_sym(symmetrize(e.transpose() * dd * e));
          if (sn.n() > 0) v = std::max(0.0, -sn.lambda.minCoeff());
        }
        break;
      }
      case ConeFactor::Orthant: {
        const Vec a = hv.segment(view.offset, view.f.dim);
        const Vec dd = hd.segment(view.offset, view.f.dim);
        for (int i = 0; i < view.f.dim; ++i)
          if (std::abs(a[i]) <= tol) v += std::max(0.0, -dd[i]);
        break;
      }
      case ConeFactor::Zero:
        v = hd.segment(view.offset, view.f.dim).norm();
        break;
      case ConeFactor::Free:
        break;
    }
    viol.push_back({"K-factor@" + std::to_string(view.offset), "tangent cone", v});
  }

  const CCPair base = make_ccpair(eval_theta(spec, x), eval_zeta(spec, x),
                                  std::max(tol, feasibility_residual(spec, x) + tol));
  const MembershipReport omega =
      tangent_test(base, theta_dir(spec, x, d), zeta_dir(spec, x, d), tol);
  viol.push_back({"Omega", "tangent cone", omega.residual});

  double sq = 0.0;
  for (const auto& v : viol) sq += v.magnitude * v.magnitude;
  return make_report(std::sqrt(sq), tol, std::move(viol));
}

namespace {

void sigma_accumulate(SigmaValue& total, const SigmaValue& part, const std::string& label) {
  if (!part.finite) total.finite = false;
  for (const auto& nt : part.notes) total.notes.push_back(label + ": " + nt);
  total.value += part.finite ? part.value : 0.0;
}

// Support of xi over the product of the K factors' second-order tangent sets.
SigmaValue sigma_k_part(const ProblemSpec& spec, const Vec& x,
                        const MultiplierPair& mult, const Vec& d, double tol) {
  SigmaValue total;
  total.finite = true;
  const Vec hv = eval_h(spec, x);
  const Vec hd = h_dir(spec, x, d);
  for (const auto& view : factor_views(spec)) {
    switch (view.f.type) {
      case ConeFactor::Psd:
        sigma_accumulate(total,
                         sigma_tangent2_psd(factor_matrix(view.f, mult.xi, view.offset),
                                            factor_matrix(view.f, hv, view.offset),
                                            factor_matrix(view.f, hd, view.offset), tol),
                         "K-factor@" + std::to_string(view.offset));
        break;
      case ConeFactor::Orthant:
        orthant_sigma(mult.xi.segment(view.offset, view.f.dim),
                      hv.segment(view.offset, view.f.dim),
                      hd.segment(view.offset, view.f.dim), tol, total);
        break;
      case ConeFactor::Zero:
        if (hd.segment(view.offset, view.f.dim).norm() > tol) {
          total.finite = false;
          total.notes.push_back("direction leaves the zero cone factor");
        }
        break;
      case ConeFactor::Free:
        if (mult.xi.segment(view.offset, view.f.dim).norm() >
            tol * std::max(1.0, mult.xi.norm())) {
          total.finite = false;
          total.notes.push_back("multiplier nonzero on a free cone factor");
        }
        break;
    }
  }
  return total;
}

// Support of (Gamma1, Gamma2) over the complementarity-part second-order set
// (tight) or the product-cone relaxation.
SigmaValue sigma_omega_part(const ProblemSpec& spec, const Vec& x,
                            const MultiplierPair& mult, const Vec& d, double tol,
                            SoscVariant variant) {
  const CCPair base = make_ccpair(eval_theta(spec, x), eval_zeta(spec, x),
                                  std::max(tol, feasibility_residual(spec, x) + tol));
  const Mat f = theta_dir(spec, x, d);
  const Mat g = zeta_dir(spec, x, d);
  SigmaValue total;
  total.finite = true;
  if (variant == SoscVariant::Tight) {
    try {
      const Tangent2Data data = tangent2_structural(base, f, g, 10 * tol);
      sigma_accumulate(total, sigma_tangent2_omega(mult.gamma1, mult.gamma2, data, tol),
                       "Omega");
    } catch (const std::invalid_argument& err) {
      total.finite = false;
      total.notes.push_back(std::string("Omega: ") + err.what());
    }
  } else {
    sigma_accumulate(total, sigma_tangent2_psd(mult.gamma1, base.X, f, tol), "theta-part");
    sigma_accumulate(total, sigma_tangent2_nsd(mult.gamma2, base.Y, g, tol), "zeta-part");
  }
  return total;
}

ConditionReport condition_report(const ProblemSpec& spec, const Vec& x,
                                 const MultiplierPair& mult, const Vec& d, double tol,
                                 SoscVariant variant) {
  ConditionReport rep;
  rep.d = d;
  rep.warnings.push_back("constraint qualification assumed, not verified");
  rep.feasibility = feasibility_residual(spec, x);
  rep.stationarity = stationarity_residual(spec, x, mult, Flavor::Clarke, tol).residual;
  rep.stationarity_regular =
      stationarity_residual(spec, x, mult, Flavor::Regular, tol).residual;
  rep.critical_residual = critical_cone_test(spec, x, d, tol).residual;

  const Jet jet = lagrangian_jet(spec, x, mult);
  rep.quad = d.dot(jet.hess * d);

  SigmaValue total = sigma_k_part(spec, x, mult, d, tol);
  sigma_accumulate(total, sigma_omega_part(spec, x, mult, d, tol, variant), "");
  rep.sigma = total;
  rep.vacuous = !total.finite;
  if (total.finite) rep.margin = rep.quad - total.value;
  return rep;
}

}  // namespace

ConditionReport sonc_margin(const ProblemSpec& spec, const Vec& x,
                            const MultiplierPair& mult, const Vec& d, double tol) {
  return condition_report(spec, x, mult, d, tol, SoscVariant::Tight);
}

namespace {

// Linear part of the criticality system: rows r with r.d = 0 required.
// Conic parts (zero-block pair of the complementarity direction, active
// semidefinite/orthant compressions) are handled by rejection, escalating to
// extra equality rows when the acceptance rate collapses.
struct CriticalSampler {
  const ProblemSpec& spec;
  const Vec& x;
  double tol;
  CCPair base;
  std::vector<Mat> theta_images, zeta_images;  // in the Z eigenbasis
  Mat null_basis;
  int stage = 0;

  CriticalSampler(const ProblemSpec& s, const Vec& px, double ptol)
      : spec(s), x(px), tol(ptol),
        base(make_ccpair(eval_theta(s, px), eval_zeta(s, px),
                         std::max(ptol, feasibility_residual(s, px) + ptol))) {
    theta_images = basis_images(spec.theta, x, spec.n, base.spec.P);
    zeta_images = basis_images(spec.zeta, x, spec.n, base.spec.P);
    rebuild();
  }

  void rebuild() {
    std::vector<Vec> rows;
    const Spectral& sp = base.spec;
    const int m = spec.m;
    auto block_rows = [&](const std::vector<Mat>& images, const Range& a, const Range& b) {
      for (int i = 0; i < a.size; ++i)
        for (int j = 0; j < b.size; ++j) {
          const int gi = a.start + i, gj = b.start + j;
          if (gi > gj) continue;  // symmetric
          Vec row(m);
          for (int t = 0; t < m; ++t) row[t] = images[t](gi, gj);
          rows.push_back(row);
        }
    };
    const Range al = sp.alpha_range(), be = sp.beta_range(), ga = sp.gamma_range();
    block_rows(zeta_images, al, al);
    block_rows(zeta_images, al, be);
    block_rows(theta_images, be, ga);
    block_rows(theta_images, ga, ga);
    // slope coupling on alpha x gamma: (1 - sigma) F~ - sigma G~ = 0
    {
      std::vector<double> val(sp.n());
      for (int k = 0; k < sp.r(); ++k)
        for (int i = 0; i < sp.clusters[k].size; ++i)
          val[sp.clusters[k].start + i] = sp.mu[k];
      for (int i = 0; i < al.size; ++i)
        for (int j = 0; j < ga.size; ++j) {
          const int gi = al.start + i, gj = ga.start + j;
          const double sg = val[gi] / (val[gi] - val[gj]);
          Vec row(m);
          for (int t = 0; t < m; ++t)
            row[t] = (1.0 - sg) * theta_images[t](gi, gj) - sg * zeta_images[t](gi, gj);
          rows.push_back(row);
        }
    }
    if (stage >= 2) {  // force the zero-block pair of the direction to vanish
      block_rows(theta_images, be, be);
      block_rows(zeta_images, be, be);
    }

    const Vec hv = eval_h(spec, x);
    for (const auto& view : factor_views(spec)) {
      if (view.f.type == ConeFactor::Zero) {
        for (int e = 0; e < view.f.entries(); ++e)
          rows.push_back(spec.h[view.offset + e].grad(x));
      } else if (view.f.type == ConeFactor::Psd && stage >= 1) {
        const Spectral sa = eig_sym(factor_matrix(view.f, hv, view.offset));
        const Range nb = sa.beta_range();
        if (nb.empty()) continue;
        const Mat e = sa.P.middleCols(nb.start, nb.size);
        const auto idx = sym_entry_index(view.f.dim);
        for (int i = 0; i < nb.size; ++i)
          for (int j = i; j < nb.size; ++j) {
            Vec row = Vec::Zero(spec.m);
            for (int t = 0; t < spec.m; ++t) {
              Mat mt = Mat::Zero(view.f.dim, view.f.dim);
              for (int ent = 0; ent < view.f.entries(); ++ent) {
                const double gr = spec.h[view.offset + ent].grad(x)[t];
                mt(idx[ent].first, idx[ent].second) = gr;
                mt(idx[ent].second, idx[ent].first) = gr;
              }
              row[t] = (e.transpose() * mt * e)(i, j);
            }
            rows.push_back(row);
          }
      } else if (view.f.type == ConeFactor::Orthant && stage >= 1) {
        const Vec a = hv.segment(view.offset, view.f.dim);
        for (int i = 0; i < view.f.dim; ++i)
          if (std::abs(a[i]) <= tol) rows.push_back(spec.h[view.offset + i].grad(x));
      }
    }

    Mat l = Mat::Zero(static_cast<Eigen::Index>(rows.size()), spec.m);
    for (size_t i = 0; i < rows.size(); ++i) l.row(static_cast<Eigen::Index>(i)) = rows[i];
    if (rows.empty()) {
      null_basis = Mat::Identity(spec.m, spec.m);
      return;
    }
    Eigen::JacobiSVD<Mat> svd(l, Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-12 * std::max(1.0, smax)) ++rank;
    null_basis = svd.matrixV().rightCols(spec.m - rank);
  }

  // Draws a unit critical direction; returns false when the cone appears to
  // contain no sampleable direction.
  bool draw(std::mt19937_64& rng, Vec* out) {
    if (null_basis.cols() == 0) return false;
    std::normal_distribution<double> nd;
    for (int attempt = 0; attempt < 400; ++attempt) {
      Vec z(null_basis.cols());
      for (int i = 0; i < z.size(); ++i) z[i] = nd(rng);
      Vec d = null_basis * z;
      const double nn = d.norm();
      if (nn < 1e-12) continue;
      d /= nn;
      for (const Vec& cand : {d, Vec(-d)}) {
        if (critical_cone_test(spec, x, cand, tol).residual <= 10.0 * tol) {
          *out = cand;
          return true;
        }
      }
      if (attempt == 199 && stage < 2) {
        ++stage;
        rebuild();
        if (null_basis.cols() == 0) return false;
      }
    }
    return false;
  }
};

}  // namespace

SoncAggregate sonc_check(const ProblemSpec& spec, const Vec& x,
                         const MultiplierPair& mult, const SamplerConfig& cfg) {
  SoncAggregate agg;
  agg.warnings.push_back("constraint qualification assumed, not verified");
  const StationarityReport st =
      stationarity_residual(spec, x, mult, Flavor::Clarke, cfg.tol);
  if (st.residual > 100.0 * cfg.tol)
    throw std::invalid_argument(
        "sonc_check: supplied multipliers fail stationarity (residual " +
        std::to_string(st.residual) + "); see stationarity_residual");

  CriticalSampler sampler(spec, x, cfg.tol);
  std::mt19937_64 rng(cfg.seed);
  double min_margin = std::numeric_limits<double>::infinity();
  Vec worst;
  int evaluated = 0, vacuous = 0;
  for (int i = 0; i < cfg.samples; ++i) {
    Vec d;
    if (!sampler.draw(rng, &d)) break;
    const ConditionReport rep = sonc_margin(spec, x, mult, d, cfg.tol);
    ++evaluated;
    if (rep.vacuous) {
      ++vacuous;
      continue;
    }
    if (rep.margin < min_margin) {
      min_margin = rep.margin;
      worst = d;
    }
  }
  agg.evaluated = evaluated;
  agg.vacuous = vacuous;
  if (evaluated == 0)
    agg.warnings.push_back("no critical directions sampled; cone may be trivial");
  agg.min_margin = std::isfinite(min_margin) ? min_margin : 0.0;
  agg.worst_d = worst;
  agg.violated = std::isfinite(min_margin) && min_margin < -agg.margin_tol;
  return agg;
}

SoscAggregate sosc_check(const ProblemSpec& spec, const Vec& x,
                         const std::vector<MultiplierPair>& mults,
                         const SamplerConfig& cfg, SoscVariant variant) {
  if (mults.empty())
    throw std::invalid_argument("sosc_check: empty multiplier set; supply candidates "
                                "(see stationarity_residual / fit_multipliers)");
  SoscAggregate agg;
  agg.variant = variant;
  agg.warnings.push_back("sampled lower-confidence check, not a proof");

  CriticalSampler sampler(spec, x, cfg.tol);
  std::mt19937_64 rng(cfg.seed);
  double inf_sup = std::numeric_limits<double>::infinity();
  Vec worst;
  for (int i = 0; i < cfg.samples; ++i) {
    Vec d;
    if (!sampler.draw(rng, &d)) break;
    double sup = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& mult : mults) {
      const ConditionReport rep = condition_report(spec, x, mult, d, cfg.tol, variant);
      if (rep.vacuous) continue;
      sup = std::max(sup, rep.margin);
      any = true;
    }
    ++agg.evaluated;
    if (any && sup < inf_sup) {
      inf_sup = sup;
      worst = d;
    }
  }
  if (agg.evaluated == 0)
    agg.warnings.push_back("no critical directions sampled; cone may be trivial");
  agg.estimate = std::isfinite(inf_sup) ? inf_sup : 0.0;
  agg.worst_d = worst;
  agg.positive = std::isfinite(inf_sup) && inf_sup > 0.0;
  return agg;
}

MultiplierPair fit_multipliers(const ProblemSpec& spec, const Vec& x) {
  spec.validate();
  const int nh = spec.h_entries();
  const int ns = spec.n * (spec.n + 1) / 2;
  const int cols = nh + 2 * ns;
  Mat a(spec.m, cols);
  const auto views = factor_views(spec);
  int col = 0;
  for (const auto& view : views) {
    const auto idx = view.f.type == ConeFactor::Psd ? sym_entry_index(view.f.dim)
                                                    : std::vector<std::pair<int, int>>{};
    for (int e = 0; e < view.f.entries(); ++e) {
      const double w = view.f.type == ConeFactor::Psd ? entry_weight(idx[e]) : 1.0;
      a.col(col++) = w * spec.h[view.offset + e].grad(x);
    }
  }
  const auto idx = sym_entry_index(spec.n);
  for (int e = 0; e < ns; ++e) a.col(col++) = entry_weight(idx[e]) * spec.theta[e].grad(x);
  for (int e = 0; e < ns; ++e) a.col(col++) = entry_weight(idx[e]) * spec.zeta[e].grad(x);

  const Vec u = Eigen::CompleteOrthogonalDecomposition<Mat>(a).solve(-spec.phi.grad(x));
  MultiplierPair mult;
  mult.xi = u.head(nh);
  mult.gamma1 = sym_from_entries(u.segment(nh, ns), spec.n);
  mult.gamma2 = sym_from_entries(u.tail(ns), spec.n);
  return mult;
}

}  // namespace sdcc
