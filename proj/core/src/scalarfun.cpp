#include "sdcc/scalarfun.hpp"

#include <cmath>
#include <cstdlib>

namespace sdcc {

namespace {

// test hook for the install check's mutation run; read per call so tests can
// toggle it in-process
bool fault_inject_g2sign() {
  const char* v = std::getenv("SDCC_FAULT_INJECT");
  return v != nullptr && std::string(v) == "g2sign";
}

}  // namespace

double max_dir1(double mu, double eta) {
  if (mu > 0.0) return eta;
  if (mu < 0.0) return 0.0;
  return std::max(0.0, eta);
}

double max_dir2(double z, double d, double w) {
  if (z > 0.0 || (z == 0.0 && d > 0.0)) return w;
  if (z < 0.0 || (z == 0.0 && d < 0.0)) return 0.0;
  return std::max(0.0, w);
}

const ScalarFun& max_fun() {
  static const ScalarFun f{
      "max",
      [](double t) { return std::max(0.0, t); },
      max_dir1,
      max_dir2,
  };
  return f;
}

const ScalarFun& min_fun() {
  // min(0,t) = t - max(0,t)
  static const ScalarFun f{
      "min",
      [](double t) { return std::min(0.0, t); },
      [](double mu, double eta) { return eta - max_dir1(mu, eta); },
      [](double z, double d, double w) { return w - max_dir2(z, d, w); },
  };
  return f;
}

const ScalarFun& abs_fun() {
  static const ScalarFun f{
      "abs",
      [](double t) { return std::abs(t); },
      [](double mu, double eta) {
        if (mu > 0.0) return eta;
        if (mu < 0.0) return -eta;
        return std::abs(eta);
      },
      [](double z, double d, double w) {
        if (z > 0.0 || (z == 0.0 && d > 0.0)) return w;
        if (z < 0.0 || (z == 0.0 && d < 0.0)) return -w;
        return std::abs(w);
      },
  };
  return f;
}

const ScalarFun& square_fun() {
  static const ScalarFun f{
      "square",
      [](double t) { return t * t; },
      [](double mu, double eta) { return 2.0 * mu * eta; },
      [](double z, double d, double w) { return 2.0 * d * d + 2.0 * z * w; },
  };
  return f;
}

const ScalarFun& identity_fun() {
  static const ScalarFun f{
      "identity",
      [](double t) { return t; },
      [](double, double eta) { return eta; },
      [](double, double, double w) { return w; },
  };
  return f;
}

DividedTables::DividedTables(const Spectral& spec, const ScalarFun& f) {
  const int r = spec.r();
  mu_ = spec.mu;
  fval_.resize(r);
  for (int k = 0; k < r; ++k) fval_[k] = f.eval(mu_[k]);
  g1_ = Mat::Zero(r, r);
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l)
      if (k != l) g1_(k, l) = (fval_[k] - fval_[l]) / (mu_[k] - mu_[l]);
}

double DividedTables::g2(int k, int j, int l) const {
  if (k == l) {
    if (j == k) return 0.0;
    const double d = mu_[j] - mu_[k];
    return (fval_[j] - fval_[k]) / (d * d);
  }
  if (j == k) return -g1_(k, l) / (mu_[k] - mu_[l]);
  if (j == l) return g1_(k, l) / (mu_[k] - mu_[l]);
  return (g1_(k, j) - g1_(k, l)) / (mu_[j] - mu_[l]);
}

Mat g1_table_max(const Spectral& spec) {
  return DividedTables(spec, max_fun()).g1_table();
}

double g2_max(double mu_k, double mu_j, double mu_l) {
  const auto f = [](double t) { return std::max(0.0, t); };
  if (mu_k == mu_l) {
    if (mu_j == mu_k) return 0.0;
    const double d = mu_j - mu_k;
    return (f(mu_j) - f(mu_k)) / (d * d);
  }
  double a = mu_k, b = mu_l;  // a > b after ordering; g2 is symmetric in (k,l)
  if (a < b) std::swap(a, b);
  const double gap = a - b;

  if (a > 0.0 && b >= 0.0) {
    if (mu_j == a) return -1.0 / gap;
    if (mu_j == b) return 1.0 / gap;
    if (mu_j >= 0.0) return 0.0;
    return mu_j / ((a - mu_j) * (mu_j - b));
  }
  if (a == 0.0) {  // b < 0
    return (mu_j > 0.0) ? 1.0 / (mu_j - b) : 0.0;
  }
  if (a < 0.0) {  // both negative
    return (mu_j >= 0.0) ? mu_j / ((mu_j - a) * (mu_j - b)) : 0.0;
  }
  // a > 0 > b
  if (mu_j == a) return -a / (gap * gap);
  if (mu_j == b) return a / (gap * gap);
  double v = (mu_j >= 0.0) ? -b / (gap * (mu_j - b)) : a / ((a - mu_j) * gap);
  if (fault_inject_g2sign()) v = -v;  // test hook, see selftest
  return v;
}

}  // namespace sdcc
