#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace sdcc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Contiguous index range [start, start+size) into an eigenvalue ordering.
struct Range {
  int start = 0;
  int size = 0;
  bool empty() const { return size == 0; }
};

inline Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

inline double sym_defect(const Mat& a) {
  return (a - a.transpose()).norm();
}

/// Enforces the symmetric-storage invariant: defect must stay below
/// 1e-12 * max(1, ||A||_F); returns the canonically symmetrized matrix.
inline Mat require_symmetric(const Mat& a, const std::string& what) {
  if (a.rows() != a.cols())
    throw std::invalid_argument(what + ": matrix is not square");
  const double tol = 1e-12 * std::max(1.0, a.norm());
  if (sym_defect(a) > tol)
    throw std::invalid_argument(what + ": symmetry defect " +
                                std::to_string(sym_defect(a)) +
                                " exceeds tolerance");
  return symmetrize(a);
}

inline void require_same_size(const Mat& a, const Mat& b, const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(what + ": dimension mismatch");
}

inline double frob_inner(const Mat& a, const Mat& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace sdcc
