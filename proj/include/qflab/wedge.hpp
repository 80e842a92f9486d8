#pragma once

#include <Eigen/Dense>

#include "qflab/forms.hpp"
#include "qflab/intmat.hpp"

// Exterior-square machinery for signature (2,2) forms and the group
// conventions used by the orbit experiments.  Lambda^2 R^4 carries the fixed
// lexicographic basis e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4.

namespace qflab {

// index pairs of the lex basis
inline constexpr int kWedgePairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

ZVec wedge2(const ZVec& v1, const ZVec& v2);
QVec wedge2_q(const QVec& v1, const QVec& v2);

// Plucker quadratic w1 w6 - w2 w5 + w3 w4
Int plucker(const ZVec& w);

// Gram matrix of the wedge pairing v ^ w against e1^e2^e3^e4
ZMat wedge_pairing_gram();

// induced map on Lambda^2: rows/cols in the lex basis; works both for the
// Gram matrix of an induced form and for Lambda^2 of a linear map
QMat lambda2_matrix(const QMat& m);
Eigen::Matrix<double, 6, 6> lambda2_matrix_d(const Eigen::Matrix4d& m);

// the split Lambda^2 R^4 = V1 + V2 into eigenspaces of J = G6^{-1} A
struct InvariantSplit {
  bool exact = false;     // J and c exact (rational Q)
  QMat J;                 // exact J when rational
  Eigen::Matrix<double, 6, 6> Jf;
  double sqrt_c = 0;      // J^2 = c I
  Rat c;                  // exact c for rational Q
  int first_sign = 0;     // J-eigenvalue sign (+1/-1 times sqrt_c) of the first kind
  Eigen::Matrix<double, 6, 6> pi1, pi2;  // projectors onto first/second kind
  Eigen::Matrix<double, 3, 6> v1_basis, v2_basis;  // orthonormal rows
};

// Requires signature (2,2).  Ordering: for Q = B4 the factor containing
// e1^e2 is first; general forms inherit the ordering through an
// orientation-tracked congruence onto the diagonal model.
InvariantSplit invariant_split(const SymmetricForm& q);

// ----- group conventions -----

// R^4 = M2(R) with x = (V11, V12, V21, V22); action v -> g1 v g2^{-1}
Eigen::Matrix4d mat22_action(const Eigen::Matrix2d& g1, const Eigen::Matrix2d& g2);
// R^3 = Sym2 with x = (V11, V12, V22); action v -> g v g^T
Eigen::Matrix3d sym2_action(const Eigen::Matrix2d& g);

Eigen::Matrix2d rot2(double theta);
inline Eigen::Matrix2d diag_bt(double t) {
  Eigen::Matrix2d m;
  m << std::exp(-t / 2), 0, 0, std::exp(t / 2);
  return m;
}

// a_t = (b_t, b_t) acting on R^4; fixes V11, V22, scales V12 by e^{-t}, V21 by e^t
Eigen::Matrix4d at_matrix_22(double t);
// k = (rot(theta), rot(phi))
Eigen::Matrix4d k_matrix_22(double theta, double phi);
// (2,1): a_t = diag(e^{-t/2}, e^{t/2}) acting on Sym2, k = rot(theta)
Eigen::Matrix3d at_matrix_21(double t);
Eigen::Matrix3d k_matrix_21(double theta);

}  // namespace qflab
