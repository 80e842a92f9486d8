#include "qflab/wedge.hpp"

namespace qflab {

ZVec wedge2(const ZVec& v1, const ZVec& v2) {
  if (v1.size() != 4 || v2.size() != 4) throw std::invalid_argument("wedge2: need 4-vectors");
  ZVec w(6);
  for (int a = 0; a < 6; ++a) {
    int i = kWedgePairs[a][0], j = kWedgePairs[a][1];
    w[a] = v1[i] * v2[j] - v1[j] * v2[i];
  }
  return w;
}

QVec wedge2_q(const QVec& v1, const QVec& v2) {
  QVec w(6);
  for (int a = 0; a < 6; ++a) {
    int i = kWedgePairs[a][0], j = kWedgePairs[a][1];
    w[a] = v1[i] * v2[j] - v1[j] * v2[i];
  }
  return w;
}

Int plucker(const ZVec& w) { return w[0] * w[5] - w[1] * w[4] + w[2] * w[3]; }

ZMat wedge_pairing_gram() {
  ZMat a = zmat(6, 6);
  a[0][5] = 1;
  a[5][0] = 1;
  a[1][4] = -1;
  a[4][1] = -1;
  a[2][3] = 1;
  a[3][2] = 1;
  return a;
}

QMat lambda2_matrix(const QMat& m) {
  QMat out = qmat(6, 6);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      int i = kWedgePairs[a][0], j = kWedgePairs[a][1];
      int k = kWedgePairs[b][0], l = kWedgePairs[b][1];
      out[a][b] = m[i][k] * m[j][l] - m[i][l] * m[j][k];
    }
  return out;
}

Eigen::Matrix<double, 6, 6> lambda2_matrix_d(const Eigen::Matrix4d& m) {
  Eigen::Matrix<double, 6, 6> out;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      int i = kWedgePairs[a][0], j = kWedgePairs[a][1];
      int k = kWedgePairs[b][0], l = kWedgePairs[b][1];
      out(a, b) = m(i, k) * m(j, l) - m(i, l) * m(j, k);
    }
  return out;
}

namespace {

// congruence onto diag(1,1,-1,-1): Q(x) = D(q x)
Eigen::Matrix4d congruence_to_diag(const Eigen::Matrix4d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
  Eigen::Vector4d ev = es.eigenvalues();  // ascending: two negative, two positive
  Eigen::Matrix4d v = es.eigenvectors();
  Eigen::Matrix4d q;
  int order[4] = {2, 3, 0, 1};  // positives first
  for (int r = 0; r < 4; ++r) {
    int c = order[r];
    q.row(r) = std::sqrt(std::abs(ev(c))) * v.col(c).transpose();
  }
  return q;
}

}  // namespace

InvariantSplit invariant_split(const SymmetricForm& q) {
  if (q.n != 4) throw std::invalid_argument("invariant_split: n = 4 required");
  Signature sig = signature_of(q);
  if (sig.positive != 2 || sig.negative != 2)
    throw std::invalid_argument("invariant_split: signature (2,2) required");

  InvariantSplit s;
  Eigen::Matrix4d mf = q.M;
  Eigen::Matrix<double, 6, 6> af = Eigen::Matrix<double, 6, 6>::Zero();
  ZMat az = wedge_pairing_gram();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) af(i, j) = static_cast<double>(az[i][j].get_si());

  if (q.all_rational()) {
    QMat g6 = lambda2_matrix(q.rational_matrix());
    QMat a6 = to_qmat(az);
    QMat jj = q_mul(inverse_q(g6), a6);
    s.J = jj;
    s.exact = true;
    s.c = 0;
    // J^2 = c I
    QMat j2 = q_mul(jj, jj);
    s.c = j2[0][0];
    for (int i = 0; i < 6; ++i)
      for (int k = 0; k < 6; ++k)
        if (!(j2[i][k] == (i == k ? s.c : Rat(0))))
          throw std::logic_error("invariant_split: J^2 not scalar");
    for (int i = 0; i < 6; ++i)
      for (int k = 0; k < 6; ++k) s.Jf(i, k) = to_double(jj[i][k]);
  } else {
    Eigen::Matrix<double, 6, 6> g6 = lambda2_matrix_d(mf);
    s.Jf = g6.inverse() * af;
    Eigen::Matrix<double, 6, 6> j2 = s.Jf * s.Jf;
    s.c = 0;
    double c = j2.trace() / 6;
    if ((j2 - c * Eigen::Matrix<double, 6, 6>::Identity()).norm() > 1e-8 * std::abs(c) * 6)
      throw std::logic_error("invariant_split: J^2 not scalar");
  }
  double cval = s.exact ? to_double(s.c) : (s.Jf * s.Jf).trace() / 6;
  if (!(cval > 0)) throw std::logic_error("invariant_split: J^2 scalar not positive");
  s.sqrt_c = std::sqrt(cval);

  Eigen::Matrix<double, 6, 6> id = Eigen::Matrix<double, 6, 6>::Identity();
  Eigen::Matrix<double, 6, 6> pi_plus = (id + s.Jf / s.sqrt_c) / 2;
  Eigen::Matrix<double, 6, 6> pi_minus = (id - s.Jf / s.sqrt_c) / 2;

  // transport the B4 ordering: g = q_Q^{-1} q_B is a form isometry B4 -> Q;
  // Lambda^2 g carries the B4 first kind onto a J_Q eigenspace, with the
  // eigenvalue sign flipped when det g < 0
  Eigen::Matrix4d mb4 = Eigen::Matrix4d::Zero();
  mb4(0, 3) = mb4(3, 0) = 0.5;
  mb4(1, 2) = mb4(2, 1) = -0.5;
  Eigen::Matrix4d qb = congruence_to_diag(mb4);
  Eigen::Matrix4d qq = congruence_to_diag(mf);
  Eigen::Matrix4d g = qq.inverse() * qb;
  double detg = g.determinant();
  // V1(B4): e1^e2, e1^e4 - e2^e3, e3^e4 in lex coordinates
  Eigen::Matrix<double, 6, 3> vb;
  vb.setZero();
  vb(0, 0) = 1;
  vb(2, 1) = 1;
  vb(3, 1) = -1;
  vb(5, 2) = 1;
  Eigen::Matrix<double, 6, 3> u = lambda2_matrix_d(g) * vb;
  double score_plus = (pi_plus * u).norm();
  double score_minus = (pi_minus * u).norm();
  int dominant = score_plus > score_minus ? 1 : -1;
  int expected = detg > 0 ? 1 : -1;
  double ratio = std::max(score_plus, score_minus) / std::max(std::min(score_plus, score_minus), 1e-300);
  if (dominant != expected || ratio < 1e6)
    throw std::logic_error("invariant_split: ordering transport inconsistent");
  s.first_sign = dominant;
  s.pi1 = s.first_sign > 0 ? pi_plus : pi_minus;
  s.pi2 = s.first_sign > 0 ? pi_minus : pi_plus;

  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 6, 6>> qr1(s.pi1), qr2(s.pi2);
  Eigen::Matrix<double, 6, 6> q1 = qr1.householderQ(), q2 = qr2.householderQ();
  // column pivoting keeps the leading 3 columns spanning the range
  s.v1_basis = q1.leftCols(3).transpose();
  s.v2_basis = q2.leftCols(3).transpose();
  return s;
}

Eigen::Matrix4d mat22_action(const Eigen::Matrix2d& g1, const Eigen::Matrix2d& g2) {
  Eigen::Matrix2d inv2 = g2.inverse();
  Eigen::Matrix4d out;
  for (int j = 0; j < 4; ++j) {
    Eigen::Matrix2d e = Eigen::Matrix2d::Zero();
    e(j / 2, j % 2) = 1;
    Eigen::Matrix2d im = g1 * e * inv2;
    out(0, j) = im(0, 0);
    out(1, j) = im(0, 1);
    out(2, j) = im(1, 0);
    out(3, j) = im(1, 1);
  }
  return out;
}

Eigen::Matrix3d sym2_action(const Eigen::Matrix2d& g) {
  Eigen::Matrix3d out;
  for (int j = 0; j < 3; ++j) {
    Eigen::Matrix2d e = Eigen::Matrix2d::Zero();
    if (j == 0)
      e(0, 0) = 1;
    else if (j == 1)
      e(0, 1) = e(1, 0) = 1;
    else
      e(1, 1) = 1;
    Eigen::Matrix2d im = g * e * g.transpose();
    out(0, j) = im(0, 0);
    out(1, j) = im(0, 1);
    out(2, j) = im(1, 1);
  }
  return out;
}

Eigen::Matrix2d rot2(double theta) {
  Eigen::Matrix2d m;
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return m;
}

Eigen::Matrix4d at_matrix_22(double t) { return mat22_action(diag_bt(t), diag_bt(t)); }

Eigen::Matrix4d k_matrix_22(double theta, double phi) {
  return mat22_action(rot2(theta), rot2(phi));
}

Eigen::Matrix3d at_matrix_21(double t) { return sym2_action(diag_bt(t)); }

Eigen::Matrix3d k_matrix_21(double theta) { return sym2_action(rot2(theta)); }

}  // namespace qflab
