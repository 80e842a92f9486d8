#include "qflab/forms.hpp"

#include <cmath>

namespace qflab {

Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.rational && b.rational) return Scalar(Rat(a.q + b.q));
  return Scalar::irrational(a.d + b.d);
}
Scalar operator-(const Scalar& a, const Scalar& b) {
  if (a.rational && b.rational) return Scalar(Rat(a.q - b.q));
  return Scalar::irrational(a.d - b.d);
}
Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.rational && b.rational) return Scalar(Rat(a.q * b.q));
  if (a.rational && a.q == 0) return Scalar(0);
  if (b.rational && b.q == 0) return Scalar(0);
  return Scalar::irrational(a.d * b.d);
}
Scalar operator-(const Scalar& a) {
  if (a.rational) return Scalar(Rat(-a.q));
  return Scalar::irrational(-a.d);
}

void SymmetricForm::set(int i, int j, const Scalar& v) {
  e[i * n + j] = v;
  e[j * n + i] = v;
  M(i, j) = v.value();
  M(j, i) = v.value();
}

bool SymmetricForm::all_rational() const {
  if (mode != Mode::Exact) return false;
  for (const auto& s : e)
    if (!s.rational) return false;
  return true;
}

QMat SymmetricForm::rational_matrix() const {
  if (!all_rational()) throw std::invalid_argument("rational_matrix: form has irrational entries");
  QMat m = qmat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = at(i, j).q;
  return m;
}

SymmetricForm SymmetricForm::zero(int n, Mode mode) {
  SymmetricForm f;
  f.n = n;
  f.mode = mode;
  f.e.assign(n * n, Scalar(0));
  f.M = Eigen::MatrixXd::Zero(n, n);
  return f;
}

SymmetricForm SymmetricForm::from_rational(const QMat& m) {
  int n = m.size();
  SymmetricForm f = zero(n, Mode::Exact);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (m[i][j] != m[j][i]) throw std::invalid_argument("from_rational: matrix not symmetric");
      f.set(i, j, Scalar(m[i][j]));
    }
  return f;
}

SymmetricForm SymmetricForm::from_double(const Eigen::MatrixXd& m) {
  int n = m.rows();
  SymmetricForm f = zero(n, Mode::Float);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (m(i, j) != m(j, i)) throw std::invalid_argument("from_double: matrix not symmetric");
      f.e[i * n + j] = Scalar::irrational(m(i, j));
    }
  f.M = m;
  return f;
}

double evaluate(const SymmetricForm& q, const double* x) {
  double s = 0.0;
  for (int i = 0; i < q.n; ++i) s += q.M(i, i) * x[i] * x[i];
  for (int i = 0; i < q.n; ++i)
    for (int j = i + 1; j < q.n; ++j) s += 2.0 * q.M(i, j) * x[i] * x[j];
  return s;
}

double evaluate_shifted(const InhomForm& f, const double* x) {
  double u[16];
  for (int i = 0; i < f.Q.n; ++i) u[i] = x[i] + f.xi[i].value();
  return evaluate(f.Q, u);
}

Rat evaluate_exact(const SymmetricForm& q, const QVec& x) {
  QMat m = q.rational_matrix();
  Rat s = 0;
  for (int i = 0; i < q.n; ++i) s += m[i][i] * x[i] * x[i];
  for (int i = 0; i < q.n; ++i)
    for (int j = i + 1; j < q.n; ++j) s += 2 * m[i][j] * x[i] * x[j];
  return s;
}

namespace {

// inertia by congruence: diagonal pivot when available, else a 2x2 block
// [[0,a],[a,0]] contributing (+1,-1); runs on any symmetric rational matrix
Signature rational_inertia(QMat a) {
  int n = a.size();
  std::vector<int> live(n);
  for (int i = 0; i < n; ++i) live[i] = i;
  Signature sig;
  while (!live.empty()) {
    int m = live.size();
    int piv = -1;
    for (int i = 0; i < m; ++i)
      if (a[live[i]][live[i]] != 0) {
        piv = i;
        break;
      }
    if (piv >= 0) {
      int p = live[piv];
      Rat d = a[p][p];
      if (d > 0)
        ++sig.positive;
      else
        ++sig.negative;
      std::vector<int> rest;
      for (int i : live)
        if (i != p) rest.push_back(i);
      for (int i : rest)
        for (int j : rest) a[i][j] -= a[i][p] * a[p][j] / d;
      live = rest;
      continue;
    }
    // all diagonal entries zero on the live block
    int bi = -1, bj = -1;
    for (int i = 0; i < m && bi < 0; ++i)
      for (int j = i + 1; j < m; ++j)
        if (a[live[i]][live[j]] != 0) {
          bi = live[i];
          bj = live[j];
          break;
        }
    if (bi < 0) break;  // block is identically zero: degenerate directions remain
    Rat c = a[bi][bj];
    ++sig.positive;
    ++sig.negative;
    std::vector<int> rest;
    for (int i : live)
      if (i != bi && i != bj) rest.push_back(i);
    for (int i : rest)
      for (int j : rest) a[i][j] -= (a[i][bi] * a[bj][j] + a[i][bj] * a[bi][j]) / c;
    live = rest;
  }
  return sig;
}

}  // namespace

Signature signature_of(const SymmetricForm& q) {
  if (q.mode == Mode::Exact && q.all_rational()) {
    Signature s = rational_inertia(q.rational_matrix());
    if (s.positive + s.negative < q.n) throw DegenerateForm("signature_of: degenerate form");
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.M);
  double scale = q.M.cwiseAbs().maxCoeff();
  double tol = 1e-10 * std::max(scale, 1.0);
  Signature s;
  for (int i = 0; i < q.n; ++i) {
    double ev = es.eigenvalues()(i);
    if (ev > tol)
      ++s.positive;
    else if (ev < -tol)
      ++s.negative;
  }
  if (s.positive + s.negative < q.n) throw DegenerateForm("signature_of: degenerate form");
  return s;
}

Rat det_exact(const SymmetricForm& q) { return det_q(q.rational_matrix()); }

namespace {

// rational n-th root of |r|, if it exists
std::optional<Rat> rational_root(const Rat& r, int n) {
  Rat a = abs_rat(r);
  Int num = a.get_num(), den = a.get_den();
  Int rn, rd;
  if (mpz_root(rn.get_mpz_t(), num.get_mpz_t(), n) == 0) return std::nullopt;
  if (mpz_root(rd.get_mpz_t(), den.get_mpz_t(), n) == 0) return std::nullopt;
  return Rat(rn) / Rat(rd);
}

}  // namespace

SymmetricForm normalize_discriminant(const SymmetricForm& q) {
  if (q.mode == Mode::Exact && q.all_rational()) {
    Rat d = det_exact(q);
    if (d == 0) throw DegenerateForm("normalize_discriminant: degenerate form");
    // want c with c^n |det| = 1, i.e. c = |det|^{-1/n}
    auto root = rational_root(1 / abs_rat(d), q.n);
    SymmetricForm out = q;
    if (root) {
      Scalar c(*root);
      for (int i = 0; i < q.n; ++i)
        for (int j = i; j < q.n; ++j) out.set(i, j, c * q.at(i, j));
    } else {
      double c = std::pow(1.0 / std::abs(to_double(d)), 1.0 / q.n);
      for (int i = 0; i < q.n; ++i)
        for (int j = i; j < q.n; ++j) out.set(i, j, Scalar::irrational(c * q.at(i, j).value()));
    }
    return out;
  }
  double d = q.M.determinant();
  double scale = std::max(q.M.cwiseAbs().maxCoeff(), 1.0);
  if (std::abs(d) < 1e-10 * std::pow(scale, q.n))
    throw DegenerateForm("normalize_discriminant: degenerate form");
  double c = std::pow(1.0 / std::abs(d), 1.0 / q.n);
  SymmetricForm out = q;
  for (int i = 0; i < q.n; ++i)
    for (int j = i; j < q.n; ++j) out.set(i, j, Scalar::irrational(c * q.at(i, j).value()));
  return out;
}

Rationality classify_rationality(const InhomForm& f) {
  const SymmetricForm& q = f.Q;
  if (q.mode != Mode::Exact)
    throw std::invalid_argument(
        "classify_rationality: float mode carries no rationality information");
  bool zero = true;
  for (const auto& s : q.e)
    if (!(s.rational && s.q == 0)) zero = false;
  if (zero) throw std::invalid_argument("classify_rationality: zero form");
  if (!q.all_rational()) return {RationalityClass::IrrationalHomogeneous, std::nullopt};
  // coefficient convention: c_ii = M_ii, c_ij = 2 M_ij for i < j
  Rat maxc = 0;
  for (int i = 0; i < q.n; ++i)
    for (int j = i; j < q.n; ++j) {
      Rat c = abs_rat((i == j ? 1 : 2) * q.at(i, j).q);
      if (c > maxc) maxc = c;
    }
  Rat witness = 1 / maxc;
  for (const auto& s : f.xi)
    if (!s.rational)
      return {RationalityClass::RationalHomogeneousIrrationalShift, witness};
  return {RationalityClass::RationalForm, witness};
}

SymmetricForm b4_form() {
  SymmetricForm f = SymmetricForm::zero(4, Mode::Exact);
  f.set(0, 3, Scalar(Rat(1, 2)));
  f.set(1, 2, Scalar(Rat(-1, 2)));
  return f;
}

SymmetricForm standard_21_form() {
  SymmetricForm f = SymmetricForm::zero(3, Mode::Exact);
  f.set(0, 2, Scalar(Rat(1, 2)));
  f.set(1, 1, Scalar(-1));
  return f;
}

SymmetricForm standard_pq_form(int p, int q) {
  if (p < 3 || q < 1) throw std::invalid_argument("standard_pq_form: requires p >= 3, q >= 1");
  int n = p + q;
  SymmetricForm f = SymmetricForm::zero(n, Mode::Exact);
  f.set(0, n - 1, Scalar(1));
  for (int i = 1; i < p; ++i) f.set(i, i, Scalar(1));
  for (int i = p; i < n - 1; ++i) f.set(i, i, Scalar(-1));
  return f;
}

double bilinear(const SymmetricForm& q, const double* x, const double* y) {
  double s = 0.0;
  for (int i = 0; i < q.n; ++i)
    for (int j = 0; j < q.n; ++j) s += q.M(i, j) * x[i] * y[j];
  return s;
}

}  // namespace qflab
