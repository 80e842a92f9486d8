#pragma once
#include <Eigen/Dense>
#include <optional>

#include "qflab/intmat.hpp"

namespace qflab {

enum class Mode { Exact, Float };

// Exact-mode scalar: either a rational number, or an opaque real (a known
// irrational constant such as sqrt 2 - 1) carried as a double whose tag records
// that it is NOT rational.  Classification logic looks only at tags; two opaque
// reals are treated as incommensurable even if their doubles happen to agree.
struct Scalar {
  Rat q;
  double d = 0.0;
  bool rational = true;

  Scalar() : q(0) {}
  Scalar(const Rat& v) : q(v), d(to_double(v)) {}
  Scalar(int v) : q(v), d(v) {}
  static Scalar irrational(double v) {
    Scalar s;
    s.rational = false;
    s.d = v;
    return s;
  }
  double value() const { return d; }
};

Scalar operator+(const Scalar& a, const Scalar& b);
Scalar operator-(const Scalar& a, const Scalar& b);
Scalar operator*(const Scalar& a, const Scalar& b);
Scalar operator-(const Scalar& a);

struct Signature {
  int positive = 0;
  int negative = 0;
};

struct DegenerateForm : std::domain_error {
  using std::domain_error::domain_error;
};

// symmetric n x n matrix of the quadratic form Q(x) = x^T M x
struct SymmetricForm {
  int n = 0;
  Mode mode = Mode::Exact;
  std::vector<Scalar> e;  // n*n row-major, kept symmetric
  Eigen::MatrixXd M;      // double image, kept in sync

  const Scalar& at(int i, int j) const { return e[i * n + j]; }
  void set(int i, int j, const Scalar& v);
  bool all_rational() const;  // every entry tagged rational (Exact mode only)
  QMat rational_matrix() const;

  static SymmetricForm zero(int n, Mode mode);
  static SymmetricForm from_rational(const QMat& m);
  static SymmetricForm from_double(const Eigen::MatrixXd& m);  // Float mode
};

struct InhomForm {
  SymmetricForm Q;
  std::vector<Scalar> xi;
};

// canonical evaluation order: sum_i M_ii u_i^2 + 2 sum_{i<j} M_ij u_i u_j.
// Both the counting kernel and the brute-force oracle call this for the final
// in-window decision, so their float predicates agree bit for bit.
double evaluate(const SymmetricForm& q, const double* x);
double evaluate_shifted(const InhomForm& f, const double* x);
Rat evaluate_exact(const SymmetricForm& q, const QVec& x);

// exact signature via symmetric congruence pivoting (no eigensolve) in Exact
// mode; eigenvalue signs with threshold 1e-10 * |M| in Float mode.
// Throws DegenerateForm when the form is singular.
Signature signature_of(const SymmetricForm& q);

Rat det_exact(const SymmetricForm& q);  // all-rational forms only

// scale so |det| = 1; stays exact when the needed root is rational, otherwise
// the entries become opaque reals
SymmetricForm normalize_discriminant(const SymmetricForm& q);

enum class RationalityClass {
  RationalForm,                     // matrix rational (up to scalar) and xi rational
  IrrationalHomogeneous,            // matrix carries an irrational entry
  RationalHomogeneousIrrationalShift,
};

struct Rationality {
  RationalityClass cls;
  // for rational homogeneous parts: 1/max|coefficient|, so witness * Q has
  // all-rational entries and largest coefficient 1
  std::optional<Rat> witness;
};

// Exact mode only (throws std::invalid_argument in Float mode: double entries
// carry no rationality information).  Tags are authoritative: an opaque real is
// irrational by fiat.
Rationality classify_rationality(const InhomForm& f);

// standard forms
SymmetricForm b4_form();                      // x1 x4 - x2 x3
SymmetricForm standard_21_form();             // x1 x3 - x2^2
SymmetricForm standard_pq_form(int p, int q); // 2 x1 xn + sum - sum, p >= 3

// x^T M y in doubles
double bilinear(const SymmetricForm& q, const double* x, const double* y);

}  // namespace qflab
