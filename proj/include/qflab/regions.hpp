#pragma once
#include "qflab/forms.hpp"
#include "qflab/threadpool.hpp"

namespace qflab {

enum class RegionKind { Ball, Ellipsoid, MaxSplit, Table };

// Star-shaped region Omega = {v : ||v|| < nu(v/||v||)}; membership in the
// dilate T*Omega is strict.  Ball(r): ||x|| < T r.  Ellipsoid(A): x^T A x < T^2
// with A positive definite.  MaxSplit(B1,B2), n = 4: max(B1(x1,x2),B2(x3,x4))
// < T^2.  Table: nu given on sample directions, inverse-distance interpolated
// (float only).
struct StarRegion {
  RegionKind kind = RegionKind::Ball;
  int n = 0;
  Scalar radius{1};                       // Ball
  std::vector<Scalar> A;                  // Ellipsoid: n*n; MaxSplit: two 2x2 blocks (8 entries)
  std::vector<std::vector<double>> dirs;  // Table: unit directions
  std::vector<double> vals;               // Table: nu at dirs

  static StarRegion ball(int n, const Scalar& r);
  static StarRegion ellipsoid(const SymmetricForm& a);
  static StarRegion max_split(const SymmetricForm& b1, const SymmetricForm& b2);
  static StarRegion table(int n, std::vector<std::vector<double>> dirs, std::vector<double> vals);

  // sup of nu over the sphere (upper bound is enough for bounding boxes)
  double nu_max() const;
  bool contains(const double* x, double T) const;
  // exact membership; requires exact_capable() and rational T
  bool contains_exact(const QVec& x, const Rat& T) const;
  bool exact_capable() const;
  // |distance-to-boundary indicator| within tol (used for boundary flagging)
  bool near_boundary(const double* x, double T, double tol) const;
};

struct ExceptionalAffine {
  ZMat basis;        // d x n primitive HNF basis of the null subspace L
  ZMat annihilator;  // (n-d) x n integral basis of {w : <w, L> = 0}
  ZVec v_xi;         // integral shift: xi in L + v_xi
};

struct CountResult {
  long long n_total = 0;
  long long n_tilde = 0;
  std::vector<long long> excluded;  // per exceptional subspace, first match wins
  long long boundary_flags = 0;     // points within 1e-9 relative of a strict boundary
  bool exact = false;               // counted in exact arithmetic
  double a = 0, b = 0, T = 0;
};

// N_{Q,xi,Omega}(a,b,T): integer points x in T*Omega with a < Q(x+xi) < b.
// Preconditions: n >= 3, a < b, T > 0, Q nondegenerate indefinite.
// Chooses exact integer arithmetic when form, shift, region, and window are all
// rational; otherwise doubles with boundary flagging.  In both paths candidate
// ranges come from a conservative interval solve and every candidate is tested
// with the same predicate the brute-force oracle uses.
CountResult count_n(const InhomForm& f, const StarRegion& omega, const Scalar& a, const Scalar& b,
                    const Scalar& T, const Pool& pool = Pool::serial());

// same, with points on the listed exceptional affine subspaces (x + v_xi in L,
// an exact integer test) excluded from n_tilde and tallied per subspace
CountResult count_n_tilde(const InhomForm& f, const StarRegion& omega, const Scalar& a,
                          const Scalar& b, const Scalar& T,
                          const std::vector<ExceptionalAffine>& exc,
                          const Pool& pool = Pool::serial());

}  // namespace qflab
