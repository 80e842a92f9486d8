#pragma once

#include "qflab/regions.hpp"
#include "qflab/threadpool.hpp"
#include "qflab/wedge.hpp"

namespace qflab {

struct RationalSubspace {
  int ambient = 4;
  ZMat basis;  // d x n, rows integral, jointly primitive
  ZVec wedge;  // Plucker vector for d=2, n=4
};

enum class NullClass { NullFirstType, NullSecondType, NotNull };

// Exact for rational Q (restriction identically zero tested in Rat arithmetic;
// type from the J-eigenvalue sign), floating otherwise.
NullClass null_criterion(const SymmetricForm& q, const RationalSubspace& l);

struct QuasinullInfo {
  bool quasi = false;
  double pi1_norm = 0, pi2_norm = 0;
  int dominant = 0;  // 1 or 2: which projection carries most of the norm
};
QuasinullInfo quasinull_test(const SymmetricForm& q, const RationalSubspace& l, double mu1);
QuasinullInfo quasinull_test(const InvariantSplit& split, const ZVec& wedge, double mu1);

// B4 first-kind planes with standard basis (m,0,n,0),(0,m,0,n), primitive
// (m,n) up to sign, T/2 <= m^2+n^2 <= T.  Sorted by (m^2+n^2, m, n).
std::vector<RationalSubspace> enumerate_null_first_type(double T);
// second-kind analogue: basis (m,n,0,0),(0,0,m,n)
std::vector<RationalSubspace> enumerate_null_second_type(double T);

// primitive decomposable 6-vectors w, T/2 <= ||w|| <= T, passing the
// quasinull product test; canonical Hermite bases, sorted.  Throws
// CapExceeded beyond the configured search cap.
std::vector<RationalSubspace> enumerate_quasinull(const SymmetricForm& q, double mu1, double T,
                                                  long long node_cap = 50'000'000);

// reconstruct the plane {x : x ^ w = 0} from a decomposable wedge
RationalSubspace plane_from_wedge(const ZVec& w);
// canonical form: Hermite basis + recomputed wedge with canonical sign
RationalSubspace canonicalize(const RationalSubspace& l);

struct ExceptionalWitness {
  ExceptionalAffine affine;   // basis, annihilator, integral shift
  ZVec wedge;                 // Plucker vector (dim-2 case) or the null vector itself
  double residual = 0;        // max distance of <annihilator row, xi> to Z; 0 in exact mode
  int type = 0;               // 1/2 for (2,2) planes, 0 for (2,1) lines
};

// Null subspaces L with ||v^L|| <= T_search such that xi lies in L + Z^n,
// decided through integrality of the annihilator pairings.  Signature (2,2)
// searches planes of both kinds (exact enumeration for rational split forms,
// decomposable-vector search otherwise); (2,1) searches the null lines.
// float_tol governs the floating-mode residual test.
std::vector<ExceptionalWitness> exceptional_subspaces(const InhomForm& f, double t_search,
                                                      double float_tol = 1e-8);

// (2,1) machinery: primitive null vectors (m^2, mn, n^2) of the determinant
// form with Euclidean norm <= T, (m,n) primitive up to sign
std::vector<ZVec> null_vectors_21(double T);
// distance of n^2 xi1 - 2mn xi2 + m^2 xi3 to the nearest integer
double fractional_pairing_21(const std::vector<Scalar>& xi, long long m, long long n);
Rat fractional_pairing_21_exact(const QVec& xi, long long m, long long n);

}  // namespace qflab
