#pragma once
#include <functional>
#include <optional>

#include "qflab/rational.hpp"

// Small exact linear algebra over Z and Q for lattice work.  Dimensions here are
// tiny (n <= 10); clarity and exactness over asymptotics throughout.

namespace qflab {

using ZVec = std::vector<Int>;
using ZMat = std::vector<ZVec>;  // row-major
using QVec = std::vector<Rat>;
using QMat = std::vector<QVec>;

ZMat zmat(int r, int c);
QMat qmat(int r, int c);
ZMat z_identity(int n);
ZMat z_transpose(const ZMat& a);
ZMat z_mul(const ZMat& a, const ZMat& b);
ZVec z_mul_vec(const ZMat& a, const ZVec& v);
Int z_dot(const ZVec& a, const ZVec& b);
bool z_is_zero(const ZVec& v);
QMat to_qmat(const ZMat& a);
QMat q_mul(const QMat& a, const QMat& b);
QVec q_mul_vec(const QMat& a, const QVec& v);
QMat q_transpose(const QMat& a);

// divide by gcd of entries; canonical sign: first nonzero entry positive
void make_primitive(ZVec& v);

// canonical row Hermite normal form: staircase, positive pivots, entries above a
// pivot reduced into [0, pivot); zero rows dropped
ZMat hnf_rows(ZMat a);

// primitive basis (HNF rows) of {x in Z^c : a x = 0}
ZMat kernel_basis(const ZMat& a);

// some integer solution of a x = b, if one exists
std::optional<ZVec> solve_int(const ZMat& a, const ZVec& b);

// extend the d rows of `basis` (primitive, independent) to a unimodular n x n
// matrix whose first d rows span the same lattice; throws if not primitive
ZMat complete_unimodular(const ZMat& basis, int n);

Rat det_q(QMat a);
int rank_q(QMat a);
QMat inverse_q(QMat a);  // throws std::domain_error if singular

// LLL reduction given only the (positive definite, exact) Gram matrix.
// Returns unimodular U; the reduced Gram is U g U^T.
ZMat lll_gram(const QMat& g, const Rat& delta = Rat(99, 100));

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All c != 0 with c^T g c <= bound, one representative per +-pair, via
// Fincke-Pohst on the LLL-reduced Gram.  Float interval bounds are widened and
// every candidate passes an exact rational test, so no vector is missed.
// `emit` receives c in the original coordinates with canonical sign.
// node_cap bounds the number of tree nodes visited; throws CapExceeded.
void enumerate_gram(const QMat& g, const Rat& bound, long long node_cap,
                    const std::function<void(const ZVec&)>& emit);

// convenience: all vectors as above, sorted by (norm, lex)
std::vector<ZVec> short_vectors(const QMat& g, const Rat& bound, long long node_cap);

}  // namespace qflab
