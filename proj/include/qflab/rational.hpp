#pragma once
#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace qflab {

using Int = mpz_class;
using Rat = mpq_class;

// exact conversion; every finite double is a dyadic rational
Rat rat_of_double(double x);
double to_double(const Rat& q);

// accepts "p", "-p", "p/q"; anything else (or q == 0) throws std::invalid_argument
Rat parse_rat(const std::string& s);
std::string rat_string(const Rat& q);

Int floor_int(const Rat& q);
Int ceil_int(const Rat& q);
Int round_int(const Rat& q);  // nearest, half away from zero
Rat abs_rat(const Rat& q);
Rat dist_to_int(const Rat& q);  // in [0, 1/2]

struct Approx {
  Int p, q;
};

// Convergents of the continued fraction of x with denominator <= qmax, plus the
// deepest admissible semiconvergent.  The minimizer of |x - p/q| over q <= qmax
// is always in this list: best approximations of the first kind form a chain of
// convergents and semiconvergents with strictly decreasing error, so only the
// truncation level needs its semiconvergent.
std::vector<Approx> best_approx_candidates(const Rat& x, const Int& qmax);

// min over 1 <= q <= qmax of |x - round(q x)/q|
Rat best_approx_error(const Rat& x, const Int& qmax);

}  // namespace qflab
