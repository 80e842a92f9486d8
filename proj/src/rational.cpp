#include "qflab/rational.hpp"

#include <cctype>
#include <cmath>

namespace qflab {

Rat rat_of_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rat_of_double: non-finite value");
  Rat q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

double to_double(const Rat& q) { return q.get_d(); }

Rat parse_rat(const std::string& s) {
  size_t i = 0, n = s.size();
  auto digits = [&](size_t j) {
    size_t k = j;
    while (k < n && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
    return k;
  };
  if (i < n && (s[i] == '+' || s[i] == '-')) ++i;
  size_t e = digits(i);
  if (e == i) throw std::invalid_argument("parse_rat: bad rational '" + s + "'");
  i = e;
  if (i < n) {
    if (s[i] != '/') throw std::invalid_argument("parse_rat: bad rational '" + s + "'");
    e = digits(i + 1);
    if (e == i + 1 || e != n) throw std::invalid_argument("parse_rat: bad rational '" + s + "'");
  }
  Rat q;
  if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0 || q.get_den() == 0)
    throw std::invalid_argument("parse_rat: bad rational '" + s + "'");
  q.canonicalize();
  return q;
}

std::string rat_string(const Rat& q) { return q.get_str(); }

Int floor_int(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Int ceil_int(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Int round_int(const Rat& q) {
  Rat f = q - Rat(floor_int(q));
  Int base = floor_int(q);
  if (f * 2 >= 1) base += 1;
  // half away from zero only matters at f == 1/2 for negative q; fdiv-based floor
  // plus the rule above rounds -3/2 to -1, so nudge exact halves of negatives down
  if (f * 2 == 1 && q < 0) base -= 1;
  return base;
}

Rat abs_rat(const Rat& q) { return q < 0 ? Rat(-q) : q; }

Rat dist_to_int(const Rat& q) {
  Rat f = q - Rat(floor_int(q));
  Rat g = 1 - f;
  return f < g ? f : g;
}

std::vector<Approx> best_approx_candidates(const Rat& x, const Int& qmax) {
  if (qmax < 1) throw std::invalid_argument("best_approx_candidates: qmax < 1");
  std::vector<Approx> out;
  Int pm1 = 1, qm1 = 0;  // index -1 convergent
  Rat rem = x;
  Int a = floor_int(rem);
  Int p0 = a, q0 = 1;
  out.push_back({p0, q0});
  rem -= Rat(a);
  while (rem != 0) {
    rem = 1 / rem;
    a = floor_int(rem);
    rem -= Rat(a);
    Int p1 = a * p0 + pm1, q1 = a * q0 + qm1;
    if (q1 <= qmax) {
      out.push_back({p1, q1});
      pm1 = p0;
      qm1 = q0;
      p0 = p1;
      q0 = q1;
    } else {
      Int t = (qmax - qm1) / q0;
      if (t >= 1) out.push_back({pm1 + t * p0, qm1 + t * q0});
      break;
    }
  }
  return out;
}

Rat best_approx_error(const Rat& x, const Int& qmax) {
  Rat best = -1;
  for (const auto& c : best_approx_candidates(x, qmax)) {
    Rat err = abs_rat(x - Rat(c.p) / Rat(c.q));
    if (best < 0 || err < best) best = err;
  }
  return best;
}

}  // namespace qflab
