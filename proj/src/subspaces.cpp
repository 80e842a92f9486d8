#include "qflab/subspaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

namespace qflab {

namespace {

int pair_index(int i, int j) {
  for (int a = 0; a < 6; ++a)
    if (kWedgePairs[a][0] == i && kWedgePairs[a][1] == j) return a;
  throw std::logic_error("pair_index");
}

std::string zkey(const ZVec& v) {
  std::string s;
  for (const Int& x : v) {
    s += x.get_str();
    s += ',';
  }
  return s;
}

Int norm2_z(const ZVec& v) {
  Int s = 0;
  for (const Int& x : v) s += x * x;
  return s;
}

std::optional<Rat> rat_sqrt(Rat c) {
  c.canonicalize();
  if (c < 0) return std::nullopt;
  const mpz_class num = c.get_num(), den = c.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  return Rat(rn, rd);
}

QVec to_qvec(const ZVec& v) {
  QVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = Rat(v[i]);
  return out;
}

// restriction Gram B M B^T of an all-rational form
QMat restriction_gram(const SymmetricForm& q, const ZMat& basis) {
  QMat b = to_qmat(basis);
  return q_mul(q_mul(b, q.rational_matrix()), q_transpose(b));
}

double restriction_norm_f(const SymmetricForm& q, const ZMat& basis) {
  int d = static_cast<int>(basis.size());
  double worst = 0;
  std::vector<double> bi(q.n), bj(q.n);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < q.n; ++k) bi[k] = basis[i][k].get_d();
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < q.n; ++k) bj[k] = basis[j][k].get_d();
      worst = std::max(worst, std::abs(bilinear(q, bi.data(), bj.data())));
    }
  }
  return worst;
}

double basis_scale(const ZMat& basis) {
  double s = 1;
  for (const ZVec& r : basis)
    for (const Int& x : r) s = std::max(s, std::abs(x.get_d()));
  return s;
}

Eigen::Matrix<double, 6, 1> wedge_d(const ZVec& w) {
  Eigen::Matrix<double, 6, 1> v;
  for (int i = 0; i < 6; ++i) v(i) = w[i].get_d();
  return v;
}

// exact rational of each double entry of the symmetrized product pi^T pi
QMat exact_sym_product(const Eigen::Matrix<double, 6, 6>& pi) {
  Eigen::Matrix<double, 6, 6> s = pi.transpose() * pi;
  QMat r = qmat(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r[i][j] = Rat((s(i, j) + s(j, i)) / 2);
  return r;
}

ZVec row_combination(const ZMat& rows, const ZVec& c) {
  int n = static_cast<int>(rows[0].size());
  ZVec w(n, Int(0));
  for (size_t i = 0; i < rows.size(); ++i)
    for (int k = 0; k < n; ++k) w[k] += c[i] * rows[i][k];
  return w;
}

// integer vectors with ||w|| <= t and ||pi w|| <= eps, via the stretched
// positive form ||w||^2 + s ||pi w||^2; superset, callers filter
void slab_vectors(const Eigen::Matrix<double, 6, 6>& pi, double t, double eps, long long node_cap,
                  const std::function<void(const ZVec&)>& emit) {
  double s = std::min(t * t / (eps * eps), 1e13);
  QMat g = exact_sym_product(pi);
  Rat sr(std::max(1.0, std::floor(s)));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      g[i][j] *= sr;
      if (i == j) g[i][j] += 1;
    }
  Rat bound = Rat(1.03) * (Rat(t) * Rat(t) + sr * Rat(eps) * Rat(eps));
  enumerate_gram(g, bound, node_cap, emit);
}

struct PairingCheck {
  bool integral = false;
  double resid = 0;  // distance to Z (float path)
  Int value;         // the integer value when integral
};

// <w, xi> modulo Z.  Exact mode: opaque irrationals are incommensurable by
// fiat, so integrality forces their coefficients to vanish.  Float mode:
// residual against the nearest integer.
PairingCheck pairing_integrality(const ZVec& w, const std::vector<Scalar>& xi, Mode mode,
                                 double tol) {
  PairingCheck out;
  if (mode == Mode::Exact) {
    Rat racc(0);
    bool clean = true;
    for (size_t i = 0; i < w.size(); ++i) {
      if (xi[i].rational)
        racc += Rat(w[i]) * xi[i].q;
      else if (w[i] != 0)
        clean = false;
    }
    racc.canonicalize();
    out.integral = clean && racc.get_den() == 1;
    if (out.integral) out.value = racc.get_num();
    if (!out.integral) {
      double v = 0;
      for (size_t i = 0; i < w.size(); ++i) v += w[i].get_d() * xi[i].d;
      out.resid = std::abs(v - std::round(v));
    }
    return out;
  }
  double v = 0;
  for (size_t i = 0; i < w.size(); ++i) v += w[i].get_d() * xi[i].d;
  out.resid = std::abs(v - std::round(v));
  out.integral = out.resid <= tol;
  if (out.integral) out.value = Int(std::round(v));
  return out;
}

}  // namespace

NullClass null_criterion(const SymmetricForm& q, const RationalSubspace& l) {
  if (q.n != 4 || l.basis.size() != 2 || l.ambient != 4)
    throw std::invalid_argument("null_criterion: need a plane in dimension 4");
  InvariantSplit split = invariant_split(q);
  ZVec w = l.wedge.size() == 6 ? l.wedge : wedge2(l.basis[0], l.basis[1]);

  if (q.all_rational()) {
    QMat r = restriction_gram(q, l.basis);
    for (const QVec& row : r)
      for (const Rat& x : row)
        if (x != 0) return NullClass::NotNull;
    if (!split.exact) throw std::logic_error("null_criterion: split not exact");
    QVec jw = q_mul_vec(split.J, to_qvec(w));
    int k = 0;
    while (w[k] == 0) ++k;
    Rat t = jw[k] / Rat(w[k]);
    for (int i = 0; i < 6; ++i)
      if (!(jw[i] == t * Rat(w[i]))) throw std::logic_error("null_criterion: wedge not eigen");
    int sgn = t > 0 ? 1 : -1;
    return sgn == split.first_sign ? NullClass::NullFirstType : NullClass::NullSecondType;
  }

  double scale = q.M.norm() * basis_scale(l.basis) * basis_scale(l.basis);
  if (restriction_norm_f(q, l.basis) > 1e-9 * std::max(scale, 1.0)) return NullClass::NotNull;
  Eigen::Matrix<double, 6, 1> wd = wedge_d(w);
  double p1 = (split.pi1 * wd).norm(), p2 = (split.pi2 * wd).norm();
  return p1 >= p2 ? NullClass::NullFirstType : NullClass::NullSecondType;
}

QuasinullInfo quasinull_test(const InvariantSplit& split, const ZVec& wedge, double mu1) {
  Eigen::Matrix<double, 6, 1> wd = wedge_d(wedge);
  QuasinullInfo out;
  out.pi1_norm = (split.pi1 * wd).norm();
  out.pi2_norm = (split.pi2 * wd).norm();
  out.quasi = out.pi1_norm * out.pi2_norm < mu1;
  out.dominant = out.pi1_norm >= out.pi2_norm ? 1 : 2;
  return out;
}

QuasinullInfo quasinull_test(const SymmetricForm& q, const RationalSubspace& l, double mu1) {
  ZVec w = l.wedge.size() == 6 ? l.wedge : wedge2(l.basis[0], l.basis[1]);
  return quasinull_test(invariant_split(q), w, mu1);
}

namespace {

struct MnKey {
  long long s, m, n;
  bool operator<(const MnKey& o) const {
    if (s != o.s) return s < o.s;
    if (m != o.m) return m < o.m;
    return n < o.n;
  }
};

std::vector<std::pair<long long, long long>> primitive_pairs_shell(double lo, double hi) {
  std::vector<std::pair<long long, long long>> out;
  long long mmax = static_cast<long long>(std::floor(std::sqrt(std::max(hi, 0.0)))) + 1;
  std::vector<MnKey> keys;
  for (long long m = 0; m <= mmax; ++m)
    for (long long n = -mmax; n <= mmax; ++n) {
      if (m == 0 && n <= 0) continue;  // canonical rep: m > 0, or m == 0, n > 0
      if (std::gcd(m, n) != 1) continue;
      double s = static_cast<double>(m * m + n * n);
      if (s < lo || s > hi) continue;
      keys.push_back({m * m + n * n, m, n});
    }
  std::sort(keys.begin(), keys.end());
  for (const MnKey& k : keys) out.emplace_back(k.m, k.n);
  return out;
}

RationalSubspace mn_plane(long long m, long long n, bool first_kind) {
  RationalSubspace l;
  l.ambient = 4;
  ZVec v1(4, Int(0)), v2(4, Int(0));
  long lm = static_cast<long>(m), ln = static_cast<long>(n);
  if (first_kind) {
    v1[0] = lm;
    v1[2] = ln;
    v2[1] = lm;
    v2[3] = ln;
  } else {
    v1[0] = lm;
    v1[1] = ln;
    v2[2] = lm;
    v2[3] = ln;
  }
  l.basis = {v1, v2};
  l.wedge = wedge2(v1, v2);
  return l;
}

}  // namespace

std::vector<RationalSubspace> enumerate_null_first_type(double T) {
  std::vector<RationalSubspace> out;
  for (auto [m, n] : primitive_pairs_shell(T / 2, T)) out.push_back(mn_plane(m, n, true));
  return out;
}

std::vector<RationalSubspace> enumerate_null_second_type(double T) {
  std::vector<RationalSubspace> out;
  for (auto [m, n] : primitive_pairs_shell(T / 2, T)) out.push_back(mn_plane(m, n, false));
  return out;
}

RationalSubspace plane_from_wedge(const ZVec& w) {
  if (w.size() != 6) throw std::invalid_argument("plane_from_wedge: need 6 coordinates");
  ZMat c = zmat(4, 4);
  int t = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int d = b + 1; d < 4; ++d) {
        c[t][a] = w[pair_index(b, d)];
        c[t][b] = -w[pair_index(a, d)];
        c[t][d] = w[pair_index(a, b)];
        ++t;
      }
  ZMat basis = kernel_basis(c);
  if (basis.size() != 2) throw std::invalid_argument("plane_from_wedge: not decomposable");
  RationalSubspace l;
  l.ambient = 4;
  l.basis = basis;
  l.wedge = wedge2(basis[0], basis[1]);
  make_primitive(l.wedge);
  return l;
}

RationalSubspace canonicalize(const RationalSubspace& l) {
  RationalSubspace out;
  out.ambient = l.ambient;
  out.basis = hnf_rows(l.basis);
  if (out.basis.size() == 2 && l.ambient == 4) {
    out.wedge = wedge2(out.basis[0], out.basis[1]);
    make_primitive(out.wedge);
  }
  return out;
}

std::vector<RationalSubspace> enumerate_quasinull(const SymmetricForm& q, double mu1, double T,
                                                  long long node_cap) {
  if (!(T >= 2) || !(mu1 > 0)) throw std::invalid_argument("enumerate_quasinull: bad window");
  InvariantSplit split = invariant_split(q);
  // product < mu1 with ||w|| >= T/2 forces one projection below 4 mu1 / T
  double eps = 6 * std::max(mu1, 1e-6) / T;
  std::set<std::string> seen;
  std::vector<std::pair<Int, RationalSubspace>> found;
  for (int kind = 0; kind < 2; ++kind) {
    const auto& pi = kind == 0 ? split.pi1 : split.pi2;
    slab_vectors(pi, T * 1.01, eps, node_cap, [&](const ZVec& c0) {
      ZVec w = c0;
      make_primitive(w);
      if (plucker(w) != 0) return;
      Int nn = norm2_z(w);
      double nd = nn.get_d();
      if (4 * nd < T * T || nd > T * T) return;
      if (!quasinull_test(split, w, mu1).quasi) return;
      if (!seen.insert(zkey(w)).second) return;
      RationalSubspace l = canonicalize(plane_from_wedge(w));
      found.emplace_back(nn, l);
    });
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return zkey(a.second.wedge) < zkey(b.second.wedge);
  });
  std::vector<RationalSubspace> out;
  for (auto& [nn, l] : found) out.push_back(std::move(l));
  return out;
}

namespace {

// exact null planes of an all-rational (2,2) form with ||wedge|| <= t
std::vector<ZVec> rational_null_wedges(const InvariantSplit& split, double t) {
  std::vector<ZVec> out;
  auto sc = rat_sqrt(split.c);
  if (!sc) return out;  // no rational null plane can exist
  for (int kind = 0; kind < 2; ++kind) {
    // V_kind over Z = integer kernel of the complementary projector
    int sgn = kind == 0 ? split.first_sign : -split.first_sign;
    QMat proj = qmat(6, 6);  // I - sgn J / sqrt_c, kernel is the sgn eigenspace
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        Rat v = -Rat(sgn) * split.J[i][j] / *sc;
        if (i == j) v += 1;
        proj[i][j] = v;
      }
    Int den = 1;
    for (const QVec& row : proj)
      for (const Rat& x : row) {
        Rat y = x;
        y.canonicalize();
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), y.get_den().get_mpz_t());
      }
    ZMat pz = zmat(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        Rat y = proj[i][j] * Rat(den);
        y.canonicalize();
        pz[i][j] = y.get_num();
      }
    ZMat k = kernel_basis(pz);
    if (k.empty()) continue;
    QMat g = qmat(static_cast<int>(k.size()), static_cast<int>(k.size()));
    for (size_t i = 0; i < k.size(); ++i)
      for (size_t j = 0; j < k.size(); ++j) g[i][j] = Rat(z_dot(k[i], k[j]));
    Rat bound = Rat(t) * Rat(t);
    std::set<std::string> seen;
    enumerate_gram(g, bound, 10'000'000, [&](const ZVec& c) {
      ZVec w = row_combination(k, c);
      make_primitive(w);
      if (plucker(w) != 0) return;
      if (Rat(norm2_z(w)) > bound) return;
      if (seen.insert(zkey(w)).second) out.push_back(w);
    });
  }
  return out;
}

}  // namespace

std::vector<ExceptionalWitness> exceptional_subspaces(const InhomForm& f, double t_search,
                                                      double float_tol) {
  const SymmetricForm& q = f.Q;
  Signature sig = signature_of(q);
  std::vector<ExceptionalWitness> out;

  if (q.n == 4 && sig.positive == 2 && sig.negative == 2) {
    InvariantSplit split = invariant_split(q);
    std::vector<ZVec> wedges;
    std::set<std::string> seen;
    if (q.all_rational()) {
      for (ZVec& w : rational_null_wedges(split, t_search))
        if (seen.insert(zkey(w)).second) wedges.push_back(std::move(w));
    } else {
      double eps = float_tol * std::max(t_search, 1.0);
      for (int kind = 0; kind < 2; ++kind) {
        const auto& pi = kind == 0 ? split.pi1 : split.pi2;
        slab_vectors(pi, t_search, eps, 10'000'000, [&](const ZVec& c0) {
          ZVec w = c0;
          make_primitive(w);
          if (plucker(w) != 0) return;
          if (norm2_z(w).get_d() > t_search * t_search) return;
          if (seen.insert(zkey(w)).second) wedges.push_back(w);
        });
      }
    }
    for (const ZVec& w : wedges) {
      RationalSubspace l = canonicalize(plane_from_wedge(w));
      if (q.all_rational()) {
        if (null_criterion(q, l) == NullClass::NotNull) continue;
      } else if (restriction_norm_f(q, l.basis) >
                 float_tol * std::max(1.0, q.M.norm()) * basis_scale(l.basis) * basis_scale(l.basis))
        continue;
      ZMat ann = kernel_basis(l.basis);
      bool ok = true;
      double resid = 0;
      ZVec rhs;
      for (const ZVec& row : ann) {
        PairingCheck pc = pairing_integrality(row, f.xi, q.mode, float_tol);
        resid = std::max(resid, pc.resid);
        if (!pc.integral) {
          ok = false;
          break;
        }
        rhs.push_back(pc.value);
      }
      if (!ok) continue;
      auto v = solve_int(ann, rhs);
      if (!v) throw std::logic_error("exceptional_subspaces: annihilator not surjective");
      ExceptionalWitness wit;
      wit.affine.basis = l.basis;
      wit.affine.annihilator = ann;
      wit.affine.v_xi = *v;
      wit.wedge = l.wedge;
      wit.residual = resid;
      Eigen::Matrix<double, 6, 1> wd = wedge_d(l.wedge);
      wit.type = (split.pi1 * wd).norm() >= (split.pi2 * wd).norm() ? 1 : 2;
      out.push_back(std::move(wit));
    }
  } else if (q.n == 3 && ((sig.positive == 2 && sig.negative == 1) ||
                          (sig.positive == 1 && sig.negative == 2))) {
    QMat id = qmat(3, 3);
    for (int i = 0; i < 3; ++i) id[i][i] = 1;
    std::vector<ZVec> lines =
        short_vectors(id, Rat(t_search) * Rat(t_search), 50'000'000);
    for (const ZVec& v : lines) {
      ZVec vp = v;
      make_primitive(vp);
      if (zkey(vp) != zkey(v)) continue;  // primitive representatives only
      if (q.all_rational()) {
        if (evaluate_exact(q, to_qvec(v)) != 0) continue;
      } else {
        double xd[3] = {v[0].get_d(), v[1].get_d(), v[2].get_d()};
        double qv = evaluate(q, xd);
        if (std::abs(qv) > float_tol * std::max(1.0, q.M.norm()) * norm2_z(v).get_d()) continue;
      }
      ZMat basis = {v};
      ZMat ann = kernel_basis(basis);
      bool ok = true;
      double resid = 0;
      ZVec rhs;
      for (const ZVec& row : ann) {
        PairingCheck pc = pairing_integrality(row, f.xi, q.mode, float_tol);
        resid = std::max(resid, pc.resid);
        if (!pc.integral) {
          ok = false;
          break;
        }
        rhs.push_back(pc.value);
      }
      if (!ok) continue;
      auto sol = solve_int(ann, rhs);
      if (!sol) throw std::logic_error("exceptional_subspaces: annihilator not surjective");
      ExceptionalWitness wit;
      wit.affine.basis = hnf_rows(basis);
      wit.affine.annihilator = ann;
      wit.affine.v_xi = *sol;
      wit.wedge = v;
      wit.residual = resid;
      wit.type = 0;
      out.push_back(std::move(wit));
    }
  } else {
    throw std::invalid_argument("exceptional_subspaces: signature (2,2) or (2,1) required");
  }

  std::sort(out.begin(), out.end(), [](const ExceptionalWitness& a, const ExceptionalWitness& b) {
    Int na = norm2_z(a.wedge), nb = norm2_z(b.wedge);
    if (na != nb) return na < nb;
    return zkey(a.wedge) < zkey(b.wedge);
  });
  return out;
}

std::vector<ZVec> null_vectors_21(double T) {
  std::vector<std::pair<MnKey, ZVec>> keyed;
  long long mmax = static_cast<long long>(std::floor(std::sqrt(std::max(T, 0.0)))) + 1;
  for (long long m = 0; m <= mmax; ++m)
    for (long long n = -mmax; n <= mmax; ++n) {
      if (m == 0 && n <= 0) continue;
      if (std::gcd(m, n) != 1) continue;
      double nrm2 = static_cast<double>(m * m * m * m + m * m * n * n + n * n * n * n);
      if (nrm2 > T * T) continue;
      ZVec v(3);
      v[0] = static_cast<long>(m * m);
      v[1] = static_cast<long>(m * n);
      v[2] = static_cast<long>(n * n);
      keyed.push_back({{m * m * m * m + m * m * n * n + n * n * n * n, m, n}, v});
    }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ZVec> out;
  for (auto& [k, v] : keyed) out.push_back(std::move(v));
  return out;
}

double fractional_pairing_21(const std::vector<Scalar>& xi, long long m, long long n) {
  double v = static_cast<double>(n) * n * xi[0].d - 2.0 * m * n * xi[1].d +
             static_cast<double>(m) * m * xi[2].d;
  return std::abs(v - std::round(v));
}

Rat fractional_pairing_21_exact(const QVec& xi, long long m, long long n) {
  Rat mm(static_cast<long>(m)), nn(static_cast<long>(n));
  Rat v = nn * nn * xi[0] - Rat(2) * mm * nn * xi[1] + mm * mm * xi[2];
  return dist_to_int(v);
}

}  // namespace qflab
