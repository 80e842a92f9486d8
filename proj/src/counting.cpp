#include <cmath>
#include <cstdint>

#include "qflab/regions.hpp"

// Counting kernel.  One integer unimodular change of variables x = U y makes
// the last diagonal entry of the transformed form nonzero, so for each prefix
// (y_0..y_{n-2}) the window condition is a quadratic in y_{n-1}.  Candidate
// ranges come from a widened float solve of that quadratic; each candidate is
// then accepted or rejected by the path's own exact (or canonical-float)
// predicate, so the widening only costs time, never correctness.

namespace qflab {
namespace {

using i128 = __int128;

i128 i128_of(const Int& v) {
  Int a = v < 0 ? Int(-v) : v;
  Int hi = a >> 64;
  unsigned long long lo64 = mpz_get_ui(Int(a - (hi << 64)).get_mpz_t());
  unsigned long long hi64 = mpz_get_ui(hi.get_mpz_t());
  i128 r = (static_cast<i128>(hi64) << 64) | static_cast<i128>(lo64);
  return v < 0 ? -r : r;
}

bool fits_bits(const Int& v, size_t bits) {
  return mpz_sizeinbase(v.get_mpz_t(), 2) <= bits;
}

// integer transform x = U y with (U^T M U)_{n-1,n-1} != 0; diag_zero decides
// whether a shear is needed (exact test in exact paths, threshold in float)
struct Transform {
  ZMat U, Uinv;
};

Transform make_transform(int n, const std::function<double(int, int)>& m,
                         const std::function<bool(int, int)>& is_zero) {
  int jd = -1;
  double best = -1;
  for (int j = 0; j < n; ++j)
    if (!is_zero(j, j) && std::abs(m(j, j)) > best) {
      best = std::abs(m(j, j));
      jd = j;
    }
  Transform t;
  if (jd >= 0) {
    ZMat p = z_identity(n);
    std::swap(p[jd], p[n - 1]);  // column swap of U == row swap of identity here
    t.U = z_transpose(p);
    t.Uinv = p;
    return t;
  }
  int bi = -1, bj = -1;
  best = -1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!is_zero(i, j) && std::abs(m(i, j)) > best) {
        best = std::abs(m(i, j));
        bi = i;
        bj = j;
      }
  if (bi < 0) throw std::invalid_argument("counting: zero form");
  // shear x_{bj} = z_{bj} + z_{bi} puts 2 M_{bi,bj} on the bi diagonal, then
  // swap bi to the last slot
  ZMat s = z_identity(n);
  s[bj][bi] = 1;  // column convention: x = S z
  ZMat p = z_identity(n);
  std::swap(p[bi], p[n - 1]);
  ZMat pu = z_transpose(p);
  t.U = z_mul(s, pu);
  ZMat sinv = z_identity(n);
  sinv[bj][bi] = -1;
  t.Uinv = z_mul(p, sinv);
  return t;
}

struct MRange {
  long long lo, hi;
};

// integer m with lo_v <= a2 m^2 + a1 m + a0 <= hi_v, widened; clipped to box
void solve_ranges(double a2, double a1, double a0, double lo_v, double hi_v, long long mlo,
                  long long mhi, std::vector<MRange>& out) {
  out.clear();
  if (mlo > mhi) return;
  double mbar = std::max({std::abs(static_cast<double>(mlo)), std::abs(static_cast<double>(mhi)),
                          1.0});
  double scale = std::abs(a0) + std::abs(a1) * mbar + std::abs(a2) * mbar * mbar + 1.0;
  double pad = 1e-6 * mbar + 2.0;
  auto clip_push = [&](double x1, double x2) {
    long long lo = static_cast<long long>(std::ceil(x1 - pad));
    long long hi = static_cast<long long>(std::floor(x2 + pad));
    lo = std::max(lo, mlo);
    hi = std::min(hi, mhi);
    if (lo <= hi) out.push_back({lo, hi});
  };
  if (std::abs(a2) * mbar * mbar <= 1e-12 * scale) {
    if (std::abs(a1) * mbar <= 1e-12 * scale) {
      double mar = 1e-8 * scale;
      if (a0 >= lo_v - mar && a0 <= hi_v + mar) out.push_back({mlo, mhi});
      return;
    }
    double x1 = (lo_v - a0) / a1, x2 = (hi_v - a0) / a1;
    if (x1 > x2) std::swap(x1, x2);
    clip_push(x1, x2);
    return;
  }
  if (a2 < 0) {
    solve_ranges(-a2, -a1, -a0, -hi_v, -lo_v, mlo, mhi, out);
    return;
  }
  // monic: m^2 + b m + c, upper set {<= H}: [r1,r2]; lower set {>= L}: outside (s1,s2)
  double b = a1 / a2;
  double ch = (a0 - hi_v) / a2;
  double cl = (a0 - lo_v) / a2;
  double disc_h = b * b / 4 - ch;
  double fuzz_h = 1e-9 * (b * b / 4 + std::abs(ch) + 1.0);
  if (disc_h + fuzz_h < 0) return;  // genuinely empty
  double rh = std::sqrt(std::max(0.0, disc_h + fuzz_h));
  double r1 = -b / 2 - rh, r2 = -b / 2 + rh;
  double disc_l = b * b / 4 - cl;
  double fuzz_l = 1e-9 * (b * b / 4 + std::abs(cl) + 1.0);
  if (disc_l - fuzz_l <= 0) {
    clip_push(r1, r2);  // lower constraint holds everywhere (up to fuzz)
    return;
  }
  double rl = std::sqrt(std::max(0.0, disc_l - fuzz_l));
  double s1 = -b / 2 - rl, s2 = -b / 2 + rl;
  if (r1 <= s1) clip_push(r1, std::min(r2, s1));
  if (s2 <= r2) clip_push(std::max(r1, s2), r2);
  // merge if padding made them overlap
  if (out.size() == 2 && out[0].hi >= out[1].lo - 1) {
    out[0].hi = std::max(out[0].hi, out[1].hi);
    out.pop_back();
  }
}

struct Partial {
  long long total = 0, tilde = 0, flags = 0;
  std::vector<long long> excluded;
};

struct ExcInt {
  std::vector<std::vector<long long>> ann;  // annihilator rows
  std::vector<long long> vxi;
};

// -1 if x is on none of the exceptional affines, else first matching index
int exceptional_index(const std::vector<ExcInt>& exc, const long long* x, int n) {
  for (size_t e = 0; e < exc.size(); ++e) {
    bool hit = true;
    for (const auto& row : exc[e].ann) {
      long long s = 0;
      for (int i = 0; i < n; ++i) s += row[i] * (x[i] + exc[e].vxi[i]);
      if (s != 0) {
        hit = false;
        break;
      }
    }
    if (hit) return static_cast<int>(e);
  }
  return -1;
}

std::vector<ExcInt> exc_to_int(const std::vector<ExceptionalAffine>& exc, int n) {
  std::vector<ExcInt> out;
  for (const auto& e : exc) {
    ExcInt ei;
    if (static_cast<int>(e.v_xi.size()) != n || e.annihilator.empty())
      throw std::invalid_argument("counting: malformed exceptional subspace");
    for (const auto& row : e.annihilator) {
      std::vector<long long> r(n);
      for (int i = 0; i < n; ++i) r[i] = row[i].get_si();
      ei.ann.push_back(std::move(r));
    }
    ei.vxi.resize(n);
    for (int i = 0; i < n; ++i) ei.vxi[i] = e.v_xi[i].get_si();
    out.push_back(std::move(ei));
  }
  return out;
}

long long checked_chunks(long long width) { return std::min<long long>(width, 256); }

// ---------------------------------------------------------------- float path

CountResult float_kernel(const InhomForm& f, const StarRegion& omega, double a, double b, double T,
                         const std::vector<ExceptionalAffine>& exc, const Pool& pool) {
  int n = f.Q.n;
  double mscale = std::max(f.Q.M.cwiseAbs().maxCoeff(), 1e-300);
  Transform tr = make_transform(
      n, [&](int i, int j) { return f.Q.M(i, j); },
      [&](int i, int j) { return std::abs(f.Q.M(i, j)) <= 1e-12 * mscale; });
  Eigen::MatrixXd u(n, n), uinv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      u(i, j) = static_cast<double>(tr.U[i][j].get_si());
      uinv(i, j) = static_cast<double>(tr.Uinv[i][j].get_si());
    }
  Eigen::MatrixXd mp = u.transpose() * f.Q.M * u;
  Eigen::VectorXd xi(n);
  for (int i = 0; i < n; ++i) xi(i) = f.xi[i].value();
  Eigen::VectorXd xip = uinv * xi;

  double rbox = T * omega.nu_max() * (1 + 1e-9);
  std::vector<long long> box(n);
  for (int k = 0; k < n; ++k) {
    double rs = 0;
    for (int l = 0; l < n; ++l) rs += std::abs(uinv(k, l));
    box[k] = static_cast<long long>(std::floor(rs * rbox)) + 1;
  }

  std::vector<ExcInt> exci = exc_to_int(exc, n);
  long long width0 = 2 * box[0] + 1;
  long long nchunks = checked_chunks(width0);
  std::vector<Partial> parts(nchunks);
  for (auto& p : parts) p.excluded.assign(exc.size(), 0);

  pool.run_chunks(nchunks, [&](int64_t c) {
    Partial& pt = parts[c];
    long long y0_lo = -box[0] + c * width0 / nchunks;
    long long y0_hi = -box[0] + (c + 1) * width0 / nchunks - 1;
    std::vector<long long> y(n, 0);
    std::vector<double> w(n, 0.0);
    double xb[16];
    long long xint[16];
    std::vector<MRange> ranges;
    const double mar = 1e-8 * (std::abs(a) + std::abs(b) + 1.0);

    // odometer over y_0..y_{n-3}; explicit loops for the last two coordinates
    int outer = n - 2;
    std::vector<long long> idx(outer);
    idx[0] = y0_lo;
    for (int k = 1; k < outer; ++k) idx[k] = -box[k];
    if (y0_lo > y0_hi) return;
    for (;;) {
      for (int k = 0; k < outer; ++k) {
        y[k] = idx[k];
        w[k] = static_cast<double>(y[k]) + xip(k);
      }
      double qpre = 0, spre = 0, bpre = 0;
      for (int k = 0; k < outer; ++k) {
        qpre += mp(k, k) * w[k] * w[k];
        for (int l = k + 1; l < outer; ++l) qpre += 2 * mp(k, l) * w[k] * w[l];
        spre += mp(outer, k) * w[k];
        bpre += mp(n - 1, k) * w[k];
      }
      for (long long yin = -box[outer]; yin <= box[outer]; ++yin) {
        y[outer] = yin;
        double win = static_cast<double>(yin) + xip(outer);
        double g0 = qpre + 2 * spre * win + mp(outer, outer) * win * win;
        double g1 = 2 * (bpre + mp(n - 1, outer) * win);
        double g2 = mp(n - 1, n - 1);
        // polynomial in m = y_{n-1}: substitute t = m + xi'_{n-1}
        double t0 = xip(n - 1);
        double c2 = g2;
        double c1 = g1 + 2 * g2 * t0;
        double c0 = g0 + g1 * t0 + g2 * t0 * t0;
        solve_ranges(c2, c1, c0, a - mar, b + mar, -box[n - 1], box[n - 1], ranges);
        for (const auto& r : ranges) {
          for (long long m = r.lo; m <= r.hi; ++m) {
            y[n - 1] = m;
            for (int i = 0; i < n; ++i) {
              long long s = 0;
              for (int j = 0; j < n; ++j) s += tr.U[i][j].get_si() * y[j];
              xint[i] = s;
              xb[i] = static_cast<double>(s);
            }
            double val = evaluate_shifted(f, xb);
            bool in_window = val > a && val < b;
            bool in_region = omega.contains(xb, T);
            double btol = 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
            if (std::abs(val - a) <= btol || std::abs(val - b) <= btol ||
                omega.near_boundary(xb, T, 1e-9))
              ++pt.flags;
            if (!(in_window && in_region)) continue;
            ++pt.total;
            int ei = exceptional_index(exci, xint, n);
            if (ei >= 0)
              ++pt.excluded[ei];
            else
              ++pt.tilde;
          }
        }
      }
      // advance odometer (idx[0] runs only over this chunk's slab)
      int k = outer - 1;
      for (;;) {
        if (k == 0) {
          if (++idx[0] > y0_hi) goto done;
          break;
        }
        if (++idx[k] <= box[k]) break;
        idx[k] = -box[k];
        --k;
      }
    }
  done:;
  });

  CountResult res;
  res.excluded.assign(exc.size(), 0);
  for (const auto& p : parts) {
    res.n_total += p.total;
    res.n_tilde += p.tilde;
    res.boundary_flags += p.flags;
    for (size_t e = 0; e < exc.size(); ++e) res.excluded[e] += p.excluded[e];
  }
  res.exact = false;
  res.a = a;
  res.b = b;
  res.T = T;
  return res;
}

// ---------------------------------------------------------------- exact paths

struct ExactSetup {
  int n;
  Transform tr;
  QMat mp;      // U^T M U
  QVec xip;     // U^{-1} xi
  Int lam;      // lcm of denominators of mp
  Int del;      // lcm of denominators of xip
  ZMat mz;      // lam * mp
  ZVec z;       // del * xip
  Int a_lo, b_hi;  // integer window for the scaled value
  std::vector<long long> box;
  bool window_empty = false;
};

ExactSetup exact_setup(const InhomForm& f, const StarRegion& omega, const Rat& a, const Rat& b,
                       const Rat& T) {
  ExactSetup s;
  int n = f.Q.n;
  s.n = n;
  QMat m = f.Q.rational_matrix();
  s.tr = make_transform(
      n, [&](int i, int j) { return to_double(m[i][j]); },
      [&](int i, int j) { return m[i][j] == 0; });
  s.mp = q_mul(q_mul(to_qmat(z_transpose(s.tr.U)), m), to_qmat(s.tr.U));
  QVec xi(n);
  for (int i = 0; i < n; ++i) xi[i] = f.xi[i].q;
  s.xip = q_mul_vec(to_qmat(s.tr.Uinv), xi);

  s.lam = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mpz_lcm(s.lam.get_mpz_t(), s.lam.get_mpz_t(),
                                        s.mp[i][j].get_den_mpz_t());
  s.del = 1;
  for (int i = 0; i < n; ++i)
    mpz_lcm(s.del.get_mpz_t(), s.del.get_mpz_t(), s.xip[i].get_den_mpz_t());
  s.mz = zmat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Rat v = s.mp[i][j] * Rat(s.lam);
      s.mz[i][j] = v.get_num();  // den == 1 by construction
    }
  s.z.resize(n);
  for (int i = 0; i < n; ++i) s.z[i] = Rat(s.xip[i] * Rat(s.del)).get_num();

  Rat scale = Rat(s.lam) * Rat(s.del) * Rat(s.del);
  Rat as = a * scale, bs = b * scale;
  s.a_lo = floor_int(as) + 1;
  s.b_hi = ceil_int(bs) - 1;
  if (s.a_lo > s.b_hi) s.window_empty = true;

  double rbox = to_double(T) * omega.nu_max() * (1 + 1e-9);
  s.box.resize(n);
  for (int k = 0; k < n; ++k) {
    double rs = 0;
    for (int l = 0; l < n; ++l) rs += std::abs(to_double(Rat(s.tr.Uinv[k][l])));
    s.box[k] = static_cast<long long>(std::floor(rs * rbox)) + 1;
  }
  return s;
}

// scaled-integer region test data; all comparisons are "value <= hi"
struct RegionInt {
  RegionKind kind;
  int n;
  std::vector<i128> A;  // scaled integer coefficients
  i128 hi = 0;          // Ball: scaled squared radius bound; Ellipsoid/MaxSplit: scaled T^2 bound
};

RegionInt region_int(const StarRegion& omega, const Rat& T) {
  RegionInt r;
  r.kind = omega.kind;
  r.n = omega.n;
  auto floor_strict = [](const Rat& bound) {
    // largest integer strictly below `bound`
    Int num = bound.get_num(), den = bound.get_den();
    Int v;
    mpz_fdiv_q(v.get_mpz_t(), Int(num - 1).get_mpz_t(), den.get_mpz_t());
    return v;
  };
  if (omega.kind == RegionKind::Ball) {
    Rat rr = T * omega.radius.q;
    Int hi = floor_strict(rr * rr);
    if (!fits_bits(hi, 110)) throw CapExceeded("counting: region bound too large");
    r.hi = i128_of(hi);
    return r;
  }
  Int lam = 1;
  for (const auto& s : omega.A)
    mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), s.q.get_den_mpz_t());
  for (const auto& s : omega.A) {
    Rat v = s.q * Rat(lam);
    Int num = v.get_num();
    if (!fits_bits(num, 100)) throw CapExceeded("counting: region coefficients too large");
    r.A.push_back(i128_of(num));
  }
  Int hi = floor_strict(T * T * Rat(lam));
  if (!fits_bits(hi, 110)) throw CapExceeded("counting: region bound too large");
  r.hi = i128_of(hi);
  return r;
}

bool region_int_contains(const RegionInt& r, const long long* x) {
  switch (r.kind) {
    case RegionKind::Ball: {
      i128 nn = 0;
      for (int i = 0; i < r.n; ++i) nn += static_cast<i128>(x[i]) * x[i];
      return nn <= r.hi;
    }
    case RegionKind::Ellipsoid: {
      i128 s = 0;
      for (int i = 0; i < r.n; ++i)
        for (int j = 0; j < r.n; ++j) s += r.A[i * r.n + j] * x[i] * x[j];
      return s <= r.hi;
    }
    case RegionKind::MaxSplit: {
      i128 v1 = r.A[0] * x[0] * x[0] + 2 * r.A[1] * x[0] * x[1] + r.A[3] * x[1] * x[1];
      i128 v2 = r.A[4] * x[2] * x[2] + 2 * r.A[5] * x[2] * x[3] + r.A[7] * x[3] * x[3];
      return v1 <= r.hi && v2 <= r.hi;
    }
    default:
      return false;
  }
}

// magnitude guard: worst-case |scaled value| must fit comfortably in i128
bool int_path_fits(const ExactSetup& s) {
  Int wmax_sum = 0;
  std::vector<Int> wmax(s.n);
  for (int k = 0; k < s.n; ++k) {
    wmax[k] = s.del * Int(static_cast<long>(s.box[k])) + abs(s.z[k]);
    wmax_sum += wmax[k];
  }
  Int bound = 0;
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) bound += abs(s.mz[i][j]) * wmax[i] * wmax[j];
  return fits_bits(bound, 110) && fits_bits(s.a_lo, 110) && fits_bits(s.b_hi, 110) &&
         fits_bits(s.del, 40);
}

CountResult int_kernel(const StarRegion& omega, const Rat& a, const Rat& b, const Rat& T,
                       const std::vector<ExceptionalAffine>& exc, const Pool& pool,
                       const ExactSetup& s) {
  int n = s.n;
  RegionInt reg = region_int(omega, T);
  std::vector<i128> mz(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mz[i * n + j] = i128_of(s.mz[i][j]);
  std::vector<i128> z(n);
  for (int i = 0; i < n; ++i) z[i] = i128_of(s.z[i]);
  i128 del = i128_of(s.del);
  i128 alo = i128_of(s.a_lo), bhi = i128_of(s.b_hi);
  std::vector<long long> u64(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) u64[i * n + j] = s.tr.U[i][j].get_si();

  std::vector<ExcInt> exci = exc_to_int(exc, n);
  long long width0 = 2 * s.box[0] + 1;
  long long nchunks = checked_chunks(width0);
  std::vector<Partial> parts(nchunks);
  for (auto& p : parts) p.excluded.assign(exc.size(), 0);

  pool.run_chunks(nchunks, [&](int64_t c) {
    Partial& pt = parts[c];
    long long y0_lo = -s.box[0] + c * width0 / nchunks;
    long long y0_hi = -s.box[0] + (c + 1) * width0 / nchunks - 1;
    if (y0_lo > y0_hi) return;
    std::vector<long long> y(n, 0);
    std::vector<i128> w(n, 0);
    long long xint[16];
    std::vector<MRange> ranges;
    int outer = n - 2;
    std::vector<long long> idx(outer);
    idx[0] = y0_lo;
    for (int k = 1; k < outer; ++k) idx[k] = -s.box[k];
    for (;;) {
      for (int k = 0; k < outer; ++k) {
        y[k] = idx[k];
        w[k] = del * y[k] + z[k];
      }
      i128 qpre = 0, spre = 0, bpre = 0;
      for (int k = 0; k < outer; ++k) {
        qpre += mz[k * n + k] * w[k] * w[k];
        for (int l = k + 1; l < outer; ++l) qpre += 2 * mz[k * n + l] * w[k] * w[l];
        spre += mz[outer * n + k] * w[k];
        bpre += mz[(n - 1) * n + k] * w[k];
      }
      for (long long yin = -s.box[outer]; yin <= s.box[outer]; ++yin) {
        y[outer] = yin;
        i128 win = del * yin + z[outer];
        i128 g0 = qpre + 2 * spre * win + mz[outer * n + outer] * win * win;
        i128 g1 = 2 * (bpre + mz[(n - 1) * n + outer] * win);
        i128 g2 = mz[(n - 1) * n + n - 1];
        // value(m) = g2 wl^2 + g1 wl + g0 with wl = del*m + z_{n-1}
        // as a polynomial in m: c2 = g2 del^2, c1 = del(g1 + 2 g2 z), c0 = g2 z^2 + g1 z + g0
        i128 zl = z[n - 1];
        i128 c2 = g2 * del * del;
        i128 c1 = del * (g1 + 2 * g2 * zl);
        i128 c0 = g2 * zl * zl + g1 * zl + g0;
        if (c2 == 0 && c1 == 0) {
          if (c0 < alo || c0 > bhi) continue;
          // constant in m: every m in the box is a window candidate
        }
        solve_ranges(static_cast<double>(c2), static_cast<double>(c1), static_cast<double>(c0),
                     static_cast<double>(alo), static_cast<double>(bhi), -s.box[n - 1],
                     s.box[n - 1], ranges);
        for (const auto& r : ranges) {
          for (long long m = r.lo; m <= r.hi; ++m) {
            i128 val = (c2 * m + c1) * m + c0;
            if (val < alo || val > bhi) continue;
            y[n - 1] = m;
            for (int i = 0; i < n; ++i) {
              long long acc = 0;
              for (int j = 0; j < n; ++j) acc += u64[i * n + j] * y[j];
              xint[i] = acc;
            }
            if (!region_int_contains(reg, xint)) continue;
            ++pt.total;
            int ei = exceptional_index(exci, xint, n);
            if (ei >= 0)
              ++pt.excluded[ei];
            else
              ++pt.tilde;
          }
        }
      }
      int k = outer - 1;
      for (;;) {
        if (k == 0) {
          if (++idx[0] > y0_hi) goto done;
          break;
        }
        if (++idx[k] <= s.box[k]) break;
        idx[k] = -s.box[k];
        --k;
      }
    }
  done:;
  });

  CountResult res;
  res.excluded.assign(exc.size(), 0);
  for (const auto& p : parts) {
    res.n_total += p.total;
    res.n_tilde += p.tilde;
    for (size_t e = 0; e < exc.size(); ++e) res.excluded[e] += p.excluded[e];
  }
  res.exact = true;
  res.a = to_double(a);
  res.b = to_double(b);
  res.T = to_double(T);
  return res;
}

// rational fallback for inputs whose scaled magnitudes do not fit i128;
// same structure, mpq arithmetic, serial (only reached at tiny scales)
CountResult rat_kernel(const StarRegion& omega, const Rat& a, const Rat& b, const Rat& T,
                       const std::vector<ExceptionalAffine>& exc, const ExactSetup& s) {
  int n = s.n;
  std::vector<ExcInt> exci = exc_to_int(exc, n);
  CountResult res;
  res.excluded.assign(exc.size(), 0);
  std::vector<long long> y(n, 0);
  long long xint[16];
  QVec xq(n);
  std::vector<MRange> ranges;
  std::vector<long long> idx(n - 1);
  int outer = n - 1;  // solve only the last coordinate; prefix covers n-1 coords
  for (int k = 0; k < outer; ++k) idx[k] = -s.box[k];
  for (;;) {
    for (int k = 0; k < outer; ++k) y[k] = idx[k];
    QVec w(n);
    for (int k = 0; k < outer; ++k) w[k] = Rat(static_cast<long>(y[k])) + s.xip[k];
    Rat g0 = 0, g1 = 0;
    for (int k = 0; k < outer; ++k) {
      g0 += s.mp[k][k] * w[k] * w[k];
      for (int l = k + 1; l < outer; ++l) g0 += 2 * s.mp[k][l] * w[k] * w[l];
      g1 += s.mp[n - 1][k] * w[k];
    }
    g1 *= 2;
    Rat g2 = s.mp[n - 1][n - 1];
    Rat t0 = s.xip[n - 1];
    Rat c2 = g2;
    Rat c1 = g1 + 2 * g2 * t0;
    Rat c0 = g0 + g1 * t0 + g2 * t0 * t0;
    solve_ranges(to_double(c2), to_double(c1), to_double(c0), to_double(a), to_double(b),
                 -s.box[n - 1], s.box[n - 1], ranges);
    for (const auto& r : ranges) {
      for (long long m = r.lo; m <= r.hi; ++m) {
        Rat mq(static_cast<long>(m));
        Rat val = (c2 * mq + c1) * mq + c0;
        if (!(val > a && val < b)) continue;
        y[n - 1] = m;
        for (int i = 0; i < n; ++i) {
          long long acc = 0;
          for (int j = 0; j < n; ++j) acc += s.tr.U[i][j].get_si() * y[j];
          xint[i] = acc;
          xq[i] = Rat(static_cast<long>(acc));
        }
        if (!omega.contains_exact(xq, T)) continue;
        ++res.n_total;
        int ei = exceptional_index(exci, xint, n);
        if (ei >= 0)
          ++res.excluded[ei];
        else
          ++res.n_tilde;
      }
    }
    int k = outer - 1;
    for (;;) {
      if (++idx[k] <= s.box[k]) break;
      idx[k] = -s.box[k];
      if (--k < 0) goto done;
    }
  }
done:
  res.exact = true;
  res.a = to_double(a);
  res.b = to_double(b);
  res.T = to_double(T);
  return res;
}

CountResult dispatch(const InhomForm& f, const StarRegion& omega, const Scalar& a, const Scalar& b,
                     const Scalar& T, const std::vector<ExceptionalAffine>& exc, const Pool& pool) {
  int n = f.Q.n;
  if (n < 3) throw std::invalid_argument("counting: n >= 3 required");
  if (n > 10) throw std::invalid_argument("counting: n too large");
  if (omega.n != n || static_cast<int>(f.xi.size()) != n)
    throw std::invalid_argument("counting: dimension mismatch");
  if (!(a.value() < b.value())) throw std::invalid_argument("counting: need a < b");
  if (!(T.value() > 0)) throw std::invalid_argument("counting: need T > 0");
  Signature sig = signature_of(f.Q);  // throws on degenerate
  if (sig.positive == 0 || sig.negative == 0)
    throw std::invalid_argument("counting: form must be indefinite");

  bool xi_rat = true;
  for (const auto& sxi : f.xi) xi_rat = xi_rat && sxi.rational;
  bool exact_ok = f.Q.all_rational() && xi_rat && omega.exact_capable() && a.rational &&
                  b.rational && T.rational;
  if (!exact_ok) return float_kernel(f, omega, a.value(), b.value(), T.value(), exc, pool);

  ExactSetup s = exact_setup(f, omega, a.q, b.q, T.q);
  if (s.window_empty) {
    CountResult res;
    res.excluded.assign(exc.size(), 0);
    res.exact = true;
    res.a = a.value();
    res.b = b.value();
    res.T = T.value();
    return res;
  }
  // x = U y stays within int64 given the box bound
  for (int k = 0; k < n; ++k)
    if (s.box[k] > (1ll << 40)) throw CapExceeded("counting: box too large");
  if (int_path_fits(s)) return int_kernel(omega, a.q, b.q, T.q, exc, pool, s);
  return rat_kernel(omega, a.q, b.q, T.q, exc, s);
}

}  // namespace

CountResult count_n(const InhomForm& f, const StarRegion& omega, const Scalar& a, const Scalar& b,
                    const Scalar& T, const Pool& pool) {
  return dispatch(f, omega, a, b, T, {}, pool);
}

CountResult count_n_tilde(const InhomForm& f, const StarRegion& omega, const Scalar& a,
                          const Scalar& b, const Scalar& T,
                          const std::vector<ExceptionalAffine>& exc, const Pool& pool) {
  return dispatch(f, omega, a, b, T, exc, pool);
}

}  // namespace qflab
