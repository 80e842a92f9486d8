#include "qflab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "qflab/diophantine.hpp"
#include "qflab/experiments.hpp"
#include "qflab/latgeo.hpp"
#include "qflab/spectra.hpp"
#include "qflab/subspaces.hpp"
#include "qflab/volume.hpp"

namespace qflab {

namespace {

struct Ctx {
  bool full = false;
  const Pool& pool;
  std::vector<std::pair<std::string, double>> goldens;
  void gold(const std::string& name, double v) { goldens.emplace_back(name, v); }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5g", v);
  return buf;
}

// ----- criterion 1: counting vs full-box brute force -----

// The oracle keeps its own arithmetic: everything is scaled to 64-bit
// integers (denominators here are tiny by construction) and membership is
// re-derived from the region definition, not via StarRegion.
struct BruteInstance {
  InhomForm f;
  StarRegion omega;
  Rat a, b, T;
  // scaled-integer data
  long long n = 0;
  long long em[4][4];  // E * M
  long long escale = 1, dscale = 1;
  long long dxi[4];  // D * xi
  bool ball = true;
  long long ea[4][4];  // ellipsoid matrix, scaled by ascale
  long long ascale = 1;
  Rat radius;  // ball radius
};

long long lcm_ll(long long a, long long b) { return a / std::gcd(a, b) * b; }

BruteInstance random_instance(uint64_t seed, long long k, bool full) {
  for (long long attempt = 0;; ++attempt) {
    CounterRng rng(seed, k * 997 + attempt);
    BruteInstance inst;
    int n = (k % 2 == 0) ? 3 : 4;
    inst.n = n;
    SymmetricForm q = SymmetricForm::zero(n, Mode::Exact);
    long long dens[4][4] = {};
    for (int i = 0; i < n; ++i) {
      long long d = 1 + static_cast<long long>(rng.next_below(2));
      long long num = static_cast<long long>(rng.next_below(5)) - 2;
      if (i == 0) num = 1 + static_cast<long long>(rng.next_below(2));
      if (i == 1) num = -1 - static_cast<long long>(rng.next_below(2));
      if (num == 0) num = 1;
      q.set(i, i, Scalar(Rat(static_cast<long>(num)) / Rat(static_cast<long>(d))));
      dens[i][i] = d;
      for (int j = i + 1; j < n; ++j) {
        long long dd = 1 + static_cast<long long>(rng.next_below(3));
        long long nu = static_cast<long long>(rng.next_below(3)) - 1;
        q.set(i, j, Scalar(Rat(static_cast<long>(nu)) / Rat(static_cast<long>(dd))));
        dens[i][j] = dens[j][i] = dd;
      }
    }
    if (det_exact(q) == 0) continue;
    auto sig = signature_of(q);
    if (sig.positive == 0 || sig.negative == 0) continue;

    inst.f.Q = q;
    long long d = 1;
    for (int i = 0; i < n; ++i) {
      long long dd = 1 + static_cast<long long>(rng.next_below(5));
      long long nu = static_cast<long long>(rng.next_below(2 * dd + 1)) - dd;
      inst.f.xi.push_back(Scalar(Rat(static_cast<long>(nu)) / Rat(static_cast<long>(dd))));
      d = lcm_ll(d, dd);
    }
    inst.dscale = d;
    for (int i = 0; i < n; ++i) {
      Rat v = inst.f.xi[i].q * Rat(static_cast<long>(d));
      inst.dxi[i] = v.get_num().get_si();
    }
    long long e = 1;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) e = lcm_ll(e, dens[i][j]);
    inst.escale = e;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Rat v = q.at(i, j).q * Rat(static_cast<long>(e));
        inst.em[i][j] = v.get_num().get_si();
      }

    inst.ball = (k % 3 != 2);
    if (inst.ball) {
      inst.radius = (k % 6 < 3) ? Rat(1) : Rat(3) / Rat(2);
      inst.omega = StarRegion::ball(n, Scalar(inst.radius));
    } else {
      SymmetricForm a = SymmetricForm::zero(n, Mode::Exact);
      long long as = 2;
      for (int i = 0; i < n; ++i) {
        long long di = 1 + static_cast<long long>(rng.next_below(2));
        a.set(i, i, Scalar(Rat(static_cast<long>(di))));
        for (int j = 0; j < n; ++j) inst.ea[i][j] = 0;
      }
      long long off = static_cast<long long>(rng.next_below(2));
      if (n >= 2 && off) a.set(0, 1, Scalar(Rat(1) / Rat(2)));
      inst.omega = StarRegion::ellipsoid(a);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Rat v = a.at(i, j).q * Rat(static_cast<long>(as));
          inst.ea[i][j] = v.get_num().get_si();
        }
      inst.ascale = as;
    }

    long long an = -1 - static_cast<long long>(rng.next_below(2));
    long long bn = 1 + static_cast<long long>(rng.next_below(2));
    inst.a = Rat(static_cast<long>(an)) / Rat(2);
    inst.b = Rat(static_cast<long>(bn)) / Rat(2);
    long long tmax = full ? (n == 3 ? 12 : 9) : (n == 3 ? 8 : 6);
    long long tmin = n == 3 ? 5 : 4;
    inst.T = Rat(static_cast<long>(tmin + static_cast<long long>(
                                              rng.next_below(static_cast<uint64_t>(tmax - tmin + 1)))));
    return inst;
  }
}

long long brute_count(const BruteInstance& inst) {
  int n = static_cast<int>(inst.n);
  double tv = to_double(inst.T);
  long long B = static_cast<long long>(std::floor(tv * inst.omega.nu_max() + 1e-9)) + 1;
  // window bounds: a < V/(E D^2) < b  with V integer
  // compare V * den(a) vs num(a) * E * D^2 in long long
  long long ed2 = inst.escale * inst.dscale * inst.dscale;
  long long anum = inst.a.get_num().get_si() * ed2, aden = inst.a.get_den().get_si();
  long long bnum = inst.b.get_num().get_si() * ed2, bden = inst.b.get_den().get_si();
  // ball: sum x_i^2 * rden^2 < (T rnum)^2 ; T integer here
  long long rr = 0, rden2 = 1;
  long long tll = inst.T.get_num().get_si();
  if (inst.ball) {
    long long rn = inst.radius.get_num().get_si(), rd = inst.radius.get_den().get_si();
    rr = tll * rn * tll * rn;
    rden2 = rd * rd;
  }
  long long cnt = 0;
  std::vector<long long> x(n, -B);
  for (;;) {
    // membership
    bool inside;
    if (inst.ball) {
      long long s2 = 0;
      for (int i = 0; i < n; ++i) s2 += x[i] * x[i];
      inside = s2 * rden2 < rr;
    } else {
      long long qv = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) qv += inst.ea[i][j] * x[i] * x[j];
      inside = qv < inst.ascale * tll * tll;
    }
    if (inside) {
      long long v = 0;
      for (int i = 0; i < n; ++i) {
        long long yi = inst.dscale * x[i] + inst.dxi[i];
        for (int j = 0; j < n; ++j) {
          long long yj = inst.dscale * x[j] + inst.dxi[j];
          v += inst.em[i][j] * yi * yj;
        }
      }
      if (anum * 1 < v * aden && v * bden < bnum * 1) ++cnt;
    }
    int i = 0;
    while (i < n && ++x[i] > B) {
      x[i] = -B;
      ++i;
    }
    if (i == n) break;
  }
  return cnt;
}

void crit1(Ctx& ctx, CriterionResult& r) {
  long long cases = ctx.full ? 50 : 12;
  long long bad = 0;
  std::string first_bad;
  for (long long k = 0; k < cases; ++k) {
    BruteInstance inst = random_instance(20260801, k, ctx.full);
    long long oracle = brute_count(inst);
    CountResult cr = count_n(inst.f, inst.omega, Scalar(inst.a), Scalar(inst.b), Scalar(inst.T),
                             ctx.pool);
    if (cr.n_total != oracle) {
      ++bad;
      if (first_bad.empty())
        first_bad = "instance " + std::to_string(k) + ": got " + std::to_string(cr.n_total) +
                    " want " + std::to_string(oracle);
    }
    if (k < 4) ctx.gold("count_oracle_" + std::to_string(k), static_cast<double>(oracle));
  }
  r.pass = bad == 0;
  r.detail = std::to_string(cases) + " instances, " + std::to_string(bad) + " mismatches" +
             (first_bad.empty() ? "" : "; " + first_bad);
}

// ----- criterion 2: asymptotic ratio, signature (3,1) irrational -----

void ratio_criterion(Ctx& ctx, CriterionResult& r, const InhomForm& f, const StarRegion& omega,
                     const std::vector<double>& grid, long long samples, double lo, double hi,
                     uint64_t seed, const char* tag,
                     const std::vector<ExceptionalAffine>& exc) {
  VolumeEstimate ve = lambda_fit(f, omega, -1, 1, grid, samples, seed, ctx.pool);
  ctx.gold(std::string(tag) + "_lambda", ve.lambda_hat);
  bool ok = ve.lambda_hat > 0;
  std::string detail = "lambda=" + fmt(ve.lambda_hat) + " ratios";
  for (double T : grid) {
    Scalar ts(Rat(static_cast<long>(T)));
    CountResult cr = exc.empty()
                         ? count_n(f, omega, Scalar(-1), Scalar(1), ts, ctx.pool)
                         : count_n_tilde(f, omega, Scalar(-1), Scalar(1), ts, exc, ctx.pool);
    long long c = exc.empty() ? cr.n_total : cr.n_tilde;
    double ratio = c / (ve.lambda_hat * 2.0 * T * T);
    ctx.gold(std::string(tag) + "_count_" + std::to_string(static_cast<long long>(T)),
             static_cast<double>(c));
    ok = ok && ratio >= lo && ratio <= hi;
    detail += " " + fmt(ratio);
  }
  detail += " band [" + fmt(lo) + "," + fmt(hi) + "]";
  r.pass = ok;
  r.detail = detail;
}

void crit2(Ctx& ctx, CriterionResult& r) {
  SymmetricForm q = SymmetricForm::zero(4, Mode::Exact);
  q.set(0, 0, Scalar(1));
  q.set(1, 1, Scalar(1));
  q.set(2, 2, Scalar(1));
  q.set(3, 3, Scalar::irrational(-std::sqrt(2.0)));
  InhomForm f{q, {Scalar(Rat(3) / Rat(10)), Scalar(0), Scalar(0), Scalar(0)}};
  StarRegion omega = StarRegion::ball(4, Scalar(1));
  std::vector<double> grid = ctx.full ? std::vector<double>{100, 140, 200}
                                      : std::vector<double>{40, 60, 80};
  long long samples = ctx.full ? 300'000'000 : 30'000'000;
  double lo = ctx.full ? 0.85 : 0.80, hi = ctx.full ? 1.15 : 1.20;
  ratio_criterion(ctx, r, f, omega, grid, samples, lo, hi, 777, "p3", {});
}

// ----- criterion 3: asymptotic ratio, split (2,2) with incommensurable shift -----

void crit3(Ctx& ctx, CriterionResult& r) {
  InhomForm f{b4_form(),
              {Scalar::irrational(std::sqrt(2.0) - 1), Scalar::irrational(std::sqrt(3.0) - 1),
               Scalar(0), Scalar(0)}};
  StarRegion omega = StarRegion::ball(4, Scalar(1));
  auto ws = exceptional_subspaces(f, 50.0);
  std::vector<ExceptionalAffine> exc;
  for (const auto& w : ws) exc.push_back(w.affine);
  ctx.gold("b4_dioph_witnesses", static_cast<double>(ws.size()));
  std::vector<double> grid = ctx.full ? std::vector<double>{80, 120, 160}
                                      : std::vector<double>{40, 60};
  long long samples = ctx.full ? 250'000'000 : 30'000'000;
  double lo = ctx.full ? 0.80 : 0.70, hi = ctx.full ? 1.20 : 1.30;
  ratio_criterion(ctx, r, f, omega, grid, samples, lo, hi, 778, "b4d", exc);
  r.detail = "witnesses=" + std::to_string(ws.size()) + " " + r.detail;
}

// ----- criterion 4: inflation for a rational shift in a null coset -----

void ext_gcd_ll(long long a, long long b, long long& u, long long& v) {
  // u*a + v*b = gcd(a,b)
  long long u0 = 1, v0 = 0, u1 = 0, v1 = 1;
  while (b != 0) {
    long long q = a / b;
    long long t = a - q * b;
    a = b;
    b = t;
    t = u0 - q * u1;
    u0 = u1;
    u1 = t;
    t = v0 - q * v1;
    v0 = v1;
    v1 = t;
  }
  u = u0;
  v = v0;
}

// null planes of x1 x4 - x2 x3 whose coset contains xi = e1/2: both families
// (m,n) with n even; the wedge norm m^2+n^2 runs up to smax
std::vector<ExceptionalAffine> half_shift_affines(long long smax) {
  std::vector<ExceptionalAffine> out;
  auto push = [&](bool first, long long m, long long n) {
    ExceptionalAffine e;
    e.basis = zmat(2, 4);
    e.annihilator = zmat(2, 4);
    if (first) {
      e.basis[0][0] = static_cast<long>(m);
      e.basis[0][2] = static_cast<long>(n);
      e.basis[1][1] = static_cast<long>(m);
      e.basis[1][3] = static_cast<long>(n);
      e.annihilator[0][0] = static_cast<long>(n);
      e.annihilator[0][2] = static_cast<long>(-m);
      e.annihilator[1][1] = static_cast<long>(n);
      e.annihilator[1][3] = static_cast<long>(-m);
    } else {
      e.basis[0][0] = static_cast<long>(m);
      e.basis[0][1] = static_cast<long>(n);
      e.basis[1][2] = static_cast<long>(m);
      e.basis[1][3] = static_cast<long>(n);
      e.annihilator[0][0] = static_cast<long>(n);
      e.annihilator[0][1] = static_cast<long>(-m);
      e.annihilator[1][2] = static_cast<long>(n);
      e.annihilator[1][3] = static_cast<long>(-m);
    }
    // integral v with W v = W xi = (n/2, 0)
    e.v_xi = ZVec(4, Int(0));
    long long half = n / 2;
    if (half != 0) {
      long long u, v;
      ext_gcd_ll(n, m, u, v);  // u n + v m = 1
      long long aa = u * half, cc = -v * half;
      if (first) {
        e.v_xi[0] = static_cast<long>(aa);
        e.v_xi[2] = static_cast<long>(cc);
      } else {
        e.v_xi[0] = static_cast<long>(aa);
        e.v_xi[1] = static_cast<long>(cc);
      }
    }
    out.push_back(e);
  };
  long long nmax = static_cast<long long>(std::sqrt(static_cast<double>(smax)));
  for (long long m = 1; m * m <= smax; ++m)
    for (long long n = -nmax; n <= nmax; ++n) {
      if (n % 2 != 0 || n * n + m * m > smax) continue;
      if (std::gcd(m, std::abs(n)) != 1) continue;
      push(true, m, n);
      push(false, m, n);
    }
  return out;
}

void crit4(Ctx& ctx, CriterionResult& r) {
  InhomForm f{b4_form(), {Scalar(Rat(1) / Rat(2)), Scalar(0), Scalar(0), Scalar(0)}};
  StarRegion omega = StarRegion::ball(4, Scalar(1));
  std::vector<double> grid = ctx.full ? std::vector<double>{60, 90, 120}
                                      : std::vector<double>{30, 45};
  // the window spans many half-integer levels of Q(x+xi) so the per-level
  // arithmetic densities average out; a (-1,1) window would see only the
  // +-1/2 levels, whose combined mass sits near 0.81*lambda
  Rat wb = Rat(41) / Rat(4);
  double wd = 10.25;
  long long smax = 50;
  double tol = 0.25;
  auto exc = half_shift_affines(smax);
  long long samples = ctx.full ? 100'000'000 : 30'000'000;
  VolumeEstimate ve = lambda_fit(f, omega, -wd, wd, grid, samples, 779, ctx.pool);
  ctx.gold("b4_half_lambda", ve.lambda_hat);
  bool ok = ve.lambda_hat > 0;
  std::string detail = "planes=" + std::to_string(exc.size()) + " lambda=" + fmt(ve.lambda_hat);
  double min_gap = 1e300;
  for (double T : grid) {
    Scalar ts(Rat(static_cast<long>(T)));
    CountResult cr = count_n_tilde(f, omega, Scalar(-wb), Scalar(wb), ts, exc, ctx.pool);
    double gap = (cr.n_total - cr.n_tilde) / (T * T);
    min_gap = std::min(min_gap, gap);
    double ratio = cr.n_tilde / (ve.lambda_hat * 2.0 * wd * T * T);
    ok = ok && std::abs(ratio - 1.0) <= tol;
    ctx.gold("b4_half_n_" + std::to_string(static_cast<long long>(T)),
             static_cast<double>(cr.n_total));
    ctx.gold("b4_half_nt_" + std::to_string(static_cast<long long>(T)),
             static_cast<double>(cr.n_tilde));
    detail += " T=" + fmt(T) + ":gap=" + fmt(gap) + ",ratio=" + fmt(ratio);
  }
  ok = ok && min_gap >= 1.0;
  r.pass = ok;
  r.detail = detail + " (floor 1.0, tol " + fmt(tol) + ")";
}

// ----- criterion 5: witness count bound -----

void crit5(Ctx& ctx, CriterionResult& r) {
  long long cases = ctx.full ? 200 : 40;
  size_t worst_irr = 0, worst_mix = 0;
  // irrational forms
  for (long long k = 0; k < cases; ++k) {
    SymmetricForm q = SymmetricForm::zero(4, Mode::Exact);
    for (long long attempt = 0;; ++attempt) {
      CounterRng rng(40100, k * 131 + attempt);
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) q.set(i, j, Scalar::irrational(1.5 * rng.next_sym()));
      auto sig = signature_of(q);
      if (sig.positive == 2 && sig.negative == 2 && std::abs(q.M.determinant()) > 0.05) break;
    }
    CounterRng rng(40200, k);
    InhomForm f{q, {}};
    for (int i = 0; i < 4; ++i) f.xi.push_back(Scalar::irrational(rng.next_unit()));
    worst_irr = std::max(worst_irr, exceptional_subspaces(f, 50.0).size());
  }
  // rational split forms with irrational-tagged shifts
  for (long long k = 0; k < cases; ++k) {
    CounterRng rng(40300, k);
    QMat g = qmat(4, 4);
    for (int i = 0; i < 4; ++i) g[i][i] = 1;
    for (int step = 0; step < 10; ++step) {
      int i = static_cast<int>(rng.next_below(4));
      int j = static_cast<int>(rng.next_below(4));
      if (i == j) continue;
      long s = rng.next_below(2) ? 1 : -1;
      for (int c = 0; c < 4; ++c) g[i][c] += Rat(s) * g[j][c];
    }
    QMat m = qmat(4, 4);
    m[0][3] = m[3][0] = Rat(1) / Rat(2);
    m[1][2] = m[2][1] = Rat(-1) / Rat(2);
    QMat gm = q_mul(q_transpose(g), q_mul(m, g));
    SymmetricForm q = SymmetricForm::from_rational(gm);
    InhomForm f{q, {}};
    double irr1 = std::sqrt(2.0) * (0.1 + 0.8 * rng.next_unit());
    double irr2 = std::sqrt(3.0) * (0.1 + 0.8 * rng.next_unit());
    int slot = static_cast<int>(rng.next_below(4));
    for (int i = 0; i < 4; ++i) {
      if (i == slot)
        f.xi.push_back(Scalar::irrational(irr1));
      else if (i == (slot + 1) % 4)
        f.xi.push_back(Scalar::irrational(irr2));
      else
        f.xi.push_back(Scalar(Rat(static_cast<long>(rng.next_below(5))) / Rat(7)));
    }
    worst_mix = std::max(worst_mix, exceptional_subspaces(f, 50.0).size());
  }
  ctx.gold("witness_worst_irrational", static_cast<double>(worst_irr));
  ctx.gold("witness_worst_mixed", static_cast<double>(worst_mix));
  r.pass = worst_irr <= 4 && worst_mix <= 2;
  r.detail = std::to_string(cases) + "+" + std::to_string(cases) +
             " forms; worst irrational=" + std::to_string(worst_irr) +
             " (<=4), rational+irrational shift=" + std::to_string(worst_mix) + " (<=2)";
}

// ----- criterion 6: linear growth of the null families -----

void crit6(Ctx& ctx, CriterionResult& r) {
  std::vector<double> ts = {100, 1000, 10000};
  std::vector<double> c1, c2;
  for (double T : ts) {
    c1.push_back(static_cast<double>(enumerate_null_first_type(T).size()));
    c2.push_back(static_cast<double>(null_vectors_21(T).size()));
  }
  bool ok = true;
  std::string detail = "first-type";
  for (int i = 0; i < 2; ++i) {
    double ratio = c1[i + 1] / c1[i];
    ok = ok && ratio >= 8.0 && ratio <= 12.5;
    detail += " " + fmt(ratio);
  }
  detail += "; (2,1)";
  for (int i = 0; i < 2; ++i) {
    double ratio = c2[i + 1] / c2[i];
    ok = ok && ratio >= 8.0 && ratio <= 12.5;
    detail += " " + fmt(ratio);
  }
  for (int i = 0; i < 3; ++i) {
    ctx.gold("growth22_" + std::to_string(i), c1[i]);
    ctx.gold("growth21_" + std::to_string(i), c2[i]);
  }
  r.pass = ok;
  r.detail = detail + " (band [8,12.5])";
}

// ----- criterion 7: pair correlation on the flat torus -----

void crit7(Ctx& ctx, CriterionResult& r) {
  QMat id = qmat(2, 2);
  id[0][0] = id[1][1] = 1;
  Torus tor{id,
            {Scalar::irrational(std::sqrt(2.0) - 1), Scalar::irrational(std::sqrt(3.0) - 1)}};
  double T = 1e6;
  FluxSpectrum s = eigenvalues(tor, T, ctx.pool);
  double R = pair_correlation(s, 0.1, 1.1, T);
  double target = s.weyl_c * s.weyl_c * 1.0;
  double dev = std::abs(R / target - 1.0);

  Torus ctrl{id, {Scalar(Rat(1) / Rat(2)), Scalar(Rat(1) / Rat(2))}};
  FluxSpectrum s2 = eigenvalues(ctrl, T, ctx.pool);
  double R2 = pair_correlation(s2, 0.1, 1.1, T);
  double dev2 = std::abs(R2 / target - 1.0);

  ctx.gold("paircorr_R", R);
  ctx.gold("paircorr_control_R", R2);
  r.pass = dev <= 0.1 && dev2 > 0.1;
  r.detail = "R=" + fmt(R) + " target=" + fmt(target) + " dev=" + fmt(dev) +
             " (<=0.1); control dev=" + fmt(dev2) + " (>0.1)";
}

// ----- criterion 8: Siegel-type average over shifts -----

void crit8(Ctx& ctx, CriterionResult& r) {
  std::vector<TestFunction> fs = {TestFunction::radial_step(4, 1.3),
                                  TestFunction::box({0.9, 1.1, 0.75, 1.0}),
                                  TestFunction::radial_tent(4, 1.6)};
  std::vector<Eigen::MatrixXd> bases;
  bases.push_back(Eigen::MatrixXd::Identity(4, 4));
  Eigen::MatrixXd sk = Eigen::MatrixXd::Identity(4, 4);
  sk(0, 1) = 1;
  sk(1, 2) = 1;
  sk(2, 3) = 1;
  bases.push_back(sk);
  Eigen::VectorXd d(4);
  d << 1.5, 0.8, 1.25, 1.0;
  bases.push_back(d.asDiagonal());
  long long shifts = ctx.full ? 4000 : 1500;
  bool ok = true;
  double worst = 0;
  int idx = 0;
  for (const auto& f : fs)
    for (const auto& b : bases) {
      FullLattice lat;
      lat.basis = b;
      lat.shift = Eigen::VectorXd::Zero(4);
      SiegelAverage sa = siegel_average(f, lat, shifts, 901 + idx, ctx.pool);
      double z = sa.std_error > 0 ? std::abs(sa.mean - sa.exact) / sa.std_error : 1e9;
      worst = std::max(worst, z);
      ok = ok && z <= 3.0;
      ctx.gold("siegel_mean_" + std::to_string(idx), sa.mean);
      ++idx;
    }
  r.pass = ok;
  r.detail = "9 combinations, worst |z|=" + fmt(worst) + " (<=3)";
}

// ----- criterion 9: orbit moments of alpha_i -----

void crit9(Ctx& ctx, CriterionResult& r) {
  // generic unimodular lattice for the bounded moments: over Z^4 itself the
  // integrand spikes sit at rational angles, and past t ~ 6 the midpoint grid
  // hits them in a heavy-tailed way no affordable m smooths out.  The i=2
  // growth is measured on Z^4, the split-rational case the caveat is about.
  FullLattice lat = FullLattice::integer_lattice(4);
  double s2c = std::sqrt(2.0) - 1, s3c = std::sqrt(3.0) - 1, s5c = std::sqrt(5.0) - 2,
         s7c = std::sqrt(7.0) - 2;
  lat.basis << 1, s2c, s3c, s5c,
               0, 1, s7c, 0.5 * s2c,
               0, 0, 1, 0.5 * s3c,
               0, 0, 0, 1;
  FullLattice lat2 = FullLattice::integer_lattice(4);
  std::vector<double> t13, t2;
  int m13, m2;
  double cap13, floor2;
  if (ctx.full) {
    t13 = {1, 2, 3, 4, 5, 6, 7, 8};
    t2 = {1, 2, 3, 4, 5};
    m13 = 64;
    m2 = 128;
    cap13 = 0.05;
    floor2 = 0.2;
  } else {
    t13 = {1, 2, 3, 4, 5, 6};
    t2 = {1, 2, 3, 4};
    m13 = 32;
    m2 = 48;
    cap13 = 0.05;
    floor2 = 0.15;
  }
  MomentSweep s1 = orbit_moment_sweep(lat, 1, 1.5, t13, m13, OrbitSignature::Sig22, ctx.pool);
  MomentSweep s3 = orbit_moment_sweep(lat, 3, 1.5, t13, m13, OrbitSignature::Sig22, ctx.pool);
  MomentSweep s2 = orbit_moment_sweep(lat2, 2, 1.5, t2, m2, OrbitSignature::Sig22, ctx.pool);
  ctx.gold("moment_slope_1", s1.slope);
  ctx.gold("moment_slope_3", s3.slope);
  ctx.gold("moment_slope_2", s2.slope);
  // boundedness shows up as slope <= cap; decay (negative slope) is fine,
  // the loose lower guard only catches a broken sweep
  bool flat1 = s1.slope <= cap13 && s1.slope >= -1.0;
  bool flat3 = s3.slope <= cap13 && s3.slope >= -1.0;
  bool ok = flat1 && flat3 && s2.slope >= floor2;
  r.pass = ok;
  r.detail = "slopes i=1: " + fmt(s1.slope) + ", i=3: " + fmt(s3.slope) + " (<=" + fmt(cap13) +
             "); i=2: " + fmt(s2.slope) + " (>=" + fmt(floor2) + ")";
}

// ----- criterion 10: Diophantine quality -----

Rat liouville_rat(int terms) {
  Rat s = 0;
  long long fact = 1;
  for (int k = 1; k <= terms; ++k) {
    fact *= k;
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(fact));
    s += Rat(1) / Rat(den);
  }
  return s;
}

// independent scan: every denominator up to the cutoff, exact arithmetic
double scan_quality(const std::vector<Scalar>& xi, double delta, DiophMode mode) {
  Rat inv = Rat(1) / rat_of_double(delta);
  Int qmax = ceil_int(inv) - 1;
  long long qm = qmax.get_si();
  size_t n = xi.size();
  std::vector<Rat> vals(n);
  for (size_t i = 0; i < n; ++i) vals[i] = xi[i].rational ? xi[i].q : rat_of_double(xi[i].d);
  if (mode == DiophMode::PerCoordinate) {
    Rat worst = 0;
    for (size_t i = 0; i < n; ++i) {
      Rat best = -1;
      for (long long q = 1; q <= qm; ++q) {
        Rat d = dist_to_int(vals[i] * static_cast<long>(q)) / Rat(static_cast<long>(q));
        if (best < 0 || d < best) best = d;
      }
      if (best > worst) worst = best;
    }
    return to_double(worst);
  }
  Rat best = -1;
  for (long long q = 1; q <= qm; ++q) {
    Rat w = 0;
    for (size_t i = 0; i < n; ++i) {
      Rat d = dist_to_int(vals[i] * static_cast<long>(q)) / Rat(static_cast<long>(q));
      if (d > w) w = d;
    }
    if (best < 0 || w < best) best = w;
  }
  return to_double(best);
}

void crit10(Ctx& ctx, CriterionResult& r) {
  long long vectors = ctx.full ? 20 : 8;
  long long mismatches = 0;
  for (long long k = 0; k < vectors; ++k) {
    CounterRng rng(303, k);
    int dim = 2 + static_cast<int>(k % 2);
    std::vector<Scalar> xi;
    for (int i = 0; i < dim; ++i) {
      if (rng.next_below(2)) {
        long long den = 7 + static_cast<long long>(rng.next_below(390));
        long long num = static_cast<long long>(rng.next_below(2 * den + 1)) - den;
        xi.push_back(Scalar(Rat(static_cast<long>(num)) / Rat(static_cast<long>(den))));
      } else {
        xi.push_back(Scalar(rat_of_double(rng.next_sym())));
      }
    }
    for (double delta : {1e-2, 1e-3, 1e-4})
      for (DiophMode mode : {DiophMode::PerCoordinate, DiophMode::CommonDenominator}) {
        double mine = dioph_quality(xi, delta, mode).quality;
        double want = scan_quality(xi, delta, mode);
        if (mine != want) ++mismatches;
      }
  }

  std::vector<double> grid_bad, grid_liou;
  for (int k = 0; k < 8; ++k) grid_bad.push_back(std::pow(10.0, -1.5 - 0.25 * k));
  for (int k = 0; k < 8; ++k) grid_liou.push_back(std::pow(10.0, -5.0 - 0.2 * k));
  DiophReport quad = estimate_kappa(
      {Scalar::irrational(std::sqrt(2.0) - 1), Scalar::irrational(std::sqrt(3.0) - 1)}, grid_bad,
      DiophMode::PerCoordinate, ctx.pool);
  DiophReport liou = estimate_kappa({Scalar(liouville_rat(5))}, grid_liou,
                                    DiophMode::PerCoordinate, ctx.pool);
  ctx.gold("kappa_quadratic", quad.kappa_hat);
  ctx.gold("kappa_liouville", liou.kappa_hat);
  bool ok = mismatches == 0 && quad.kappa_hat >= 0.7 && quad.kappa_hat <= 1.3 &&
            liou.kappa_hat > 5.0;
  r.pass = ok;
  r.detail = std::to_string(vectors) + " vectors x 6 scans, " + std::to_string(mismatches) +
             " mismatches; kappa(sqrt pair)=" + fmt(quad.kappa_hat) +
             " ([0.7,1.3]), kappa(liouville)=" + fmt(liou.kappa_hat) + " (>5)";
}

// ----- criterion 11: byte-identical reruns -----

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void crit11(Ctx& ctx, CriterionResult& r) {
  (void)ctx;
  namespace fs = std::filesystem;
  fs::path tmp = fs::temp_directory_path() / "qflab_acceptance_rerun";
  fs::create_directories(tmp);
  InhomForm f{b4_form(), {Scalar(Rat(1) / Rat(3)), Scalar(0), Scalar(0), Scalar(0)}};
  Json vol_params{{"form", inhom_to_json(f)},
                  {"region", region_to_json(StarRegion::ball(4, Scalar(1)))},
                  {"a", -1},
                  {"b", 1},
                  {"t_grid", {8, 12}},
                  {"samples", 200000}};
  Json spec_params{{"basis", {{1, 0}, {0, 1}}},
                   {"flux", {"sqrt(2)-1", "1/3"}},
                   {"lambda_max", 20000}};
  Json dio_params{{"xi", {"sqrt(2)-1"}},
                  {"delta_grid", {1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4}}};
  struct Run {
    const char* name;
    Json params;
  };
  std::vector<Run> runs = {{"volume", vol_params}, {"spectrum", spec_params},
                           {"diophantine", dio_params}};
  bool ok = true;
  std::string detail;
  for (const Run& run : runs) {
    std::vector<std::string> outs;
    for (int rep = 0; rep < 3; ++rep) {
      RunOptions opt;
      opt.experiment = run.name;
      opt.params = run.params;
      opt.seed = 424242;
      opt.threads = rep == 2 ? 3 : 2;  // third run varies the pool size
      opt.format = "csv";
      fs::path out = tmp / (std::string(run.name) + "_" + std::to_string(rep) + ".csv");
      opt.output = out.string();
      run_experiment(opt);
      outs.push_back(read_file(out));
    }
    bool same = outs[0] == outs[1] && outs[0] == outs[2] && !outs[0].empty();
    ok = ok && same;
    detail += std::string(run.name) + (same ? ":identical " : ":DIFFERS ");
  }
  std::error_code ec;
  fs::remove_all(tmp, ec);
  r.pass = ok;
  r.detail = detail + "(3 reruns each, thread counts 2,2,3)";
}

// ----- golden tables -----

void golden_step(Ctx& ctx, const std::string& golden_dir, AcceptanceReport& rep,
                 std::ostream& log) {
  namespace fs = std::filesystem;
  CriterionResult g;
  g.index = 12;
  g.name = "golden-tables";
  auto t0 = std::chrono::steady_clock::now();
  try {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char date[16];
    std::strftime(date, sizeof date, "%Y-%m-%d", &tm);
    fs::path dir = fs::path(golden_dir) / date;
    fs::create_directories(dir);
    std::vector<std::vector<std::string>> rows;
    for (const auto& [name, value] : ctx.goldens) rows.push_back({name, format_double(value)});
    std::string doc = csv_document({"acceptance golden table"}, {"name", "value"}, rows);
    atomic_write((dir / "acceptance_golden.csv").string(), doc);

    fs::path baseline = fs::path(golden_dir) / "golden.csv";
    if (!fs::exists(baseline)) {
      atomic_write(baseline.string(), doc);
      g.pass = true;
      g.detail = "baseline written to " + baseline.string();
    } else {
      std::map<std::string, std::string> old;
      std::ifstream in(baseline);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line == "name,value") continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos) continue;
        old[line.substr(0, comma)] = line.substr(comma + 1);
      }
      std::string drift;
      int nd = 0;
      for (const auto& [name, value] : ctx.goldens) {
        auto it = old.find(name);
        if (it == old.end()) {
          ++nd;
          if (drift.empty()) drift = name + " missing from baseline";
          continue;
        }
        double ov = std::strtod(it->second.c_str(), nullptr);
        double rel = std::abs(value - ov) / std::max(1.0, std::abs(ov));
        if (rel > 1e-9) {
          ++nd;
          if (drift.empty())
            drift = name + " drifted: " + format_double(ov) + " -> " + format_double(value);
        }
      }
      g.pass = nd == 0;
      g.detail = nd == 0 ? "all " + std::to_string(ctx.goldens.size()) + " values match baseline"
                         : std::to_string(nd) + " drifting values; first: " + drift;
    }
  } catch (const std::exception& e) {
    g.pass = false;
    g.detail = std::string("exception: ") + e.what();
  }
  g.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log << "criterion " << g.index << " " << g.name << ": " << (g.pass ? "PASS" : "FAIL") << " ["
      << fmt(g.seconds) << "s] " << g.detail << "\n";
  rep.ok = rep.ok && g.pass;
  rep.criteria.push_back(g);
}

}  // namespace

AcceptanceReport run_acceptance(bool full, const std::string& golden_dir, const Pool& pool,
                                std::ostream& log) {
  Ctx ctx{full, pool, {}};
  struct Entry {
    int index;
    const char* name;
    void (*fn)(Ctx&, CriterionResult&);
  };
  const Entry entries[] = {
      {1, "counting-oracle", crit1},
      {2, "asymptotic-ratio-p3", crit2},
      {3, "asymptotic-ratio-22-diophantine", crit3},
      {4, "exceptional-inflation", crit4},
      {5, "witness-count-bound", crit5},
      {6, "null-family-growth", crit6},
      {7, "pair-correlation", crit7},
      {8, "siegel-average", crit8},
      {9, "orbit-moments", crit9},
      {10, "diophantine-exponent", crit10},
      {11, "determinism", crit11},
  };
  AcceptanceReport rep;
  rep.ok = true;
  log << "acceptance suite (" << (full ? "full" : "quick") << " scale)\n";
  for (const Entry& e : entries) {
    CriterionResult r;
    r.index = e.index;
    r.name = e.name;
    auto t0 = std::chrono::steady_clock::now();
    try {
      e.fn(ctx, r);
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log << "criterion " << r.index << " " << r.name << ": " << (r.pass ? "PASS" : "FAIL") << " ["
        << fmt(r.seconds) << "s] " << r.detail << "\n";
    rep.ok = rep.ok && r.pass;
    rep.criteria.push_back(r);
  }
  if (full && !golden_dir.empty()) golden_step(ctx, golden_dir, rep, log);
  int passed = 0;
  for (const auto& c : rep.criteria) passed += c.pass ? 1 : 0;
  log << "acceptance: " << (rep.ok ? "OK" : "FAIL") << " (" << passed << "/"
      << rep.criteria.size() << ")\n";
  return rep;
}

}  // namespace qflab
