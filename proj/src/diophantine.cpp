#include "qflab/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qflab/intmat.hpp"

namespace qflab {

namespace {

Rat scalar_proxy(const Scalar& s) { return s.rational ? s.q : rat_of_double(s.d); }

Int qmax_of(double delta) {
  if (!(delta > 0) || !(delta < 1)) throw std::invalid_argument("dioph: need 0 < delta < 1");
  Rat inv = Rat(1) / rat_of_double(delta);
  Int qmax = ceil_int(inv) - 1;
  if (qmax < 1) throw std::invalid_argument("dioph: no admissible denominator at this delta");
  return qmax;
}

struct FitLine {
  double slope = 0, intercept = 0;
  bool valid = false;
};

FitLine fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  FitLine f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return f;
  double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-12) return f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  f.valid = true;
  return f;
}

}  // namespace

DiophQuality dioph_quality(const std::vector<Scalar>& xi, double delta, DiophMode mode) {
  if (xi.empty()) throw std::invalid_argument("dioph_quality: empty vector");
  Int qmax = qmax_of(delta);
  DiophQuality out;

  if (mode == DiophMode::PerCoordinate) {
    Rat worst(0);
    for (const Scalar& s : xi) {
      Rat x = scalar_proxy(s);
      Rat best;
      DiophWitness w;
      bool have = false;
      for (const Approx& ap : best_approx_candidates(x, qmax)) {
        Rat err = abs_rat(x - Rat(ap.p) / Rat(ap.q));
        if (!have || err < best) {
          have = true;
          best = err;
          w.p = ap.p;
          w.q = ap.q;
        }
      }
      if (!have) throw std::logic_error("dioph_quality: no candidate");
      w.error = to_double(best);
      out.witnesses.push_back(w);
      if (best > worst) worst = best;
    }
    out.quality = to_double(worst);
    return out;
  }

  // common denominator: scan q, cost O(qmax * n) exact operations
  Rat best_max;
  Int best_q = 0;
  for (Int q = 1; q <= qmax; ++q) {
    Rat mx(0);
    for (const Scalar& s : xi) {
      Rat e = dist_to_int(scalar_proxy(s) * Rat(q)) / Rat(q);
      if (e > mx) mx = e;
    }
    if (best_q == 0 || mx < best_max) {
      best_max = mx;
      best_q = q;
    }
  }
  for (const Scalar& s : xi) {
    DiophWitness w;
    w.q = best_q;
    w.p = round_int(scalar_proxy(s) * Rat(best_q));
    w.error = to_double(abs_rat(scalar_proxy(s) - Rat(w.p) / Rat(best_q)));
    out.witnesses.push_back(w);
  }
  out.quality = to_double(best_max);
  return out;
}

DiophReport estimate_kappa(const std::vector<Scalar>& xi, const std::vector<double>& delta_grid,
                           DiophMode mode, const Pool& pool) {
  if (delta_grid.size() < 6) throw std::invalid_argument("estimate_kappa: need >= 6 scales");
  DiophReport rep;
  rep.delta_grid = delta_grid;
  rep.mode = mode;
  rep.quality.resize(delta_grid.size());
  rep.witnesses.resize(delta_grid.size());
  std::vector<DiophQuality> slots(delta_grid.size());
  pool.run_chunks(static_cast<int64_t>(delta_grid.size()), [&](int64_t i) {
    slots[i] = dioph_quality(xi, delta_grid[i], mode);
  });
  for (size_t i = 0; i < delta_grid.size(); ++i) {
    rep.quality[i] = slots[i].quality;
    rep.witnesses[i] = std::move(slots[i].witnesses);
    if (slots[i].quality == 0) rep.rational_at_scale = true;
  }
  if (rep.rational_at_scale) return rep;
  FitLine f = fit_loglog(delta_grid, rep.quality);
  if (f.valid) {
    rep.slope = f.slope;
    rep.kappa_hat = f.slope - 1;  // Dirichlet baseline: quality ~ delta^{kappa+1}
    rep.c_hat = std::exp(f.intercept);
  }
  return rep;
}

double liouville_value(int terms) {
  double v = 0;
  long long fact = 1;
  for (int k = 1; k <= terms; ++k) {
    fact *= k;
    if (fact > 300) break;  // below double underflow anyway
    v += std::pow(10.0, -static_cast<double>(fact));
  }
  return v;
}

RationalMapReport rational_map_preservation(const std::vector<Scalar>& xi, const QMat& a,
                                            const std::vector<double>& delta_grid, double margin,
                                            const Pool& pool) {
  size_t n = xi.size();
  if (a.empty() || a[0].size() != n)
    throw std::invalid_argument("rational_map_preservation: shape mismatch");
  std::vector<Scalar> eta(a.size());
  for (size_t j = 0; j < a.size(); ++j) {
    Scalar acc(Rat(0));
    for (size_t i = 0; i < n; ++i) acc = acc + Scalar(a[j][i]) * xi[i];
    eta[j] = acc;
  }
  RationalMapReport rep;
  rep.base = estimate_kappa(xi, delta_grid, DiophMode::PerCoordinate, pool);
  rep.mapped = estimate_kappa(eta, delta_grid, DiophMode::PerCoordinate, pool);
  for (size_t i = 0; i < delta_grid.size(); ++i)
    rep.rows.push_back({delta_grid[i], rep.base.quality[i], rep.mapped.quality[i]});
  rep.kappa_bound = (static_cast<double>(n) + 1) * rep.base.kappa_hat + 1;
  rep.within_bound = rep.mapped.rational_at_scale ||
                     rep.mapped.kappa_hat <= rep.kappa_bound + margin;
  return rep;
}

// ----- EWAS -----

namespace {

// coefficient vector (c_11..c_nn, then c_ij i<j) of a form; the max-abs norm
// of the report lives on these coordinates
void coeff_pairs_order(int n, std::vector<std::pair<int, int>>& pairs) {
  pairs.clear();
  for (int i = 0; i < n; ++i) pairs.emplace_back(i, i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
}

std::vector<double> coeff_vector(const SymmetricForm& q) {
  std::vector<std::pair<int, int>> pairs;
  coeff_pairs_order(q.n, pairs);
  std::vector<double> v;
  for (auto [i, j] : pairs) v.push_back(i == j ? q.M(i, i) : 2 * q.M(i, j));
  return v;
}

// 2x4 HNF bases with pivot values and entries bounded by `b`
std::vector<ZMat> plane_catalog(int b) {
  std::vector<ZMat> out;
  for (int pi = 0; pi < 4; ++pi)
    for (int pj = pi + 1; pj < 4; ++pj) {
      std::vector<int> free1, free2;
      for (int c = pi + 1; c < 4; ++c)
        if (c != pj) free1.push_back(c);
      for (int c = pj + 1; c < 4; ++c) free2.push_back(c);
      int n1 = static_cast<int>(free1.size()), n2 = static_cast<int>(free2.size());
      int span = 2 * b + 1;
      for (int p1 = 1; p1 <= b; ++p1)
        for (int p2 = 1; p2 <= b; ++p2)
          for (int r12 = 0; r12 < p2; ++r12) {  // entry above the second pivot
            long long total = 1;
            for (int k = 0; k < n1 + n2; ++k) total *= span;
            for (long long code = 0; code < total; ++code) {
              ZMat m = zmat(2, 4);
              m[0][pi] = p1;
              m[1][pj] = p2;
              m[0][pj] = r12;
              long long rem = code;
              for (int k = 0; k < n1; ++k) {
                int v = static_cast<int>(rem % span) - b;
                rem /= span;
                m[0][free1[k]] = v;
              }
              for (int k = 0; k < n2; ++k) {
                int v = static_cast<int>(rem % span) - b;
                rem /= span;
                m[1][free2[k]] = v;
              }
              out.push_back(std::move(m));
            }
          }
    }
  return out;
}

struct PlaneSystem {
  ZMat basis;    // 2x4
  ZMat lattice;  // rows: integral coefficient vectors of forms vanishing on the plane
};

PlaneSystem plane_system(const ZMat& basis) {
  std::vector<std::pair<int, int>> pairs;
  coeff_pairs_order(4, pairs);
  const ZVec& u = basis[0];
  const ZVec& v = basis[1];
  ZMat cons = zmat(3, 10);
  for (size_t c = 0; c < pairs.size(); ++c) {
    auto [i, j] = pairs[c];
    if (i == j) {
      cons[0][c] = u[i] * u[i];
      cons[1][c] = v[i] * v[i];
      cons[2][c] = 2 * u[i] * v[i];
    } else {
      cons[0][c] = u[i] * u[j];
      cons[1][c] = v[i] * v[j];
      cons[2][c] = u[i] * v[j] + u[j] * v[i];
    }
  }
  PlaneSystem ps;
  ps.basis = basis;
  ps.lattice = kernel_basis(cons);
  return ps;
}

// nearest lattice point to y in the row span, by least squares rounding plus
// coordinate descent on the max norm
std::vector<long long> round_into_lattice(const ZMat& k, const std::vector<double>& y) {
  int r = static_cast<int>(k.size()), d = static_cast<int>(y.size());
  Eigen::MatrixXd kt(d, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < d; ++j) kt(j, i) = k[i][j].get_d();
  Eigen::VectorXd yv(d);
  for (int j = 0; j < d; ++j) yv(j) = y[j];
  Eigen::VectorXd c = (kt.transpose() * kt).ldlt().solve(kt.transpose() * yv);
  std::vector<long long> ci(r);
  for (int i = 0; i < r; ++i) ci[i] = std::llround(c(i));
  auto score = [&](const std::vector<long long>& cc) {
    double worst = 0;
    for (int j = 0; j < d; ++j) {
      double s = -y[j];
      for (int i = 0; i < r; ++i) s += static_cast<double>(cc[i]) * kt(j, i);
      worst = std::max(worst, std::abs(s));
    }
    return worst;
  };
  double cur = score(ci);
  bool improved = true;
  int sweeps = 0;
  while (improved && sweeps++ < 24) {
    improved = false;
    for (int i = 0; i < r; ++i)
      for (int dstep : {-1, 1, -2, 2}) {
        auto cc = ci;
        cc[i] += dstep;
        double s = score(cc);
        if (s + 1e-12 < cur) {
          cur = s;
          ci = cc;
          improved = true;
        }
      }
  }
  return ci;
}

}  // namespace

EwasReport ewas_search(const SymmetricForm& q, const std::vector<long long>& r_grid,
                       long long coeff_bound, int plane_bound, const Pool& pool) {
  if (q.n != 4) throw std::invalid_argument("ewas_search: dimension 4 only");
  if (r_grid.empty()) throw std::invalid_argument("ewas_search: empty r grid");
  std::vector<ZMat> planes = plane_catalog(plane_bound);
  std::vector<PlaneSystem> systems;
  systems.reserve(planes.size());
  for (const ZMat& p : planes) systems.push_back(plane_system(p));
  std::vector<double> qc = coeff_vector(q);

  EwasReport rep;
  rep.entries.resize(r_grid.size());
  pool.run_chunks(static_cast<int64_t>(r_grid.size()), [&](int64_t gi) {
    long long r = r_grid[gi];
    EwasEntry e;
    e.r = r;
    std::vector<double> target(10);
    for (int j = 0; j < 10; ++j) target[j] = qc[j] * static_cast<double>(r);
    for (const PlaneSystem& ps : systems) {
      if (ps.lattice.empty()) continue;
      std::vector<long long> c = round_into_lattice(ps.lattice, target);
      std::vector<Int> coeff(10, Int(0));
      for (size_t i = 0; i < ps.lattice.size(); ++i)
        for (int j = 0; j < 10; ++j) coeff[j] += Int(static_cast<long>(c[i])) * ps.lattice[i][j];
      bool within = true;
      double worst = 0;
      for (int j = 0; j < 10; ++j) {
        if (abs(coeff[j]) > Int(static_cast<long>(coeff_bound))) within = false;
        worst = std::max(worst, std::abs(qc[j] - coeff[j].get_d() / static_cast<double>(r)));
      }
      if (!within) continue;
      if (!e.has_candidate || worst < e.achieved) {
        // rebuild the matrix and re-verify the certificate exactly
        QMat m = qmat(4, 4);
        std::vector<std::pair<int, int>> pairs;
        coeff_pairs_order(4, pairs);
        for (size_t cidx = 0; cidx < pairs.size(); ++cidx) {
          auto [i, j] = pairs[cidx];
          if (i == j)
            m[i][i] = Rat(coeff[cidx]);
          else
            m[i][j] = m[j][i] = Rat(coeff[cidx]) / 2;
        }
        QMat b = to_qmat(ps.basis);
        QMat restr = q_mul(q_mul(b, m), q_transpose(b));
        bool null_ok = true;
        for (const QVec& row : restr)
          for (const Rat& x : row)
            if (x != 0) null_ok = false;
        if (!null_ok) continue;
        e.has_candidate = true;
        e.achieved = worst;
        e.best = SymmetricForm::from_rational(m);
        e.certificate = ps.basis;
      }
    }
    rep.entries[gi] = std::move(e);
  });

  std::vector<double> rs, ach;
  bool any_zero = false;
  for (const EwasEntry& e : rep.entries) {
    if (!e.has_candidate) continue;
    if (e.achieved == 0) {
      any_zero = true;
      continue;
    }
    rs.push_back(static_cast<double>(e.r));
    ach.push_back(e.achieved);
  }
  FitLine f = fit_loglog(rs, ach);
  if (f.valid) {
    rep.exponent_hat = -f.slope;
    rep.fit_valid = true;
  } else if (any_zero) {
    rep.exponent_hat = std::numeric_limits<double>::infinity();
  }
  return rep;
}

ClassifyReport classify_form(const InhomForm& f, const std::vector<long long>& r_grid,
                             long long coeff_bound, const std::vector<double>& delta_grid,
                             double ewas_exponent_threshold, double kappa_threshold,
                             const Pool& pool) {
  ClassifyReport rep;
  rep.ewas_exponent_threshold = ewas_exponent_threshold;
  rep.kappa_threshold = kappa_threshold;
  rep.ewas = ewas_search(f.Q, r_grid, coeff_bound, 2, pool);
  rep.dioph = estimate_kappa(f.xi, delta_grid, DiophMode::PerCoordinate, pool);

  bool exact_split = std::isinf(rep.ewas.exponent_hat);
  bool ewas_pos = exact_split ||
                  (rep.ewas.fit_valid && rep.ewas.exponent_hat >= ewas_exponent_threshold);
  bool not_ewas = rep.ewas.fit_valid && rep.ewas.exponent_hat < ewas_exponent_threshold;
  bool shift_bad = rep.dioph.rational_at_scale ||
                   (!rep.dioph.quality.empty() && rep.dioph.kappa_hat >= kappa_threshold);
  if (ewas_pos && shift_bad)
    rep.verdict = FormClass::EwasEvidenceAndShiftNonDioph;
  else if (not_ewas || !shift_bad)
    rep.verdict = FormClass::DiophantineEvidence;
  else
    rep.verdict = FormClass::Inconclusive;
  return rep;
}

}  // namespace qflab
