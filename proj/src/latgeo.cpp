#include "qflab/latgeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qflab {

namespace {
constexpr double kPi = 3.14159265358979323846;

double ball_volume(int n, double r) {
  return std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1) * std::pow(r, n);
}
}  // namespace

FullLattice FullLattice::integer_lattice(int n) {
  FullLattice l;
  l.basis = Eigen::MatrixXd::Identity(n, n);
  l.shift = Eigen::VectorXd::Zero(n);
  return l;
}

double FullLattice::covol() const { return std::abs(basis.determinant()); }

bool FullLattice::unimodular() const { return std::abs(covol() - 1.0) <= 1e-12; }

double TestFunction::operator()(const Eigen::VectorXd& x) const {
  switch (kind) {
    case TestKind::RadialStep:
      return x.norm() <= radius ? scale : 0.0;
    case TestKind::Box: {
      for (int i = 0; i < n; ++i)
        if (std::abs(x(i)) > halfwidths[i]) return 0.0;
      return scale;
    }
    case TestKind::RadialTent: {
      double u = x.norm() / radius;
      return u >= 1 ? 0.0 : scale * (1 - u);
    }
  }
  return 0.0;
}

double TestFunction::support_radius() const {
  if (kind == TestKind::Box) {
    double s = 0;
    for (double h : halfwidths) s += h * h;
    return std::sqrt(s);
  }
  return radius;
}

double TestFunction::exact_integral() const {
  switch (kind) {
    case TestKind::RadialStep:
      return scale * ball_volume(n, radius);
    case TestKind::Box: {
      double v = scale;
      for (double h : halfwidths) v *= 2 * h;
      return v;
    }
    case TestKind::RadialTent:
      return scale * ball_volume(n, radius) / (n + 1);
  }
  return 0.0;
}

TestFunction TestFunction::radial_step(int n, double r, double scale) {
  TestFunction f;
  f.kind = TestKind::RadialStep;
  f.n = n;
  f.radius = r;
  f.scale = scale;
  return f;
}

TestFunction TestFunction::box(const std::vector<double>& halfwidths, double scale) {
  TestFunction f;
  f.kind = TestKind::Box;
  f.n = static_cast<int>(halfwidths.size());
  f.halfwidths = halfwidths;
  f.scale = scale;
  return f;
}

TestFunction TestFunction::radial_tent(int n, double r, double scale) {
  TestFunction f;
  f.kind = TestKind::RadialTent;
  f.n = n;
  f.radius = r;
  f.scale = scale;
  return f;
}

namespace {

// floating LLL on columns, delta = 0.99; good enough to shape enumeration
void float_lll(Eigen::MatrixXd& b) {
  int n = static_cast<int>(b.cols());
  auto gs = [&](Eigen::MatrixXd& star, Eigen::MatrixXd& mu) {
    star = b;
    mu = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        double d = star.col(j).squaredNorm();
        double m = d > 1e-300 ? b.col(i).dot(star.col(j)) / d : 0.0;
        mu(i, j) = m;
        star.col(i) -= m * star.col(j);
      }
  };
  Eigen::MatrixXd star, mu;
  gs(star, mu);
  int k = 1, guard = 0;
  while (k < n && guard++ < 4000) {
    for (int j = k - 1; j >= 0; --j) {
      double r = std::round(mu(k, j));
      if (r != 0) {
        b.col(k) -= r * b.col(j);
        gs(star, mu);
      }
    }
    double bk = star.col(k).squaredNorm();
    double bk1 = star.col(k - 1).squaredNorm();
    if (bk >= (0.99 - mu(k, k - 1) * mu(k, k - 1)) * bk1) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      gs(star, mu);
      k = std::max(k - 1, 1);
    }
  }
}

// nonzero coefficient vectors in [-2,2]^n up to sign, with the resulting
// lattice vectors; sorted by norm
struct ShortList {
  std::vector<Eigen::VectorXd> vecs;
};

ShortList short_candidates(const Eigen::MatrixXd& basis) {
  Eigen::MatrixXd b = basis;
  float_lll(b);
  int n = static_cast<int>(b.cols());
  ShortList out;
  std::vector<int> c(n, -2);
  for (;;) {
    int first = 0;
    while (first < n && c[first] == 0) ++first;
    if (first < n && c[first] > 0) {  // canonical representative of +-pair
      Eigen::VectorXd v = Eigen::VectorXd::Zero(b.rows());
      for (int i = 0; i < n; ++i) v += static_cast<double>(c[i]) * b.col(i);
      out.vecs.push_back(v);
    }
    int i = 0;
    while (i < n && c[i] == 2) c[i++] = -2;
    if (i == n) break;
    ++c[i];
  }
  std::sort(out.vecs.begin(), out.vecs.end(),
            [](const Eigen::VectorXd& a, const Eigen::VectorXd& b2) {
              return a.squaredNorm() < b2.squaredNorm();
            });
  return out;
}

double lambda1_f(const Eigen::MatrixXd& basis) {
  ShortList s = short_candidates(basis);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : s.vecs) best = std::min(best, v.norm());
  return best;
}

// fast alpha_i for the orbit statistics; exact alpha_i below is the oracle
double alpha_i_float(const Eigen::MatrixXd& basis, int i) {
  int n = static_cast<int>(basis.cols());
  double cv = std::abs(basis.determinant());
  if (i == n) return 1.0 / cv;
  if (i == 1) return 1.0 / lambda1_f(basis);
  if (i == n - 1) {
    Eigen::MatrixXd dual = basis.inverse().transpose();
    return 1.0 / (lambda1_f(dual) * cv);
  }
  ShortList s = short_candidates(basis);
  size_t kmax = std::min<size_t>(s.vecs.size(), 16);
  double best = std::numeric_limits<double>::infinity();
  if (i == 2) {
    for (size_t a = 0; a < kmax; ++a)
      for (size_t b = a + 1; b < kmax; ++b) {
        double na = s.vecs[a].squaredNorm(), nb = s.vecs[b].squaredNorm();
        double d = s.vecs[a].dot(s.vecs[b]);
        double w2 = na * nb - d * d;
        if (w2 > 1e-18 * na * nb) best = std::min(best, std::sqrt(w2));
      }
    return 1.0 / best;
  }
  // generic tuple fallback via Gram determinants
  std::vector<int> idx(i, 0);
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == i) {
      Eigen::MatrixXd g(i, i);
      for (int r = 0; r < i; ++r)
        for (int c = 0; c < i; ++c) g(r, c) = s.vecs[idx[r]].dot(s.vecs[idx[c]]);
      double det = g.determinant();
      if (det > 1e-18) best = std::min(best, std::sqrt(det));
      return;
    }
    for (int k = start; k < static_cast<int>(kmax); ++k) {
      idx[pos] = k;
      rec(pos + 1, k + 1);
    }
  };
  rec(0, 0);
  return 1.0 / best;
}

}  // namespace

double theta_transform(const TestFunction& f, const FullLattice& lattice, long long node_cap) {
  int n = static_cast<int>(lattice.basis.cols());
  Eigen::MatrixXd b = lattice.basis;
  float_lll(b);
  double R = f.support_radius();

  // integer solutions of ||b k + shift|| <= R by Cholesky recursion
  Eigen::MatrixXd g = b.transpose() * b;
  g.diagonal().array() += 1e-12 * (1 + g.trace());
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw std::runtime_error("theta_transform: degenerate basis");
  Eigen::MatrixXd lt = llt.matrixL().transpose();  // upper triangular
  Eigen::VectorXd center = -b.colPivHouseholderQr().solve(lattice.shift);
  double bound = R * R * (1 + 1e-9) + 1e-12;

  double sum = 0;
  long long nodes = 0;
  std::vector<long long> k(n, 0);
  // partial[i] = sum over levels > i of (lt row contributions)
  std::function<void(int, double, const Eigen::VectorXd&)> rec = [&](int level, double rem,
                                                                     const Eigen::VectorXd& acc) {
    if (++nodes > node_cap) throw CapExceeded("theta_transform: node cap");
    // x_level = lt(level,level) (k - center)_level + acc(level)
    double diag = lt(level, level);
    double off = acc(level);
    double halfw = std::sqrt(std::max(rem, 0.0)) / diag;
    double mid = center(level) - off / diag;
    long long lo = static_cast<long long>(std::ceil(mid - halfw - 1e-9));
    long long hi = static_cast<long long>(std::floor(mid + halfw + 1e-9));
    for (long long kk = lo; kk <= hi; ++kk) {
      double coord = diag * (static_cast<double>(kk) - center(level)) + off;
      double used = coord * coord;
      if (used > rem + 1e-9) continue;
      if (level == 0) {
        k[0] = kk;
        Eigen::VectorXd x = lattice.shift;
        for (int i = 0; i < n; ++i) x += static_cast<double>(k[i]) * b.col(i);
        sum += f(x);
      } else {
        k[level] = kk;
        Eigen::VectorXd nacc = acc;
        for (int i = 0; i < level; ++i)
          nacc(i) += lt(i, level) * (static_cast<double>(kk) - center(level));
        rec(level - 1, rem - used, nacc);
      }
    }
  };
  rec(n - 1, bound, Eigen::VectorXd::Zero(n));
  return sum;
}

SiegelAverage siegel_average(const TestFunction& f, const FullLattice& homogeneous,
                             long long num_shifts, uint64_t seed, const Pool& pool) {
  if (num_shifts < 1) throw std::invalid_argument("siegel_average: num_shifts >= 1");
  int n = static_cast<int>(homogeneous.basis.cols());
  std::vector<double> vals(num_shifts);
  pool.run_chunks(num_shifts, [&](int64_t i) {
    CounterRng rng(seed, static_cast<uint64_t>(i));
    Eigen::VectorXd u(n);
    for (int j = 0; j < n; ++j) u(j) = rng.next_unit();
    FullLattice l = homogeneous;
    l.shift = homogeneous.basis * u;
    vals[i] = theta_transform(f, l);
  });
  SiegelAverage out;
  out.shifts = num_shifts;
  out.seed = seed;
  double s = 0;
  for (double v : vals) s += v;
  out.mean = s / static_cast<double>(num_shifts);
  double ss = 0;
  for (double v : vals) ss += (v - out.mean) * (v - out.mean);
  out.std_error = num_shifts > 1
                      ? std::sqrt(ss / (static_cast<double>(num_shifts) *
                                        static_cast<double>(num_shifts - 1)))
                      : 0.0;
  out.exact = f.exact_integral() / homogeneous.covol();
  return out;
}

AlphaResult alpha_i(const FullLattice& lattice, int i, long long search_cap) {
  int n = static_cast<int>(lattice.basis.cols());
  if (i < 1 || i > n) throw std::invalid_argument("alpha_i: 1 <= i <= n");
  AlphaResult out;
  if (i == n) {
    out.min_covol = lattice.covol();
    out.value = 1.0 / out.min_covol;
    out.saturated = true;
    return out;
  }

  // exact Gram of the (dyadic-rational) basis columns
  QMat g = qmat(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      Rat s(0);
      for (int k = 0; k < n; ++k)
        s += rat_of_double(lattice.basis(k, r)) * rat_of_double(lattice.basis(k, c));
      g[r][c] = s;
    }

  double l1 = lambda1_f(lattice.basis);
  Rat bound = rat_of_double(l1 * l1 * 1.05);
  std::vector<ZVec> vecs;
  int needed = std::max(2 * i + 2, 8);
  for (int grow = 0; grow < 24; ++grow) {
    vecs = short_vectors(g, bound, 20'000'000);
    if (static_cast<int>(vecs.size()) >= needed &&
        bound >= rat_of_double(l1 * l1 * static_cast<double>(search_cap)))
      break;
    bound *= 2;
  }
  size_t kmax = std::min<size_t>(vecs.size(), 40);

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(i);
  std::vector<int> best_idx;
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == i) {
      QMat sub = qmat(i, i);
      for (int r = 0; r < i; ++r)
        for (int c = 0; c < i; ++c) {
          Rat s(0);
          for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) sub[r][c] += Rat(vecs[idx[r]][u]) * g[u][v] * Rat(vecs[idx[c]][v]);
        }
      Rat det = det_q(sub);
      if (det <= 0) return;
      double cv = std::sqrt(to_double(det));
      if (cv < best) {
        best = cv;
        best_idx = idx;
      }
      return;
    }
    for (int k = start; k < static_cast<int>(kmax); ++k) {
      idx[pos] = k;
      rec(pos + 1, k + 1);
    }
  };
  rec(0, 0);
  if (best_idx.empty()) throw std::runtime_error("alpha_i: no independent tuple found");

  // saturate the best span: covol can only drop
  ZMat c = zmat(i, n);
  for (int r = 0; r < i; ++r) c[r] = vecs[best_idx[r]];
  ZMat sat = kernel_basis(kernel_basis(c));
  if (static_cast<int>(sat.size()) == i) {
    QMat sub = qmat(i, i);
    for (int r = 0; r < i; ++r)
      for (int cc = 0; cc < i; ++cc) {
        Rat s(0);
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < n; ++v) s += Rat(sat[r][u]) * g[u][v] * Rat(sat[cc][v]);
        sub[r][cc] = s;
      }
    Rat det = det_q(sub);
    if (det > 0) best = std::min(best, std::sqrt(to_double(det)));
  }

  out.min_covol = best;
  out.value = 1.0 / best;
  double worst_used = 0;
  for (int r : best_idx) worst_used = std::max(worst_used, to_double(Rat(z_dot(vecs[r], vecs[r]))));
  // crude interior test: the chosen vectors sit well inside the search ball
  out.saturated = worst_used * 2 <= to_double(bound);
  return out;
}

double alpha_max(const FullLattice& lattice, long long search_cap) {
  int n = static_cast<int>(lattice.basis.cols());
  double best = 0;
  for (int i = 1; i < n; ++i) best = std::max(best, alpha_i(lattice, i, search_cap).value);
  return best;
}

LipschitzCheck lipschitz_check(const TestFunction& f, const FullLattice& lattice) {
  LipschitzCheck out;
  out.theta = theta_transform(f, lattice);
  out.alpha = alpha_max(lattice);
  out.ratio = out.theta / std::max(out.alpha, 1e-300);
  return out;
}

double orbit_alpha_moment(const FullLattice& lattice, int i, double s, double t, int m,
                          OrbitSignature sig, const Pool& pool) {
  int n = static_cast<int>(lattice.basis.cols());
  if (sig == OrbitSignature::Sig22 && n != 4)
    throw std::invalid_argument("orbit_alpha_moment: signature 22 needs dimension 4");
  if (sig == OrbitSignature::Sig21 && n != 3)
    throw std::invalid_argument("orbit_alpha_moment: signature 21 needs dimension 3");
  if (m < 1) throw std::invalid_argument("orbit_alpha_moment: m >= 1");

  if (sig == OrbitSignature::Sig22) {
    Eigen::Matrix4d at = at_matrix_22(t);
    std::vector<double> row_sums(m, 0.0);
    pool.run_chunks(m, [&](int64_t j) {
      double theta = 2 * kPi * (static_cast<double>(j) + 0.5) / m;
      double acc = 0;
      for (int k = 0; k < m; ++k) {
        double phi = 2 * kPi * (k + 0.5) / m;
        Eigen::Matrix4d gk = at * k_matrix_22(theta, phi);
        Eigen::MatrixXd nb = gk * lattice.basis;
        acc += std::pow(alpha_i_float(nb, i), s);
      }
      row_sums[j] = acc;
    });
    double total = 0;
    for (double v : row_sums) total += v;
    return total / (static_cast<double>(m) * m);
  }

  Eigen::Matrix3d at = at_matrix_21(t);
  std::vector<double> vals(m, 0.0);
  pool.run_chunks(m, [&](int64_t j) {
    double theta = 2 * kPi * (static_cast<double>(j) + 0.5) / m;
    Eigen::Matrix3d gk = at * k_matrix_21(theta);
    Eigen::MatrixXd nb = gk * lattice.basis;
    vals[j] = std::pow(alpha_i_float(nb, i), s);
  });
  double total = 0;
  for (double v : vals) total += v;
  return total / m;
}

MomentSweep orbit_moment_sweep(const FullLattice& lattice, int i, double s,
                               const std::vector<double>& t_grid, int m, OrbitSignature sig,
                               const Pool& pool) {
  MomentSweep out;
  out.t_grid = t_grid;
  for (double t : t_grid) out.moments.push_back(orbit_alpha_moment(lattice, i, s, t, m, sig, pool));
  std::vector<double> lm;
  for (double v : out.moments) lm.push_back(std::log(std::max(v, 1e-300)));
  out.slope = fit_slope(t_grid, lm);
  return out;
}

ShrinkProfile shrink_profile(const RationalSubspace& l, const FullLattice& lattice,
                             const std::vector<double>& t_grid,
                             const std::vector<double>& delta_grid, int m, const Pool& pool) {
  if (static_cast<int>(lattice.basis.cols()) != 4)
    throw std::invalid_argument("shrink_profile: dimension 4 only");
  ZVec wz = l.wedge.size() == 6 ? l.wedge : wedge2(l.basis[0], l.basis[1]);
  Eigen::Matrix<double, 6, 1> v;
  for (int i = 0; i < 6; ++i) v(i) = wz[i].get_d();
  v /= v.norm();  // scale-free profile

  ShrinkProfile out;
  for (double t : t_grid) {
    Eigen::Matrix4d at = at_matrix_22(t);
    std::vector<std::vector<double>> norms(m, std::vector<double>(m));
    pool.run_chunks(m, [&](int64_t j) {
      double theta = 2 * kPi * (static_cast<double>(j) + 0.5) / m;
      for (int k = 0; k < m; ++k) {
        double phi = 2 * kPi * (k + 0.5) / m;
        Eigen::Matrix<double, 6, 6> lt = lambda2_matrix_d(at * k_matrix_22(theta, phi));
        norms[j][k] = (lt * v).norm();
      }
    });
    for (double delta : delta_grid) {
      ShrinkRow row;
      row.t = t;
      row.delta = delta;
      long long hits = 0;
      for (int j = 0; j < m; ++j) {
        double theta = 2 * kPi * (j + 0.5) / m;
        for (int k = 0; k < m; ++k) {
          double phi = 2 * kPi * (k + 0.5) / m;
          if (norms[j][k] < delta) {
            if (row.empty) {
              row.theta_min = row.theta_max = theta;
              row.phi_min = row.phi_max = phi;
              row.empty = false;
            } else {
              row.theta_min = std::min(row.theta_min, theta);
              row.theta_max = std::max(row.theta_max, theta);
              row.phi_min = std::min(row.phi_min, phi);
              row.phi_max = std::max(row.phi_max, phi);
            }
            ++hits;
          }
        }
      }
      row.measure = static_cast<double>(hits) / (static_cast<double>(m) * m);
      out.rows.push_back(row);
    }
  }

  // exponent in t at the largest delta, exponent in delta at the smallest t
  double dref = *std::max_element(delta_grid.begin(), delta_grid.end());
  double tref = *std::min_element(t_grid.begin(), t_grid.end());
  std::vector<double> ts, lms, lds, lms2;
  for (const ShrinkRow& r : out.rows) {
    if (r.measure <= 0) continue;
    if (r.delta == dref) {
      ts.push_back(r.t);
      lms.push_back(std::log(r.measure));
    }
    if (r.t == tref) {
      lds.push_back(std::log(r.delta));
      lms2.push_back(std::log(r.measure));
    }
  }
  bool okT = ts.size() >= 2, okD = lds.size() >= 2;
  if (okT) out.t_exponent = -fit_slope(ts, lms);
  if (okD) out.delta_exponent = fit_slope(lds, lms2);
  out.fits_valid = okT && okD;
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = static_cast<int>(x.size());
  if (n < 2) return 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-12) return 0;
  return (n * sxy - sx * sy) / den;
}

}  // namespace qflab
