#include "qflab/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace qflab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double Torus::covol() const {
  Rat d = det_q(basis);
  return std::abs(to_double(d));
}

QMat dual_lattice(const Torus& t) { return inverse_q(q_transpose(t.basis)); }

FluxSpectrum eigenvalues(const Torus& t, double lambda_max, const Pool& pool) {
  if (!(lambda_max > 0)) throw std::invalid_argument("eigenvalues: lambda_max > 0 required");
  QMat wq = dual_lattice(t);
  Eigen::Matrix2d w;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) w(i, j) = to_double(wq[i][j]);
  Eigen::Vector2d alpha(t.flux[0].d, t.flux[1].d);
  double r = std::sqrt(lambda_max) / (2 * kPi);

  // k-ranges from the columns of W^{-1}: |k_i| <= ||col_i|| (r + ||alpha||)
  Eigen::Matrix2d winv = w.inverse();
  double reach = r + alpha.norm() + 1e-9;
  long long k1 = static_cast<long long>(std::floor(winv.col(0).norm() * reach)) + 1;
  long long k2 = static_cast<long long>(std::floor(winv.col(1).norm() * reach)) + 1;

  FluxSpectrum s;
  s.cutoff = lambda_max;
  s.weyl_c = t.covol() / (4 * kPi);
  int64_t slabs = 2 * k1 + 1;
  std::vector<std::vector<double>> slot(slabs);
  pool.run_chunks(slabs, [&](int64_t si) {
    long long a1 = si - k1;
    std::vector<double>& vals = slot[si];
    for (long long a2 = -k2; a2 <= k2; ++a2) {
      double x = a1 * w(0, 0) + a2 * w(1, 0) + alpha(0);
      double y = a1 * w(0, 1) + a2 * w(1, 1) + alpha(1);
      double lam = 4 * kPi * kPi * (x * x + y * y);
      if (lam <= lambda_max) vals.push_back(lam);
    }
  });
  for (const auto& v : slot) s.values.insert(s.values.end(), v.begin(), v.end());
  std::sort(s.values.begin(), s.values.end());
  return s;
}

double pair_correlation(const FluxSpectrum& s, double a, double b, double T) {
  if (!(a <= b)) throw std::invalid_argument("pair_correlation: interval");
  if (a <= 0 && 0 <= b) throw std::invalid_argument("pair_correlation: window must exclude 0");
  if (!(T > 0) || T > s.cutoff)
    throw std::invalid_argument("pair_correlation: T must lie within the computed spectrum");
  auto endT = std::lower_bound(s.values.begin(), s.values.end(), T);
  long long pairs = 0;
  for (auto it = s.values.begin(); it != endT; ++it) {
    auto lo = std::lower_bound(s.values.begin(), endT, *it - b);
    auto hi = std::upper_bound(s.values.begin(), endT, *it - a);
    pairs += hi - lo;
  }
  return static_cast<double>(pairs) / T;
}

WeylCheck weyl_check(const FluxSpectrum& s, double T) {
  if (!(T > 0) || T > s.cutoff) throw std::invalid_argument("weyl_check: T beyond cutoff");
  WeylCheck out;
  out.count = std::lower_bound(s.values.begin(), s.values.end(), T) - s.values.begin();
  out.c_hat = static_cast<double>(out.count) / T;
  out.c_theory = s.weyl_c;
  return out;
}

SpectralForm to_inhomogeneous_form(const Torus& t) {
  QMat wq = dual_lattice(t);
  Eigen::Matrix2d w;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) w(i, j) = to_double(wq[i][j]);
  SpectralForm sf;
  sf.gram = 4 * kPi * kPi * w * w.transpose();

  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<2, 2>() = sf.gram;
  m.bottomRightCorner<2, 2>() = -sf.gram;
  sf.form.Q = SymmetricForm::from_double(m);

  // beta W = alpha; exact when the flux is rational
  bool exact = t.flux[0].rational && t.flux[1].rational;
  std::vector<Scalar> beta(2);
  if (exact) {
    QMat winv = inverse_q(wq);
    QVec av = {t.flux[0].q, t.flux[1].q};
    // row vector alpha times W^{-1}
    for (int j = 0; j < 2; ++j) beta[j] = Scalar(av[0] * winv[0][j] + av[1] * winv[1][j]);
  } else {
    Eigen::RowVector2d av(t.flux[0].d, t.flux[1].d);
    Eigen::RowVector2d bd = av * w.inverse();
    beta[0] = Scalar::irrational(bd(0));
    beta[1] = Scalar::irrational(bd(1));
  }
  sf.form.xi = {beta[0], beta[1], beta[0], beta[1]};

  SymmetricForm blk = SymmetricForm::from_double(sf.gram);
  sf.region = StarRegion::max_split(blk, blk);
  return sf;
}

std::vector<BerryTaborRow> berry_tabor_table(const Torus& t, double a, double b,
                                             const std::vector<double>& t_grid, const Pool& pool) {
  if (t_grid.empty()) throw std::invalid_argument("berry_tabor_table: empty grid");
  double tmax = *std::max_element(t_grid.begin(), t_grid.end());
  FluxSpectrum s = eigenvalues(t, tmax, pool);
  double target = s.weyl_c * s.weyl_c * (b - a);
  std::vector<BerryTaborRow> rows;
  for (double T : t_grid) {
    BerryTaborRow row;
    row.T = T;
    row.R = pair_correlation(s, a, b, T);
    row.pairs = static_cast<long long>(std::llround(row.R * T));
    row.target = target;
    row.deviation = std::abs(row.R / target - 1);
    rows.push_back(row);
  }
  return rows;
}

CoefficientConditionReport coefficient_condition(const Torus& t, double big_n, double c,
                                                 long long q_max) {
  if (q_max < 2) throw std::invalid_argument("coefficient_condition: q_max >= 2");
  QMat wq = dual_lattice(t);
  Eigen::Matrix2d w;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) w(i, j) = to_double(wq[i][j]);
  Eigen::Matrix2d g = w * w.transpose();  // the 4 pi^2 factor cancels in the ratios
  CoefficientConditionReport rep;
  rep.a1 = 2 * g(0, 1) / g(0, 0);
  rep.a2 = g(1, 1) / g(0, 0);
  rep.holds_at_scale = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (long long q = 2; q <= q_max; ++q) {
    double d1 = std::abs(rep.a1 * q - std::round(rep.a1 * q)) / q;
    double d2 = std::abs(rep.a2 * q - std::round(rep.a2 * q)) / q;
    double m = std::max(d1, d2);
    double margin = m * std::pow(static_cast<double>(q), big_n) / c;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin <= 1 && rep.holds_at_scale) {
      rep.holds_at_scale = false;
      rep.first_violation_q = q;
    }
  }
  return rep;
}

}  // namespace qflab
