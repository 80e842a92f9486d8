#pragma once

#include <Eigen/Dense>

#include "qflab/regions.hpp"
#include "qflab/threadpool.hpp"

namespace qflab {

struct Torus {
  QMat basis;              // 2x2, rows generate the lattice
  std::vector<Scalar> flux;  // alpha in R^2
  double covol() const;
};

QMat dual_lattice(const Torus& t);  // rows w_i with <w_i, basis_j> = delta_ij

struct FluxSpectrum {
  std::vector<double> values;  // sorted ascending
  double cutoff = 0;
  double weyl_c = 0;  // covol / (4 pi)
};

// all eigenvalues 4 pi^2 ||w + alpha||^2 <= lambda_max, w in the dual lattice
FluxSpectrum eigenvalues(const Torus& t, double lambda_max, const Pool& pool = Pool::serial());

// ordered pairs (j,k), lambda_j < T, lambda_k < T, a <= lambda_j - lambda_k <= b,
// divided by T.  Requires 0 outside [a,b] and T <= spectrum cutoff.
double pair_correlation(const FluxSpectrum& s, double a, double b, double T);

struct WeylCheck {
  long long count = 0;
  double c_hat = 0, c_theory = 0;
};
WeylCheck weyl_check(const FluxSpectrum& s, double T);

// Q(x1..x4) = B(x1,x2) - B(x3,x4) with B = 4 pi^2 || x1 w1 + x2 w2 ||^2,
// xi = (beta, beta) solving beta W = alpha, Omega = the max-split region with
// both blocks B.  Q_xi at integer points gives eigenvalue differences and
// x in sqrt(T) Omega corresponds to both eigenvalues below T.
struct SpectralForm {
  InhomForm form;
  StarRegion region;
  Eigen::Matrix2d gram;  // 4 pi^2 W W^T
};
SpectralForm to_inhomogeneous_form(const Torus& t);

struct BerryTaborRow {
  double T = 0;
  long long pairs = 0;
  double R = 0;
  double target = 0;    // c^2 (b - a)
  double deviation = 0; // |R/target - 1|
};
std::vector<BerryTaborRow> berry_tabor_table(const Torus& t, double a, double b,
                                             const std::vector<double>& t_grid,
                                             const Pool& pool = Pool::serial());

struct CoefficientConditionReport {
  double a1 = 0, a2 = 0;  // B coefficients normalized by the x1^2 coefficient
  bool holds_at_scale = false;
  long long first_violation_q = 0;
  double worst_margin = 0;  // min over q of (q^N max_i |A_i - p_i/q|) / C
};

// scans q in [2, q_max]: condition max_i |A_i - p_i/q| > C / q^N for the
// nearest integers p_i; reports the first violation or pass-at-scale
CoefficientConditionReport coefficient_condition(const Torus& t, double big_n, double c,
                                                 long long q_max);

}  // namespace qflab
