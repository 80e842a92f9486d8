#pragma once

#include <Eigen/Dense>

#include "qflab/rng.hpp"
#include "qflab/subspaces.hpp"
#include "qflab/threadpool.hpp"

namespace qflab {

struct FullLattice {
  Eigen::MatrixXd basis;   // columns generate the lattice
  Eigen::VectorXd shift;   // xi; zero for homogeneous lattices
  static FullLattice integer_lattice(int n);
  double covol() const;    // |det basis|
  bool unimodular() const; // within 1e-12
};

enum class TestKind { RadialStep, Box, RadialTent };

struct TestFunction {
  TestKind kind = TestKind::RadialStep;
  int n = 4;
  double radius = 1;                // RadialStep / RadialTent
  std::vector<double> halfwidths;   // Box
  double scale = 1;                 // multiplies f
  double operator()(const Eigen::VectorXd& x) const;
  double support_radius() const;    // Euclidean bound on the support
  double exact_integral() const;    // closed form
  static TestFunction radial_step(int n, double r, double scale = 1);
  static TestFunction box(const std::vector<double>& halfwidths, double scale = 1);
  static TestFunction radial_tent(int n, double r, double scale = 1);
};

// sum of f over the points of basis*Z^n + shift inside the support; the
// origin counts when the shift is zero.  Enumeration over the LLL-reduced
// basis; throws CapExceeded past the node cap.
double theta_transform(const TestFunction& f, const FullLattice& lattice,
                       long long node_cap = 10'000'000);

struct SiegelAverage {
  double mean = 0, std_error = 0, exact = 0;
  long long shifts = 0;
  uint64_t seed = 0;
};
// averages theta_transform over shifts uniform in the fundamental
// parallelepiped of the homogeneous part; num_shifts >= 1000
SiegelAverage siegel_average(const TestFunction& f, const FullLattice& homogeneous,
                             long long num_shifts, uint64_t seed,
                             const Pool& pool = Pool::serial());

struct AlphaResult {
  double value = 0;       // certified lower bound for alpha_i
  double min_covol = 0;
  bool saturated = false; // minimizer interior to the search box
};
// alpha_i = sup over rational i-dim subspaces L of 1/covol(L cap Delta),
// searched over i-tuples of short lattice vectors with coefficient box
// bounded by search_cap.  alpha_{n-1} cross-checked against the dual
// shortest vector in the tests.
AlphaResult alpha_i(const FullLattice& lattice, int i, long long search_cap = 4);
double alpha_max(const FullLattice& lattice, long long search_cap = 4);

struct LipschitzCheck {
  double theta = 0, alpha = 0, ratio = 0;
};
LipschitzCheck lipschitz_check(const TestFunction& f, const FullLattice& lattice);

// Riemann midpoint estimate of the K-average of alpha_i^s(a_t k Delta).
// Signature 22 uses the product grid on SO(2)xSO(2) (m x m midpoints,
// m >= 8), signature 21 a single SO(2) grid (m >= 64).
enum class OrbitSignature { Sig22, Sig21 };
double orbit_alpha_moment(const FullLattice& lattice, int i, double s, double t, int m,
                          OrbitSignature sig = OrbitSignature::Sig22,
                          const Pool& pool = Pool::serial());

struct MomentSweep {
  std::vector<double> t_grid;
  std::vector<double> moments;
  double slope = 0;  // fitted slope of log moment vs t
};
MomentSweep orbit_moment_sweep(const FullLattice& lattice, int i, double s,
                               const std::vector<double>& t_grid, int m,
                               OrbitSignature sig = OrbitSignature::Sig22,
                               const Pool& pool = Pool::serial());

struct ShrinkRow {
  double t = 0, delta = 0;
  double measure = 0;  // Haar-probability fraction of the k-grid
  double theta_min = 0, theta_max = 0, phi_min = 0, phi_max = 0;
  bool empty = true;
};
struct ShrinkProfile {
  std::vector<ShrinkRow> rows;
  double t_exponent = 0;      // fitted exponent of the measure against e^{-t}
  double delta_exponent = 0;  // fitted exponent against delta
  bool fits_valid = false;
};
// measures {k : ||Lambda^2(a_t k) v^L|| < delta} on the midpoint grid for
// every (t, delta) pair and fits the two exponents on the nonempty rows
ShrinkProfile shrink_profile(const RationalSubspace& l, const FullLattice& lattice,
                             const std::vector<double>& t_grid,
                             const std::vector<double>& delta_grid, int m,
                             const Pool& pool = Pool::serial());

// least-squares slope of y against x; used by the sweep fits
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qflab
