#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qflab/latgeo.hpp"

using namespace qflab;

namespace {

constexpr double kPi = 3.14159265358979323846;

FullLattice surd_lattice() {
  FullLattice l = FullLattice::integer_lattice(4);
  double s2 = std::sqrt(2.0) - 1, s3 = std::sqrt(3.0) - 1, s5 = std::sqrt(5.0) - 2,
         s7 = std::sqrt(7.0) - 2;
  l.basis << 1, s2, s3, s5,
             0, 1, s7, 0.5 * s2,
             0, 0, 1, 0.5 * s3,
             0, 0, 0, 1;
  return l;
}

}  // namespace

TEST_CASE("test function conventions") {
  TestFunction step = TestFunction::radial_step(4, 2.0, 3.0);
  CHECK(step.support_radius() == 2.0);
  CHECK(step.exact_integral() == doctest::Approx(3.0 * kPi * kPi / 2 * 16).epsilon(1e-12));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  CHECK(step(x) == 3.0);
  x(0) = 2.0;  // boundary included
  CHECK(step(x) == 3.0);
  x(0) = 2.0 + 1e-12;
  CHECK(step(x) == 0.0);

  TestFunction bx = TestFunction::box({1.5, 2.5, 0.5, 3.5}, 2.0);
  CHECK(bx.n == 4);
  CHECK(bx.support_radius() == doctest::Approx(std::sqrt(1.5 * 1.5 + 2.5 * 2.5 + 0.25 + 3.5 * 3.5)));
  CHECK(bx.exact_integral() == doctest::Approx(2.0 * 3 * 5 * 1 * 7).epsilon(1e-12));
  Eigen::VectorXd c(4);
  c << 1.5, -2.5, 0.5, 3.5;  // corner included
  CHECK(bx(c) == 2.0);
  c(2) = 0.51;
  CHECK(bx(c) == 0.0);

  TestFunction tent = TestFunction::radial_tent(3, 2.0, 5.0);
  CHECK(tent.exact_integral() == doctest::Approx(5.0 * (4.0 / 3) * kPi * 8 / 4).epsilon(1e-12));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
  CHECK(tent(y) == 5.0);
  y(0) = 1.0;
  CHECK(tent(y) == doctest::Approx(2.5).epsilon(1e-12));
  y(0) = 2.0;
  CHECK(tent(y) == 0.0);
}

TEST_CASE("theta transform counts ball and box points on the integer lattice") {
  FullLattice z4 = FullLattice::integer_lattice(4);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  for (double r : {1.5, 2.5, 3.0}) {
    TestFunction f = TestFunction::radial_step(4, r);
    double theta = theta_transform(f, z4);
    CHECK(theta == static_cast<double>(oracle::lattice_points_in_ball(id, zero, r, 5)));
  }
  // |x1|<=1.5, |x2|<=2.5, |x3|<=0.5, |x4|<=3.5 holds 3*5*1*7 integer points
  TestFunction bx = TestFunction::box({1.5, 2.5, 0.5, 3.5}, 2.5);
  CHECK(theta_transform(bx, z4) == doctest::Approx(2.5 * 105).epsilon(1e-12));
}

TEST_CASE("theta transform on a skew shifted lattice matches brute summation") {
  FullLattice l = surd_lattice();
  l.shift << 0.3, -0.2, 0.15, 0.05;
  TestFunction tent = TestFunction::radial_tent(4, 2.0, 1.7);
  double theta = theta_transform(tent, l);
  double brute = 0;
  Eigen::VectorXd x(4);
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b)
      for (int c = -6; c <= 6; ++c)
        for (int d = -6; d <= 6; ++d) {
          x = l.shift + a * l.basis.col(0) + b * l.basis.col(1) + c * l.basis.col(2) +
              d * l.basis.col(3);
          brute += tent(x);
        }
  CHECK(theta == doctest::Approx(brute).epsilon(1e-9));
  CHECK(theta > 0);

  TestFunction step = TestFunction::radial_step(4, 2.2);
  Eigen::VectorXd shift = l.shift;
  CHECK(theta_transform(step, l) ==
        static_cast<double>(oracle::lattice_points_in_ball(l.basis, shift, 2.2, 7)));
}

TEST_CASE("origin counts once and the node cap trips") {
  FullLattice z4 = FullLattice::integer_lattice(4);
  TestFunction tiny = TestFunction::radial_step(4, 1e-6);
  CHECK(theta_transform(tiny, z4) == 1.0);
  TestFunction big = TestFunction::radial_step(4, 6.0);
  CHECK_THROWS_AS(theta_transform(big, z4, 3), CapExceeded);
}

TEST_CASE("siegel average is unbiased and deterministic") {
  FullLattice z4 = FullLattice::integer_lattice(4);
  TestFunction f = TestFunction::radial_step(4, 2.0);
  SiegelAverage a = siegel_average(f, z4, 1000, 42);
  CHECK(a.exact == doctest::Approx(f.exact_integral()).epsilon(1e-12));
  CHECK(a.shifts == 1000);
  CHECK(a.std_error > 0);
  CHECK(std::abs(a.mean - a.exact) <= 3 * a.std_error);

  SiegelAverage b = siegel_average(f, z4, 1000, 42);
  CHECK(a.mean == b.mean);
  Pool pool(3);
  SiegelAverage par = siegel_average(f, z4, 1000, 42, pool);
  CHECK(par.mean == a.mean);
  SiegelAverage other = siegel_average(f, z4, 1000, 1042);
  CHECK(other.mean != a.mean);
  CHECK(std::abs(other.mean - a.exact) <= 3 * other.std_error);

  // covolume divides the expected value
  FullLattice stretched = FullLattice::integer_lattice(4);
  stretched.basis(3, 3) = 2.0;
  SiegelAverage s = siegel_average(f, stretched, 1200, 7);
  CHECK(s.exact == doctest::Approx(f.exact_integral() / 2).epsilon(1e-12));
  CHECK(std::abs(s.mean - s.exact) <= 3 * s.std_error);

  CHECK_THROWS_AS(siegel_average(f, z4, 0, 1), std::invalid_argument);
}

TEST_CASE("alpha of the integer lattice is one in every rank") {
  FullLattice z4 = FullLattice::integer_lattice(4);
  for (int i = 1; i <= 4; ++i) {
    AlphaResult a = alpha_i(z4, i);
    CHECK(a.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.min_covol == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(alpha_i(z4, 4).saturated);
  CHECK(alpha_max(z4) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(alpha_i(z4, 0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_i(z4, 5), std::invalid_argument);
}

TEST_CASE("alpha picks the thin sublattices of a stretched lattice") {
  FullLattice l = FullLattice::integer_lattice(4);
  l.basis.diagonal() << 0.5, 2.0, 1.0, 1.0;
  // minimal covolumes: 1/2 from e1, 1/2 from {e1,e3}, 1/2 from {e1,e3,e4}
  for (int i = 1; i <= 3; ++i) {
    AlphaResult a = alpha_i(l, i);
    CHECK(a.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(a.min_covol == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(alpha_i(l, 4).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(alpha_max(l) == doctest::Approx(2.0).epsilon(1e-12));

  // rank 1 against the direct shortest vector, rank 3 against the dual
  CHECK(alpha_i(l, 1).value == doctest::Approx(1.0 / oracle::shortest_vector(l.basis, 3)));
  Eigen::MatrixXd dual = oracle::dual_basis(l.basis);
  CHECK(alpha_i(l, 3).value ==
        doctest::Approx(1.0 / (oracle::shortest_vector(dual, 3) * l.covol())));
  CHECK(l.covol() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l.unimodular());
}

TEST_CASE("lipschitz check wires theta against alpha") {
  FullLattice z4 = FullLattice::integer_lattice(4);
  TestFunction f = TestFunction::radial_step(4, 2.0);
  LipschitzCheck c = lipschitz_check(f, z4);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  double count = static_cast<double>(oracle::lattice_points_in_ball(id, zero, 2.0, 3));
  CHECK(c.theta == count);
  CHECK(c.alpha == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.ratio == doctest::Approx(count).epsilon(1e-12));
}

TEST_CASE("orbit moments respect the group conventions") {
  FullLattice z4 = FullLattice::integer_lattice(4);
  // t = 0: a_0 k is orthogonal, alpha_1 of a rotated Z^4 stays 1
  CHECK(orbit_alpha_moment(z4, 1, 1.5, 0.0, 8) == doctest::Approx(1.0).epsilon(1e-9));
  // i = 4 reads the covolume, invariant along the whole orbit
  CHECK(orbit_alpha_moment(z4, 4, 2.0, 2.5, 8) == doctest::Approx(1.0).epsilon(1e-9));

  FullLattice z3 = FullLattice::integer_lattice(3);
  CHECK(orbit_alpha_moment(z3, 1, 1.5, 1.0, 16, OrbitSignature::Sig21) > 0);
  CHECK_THROWS_AS(orbit_alpha_moment(z3, 1, 1.5, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(orbit_alpha_moment(z4, 1, 1.5, 1.0, 8, OrbitSignature::Sig21),
                  std::invalid_argument);
  CHECK_THROWS_AS(orbit_alpha_moment(z4, 1, 1.5, 1.0, 0), std::invalid_argument);
}

TEST_CASE("split rational moments grow along the flow") {
  FullLattice z4 = FullLattice::integer_lattice(4);
  MomentSweep sweep = orbit_moment_sweep(z4, 2, 1.5, {1, 2, 3, 4}, 48);
  REQUIRE(sweep.moments.size() == 4);
  CHECK(sweep.t_grid.size() == 4);
  for (double m : sweep.moments) CHECK(m > 0);
  CHECK(sweep.slope > 0.1);
}

TEST_CASE("shrink profile of a contracting plane") {
  RationalSubspace plane;
  plane.ambient = 4;
  plane.basis = {{1, 0, 0, 0}, {0, 1, 0, 0}};  // e1 ^ e2 contracts like e^{-t}
  FullLattice z4 = FullLattice::integer_lattice(4);
  std::vector<double> ts = {1.5, 2.5}, ds = {0.5, 1.5};
  ShrinkProfile p = shrink_profile(plane, z4, ts, ds, 40);
  REQUIRE(p.rows.size() == 4);
  for (const ShrinkRow& r : p.rows) {
    CHECK(r.measure >= 0);
    CHECK(r.measure <= 1);
    CHECK(r.empty == (r.measure == 0));
    if (!r.empty) {
      CHECK(r.theta_min >= 0);
      CHECK(r.theta_max <= 2 * kPi);
      CHECK(r.phi_min >= 0);
      CHECK(r.phi_max <= 2 * kPi);
      CHECK(r.theta_min <= r.theta_max);
      CHECK(r.phi_min <= r.phi_max);
    }
  }
  // measure is monotone in delta at fixed t
  auto measure_at = [&](double t, double d) {
    for (const ShrinkRow& r : p.rows)
      if (r.t == t && r.delta == d) return r.measure;
    return -1.0;
  };
  for (double t : ts) CHECK(measure_at(t, 0.5) <= measure_at(t, 1.5));
  CHECK(measure_at(1.5, 1.5) > 0);
  CHECK(p.fits_valid);
  CHECK(p.t_exponent > 0);
  CHECK(p.delta_exponent >= 0);

  FullLattice z3 = FullLattice::integer_lattice(3);
  CHECK_THROWS_AS(shrink_profile(plane, z3, ts, ds, 8), std::invalid_argument);
}
