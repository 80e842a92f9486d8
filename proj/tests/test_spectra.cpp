#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qflab/spectra.hpp"

using namespace qflab;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kA1 = 0.41421356237309515;  // sqrt 2 - 1
constexpr double kA2 = 0.7320508075688772;   // sqrt 3 - 1

QMat unit_basis() {
  QMat id = qmat(2, 2);
  id[0][0] = id[1][1] = 1;
  return id;
}

}  // namespace

TEST_CASE("integer torus spectrum matches the direct census") {
  Torus t{unit_basis(), {Scalar(0), Scalar(0)}};
  double cut = 500;
  FluxSpectrum s = eigenvalues(t, cut);
  std::vector<double> direct;
  for (int m = -10; m <= 10; ++m)
    for (int n = -10; n <= 10; ++n) {
      double v = 4 * kPi * kPi * (m * m + n * n);
      if (v <= cut) direct.push_back(v);
    }
  std::sort(direct.begin(), direct.end());
  REQUIRE(s.values.size() == direct.size());
  for (size_t i = 0; i < direct.size(); ++i)
    CHECK(s.values[i] == doctest::Approx(direct[i]).epsilon(1e-12));
  CHECK(s.weyl_c == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-12));
  CHECK(std::is_sorted(s.values.begin(), s.values.end()));
}

TEST_CASE("irrational flux removes the zero mode") {
  Torus t{unit_basis(), {Scalar::irrational(kA1), Scalar::irrational(kA2)}};
  FluxSpectrum s = eigenvalues(t, 2000);
  REQUIRE(!s.values.empty());
  CHECK(s.values.front() > 0);
  // each eigenvalue is 4 pi^2 ||w + alpha||^2 for some integer w
  for (size_t i = 0; i < std::min<size_t>(s.values.size(), 10); ++i) {
    double r = std::sqrt(s.values[i]) / (2 * kPi);
    bool found = false;
    for (int m = -30; m <= 30 && !found; ++m)
      for (int n = -30; n <= 30 && !found; ++n)
        if (std::abs(std::hypot(m + kA1, n + kA2) - r) < 1e-9) found = true;
    CHECK(found);
  }
}

TEST_CASE("weyl law constant") {
  Torus t{unit_basis(), {Scalar::irrational(kA1), Scalar::irrational(kA2)}};
  double cut = 4e4;
  FluxSpectrum s = eigenvalues(t, cut);
  WeylCheck w = weyl_check(s, cut);
  CHECK(w.count == static_cast<long long>(s.values.size()));
  CHECK(w.c_theory == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-12));
  CHECK(w.c_hat == doctest::Approx(w.c_theory).epsilon(0.02));
}

TEST_CASE("pair correlation equals the quadratic oracle") {
  Torus t{unit_basis(), {Scalar::irrational(kA1), Scalar::irrational(kA2)}};
  FluxSpectrum s = eigenvalues(t, 3e3);
  double r = pair_correlation(s, 0.1, 1.1, 3e3);
  CHECK(r == doctest::Approx(oracle::pair_correlation_n2(s.values, 0.1, 1.1, 3e3)).epsilon(1e-12));
  double r2 = pair_correlation(s, -2.0, -0.5, 2500);
  CHECK(r2 == doctest::Approx(oracle::pair_correlation_n2(s.values, -2.0, -0.5, 2500)).epsilon(1e-12));
}

TEST_CASE("pair correlation rejects bad windows and deep cutoffs") {
  Torus t{unit_basis(), {Scalar::irrational(0.3), Scalar::irrational(0.6)}};
  FluxSpectrum s = eigenvalues(t, 1000);
  CHECK_THROWS_AS(pair_correlation(s, -0.5, 0.5, 900), std::invalid_argument);
  CHECK_THROWS_AS(pair_correlation(s, 1.1, 0.1, 900), std::invalid_argument);
  CHECK_THROWS_AS(pair_correlation(s, 0.1, 1.1, 2000), std::invalid_argument);
}

TEST_CASE("dual lattice pairs integrally with the basis") {
  Torus t;
  t.basis = qmat(2, 2);
  t.basis[0] = {Rat(2), Rat(1)};
  t.basis[1] = {Rat(0), Rat(3)};
  t.flux = {Scalar(0), Scalar(0)};
  QMat d = dual_lattice(t);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Rat dot = d[i][0] * t.basis[j][0] + d[i][1] * t.basis[j][1];
      CHECK(dot == (i == j ? Rat(1) : Rat(0)));
    }
  CHECK(t.covol() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("half flux control spectrum has gap multiples of 8 pi^2") {
  // alpha = (1/2, 1/2): eigenvalues pi^2 ((2m+1)^2 + (2n+1)^2)
  Torus t{unit_basis(), {Scalar(Rat(1) / Rat(2)), Scalar(Rat(1) / Rat(2))}};
  FluxSpectrum s = eigenvalues(t, 5000);
  REQUIRE(s.values.size() > 4);
  CHECK(s.values.front() == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
  for (size_t i = 1; i < s.values.size(); ++i) {
    double gap = s.values[i] - s.values[i - 1];
    if (gap > 1e-9) CHECK(gap > 8 * kPi * kPi - 1e-6);
  }
}

TEST_CASE("inhomogeneous form reproduces eigenvalue differences") {
  Torus t;
  t.basis = qmat(2, 2);
  t.basis[0] = {Rat(1), Rat(0)};
  t.basis[1] = {Rat(1) / Rat(3), Rat(1)};
  t.flux = {Scalar::irrational(kA1), Scalar::irrational(kA2)};
  SpectralForm sf = to_inhomogeneous_form(t);
  QMat d = dual_lattice(t);
  auto lam = [&](double j, double k) {
    double wx = to_double(d[0][0]) * j + to_double(d[1][0]) * k + t.flux[0].value();
    double wy = to_double(d[0][1]) * j + to_double(d[1][1]) * k + t.flux[1].value();
    return 4 * kPi * kPi * (wx * wx + wy * wy);
  };
  double x[4] = {2, -1, 1, 3};
  CHECK(evaluate_shifted(sf.form, x) == doctest::Approx(lam(2, -1) - lam(1, 3)).epsilon(1e-9));
  double y[4] = {0, 0, -4, 2};
  CHECK(evaluate_shifted(sf.form, y) == doctest::Approx(lam(0, 0) - lam(-4, 2)).epsilon(1e-9));
  // sqrt(T) Omega admits exactly the points whose homogeneous blocks sit below T
  double T = 600;
  auto lam0 = [&](double j, double k) {
    double wx = to_double(d[0][0]) * j + to_double(d[1][0]) * k;
    double wy = to_double(d[0][1]) * j + to_double(d[1][1]) * k;
    return 4 * kPi * kPi * (wx * wx + wy * wy);
  };
  double in_pt[4] = {1, 0, 0, 1}, out_pt[4] = {1, 0, 4, 0};
  CHECK(lam0(1, 0) < T);
  CHECK(lam0(0, 1) < T);
  CHECK(sf.region.contains(in_pt, std::sqrt(T)));
  CHECK(lam0(4, 0) > T);
  CHECK_FALSE(sf.region.contains(out_pt, std::sqrt(T)));
}

TEST_CASE("berry tabor table approaches the poisson target") {
  Torus t{unit_basis(), {Scalar::irrational(kA1), Scalar::irrational(kA2)}};
  auto rows = berry_tabor_table(t, 0.1, 1.1, {1e5, 1e6});
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.target == doctest::Approx(std::pow(1.0 / (4 * kPi), 2)).epsilon(1e-9));
    CHECK(r.pairs > 0);
    CHECK(r.R == doctest::Approx(static_cast<double>(r.pairs) / r.T).epsilon(1e-9));
  }
  CHECK(rows[1].deviation < 0.1);
}

TEST_CASE("coefficient condition flags rational gram ratios at their denominator") {
  Torus t;
  t.basis = qmat(2, 2);
  t.basis[0] = {Rat(1), Rat(0)};
  t.basis[1] = {Rat(1) / Rat(2), Rat(1)};
  t.flux = {Scalar(0), Scalar(0)};
  // dual W has rows (1,-1/2),(0,1); g = W W^T = [[5/4,-1/2],[-1/2,1]], so the
  // normalized coefficients are a1 = -4/5, a2 = 4/5 with common denominator 5
  CoefficientConditionReport r = coefficient_condition(t, 2.0, 0.05, 2000);
  CHECK(r.a1 == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(r.a2 == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_FALSE(r.holds_at_scale);
  CHECK(r.first_violation_q == 5);
  CHECK(r.worst_margin == doctest::Approx(0.0).epsilon(1e-12));
  // scanning only below the denominator the condition still holds
  CoefficientConditionReport ok = coefficient_condition(t, 2.0, 0.05, 4);
  CHECK(ok.holds_at_scale);
  CHECK(ok.first_violation_q == 0);
  CHECK(ok.worst_margin == doctest::Approx(16.0).epsilon(1e-9));
}
