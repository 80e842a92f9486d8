#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qflab/regions.hpp"

using namespace qflab;

namespace {

InhomForm rational_shifted_b4() {
  return {b4_form(), {Scalar(Rat(1) / Rat(3)), Scalar(0), Scalar(Rat(-2) / Rat(5)), Scalar(0)}};
}

}  // namespace

TEST_CASE("ball membership is strict in exact and float modes") {
  StarRegion b = StarRegion::ball(3, Scalar(1));
  QVec on = {Rat(3), Rat(4), Rat(0)};
  CHECK_FALSE(b.contains_exact(on, Rat(5)));
  CHECK(b.contains_exact(on, Rat(51) / Rat(10)));
  double onf[3] = {3, 4, 0};
  CHECK_FALSE(b.contains(onf, 5.0));
  CHECK(b.contains(onf, 5.1));
  CHECK(b.near_boundary(onf, 5.0, 1e-9));
  CHECK_FALSE(b.near_boundary(onf, 5.1, 1e-9));
}

TEST_CASE("ellipsoid and max split membership match their definitions") {
  SymmetricForm a = SymmetricForm::zero(2, Mode::Exact);
  a.set(0, 0, Scalar(1));
  a.set(1, 1, Scalar(4));
  SymmetricForm b = SymmetricForm::zero(2, Mode::Exact);
  b.set(0, 0, Scalar(2));
  b.set(1, 1, Scalar(1));
  StarRegion ms = StarRegion::max_split(a, b);
  // max(x1^2 + 4 x2^2, 2 x3^2 + x4^2) < T^2
  QVec p = {Rat(1), Rat(1), Rat(1), Rat(1)};
  CHECK(ms.contains_exact(p, Rat(3)));       // max(5,3) = 5 < 9
  CHECK_FALSE(ms.contains_exact(p, Rat(2))); // 5 > 4
  SymmetricForm e = SymmetricForm::zero(3, Mode::Exact);
  e.set(0, 0, Scalar(1));
  e.set(1, 1, Scalar(2));
  e.set(2, 2, Scalar(3));
  StarRegion el = StarRegion::ellipsoid(e);
  QVec q = {Rat(1), Rat(1), Rat(1)};
  CHECK(el.contains_exact(q, Rat(3)));        // 6 < 9
  CHECK_FALSE(el.contains_exact(q, Rat(2)));  // 6 > 4
}

TEST_CASE("nu_max bounds the region") {
  SymmetricForm e = SymmetricForm::zero(3, Mode::Exact);
  e.set(0, 0, Scalar(Rat(1) / Rat(4)));
  e.set(1, 1, Scalar(1));
  e.set(2, 2, Scalar(9));
  StarRegion el = StarRegion::ellipsoid(e);
  // widest direction x1: x1^2/4 < 1 means |x1| < 2
  CHECK(el.nu_max() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("count matches the exact brute force on shifted b4") {
  InhomForm f = rational_shifted_b4();
  StarRegion omega = StarRegion::ball(4, Scalar(1));
  for (long t : {4L, 7L}) {
    CountResult c = count_n(f, omega, Scalar(-1), Scalar(1), Scalar(Rat(t)));
    CHECK(c.exact);
    CHECK(c.n_total == oracle::brute_count_exact(f, omega, Rat(-1), Rat(1), Rat(t)));
  }
}

TEST_CASE("count matches brute force for 2 1 and an ellipsoid region") {
  InhomForm f{standard_21_form(), {Scalar(Rat(1) / Rat(7)), Scalar(Rat(2) / Rat(7)), Scalar(0)}};
  SymmetricForm e = SymmetricForm::zero(3, Mode::Exact);
  e.set(0, 0, Scalar(1));
  e.set(1, 1, Scalar(Rat(1) / Rat(2)));
  e.set(2, 2, Scalar(2));
  e.set(0, 1, Scalar(Rat(1) / Rat(8)));
  StarRegion omega = StarRegion::ellipsoid(e);
  CountResult c = count_n(f, omega, Scalar(Rat(-1) / Rat(2)), Scalar(Rat(3) / Rat(2)),
                          Scalar(Rat(6)));
  CHECK(c.exact);
  CHECK(c.n_total == oracle::brute_count_exact(f, omega, Rat(-1) / Rat(2), Rat(3) / Rat(2), Rat(6)));
}

TEST_CASE("window endpoints are excluded") {
  // Q = x1 x4 - x2 x3 at integers hits every integer; a window whose ends are
  // integers must not count boundary values
  InhomForm f{b4_form(), {Scalar(0), Scalar(0), Scalar(0), Scalar(0)}};
  StarRegion omega = StarRegion::ball(4, Scalar(1));
  CountResult open = count_n(f, omega, Scalar(0), Scalar(2), Scalar(Rat(6)));
  long long direct = oracle::brute_count_exact(f, omega, Rat(0), Rat(2), Rat(6));
  CHECK(open.n_total == direct);
  // widen to capture the endpoint value 2 and both counts must move together
  CountResult wider = count_n(f, omega, Scalar(0), Scalar(Rat(5) / Rat(2)), Scalar(Rat(6)));
  CHECK(wider.n_total == oracle::brute_count_exact(f, omega, Rat(0), Rat(5) / Rat(2), Rat(6)));
  CHECK(wider.n_total > open.n_total);
}

TEST_CASE("interval preconditions") {
  InhomForm f{b4_form(), {Scalar(0), Scalar(0), Scalar(0), Scalar(0)}};
  StarRegion omega = StarRegion::ball(4, Scalar(1));
  CHECK_THROWS_AS(count_n(f, omega, Scalar(1), Scalar(-1), Scalar(Rat(5))),
                  std::invalid_argument);
  CHECK_THROWS_AS(count_n(f, omega, Scalar(0), Scalar(1), Scalar(Rat(-2))),
                  std::invalid_argument);
}

TEST_CASE("irrational data falls back to float counting with flags") {
  InhomForm f{b4_form(),
              {Scalar::irrational(0.41421356237309515), Scalar::irrational(0.7320508075688772),
               Scalar(0), Scalar(0)}};
  StarRegion omega = StarRegion::ball(4, Scalar(1));
  CountResult c = count_n(f, omega, Scalar(-1), Scalar(1), Scalar(Rat(10)));
  CHECK_FALSE(c.exact);
  CHECK(c.n_total > 0);
}

TEST_CASE("exclusion removes exactly the listed affine points") {
  // xi = 0, exclude the plane x3 = x4 = 0 (first type (1,0))
  InhomForm f{b4_form(), {Scalar(0), Scalar(0), Scalar(0), Scalar(0)}};
  StarRegion omega = StarRegion::ball(4, Scalar(1));
  ExceptionalAffine e;
  e.basis = zmat(2, 4);
  e.basis[0][0] = 1;
  e.basis[1][1] = 1;
  e.annihilator = zmat(2, 4);
  e.annihilator[0][2] = 1;
  e.annihilator[1][3] = 1;
  e.v_xi = ZVec(4, Int(0));
  Rat T(8);
  CountResult c = count_n_tilde(f, omega, Scalar(-1), Scalar(1), Scalar(T), {e});
  REQUIRE(c.excluded.size() == 1);
  CHECK(c.n_total - c.n_tilde == c.excluded[0]);
  CHECK(c.n_tilde == oracle::brute_count_excluded(f, omega, Rat(-1), Rat(1), T, {e}));
  // every point of that plane inside the ball has Q = 0, in (-1,1): the tally
  // is the full disc count x1^2 + x2^2 < 64
  long long disc = 0;
  for (long a = -8; a <= 8; ++a)
    for (long b = -8; b <= 8; ++b)
      if (a * a + b * b < 64) ++disc;
  CHECK(c.excluded[0] == disc);
}

TEST_CASE("first matching subspace wins the tally") {
  InhomForm f{b4_form(), {Scalar(0), Scalar(0), Scalar(0), Scalar(0)}};
  StarRegion omega = StarRegion::ball(4, Scalar(1));
  ExceptionalAffine e1;  // x3 = x4 = 0
  e1.basis = zmat(2, 4);
  e1.basis[0][0] = 1;
  e1.basis[1][1] = 1;
  e1.annihilator = zmat(2, 4);
  e1.annihilator[0][2] = 1;
  e1.annihilator[1][3] = 1;
  e1.v_xi = ZVec(4, Int(0));
  ExceptionalAffine e2;  // x2 = x4 = 0, overlaps e1 in the x1 axis
  e2.basis = zmat(2, 4);
  e2.basis[0][0] = 1;
  e2.basis[1][2] = 1;
  e2.annihilator = zmat(2, 4);
  e2.annihilator[0][1] = 1;
  e2.annihilator[1][3] = 1;
  e2.v_xi = ZVec(4, Int(0));
  Rat T(8);
  CountResult c12 = count_n_tilde(f, omega, Scalar(-1), Scalar(1), Scalar(T), {e1, e2});
  CountResult c21 = count_n_tilde(f, omega, Scalar(-1), Scalar(1), Scalar(T), {e2, e1});
  REQUIRE(c12.excluded.size() == 2);
  CHECK(c12.n_tilde == c21.n_tilde);
  CHECK(c12.excluded[0] + c12.excluded[1] == c21.excluded[0] + c21.excluded[1]);
  // the overlap (x2 = x3 = x4 = 0, 15 points) lands on whichever comes first
  CHECK(c12.excluded[0] == c12.excluded[1] + 15);
  CHECK(c21.excluded[0] == c21.excluded[1] + 15);
  CHECK(c12.n_tilde ==
        oracle::brute_count_excluded(f, omega, Rat(-1), Rat(1), T, {e1, e2}));
}

TEST_CASE("count is deterministic across thread counts") {
  InhomForm f = rational_shifted_b4();
  StarRegion omega = StarRegion::ball(4, Scalar(1));
  Pool p1(1), p3(3);
  CountResult a = count_n(f, omega, Scalar(-1), Scalar(1), Scalar(Rat(9)), p1);
  CountResult b = count_n(f, omega, Scalar(-1), Scalar(1), Scalar(Rat(9)), p3);
  CHECK(a.n_total == b.n_total);
  CHECK(a.boundary_flags == b.boundary_flags);
}
