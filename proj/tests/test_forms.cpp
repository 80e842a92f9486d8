#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qflab/forms.hpp"

using namespace qflab;

TEST_CASE("standard forms have the advertised matrices and signatures") {
  SymmetricForm b4 = b4_form();
  CHECK(b4.at(0, 3).q == Rat(1) / Rat(2));
  CHECK(b4.at(1, 2).q == Rat(-1) / Rat(2));
  CHECK(b4.at(0, 0).q == 0);
  Signature s = signature_of(b4);
  CHECK(s.positive == 2);
  CHECK(s.negative == 2);
  CHECK(det_exact(b4) == Rat(1) / Rat(16));

  // x1 x3 - x2^2 itself diagonalizes to (+,-,-); the (2,1) label follows the
  // sign convention of the determinant form, i.e. -Q
  SymmetricForm f21 = standard_21_form();
  Signature s21 = signature_of(f21);
  CHECK(s21.positive == 1);
  CHECK(s21.negative == 2);

  for (int p = 3; p <= 4; ++p)
    for (int q = 1; q <= 2; ++q) {
      SymmetricForm f = standard_pq_form(p, q);
      CHECK(f.n == p + q);
      Signature sp = signature_of(f);
      CHECK(sp.positive == p);
      CHECK(sp.negative == q);
    }
}

TEST_CASE("standard form values at integer points") {
  SymmetricForm b4 = b4_form();
  double x[4] = {3, 5, 7, 11};
  CHECK(evaluate(b4, x) == doctest::Approx(3 * 11 - 5 * 7));
  SymmetricForm f21 = standard_21_form();
  double y[3] = {2, 3, 5};
  CHECK(evaluate(f21, y) == doctest::Approx(2 * 5 - 9));
  // 2 x1 xn + x2^2 + x3^2 - x4^2 for (3,2) minus pattern
  SymmetricForm f32 = standard_pq_form(3, 2);
  QVec z = {Rat(1), Rat(2), Rat(3), Rat(4), Rat(5)};
  Rat v = evaluate_exact(f32, z);
  CHECK(v == Rat(2 * 1 * 5 + 2 * 2 + 3 * 3 - 4 * 4));
}

TEST_CASE("evaluate_exact matches float evaluation on rationals") {
  SymmetricForm b4 = b4_form();
  QVec x = {Rat(1) / Rat(3), Rat(-5) / Rat(7), Rat(2), Rat(9) / Rat(4)};
  double xd[4];
  for (int i = 0; i < 4; ++i) xd[i] = to_double(x[i]);
  CHECK(to_double(evaluate_exact(b4, x)) == doctest::Approx(evaluate(b4, xd)).epsilon(1e-14));
}

TEST_CASE("evaluate_shifted equals evaluate at the shifted point") {
  InhomForm f{b4_form(), {Scalar(Rat(1) / Rat(2)), Scalar(0), Scalar(Rat(1) / Rat(3)), Scalar(0)}};
  double x[4] = {4, -2, 5, 1};
  double y[4];
  for (int i = 0; i < 4; ++i) y[i] = x[i] + f.xi[i].value();
  CHECK(evaluate_shifted(f, x) == evaluate(f.Q, y));
}

TEST_CASE("signature of singular form throws") {
  SymmetricForm q = SymmetricForm::zero(3, Mode::Exact);
  q.set(0, 0, Scalar(1));
  q.set(1, 1, Scalar(-1));
  CHECK_THROWS_AS(signature_of(q), DegenerateForm);
}

TEST_CASE("normalize_discriminant reaches unit determinant") {
  SymmetricForm b4 = b4_form();
  SymmetricForm u = normalize_discriminant(b4);
  // det 1/16 with n=4 rescales by exactly 2, so everything stays rational
  CHECK(u.all_rational());
  CHECK(abs_rat(det_exact(u)) == Rat(1));
  CHECK(u.at(0, 3).q == Rat(1));

  SymmetricForm d = SymmetricForm::zero(3, Mode::Exact);
  d.set(0, 0, Scalar(1));
  d.set(1, 1, Scalar(1));
  d.set(2, 2, Scalar(-3));
  SymmetricForm un = normalize_discriminant(d);
  // |det| = 3 needs an irrational root; entries become opaque reals
  CHECK_FALSE(un.all_rational());
  Eigen::MatrixXd m = un.M;
  CHECK(std::abs(std::abs(m.determinant()) - 1.0) < 1e-9);
}

TEST_CASE("rationality classes follow the tags") {
  InhomForm rational{b4_form(), {Scalar(Rat(1) / Rat(2)), Scalar(0), Scalar(0), Scalar(0)}};
  CHECK(classify_rationality(rational).cls == RationalityClass::RationalForm);

  InhomForm shift{b4_form(), {Scalar::irrational(0.41421356237309515), Scalar(0), Scalar(0), Scalar(0)}};
  CHECK(classify_rationality(shift).cls == RationalityClass::RationalHomogeneousIrrationalShift);

  SymmetricForm qi = b4_form();
  qi.set(0, 0, Scalar::irrational(1.4142135623730951));
  InhomForm irr{qi, {Scalar(0), Scalar(0), Scalar(0), Scalar(0)}};
  CHECK(classify_rationality(irr).cls == RationalityClass::IrrationalHomogeneous);
}

TEST_CASE("rational form witness rescales to max coefficient one") {
  SymmetricForm q = b4_form();  // max |entry| = 1/2
  InhomForm f{q, {Scalar(0), Scalar(0), Scalar(0), Scalar(0)}};
  auto rc = classify_rationality(f);
  REQUIRE(rc.witness.has_value());
  Rat w = *rc.witness;
  // polynomial coefficients: M_ii on squares, 2 M_ij on cross terms
  Rat worst = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      Rat c = w * q.at(i, j).q;
      if (i != j) c *= 2;
      if (abs_rat(c) > worst) worst = abs_rat(c);
    }
  CHECK(worst == Rat(1));
}

TEST_CASE("opaque reals are irrational by fiat even at rational doubles") {
  // a tagged value whose double happens to be 0.5 still counts as irrational
  InhomForm f{b4_form(), {Scalar::irrational(0.5), Scalar(0), Scalar(0), Scalar(0)}};
  CHECK(classify_rationality(f).cls == RationalityClass::RationalHomogeneousIrrationalShift);
}

TEST_CASE("scalar arithmetic keeps rationality tags") {
  Scalar a(Rat(1) / Rat(3)), b(Rat(1) / Rat(6));
  Scalar c = a + b;
  CHECK(c.rational);
  CHECK(c.q == Rat(1) / Rat(2));
  Scalar d = a * Scalar::irrational(1.414);
  CHECK_FALSE(d.rational);
  CHECK(d.value() == doctest::Approx((1.0 / 3.0) * 1.414));
  Scalar z = Scalar::irrational(2.0) * Scalar(0);
  // multiplying an opaque real by rational zero may stay conservative; only
  // the numeric value is pinned down
  CHECK(z.value() == 0.0);
}

TEST_CASE("bilinear matches the polarization identity") {
  SymmetricForm b4 = b4_form();
  double x[4] = {1, 2, 3, 4}, y[4] = {-2, 0, 5, 1};
  double sum[4];
  for (int i = 0; i < 4; ++i) sum[i] = x[i] + y[i];
  double pol = 0.5 * (evaluate(b4, sum) - evaluate(b4, x) - evaluate(b4, y));
  CHECK(bilinear(b4, x, y) == doctest::Approx(pol).epsilon(1e-12));
}
