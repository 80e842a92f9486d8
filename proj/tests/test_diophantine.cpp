#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qflab/diophantine.hpp"

using namespace qflab;

namespace {
const double kSqrt2m1 = 0.41421356237309515;
const double kSqrt3m1 = 0.7320508075688772;
}  // namespace

TEST_CASE("quality equals the direct scan in both modes") {
  std::vector<std::vector<Scalar>> vecs = {
      {Scalar::irrational(kSqrt2m1), Scalar::irrational(kSqrt3m1)},
      {Scalar(Rat(13) / Rat(97)), Scalar::irrational(0.3183098861837907)},
      {Scalar(Rat(1) / Rat(4)), Scalar(Rat(2) / Rat(5)), Scalar(Rat(3) / Rat(7))},
  };
  for (const auto& xi : vecs) {
    std::vector<double> xd;
    for (const auto& s : xi) xd.push_back(s.value());
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      for (DiophMode mode : {DiophMode::PerCoordinate, DiophMode::CommonDenominator}) {
        DiophQuality q = dioph_quality(xi, delta, mode);
        CHECK(q.quality == doctest::Approx(oracle::dioph_scan(xd, delta, mode)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("witnesses reproduce the quality") {
  std::vector<Scalar> xi = {Scalar::irrational(kSqrt2m1), Scalar::irrational(kSqrt3m1)};
  DiophQuality q = dioph_quality(xi, 1e-3, DiophMode::PerCoordinate);
  REQUIRE(q.witnesses.size() == 2);
  double worst = 0;
  for (size_t i = 0; i < 2; ++i) {
    const DiophWitness& w = q.witnesses[i];
    CHECK(w.q > 0);
    CHECK(w.q < 1000);
    double err = std::abs(xi[i].value() - w.p.get_d() / w.q.get_d());
    CHECK(err == doctest::Approx(w.error).epsilon(1e-12));
    worst = std::max(worst, err);
  }
  CHECK(worst == doctest::Approx(q.quality).epsilon(1e-12));
}

TEST_CASE("rational vectors go rational at scale") {
  std::vector<Scalar> xi = {Scalar(Rat(3) / Rat(8)), Scalar(Rat(5) / Rat(11))};
  // at 1/delta > 88 a common denominator hits both exactly
  std::vector<double> grid = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4};
  DiophReport rep = estimate_kappa(xi, grid, DiophMode::CommonDenominator);
  CHECK(rep.rational_at_scale);
  // quality is exactly zero once q = 88 is reachable
  DiophQuality q = dioph_quality(xi, 1e-3, DiophMode::CommonDenominator);
  CHECK(q.quality == 0.0);
}

TEST_CASE("badly approximable pair has kappa near one") {
  std::vector<Scalar> xi = {Scalar::irrational(kSqrt2m1), Scalar::irrational(kSqrt3m1)};
  std::vector<double> grid;
  for (int k = 0; k < 8; ++k) grid.push_back(std::pow(10.0, -1.5 - 0.25 * k));
  DiophReport rep = estimate_kappa(xi, grid);
  CHECK(rep.kappa_hat > 0.7);
  CHECK(rep.kappa_hat < 1.3);
  CHECK(rep.kappa_hat == doctest::Approx(rep.slope - 1.0).epsilon(1e-12));
  CHECK_FALSE(rep.rational_at_scale);
}

TEST_CASE("liouville value and its extreme exponent") {
  double v = liouville_value(5);
  double direct = 0;
  for (int k = 1; k <= 5; ++k) {
    double f = 1;
    for (int j = 2; j <= k; ++j) f *= j;
    direct += std::pow(10.0, -f);
  }
  CHECK(v == doctest::Approx(direct).epsilon(1e-15));
  CHECK_THROWS_AS(estimate_kappa({Scalar(0)}, {1e-1, 1e-2}), std::invalid_argument);
}

TEST_CASE("kappa fit needs at least six grid points") {
  std::vector<Scalar> xi = {Scalar::irrational(kSqrt2m1)};
  std::vector<double> grid = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  CHECK_THROWS_AS(estimate_kappa(xi, grid), std::invalid_argument);
}

TEST_CASE("linear map preservation holds for a generic pair") {
  std::vector<Scalar> xi = {Scalar::irrational(kSqrt2m1), Scalar::irrational(kSqrt3m1)};
  QMat a = qmat(2, 2);
  a[0] = {Rat(1), Rat(2)};
  a[1] = {Rat(1), Rat(-1)};
  std::vector<double> grid;
  for (int k = 0; k < 6; ++k) grid.push_back(std::pow(10.0, -1.5 - 0.3 * k));
  RationalMapReport rep = rational_map_preservation(xi, a, grid);
  CHECK(rep.within_bound);
  CHECK(rep.kappa_bound == doctest::Approx(3.0 * rep.base.kappa_hat + 1.0).epsilon(1e-9));
  CHECK(rep.rows.size() == grid.size());
}

TEST_CASE("ewas search certifies split forms at tiny distance") {
  SymmetricForm q = b4_form();
  EwasReport rep = ewas_search(q, {1, 2, 4, 8}, 20);
  REQUIRE(rep.entries.size() == 4);
  for (const auto& e : rep.entries) {
    REQUIRE(e.has_candidate);
    // b4 is itself split: some integral Q' with Q = Q'/r exists for every r
    CHECK(e.achieved == 0.0);
    // certificate plane must be null for the candidate: check by evaluation
    REQUIRE(e.certificate.size() == 2);
    QVec v0(4), v1(4), sum(4);
    for (int i = 0; i < 4; ++i) {
      v0[i] = Rat(e.certificate[0][i]);
      v1[i] = Rat(e.certificate[1][i]);
      sum[i] = v0[i] + v1[i];
    }
    CHECK(evaluate_exact(e.best, v0) == 0);
    CHECK(evaluate_exact(e.best, v1) == 0);
    CHECK(evaluate_exact(e.best, sum) == 0);  // cross term vanishes too
  }
}

TEST_CASE("ewas approximation degrades for an irrational form") {
  SymmetricForm q = b4_form();
  q.set(0, 0, Scalar::irrational(0.2360679774997896));  // sqrt(5) - 2
  EwasReport rep = ewas_search(q, {1, 2, 4, 8, 16}, 40);
  for (const auto& e : rep.entries) {
    REQUIRE(e.has_candidate);
    CHECK(e.achieved > 0.0);
  }
  // achieved distances cannot drop faster than the coefficient resolution 1/r
  // by more than the fitted-model slack for this non-EWAS form
  CHECK(rep.fit_valid);
  CHECK(rep.exponent_hat < 3.0);
}

TEST_CASE("classifier separates the designed cases") {
  std::vector<double> grid;
  for (int k = 0; k < 6; ++k) grid.push_back(std::pow(10.0, -1.5 - 0.3 * k));
  // diophantine shift over b4
  InhomForm dio{b4_form(),
                {Scalar::irrational(kSqrt2m1), Scalar::irrational(kSqrt3m1), Scalar(0), Scalar(0)}};
  ClassifyReport a = classify_form(dio, {1, 2, 4, 8}, 20, grid);
  CHECK(a.verdict == FormClass::DiophantineEvidence);
  // split rational form with a liouville-like shift: EWAS, shift not dioph
  InhomForm bad{b4_form(),
                {Scalar::irrational(liouville_value(4)), Scalar(0), Scalar(0), Scalar(0)}};
  std::vector<double> fine;
  for (int k = 0; k < 8; ++k) fine.push_back(std::pow(10.0, -5.0 - 0.2 * k));
  ClassifyReport b = classify_form(bad, {1, 2, 4, 8}, 20, fine);
  CHECK(b.verdict == FormClass::EwasEvidenceAndShiftNonDioph);
}
