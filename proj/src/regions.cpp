#include "qflab/regions.hpp"

#include <cmath>

namespace qflab {

StarRegion StarRegion::ball(int n, const Scalar& r) {
  if (n < 1 || !(r.value() > 0)) throw std::invalid_argument("ball: bad parameters");
  StarRegion s;
  s.kind = RegionKind::Ball;
  s.n = n;
  s.radius = r;
  return s;
}

StarRegion StarRegion::ellipsoid(const SymmetricForm& a) {
  Signature sig = signature_of(a);
  if (sig.positive != a.n) throw std::invalid_argument("ellipsoid: matrix not positive definite");
  StarRegion s;
  s.kind = RegionKind::Ellipsoid;
  s.n = a.n;
  s.A.assign(a.e.begin(), a.e.end());
  return s;
}

StarRegion StarRegion::max_split(const SymmetricForm& b1, const SymmetricForm& b2) {
  if (b1.n != 2 || b2.n != 2) throw std::invalid_argument("max_split: blocks must be 2x2");
  for (const SymmetricForm* b : {&b1, &b2}) {
    Signature sig = signature_of(*b);
    if (sig.positive != 2) throw std::invalid_argument("max_split: block not positive definite");
  }
  StarRegion s;
  s.kind = RegionKind::MaxSplit;
  s.n = 4;
  s.A.assign(b1.e.begin(), b1.e.end());
  s.A.insert(s.A.end(), b2.e.begin(), b2.e.end());
  return s;
}

StarRegion StarRegion::table(int n, std::vector<std::vector<double>> dirs,
                             std::vector<double> vals) {
  if (dirs.empty() || dirs.size() != vals.size())
    throw std::invalid_argument("table: need matching nonempty dirs/vals");
  for (const auto& d : dirs) {
    if (static_cast<int>(d.size()) != n) throw std::invalid_argument("table: direction dimension");
    double nn = 0;
    for (double x : d) nn += x * x;
    if (std::abs(nn - 1.0) > 1e-8) throw std::invalid_argument("table: directions must be unit");
  }
  for (double v : vals)
    if (!(v > 0)) throw std::invalid_argument("table: nu values must be positive");
  StarRegion s;
  s.kind = RegionKind::Table;
  s.n = n;
  s.dirs = std::move(dirs);
  s.vals = std::move(vals);
  return s;
}

namespace {

double min_eig_2x2(double a, double b, double d) {
  // symmetric [[a,b],[b,d]]
  double tr = a + d, det = a * d - b * b;
  double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  return tr / 2 - disc;
}

double quad2(const Scalar* blk, const double* x) {
  return blk[0].value() * x[0] * x[0] + 2 * blk[1].value() * x[0] * x[1] +
         blk[3].value() * x[1] * x[1];
}

}  // namespace

double StarRegion::nu_max() const {
  switch (kind) {
    case RegionKind::Ball:
      return radius.value();
    case RegionKind::Ellipsoid: {
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = A[i * n + j].value();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      return 1.0 / std::sqrt(es.eigenvalues().minCoeff());
    }
    case RegionKind::MaxSplit: {
      double l1 = min_eig_2x2(A[0].value(), A[1].value(), A[3].value());
      double l2 = min_eig_2x2(A[4].value(), A[5].value(), A[7].value());
      return std::sqrt(1.0 / l1 + 1.0 / l2);
    }
    case RegionKind::Table: {
      double m = 0;
      for (double v : vals) m = std::max(m, v);
      return m;
    }
  }
  return 0;
}

bool StarRegion::contains(const double* x, double T) const {
  switch (kind) {
    case RegionKind::Ball: {
      double nn = 0;
      for (int i = 0; i < n; ++i) nn += x[i] * x[i];
      double r = T * radius.value();
      return nn < r * r;
    }
    case RegionKind::Ellipsoid: {
      double s = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += A[i * n + j].value() * x[i] * x[j];
      return s < T * T;
    }
    case RegionKind::MaxSplit: {
      double v1 = quad2(&A[0], x);
      double v2 = quad2(&A[4], x + 2);
      return std::max(v1, v2) < T * T;
    }
    case RegionKind::Table: {
      double nn = 0;
      for (int i = 0; i < n; ++i) nn += x[i] * x[i];
      if (nn == 0) return true;
      double nrm = std::sqrt(nn);
      // inverse-distance-squared interpolation of nu over the sample directions
      double wsum = 0, acc = 0;
      for (size_t k = 0; k < dirs.size(); ++k) {
        double d2 = 0;
        for (int i = 0; i < n; ++i) {
          double diff = x[i] / nrm - dirs[k][i];
          d2 += diff * diff;
        }
        if (d2 < 1e-24) return nrm < T * vals[k];
        double w = 1.0 / d2;
        wsum += w;
        acc += w * vals[k];
      }
      return nrm < T * (acc / wsum);
    }
  }
  return false;
}

bool StarRegion::exact_capable() const {
  if (kind == RegionKind::Table) return false;
  if (kind == RegionKind::Ball) return radius.rational;
  for (const auto& s : A)
    if (!s.rational) return false;
  return true;
}

bool StarRegion::contains_exact(const QVec& x, const Rat& T) const {
  switch (kind) {
    case RegionKind::Ball: {
      Rat nn = 0;
      for (int i = 0; i < n; ++i) nn += x[i] * x[i];
      Rat r = T * radius.q;
      return nn < r * r;
    }
    case RegionKind::Ellipsoid: {
      Rat s = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += A[i * n + j].q * x[i] * x[j];
      return s < T * T;
    }
    case RegionKind::MaxSplit: {
      Rat v1 = A[0].q * x[0] * x[0] + 2 * A[1].q * x[0] * x[1] + A[3].q * x[1] * x[1];
      Rat v2 = A[4].q * x[2] * x[2] + 2 * A[5].q * x[2] * x[3] + A[7].q * x[3] * x[3];
      Rat m = v1 > v2 ? v1 : v2;
      return m < T * T;
    }
    case RegionKind::Table:
      throw std::invalid_argument("contains_exact: table regions are float-only");
  }
  return false;
}

bool StarRegion::near_boundary(const double* x, double T, double tol) const {
  switch (kind) {
    case RegionKind::Ball: {
      double nn = 0;
      for (int i = 0; i < n; ++i) nn += x[i] * x[i];
      double r = T * radius.value();
      return std::abs(nn - r * r) <= tol * r * r;
    }
    case RegionKind::Ellipsoid: {
      double s = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += A[i * n + j].value() * x[i] * x[j];
      return std::abs(s - T * T) <= tol * T * T;
    }
    case RegionKind::MaxSplit: {
      double v = std::max(quad2(&A[0], x), quad2(&A[4], x + 2));
      return std::abs(v - T * T) <= tol * T * T;
    }
    case RegionKind::Table: {
      double nn = 0;
      for (int i = 0; i < n; ++i) nn += x[i] * x[i];
      if (nn == 0) return false;
      double nrm = std::sqrt(nn);
      double wsum = 0, acc = 0;
      for (size_t k = 0; k < dirs.size(); ++k) {
        double d2 = 0;
        for (int i = 0; i < n; ++i) {
          double diff = x[i] / nrm - dirs[k][i];
          d2 += diff * diff;
        }
        if (d2 < 1e-24) return std::abs(nrm - T * vals[k]) <= tol * T * vals[k];
        double w = 1.0 / d2;
        wsum += w;
        acc += w * vals[k];
      }
      double r = T * acc / wsum;
      return std::abs(nrm - r) <= tol * r;
    }
  }
  return false;
}

}  // namespace qflab
