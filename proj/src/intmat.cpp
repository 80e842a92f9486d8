#include "qflab/intmat.hpp"

#include <algorithm>
#include <cmath>

namespace qflab {

ZMat zmat(int r, int c) { return ZMat(r, ZVec(c, 0)); }
QMat qmat(int r, int c) { return QMat(r, QVec(c, 0)); }

ZMat z_identity(int n) {
  ZMat a = zmat(n, n);
  for (int i = 0; i < n; ++i) a[i][i] = 1;
  return a;
}

ZMat z_transpose(const ZMat& a) {
  if (a.empty()) return a;
  ZMat t = zmat(a[0].size(), a.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

ZMat z_mul(const ZMat& a, const ZMat& b) {
  ZMat c = zmat(a.size(), b[0].size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < b.size(); ++k)
      if (a[i][k] != 0)
        for (size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

ZVec z_mul_vec(const ZMat& a, const ZVec& v) {
  ZVec r(a.size(), 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
  return r;
}

Int z_dot(const ZVec& a, const ZVec& b) {
  Int s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool z_is_zero(const ZVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

QMat to_qmat(const ZMat& a) {
  QMat q(a.size(), QVec(a.empty() ? 0 : a[0].size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) q[i][j] = Rat(a[i][j]);
  return q;
}

QMat q_mul(const QMat& a, const QMat& b) {
  QMat c = qmat(a.size(), b[0].size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < b.size(); ++k)
      if (a[i][k] != 0)
        for (size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

QVec q_mul_vec(const QMat& a, const QVec& v) {
  QVec r(a.size(), Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
  return r;
}

QMat q_transpose(const QMat& a) {
  if (a.empty()) return a;
  QMat t = qmat(a[0].size(), a.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

void make_primitive(ZVec& v) {
  Int g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g == 0) return;
  for (auto& x : v) x /= g;
  for (const auto& x : v) {
    if (x == 0) continue;
    if (x < 0)
      for (auto& y : v) y = -y;
    break;
  }
}

namespace {

void row_axpy(ZVec& dst, const Int& q, const ZVec& src) {
  for (size_t j = 0; j < dst.size(); ++j) dst[j] -= q * src[j];
}

// in-place row HNF; optionally tracks the same row operations in *t
int hnf_rows_inplace(ZMat& a, ZMat* t) {
  if (a.empty()) return 0;
  int rows = a.size(), cols = a[0].size(), r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    for (int i = r + 1; i < rows; ++i) {
      while (a[i][c] != 0) {
        if (a[r][c] == 0) {
          std::swap(a[r], a[i]);
          if (t) std::swap((*t)[r], (*t)[i]);
          continue;
        }
        Int q = a[i][c] / a[r][c];  // truncated; remainder shrinks
        row_axpy(a[i], q, a[r]);
        if (t) row_axpy((*t)[i], q, (*t)[r]);
        if (a[i][c] != 0) {
          std::swap(a[r], a[i]);
          if (t) std::swap((*t)[r], (*t)[i]);
        }
      }
    }
    if (a[r][c] == 0) continue;
    if (a[r][c] < 0) {
      for (auto& x : a[r]) x = -x;
      if (t)
        for (auto& x : (*t)[r]) x = -x;
    }
    for (int i = 0; i < r; ++i) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), a[i][c].get_mpz_t(), a[r][c].get_mpz_t());
      row_axpy(a[i], q, a[r]);
      if (t) row_axpy((*t)[i], q, (*t)[r]);
    }
    ++r;
  }
  return r;
}

}  // namespace

ZMat hnf_rows(ZMat a) {
  int r = hnf_rows_inplace(a, nullptr);
  a.resize(r);
  return a;
}

ZMat kernel_basis(const ZMat& a) {
  ZMat at = z_transpose(a);
  int c = at.size();
  ZMat t = z_identity(c);
  int r = hnf_rows_inplace(at, &t);
  ZMat ker;
  for (int i = r; i < c; ++i) ker.push_back(t[i]);
  return hnf_rows(std::move(ker));
}

std::optional<ZVec> solve_int(const ZMat& a, const ZVec& b) {
  int rows = a.size(), cols = a[0].size();
  ZMat at = z_transpose(a);  // cols x rows
  ZMat t = z_identity(cols);
  hnf_rows_inplace(at, &t);
  // solve z^T H = b^T  (H = at after reduction), then x = t^T z
  ZVec z(cols, 0);
  ZVec acc(rows, 0);
  int piv_row = 0;
  for (int j = 0; j < rows; ++j) {
    Int need = b[j] - acc[j];
    if (piv_row < cols && at[piv_row][j] != 0) {
      Int q = need / at[piv_row][j];
      if (q * at[piv_row][j] != need) return std::nullopt;
      z[piv_row] = q;
      for (int k = 0; k < rows; ++k) acc[k] += q * at[piv_row][k];
      ++piv_row;
    } else if (need != 0) {
      return std::nullopt;
    }
  }
  ZVec x(cols, 0);
  for (int i = 0; i < cols; ++i)
    for (int k = 0; k < cols; ++k) x[i] += t[k][i] * z[k];
  return x;
}

ZMat complete_unimodular(const ZMat& basis, int n) {
  int d = basis.size();
  ZMat at = z_transpose(basis);  // n x d
  ZMat v = z_identity(n);
  int r = hnf_rows_inplace(at, &v);
  if (r != d) throw std::invalid_argument("complete_unimodular: dependent rows");
  // v * basis^T = [R; 0]; primitivity forces |det R| = 1, hence the first d rows
  // of (v^T)^{-1} span the input lattice
  Rat dr = det_q([&] {
    QMat rr = qmat(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) rr[i][j] = Rat(at[i][j]);
    return rr;
  }());
  if (dr != 1 && dr != -1) throw std::invalid_argument("complete_unimodular: basis not primitive");
  QMat vq = to_qmat(z_transpose(v));
  QMat w = inverse_q(vq);
  // replace the first d rows (they span the input lattice) by the input rows
  // themselves; the determinant changes by det R = +-1 so u stays unimodular
  ZMat u = zmat(n, n);
  for (int i = 0; i < d; ++i) u[i] = basis[i];
  for (int i = d; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (w[i][j].get_den() != 1) throw std::logic_error("complete_unimodular: non-integer inverse");
      u[i][j] = w[i][j].get_num();
    }
  Rat du = det_q(to_qmat(u));
  if (du != 1 && du != -1) throw std::logic_error("complete_unimodular: completion not unimodular");
  return u;
}

Rat det_q(QMat a) {
  int n = a.size();
  Rat det = 1;
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int i = c; i < n; ++i)
      if (a[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (int i = c + 1; i < n; ++i) {
      if (a[i][c] == 0) continue;
      Rat f = a[i][c] / a[c][c];
      for (int j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det;
}

int rank_q(QMat a) {
  if (a.empty()) return 0;
  int rows = a.size(), cols = a[0].size(), r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (a[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(a[p], a[r]);
    for (int i = r + 1; i < rows; ++i) {
      if (a[i][c] == 0) continue;
      Rat f = a[i][c] / a[r][c];
      for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

QMat inverse_q(QMat a) {
  int n = a.size();
  QMat inv = qmat(n, n);
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int i = c; i < n; ++i)
      if (a[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) throw std::domain_error("inverse_q: singular matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    Rat d = a[c][c];
    for (int j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (int j = 0; j < n; ++j) {
        a[i][j] -= f * a[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

namespace {

struct Gso {
  QMat mu;   // lower triangular, mu[i][j] for j < i
  QVec bns;  // squared GSO norms
};

Gso gso_of(const QMat& g) {
  int n = g.size();
  Gso s{qmat(n, n), QVec(n, Rat(0))};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      Rat acc = g[i][j];
      for (int k = 0; k < j; ++k) acc -= s.mu[i][k] * s.mu[j][k] * s.bns[k];
      if (s.bns[j] == 0) throw std::invalid_argument("lll_gram: Gram not positive definite");
      s.mu[i][j] = acc / s.bns[j];
    }
    Rat acc = g[i][i];
    for (int k = 0; k < i; ++k) acc -= s.mu[i][k] * s.mu[i][k] * s.bns[k];
    if (acc <= 0) throw std::invalid_argument("lll_gram: Gram not positive definite");
    s.bns[i] = acc;
  }
  return s;
}

QMat gram_of(const ZMat& u, const QMat& g) {
  return q_mul(q_mul(to_qmat(u), g), q_transpose(to_qmat(u)));
}

}  // namespace

ZMat lll_gram(const QMat& g, const Rat& delta) {
  int n = g.size();
  ZMat u = z_identity(n);
  Gso s = gso_of(gram_of(u, g));
  int k = 1;
  while (k < n) {
    for (int j = k - 1; j >= 0; --j) {
      Int r = round_int(s.mu[k][j]);
      if (r != 0) {
        row_axpy(u[k], r, u[j]);
        for (int l = 0; l < j; ++l) s.mu[k][l] -= Rat(r) * s.mu[j][l];
        s.mu[k][j] -= Rat(r);
      }
    }
    if (s.bns[k] >= (delta - s.mu[k][k - 1] * s.mu[k][k - 1]) * s.bns[k - 1]) {
      ++k;
    } else {
      std::swap(u[k], u[k - 1]);
      s = gso_of(gram_of(u, g));
      k = std::max(k - 1, 1);
    }
  }
  return u;
}

void enumerate_gram(const QMat& g, const Rat& bound, long long node_cap,
                    const std::function<void(const ZVec&)>& emit) {
  int n = g.size();
  if (bound < 0) return;
  ZMat u = lll_gram(g);
  Gso s = gso_of(gram_of(u, g));
  std::vector<double> bf(n), muf(n * n);
  for (int i = 0; i < n; ++i) {
    bf[i] = to_double(s.bns[i]);
    for (int j = 0; j < i; ++j) muf[i * n + j] = to_double(s.mu[i][j]);
  }
  ZVec x(n, 0);
  std::vector<Rat> center(n, Rat(0));
  long long nodes = 0;

  // level i consumed top-down from n-1; rem is the exact remaining budget
  std::function<void(int, const Rat&, double, bool)> rec = [&](int i, const Rat& rem, double remf,
                                                               bool upper_zero) {
    if (i < 0) {
      if (upper_zero) return;  // x == 0
      ZVec w(n, 0);
      for (int l = 0; l < n; ++l)
        if (x[l] != 0)
          for (int j = 0; j < n; ++j) w[j] += x[l] * u[l][j];
      for (size_t j = 0; j < w.size(); ++j) {
        if (w[j] == 0) continue;
        if (w[j] < 0)
          for (auto& y : w) y = -y;
        break;
      }
      emit(w);
      return;
    }
    Rat c = 0;
    for (int j = i + 1; j < n; ++j)
      if (x[j] != 0) c += s.mu[j][i] * Rat(x[j]);
    double cf = to_double(c);
    double rad = std::sqrt(std::max(0.0, remf / bf[i])) + 1e-9 * (1.0 + std::abs(cf));
    long lo = static_cast<long>(std::floor(-cf - rad)) - 1;
    long hi = static_cast<long>(std::ceil(-cf + rad)) + 1;
    long start = upper_zero ? std::max(lo, 0L) : lo;
    for (long v = start; v <= hi; ++v) {
      if (++nodes > node_cap) throw CapExceeded("enumerate_gram: node cap exceeded");
      Rat t = Rat(v) + c;
      Rat cost = s.bns[i] * t * t;
      if (cost > rem) continue;
      x[i] = v;
      rec(i - 1, rem - cost, remf - to_double(cost), upper_zero && v == 0);
    }
    x[i] = 0;
  };
  rec(n - 1, bound, to_double(bound), true);
}

std::vector<ZVec> short_vectors(const QMat& g, const Rat& bound, long long node_cap) {
  std::vector<std::pair<Rat, ZVec>> tmp;
  enumerate_gram(g, bound, node_cap, [&](const ZVec& v) {
    QVec vq(v.size());
    for (size_t i = 0; i < v.size(); ++i) vq[i] = Rat(v[i]);
    QVec gv = q_mul_vec(g, vq);
    Rat nrm = 0;
    for (size_t i = 0; i < v.size(); ++i) nrm += vq[i] * gv[i];
    tmp.emplace_back(nrm, v);
  });
  std::sort(tmp.begin(), tmp.end());
  std::vector<ZVec> out;
  out.reserve(tmp.size());
  for (auto& p : tmp) out.push_back(std::move(p.second));
  return out;
}

}  // namespace qflab
