#include "qflab/serialize.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace qflab {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// value algebra of the expression grammar: exactness survives until an
// irrational leaf (pi, non-square sqrt) enters
struct EVal {
  bool exact = true;
  Rat q;
  double d = 0;
};

EVal ev_rat(const Rat& r) { return {true, r, to_double(r)}; }
EVal ev_irr(double d) { return {false, Rat(0), d}; }

EVal ev_add(const EVal& a, const EVal& b) {
  if (a.exact && b.exact) return ev_rat(a.q + b.q);
  return ev_irr(a.d + b.d);
}
EVal ev_sub(const EVal& a, const EVal& b) {
  if (a.exact && b.exact) return ev_rat(a.q - b.q);
  return ev_irr(a.d - b.d);
}
EVal ev_mul(const EVal& a, const EVal& b) {
  if (a.exact && b.exact) return ev_rat(a.q * b.q);
  return ev_irr(a.d * b.d);
}
EVal ev_div(const EVal& a, const EVal& b, const char* what) {
  if (b.exact && b.q == 0) throw ConfigError(std::string(what) + ": division by zero");
  if (!b.exact && b.d == 0) throw ConfigError(std::string(what) + ": division by zero");
  if (a.exact && b.exact) return ev_rat(a.q / b.q);
  return ev_irr(a.d / b.d);
}

EVal ev_sqrt(const EVal& a, const char* what) {
  if ((a.exact && a.q < 0) || (!a.exact && a.d < 0))
    throw ConfigError(std::string(what) + ": sqrt of a negative value");
  if (a.exact) {
    Rat c = a.q;
    c.canonicalize();
    const mpz_class num = c.get_num(), den = c.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) && mpz_perfect_square_p(den.get_mpz_t())) {
      mpz_class rn, rd;
      mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
      mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
      return ev_rat(Rat(rn, rd));
    }
  }
  return ev_irr(std::sqrt(a.exact ? to_double(a.q) : a.d));
}

struct ExprParser {
  const std::string& src;
  size_t pos = 0;
  const char* what;

  void skip() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ConfigError(std::string(what) + ": " + msg + " in expression '" + src + "'");
  }

  EVal expr() {
    EVal v = term();
    for (;;) {
      if (eat('+'))
        v = ev_add(v, term());
      else if (eat('-'))
        v = ev_sub(v, term());
      else
        return v;
    }
  }
  EVal term() {
    EVal v = factor();
    for (;;) {
      if (eat('*'))
        v = ev_mul(v, factor());
      else if (eat('/'))
        v = ev_div(v, factor(), what);
      else
        return v;
    }
  }
  EVal factor() {
    if (eat('-')) return ev_sub(ev_rat(Rat(0)), factor());
    return atom();
  }
  EVal atom() {
    skip();
    if (pos >= src.size()) fail("unexpected end");
    char c = src[pos];
    if (c == '(') {
      ++pos;
      EVal v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (src.compare(pos, 2, "pi") == 0) {
      pos += 2;
      return ev_irr(kPi);
    }
    if (src.compare(pos, 4, "sqrt") == 0) {
      pos += 4;
      if (!eat('(')) fail("sqrt needs '('");
      EVal v = expr();
      if (!eat(')')) fail("missing ')'");
      return ev_sqrt(v, what);
    }
    fail("unexpected character");
  }
  EVal number() {
    size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    std::string ip = src.substr(start, pos - start);
    if (pos < src.size() && src[pos] == '.') {
      ++pos;
      size_t fs = pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      std::string fp = src.substr(fs, pos - fs);
      if (fp.empty()) fail("digits required after '.'");
      Int num(ip + fp);
      Int den = 1;
      for (size_t i = 0; i < fp.size(); ++i) den *= 10;
      Rat r(num, den);
      r.canonicalize();
      return ev_rat(r);
    }
    return ev_rat(Rat(Int(ip)));
  }
};

}  // namespace

Scalar scalar_from_json(const Json& v, const char* what) {
  if (v.is_number_integer()) return Scalar(Rat(Int(std::to_string(v.get<long long>()))));
  if (v.is_number()) return Scalar(rat_of_double(v.get<double>()));
  if (v.is_string()) {
    ExprParser p{v.get_ref<const std::string&>(), 0, what};
    EVal e = p.expr();
    p.skip();
    if (p.pos != p.src.size()) p.fail("trailing characters");
    return e.exact ? Scalar(e.q) : Scalar::irrational(e.d);
  }
  throw ConfigError(std::string(what) + ": expected a number or an expression string");
}

Json scalar_to_json(const Scalar& s) {
  if (s.rational) {
    Rat q = s.q;
    q.canonicalize();
    if (q.get_den() == 1) {
      if (q.get_num().fits_slong_p()) return Json(q.get_num().get_si());
      return Json(q.get_num().get_str());
    }
    return Json(q.get_num().get_str() + "/" + q.get_den().get_str());
  }
  return Json(s.d);
}

Json form_to_json(const SymmetricForm& q) {
  Json rows = Json::array();
  for (int i = 0; i < q.n; ++i) {
    Json row = Json::array();
    for (int j = 0; j < q.n; ++j)
      row.push_back(q.mode == Mode::Exact ? scalar_to_json(q.at(i, j)) : Json(q.M(i, j)));
    rows.push_back(row);
  }
  return Json{{"matrix", rows}};
}

SymmetricForm form_from_json(const Json& j) {
  reject_unknown_keys(j, {"matrix"}, "form");
  if (!j.contains("matrix") || !j["matrix"].is_array()) throw ConfigError("form: matrix required");
  const Json& rows = j["matrix"];
  int n = static_cast<int>(rows.size());
  if (n < 1) throw ConfigError("form: empty matrix");
  SymmetricForm q = SymmetricForm::zero(n, Mode::Exact);
  std::vector<std::vector<Scalar>> e(n);
  for (int i = 0; i < n; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n)
      throw ConfigError("form: matrix must be square");
    for (int jj = 0; jj < n; ++jj) e[i].push_back(scalar_from_json(rows[i][jj], "form matrix"));
  }
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) {
      const Scalar &a = e[i][jj], &b = e[jj][i];
      bool same = a.rational == b.rational && (a.rational ? a.q == b.q : a.d == b.d);
      if (!same) throw ConfigError("form: matrix must be symmetric");
    }
  for (int i = 0; i < n; ++i)
    for (int jj = i; jj < n; ++jj) q.set(i, jj, e[i][jj]);
  return q;
}

Json inhom_to_json(const InhomForm& f) {
  Json xi = Json::array();
  for (const Scalar& s : f.xi) xi.push_back(scalar_to_json(s));
  return Json{{"form", form_to_json(f.Q)}, {"xi", xi}};
}

InhomForm inhom_from_json(const Json& j) {
  reject_unknown_keys(j, {"form", "xi"}, "inhomogeneous form");
  if (!j.contains("form")) throw ConfigError("inhomogeneous form: form required");
  InhomForm f;
  f.Q = form_from_json(j["form"]);
  if (!j.contains("xi") || !j["xi"].is_array() ||
      static_cast<int>(j["xi"].size()) != f.Q.n)
    throw ConfigError("inhomogeneous form: xi must have one entry per dimension");
  for (const Json& v : j["xi"]) f.xi.push_back(scalar_from_json(v, "xi"));
  return f;
}

Json region_to_json(const StarRegion& r) {
  switch (r.kind) {
    case RegionKind::Ball:
      return Json{{"kind", "ball"}, {"n", r.n}, {"radius", scalar_to_json(r.radius)}};
    case RegionKind::Ellipsoid: {
      Json rows = Json::array();
      for (int i = 0; i < r.n; ++i) {
        Json row = Json::array();
        for (int j = 0; j < r.n; ++j) row.push_back(scalar_to_json(r.A[i * r.n + j]));
        rows.push_back(row);
      }
      return Json{{"kind", "ellipsoid"}, {"matrix", rows}};
    }
    case RegionKind::MaxSplit: {
      Json b1 = Json::array(), b2 = Json::array();
      for (int i = 0; i < 2; ++i) {
        Json r1 = Json::array(), r2 = Json::array();
        for (int j = 0; j < 2; ++j) {
          r1.push_back(scalar_to_json(r.A[i * 2 + j]));
          r2.push_back(scalar_to_json(r.A[4 + i * 2 + j]));
        }
        b1.push_back(r1);
        b2.push_back(r2);
      }
      return Json{{"kind", "max_split"}, {"b1", b1}, {"b2", b2}};
    }
    case RegionKind::Table: {
      Json dirs = Json::array(), vals = Json::array();
      for (const auto& d : r.dirs) {
        Json row = Json::array();
        for (double x : d) row.push_back(x);
        dirs.push_back(row);
      }
      for (double v : r.vals) vals.push_back(v);
      return Json{{"kind", "table"}, {"n", r.n}, {"dirs", dirs}, {"vals", vals}};
    }
  }
  throw std::logic_error("region_to_json: kind");
}

namespace {

SymmetricForm form_from_matrix_json(const Json& rows, const char* what) {
  if (!rows.is_array()) throw ConfigError(std::string(what) + ": matrix required");
  Json wrap{{"matrix", rows}};
  return form_from_json(wrap);
}

}  // namespace

StarRegion region_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("region: kind required");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "ball") {
    reject_unknown_keys(j, {"kind", "n", "radius"}, "region");
    if (!j.contains("n") || !j["n"].is_number_integer()) throw ConfigError("region: n required");
    Scalar r = j.contains("radius") ? scalar_from_json(j["radius"], "region radius") : Scalar(1);
    return StarRegion::ball(j["n"].get<int>(), r);
  }
  if (kind == "ellipsoid") {
    reject_unknown_keys(j, {"kind", "matrix"}, "region");
    return StarRegion::ellipsoid(form_from_matrix_json(j["matrix"], "region"));
  }
  if (kind == "max_split") {
    reject_unknown_keys(j, {"kind", "b1", "b2"}, "region");
    if (!j.contains("b1") || !j.contains("b2")) throw ConfigError("region: b1 and b2 required");
    return StarRegion::max_split(form_from_matrix_json(j["b1"], "region"),
                                 form_from_matrix_json(j["b2"], "region"));
  }
  if (kind == "table") {
    reject_unknown_keys(j, {"kind", "n", "dirs", "vals"}, "region");
    if (!j.contains("dirs") || !j.contains("vals")) throw ConfigError("region: dirs and vals");
    std::vector<std::vector<double>> dirs;
    for (const Json& row : j["dirs"]) {
      std::vector<double> d;
      for (const Json& x : row) d.push_back(x.get<double>());
      dirs.push_back(d);
    }
    std::vector<double> vals;
    for (const Json& v : j["vals"]) vals.push_back(v.get<double>());
    int n = j.contains("n") ? j["n"].get<int>() : (dirs.empty() ? 0 : static_cast<int>(dirs[0].size()));
    return StarRegion::table(n, dirs, vals);
  }
  throw ConfigError("region: unknown kind '" + kind + "'");
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("atomic_write: rename failed for " + path);
  }
}

std::string csv_document(const std::vector<std::string>& echo_lines,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const std::string& l : echo_lines) {
    out += "# ";
    out += l;
    out += '\n';
  }
  for (size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

void reject_unknown_keys(const Json& j, const std::vector<std::string>& allowed,
                         const char* where) {
  if (!j.is_object()) return;
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const std::string& k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
  }
}

}  // namespace qflab
