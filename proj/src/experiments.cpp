#include "qflab/experiments.hpp"

#include <cmath>
#include <iostream>

#include "qflab/diophantine.hpp"
#include "qflab/latgeo.hpp"
#include "qflab/spectra.hpp"
#include "qflab/subspaces.hpp"
#include "qflab/volume.hpp"

namespace qflab {

namespace {

struct Table {
  std::vector<std::string> cols;
  std::vector<std::vector<std::string>> rows;
};

std::string fmt_i(long long v) { return std::to_string(v); }
std::string fmt_d(double v) { return format_double(v); }
std::string fmt_b(bool v) { return v ? "1" : "0"; }

std::string join_z(const ZVec& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += v[i].get_str();
  }
  return out;
}

std::string join_zmat(const ZMat& m) {
  std::string out;
  for (size_t i = 0; i < m.size(); ++i) {
    if (i) out += ' ';
    out += join_z(m[i]);
  }
  return out;
}

double req_number(const Json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_number())
    throw ConfigError(std::string("params: '") + key + "' (number) required");
  return p[key].get<double>();
}

long long req_int(const Json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_number_integer())
    throw ConfigError(std::string("params: '") + key + "' (integer) required");
  return p[key].get<long long>();
}

long long opt_int(const Json& p, const char* key, long long dflt) {
  return p.contains(key) ? req_int(p, key) : dflt;
}

double opt_number(const Json& p, const char* key, double dflt) {
  return p.contains(key) ? req_number(p, key) : dflt;
}

std::string opt_string(const Json& p, const char* key, const std::string& dflt) {
  if (!p.contains(key)) return dflt;
  if (!p[key].is_string()) throw ConfigError(std::string("params: '") + key + "' must be a string");
  return p[key].get<std::string>();
}

Scalar req_scalar(const Json& p, const char* key) {
  if (!p.contains(key)) throw ConfigError(std::string("params: '") + key + "' required");
  return scalar_from_json(p[key], key);
}

std::vector<double> req_grid(const Json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_array() || p[key].empty())
    throw ConfigError(std::string("params: '") + key + "' (nonempty array) required");
  std::vector<double> g;
  for (const Json& v : p[key]) {
    if (!v.is_number()) throw ConfigError(std::string("params: '") + key + "' must hold numbers");
    g.push_back(v.get<double>());
  }
  return g;
}

std::vector<long long> req_intgrid(const Json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_array() || p[key].empty())
    throw ConfigError(std::string("params: '") + key + "' (nonempty array) required");
  std::vector<long long> g;
  for (const Json& v : p[key]) {
    if (!v.is_number_integer())
      throw ConfigError(std::string("params: '") + key + "' must hold integers");
    g.push_back(v.get<long long>());
  }
  return g;
}

InhomForm req_inhom(const Json& p) {
  if (!p.contains("form")) throw ConfigError("params: 'form' required");
  return inhom_from_json(p["form"]);
}

void check_interval(const Scalar& a, const Scalar& b) {
  if (!(a.d < b.d)) throw ConfigError("interval: a < b required");
}

QMat req_qmat2(const Json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_array() || p[key].size() != 2)
    throw ConfigError(std::string("params: '") + key + "' (2x2 matrix) required");
  QMat m = qmat(2, 2);
  for (int i = 0; i < 2; ++i) {
    const Json& row = p[key][i];
    if (!row.is_array() || row.size() != 2)
      throw ConfigError(std::string("params: '") + key + "' (2x2 matrix) required");
    for (int j = 0; j < 2; ++j) {
      Scalar s = scalar_from_json(row[j], key);
      if (!s.rational) throw ConfigError(std::string("params: '") + key + "' must be rational");
      m[i][j] = s.q;
    }
  }
  return m;
}

Torus req_torus(const Json& p) {
  Torus t;
  t.basis = req_qmat2(p, "basis");
  if (!p.contains("flux") || !p["flux"].is_array() || p["flux"].size() != 2)
    throw ConfigError("params: 'flux' (2 entries) required");
  t.flux = {scalar_from_json(p["flux"][0], "flux"), scalar_from_json(p["flux"][1], "flux")};
  if (det_q(t.basis) == 0) throw ConfigError("params: 'basis' is singular");
  return t;
}

Eigen::MatrixXd opt_basis(const Json& p, const char* key, int n) {
  if (!p.contains(key)) return Eigen::MatrixXd::Identity(n, n);
  const Json& rows = p[key];
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw ConfigError(std::string("params: '") + key + "' must be " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n)
      throw ConfigError(std::string("params: '") + key + "' must be square");
    for (int j = 0; j < n; ++j) m(i, j) = scalar_from_json(rows[i][j], key).d;
  }
  if (std::abs(m.determinant()) < 1e-12)
    throw ConfigError(std::string("params: '") + key + "' is singular");
  return m;
}

std::vector<ExceptionalAffine> affines_of(const std::vector<ExceptionalWitness>& ws) {
  std::vector<ExceptionalAffine> out;
  for (const ExceptionalWitness& w : ws) out.push_back(w.affine);
  return out;
}

// ----- experiments -----

Table exp_count(const Json& p, uint64_t, const Pool& pool) {
  reject_unknown_keys(p, {"form", "region", "a", "b", "T", "t_search", "float_tol"}, "params");
  InhomForm f = req_inhom(p);
  if (!p.contains("region")) throw ConfigError("params: 'region' required");
  StarRegion omega = region_from_json(p["region"]);
  Scalar a = req_scalar(p, "a"), b = req_scalar(p, "b"), T = req_scalar(p, "T");
  check_interval(a, b);
  CountResult r;
  long long nexc = 0;
  if (p.contains("t_search")) {
    auto ws = exceptional_subspaces(f, req_number(p, "t_search"), opt_number(p, "float_tol", 1e-8));
    nexc = static_cast<long long>(ws.size());
    r = count_n_tilde(f, omega, a, b, T, affines_of(ws), pool);
  } else {
    r = count_n(f, omega, a, b, T, pool);
  }
  Table t;
  t.cols = {"a", "b", "T", "n_total", "n_tilde", "subspaces", "excluded", "boundary_flags", "exact"};
  t.rows.push_back({fmt_d(r.a), fmt_d(r.b), fmt_d(r.T), fmt_i(r.n_total), fmt_i(r.n_tilde),
                    fmt_i(nexc), fmt_i(r.n_total - r.n_tilde), fmt_i(r.boundary_flags),
                    fmt_b(r.exact)});
  return t;
}

Table exp_asymptotic(const Json& p, uint64_t seed, const Pool& pool) {
  reject_unknown_keys(p, {"form", "region", "a", "b", "t_grid", "samples", "t_search", "float_tol"},
                      "params");
  InhomForm f = req_inhom(p);
  if (!p.contains("region")) throw ConfigError("params: 'region' required");
  StarRegion omega = region_from_json(p["region"]);
  Scalar a = req_scalar(p, "a"), b = req_scalar(p, "b");
  check_interval(a, b);
  std::vector<double> grid = req_grid(p, "t_grid");
  long long samples = opt_int(p, "samples", 2'000'000);
  std::vector<ExceptionalAffine> exc;
  if (p.contains("t_search"))
    exc = affines_of(
        exceptional_subspaces(f, req_number(p, "t_search"), opt_number(p, "float_tol", 1e-8)));

  VolumeEstimate ve = lambda_fit(f, omega, a.d, b.d, grid, samples, seed, pool);
  int n = f.Q.n;
  Table t;
  t.cols = {"T", "count", "lambda_hat", "prediction", "ratio", "fit_std_error", "drift",
            "low_stats"};
  for (double T : grid) {
    CountResult r = exc.empty() ? count_n(f, omega, a, b, Scalar(rat_of_double(T)), pool)
                                : count_n_tilde(f, omega, a, b, Scalar(rat_of_double(T)), exc, pool);
    long long c = exc.empty() ? r.n_total : r.n_tilde;
    double pred = ve.lambda_hat * (b.d - a.d) * std::pow(T, n - 2);
    t.rows.push_back({fmt_d(T), fmt_i(c), fmt_d(ve.lambda_hat), fmt_d(pred),
                      fmt_d(pred != 0 ? c / pred : 0.0), fmt_d(ve.std_error), fmt_d(ve.drift),
                      fmt_b(ve.low_stats)});
  }
  return t;
}

Table exp_volume(const Json& p, uint64_t seed, const Pool& pool) {
  reject_unknown_keys(p, {"form", "region", "a", "b", "t_grid", "samples"}, "params");
  InhomForm f = req_inhom(p);
  if (!p.contains("region")) throw ConfigError("params: 'region' required");
  StarRegion omega = region_from_json(p["region"]);
  Scalar a = req_scalar(p, "a"), b = req_scalar(p, "b");
  check_interval(a, b);
  std::vector<double> grid = req_grid(p, "t_grid");
  long long samples = opt_int(p, "samples", 2'000'000);
  VolumeEstimate ve = lambda_fit(f, omega, a.d, b.d, grid, samples, seed, pool);
  Table t;
  t.cols = {"T", "volume", "std_error", "accepted", "low_stats", "lambda_hat", "fit_std_error",
            "drift"};
  for (size_t i = 0; i < grid.size(); ++i) {
    const ShellVolume& sv = ve.per_t[i];
    t.rows.push_back({fmt_d(grid[i]), fmt_d(sv.value), fmt_d(sv.std_error), fmt_i(sv.accepted),
                      fmt_b(sv.low_stats), fmt_d(ve.lambda_hat), fmt_d(ve.std_error),
                      fmt_d(ve.drift)});
  }
  return t;
}

Table exp_subspaces(const Json& p, uint64_t, const Pool&) {
  reject_unknown_keys(p, {"T", "kind"}, "params");
  double T = req_number(p, "T");
  std::string kind = opt_string(p, "kind", "both");
  Table t;
  t.cols = {"kind", "norm", "basis", "wedge"};
  auto emit = [&](const char* label, const std::vector<RationalSubspace>& ls) {
    for (const RationalSubspace& l : ls) {
      Int nn = 0;
      for (const Int& w : l.wedge) nn += w * w;
      mpz_class root;
      mpz_sqrt(root.get_mpz_t(), nn.get_mpz_t());
      t.rows.push_back({label, root.get_str(), join_zmat(l.basis), join_z(l.wedge)});
    }
  };
  if (kind == "first" || kind == "both") emit("first", enumerate_null_first_type(T));
  if (kind == "second" || kind == "both") emit("second", enumerate_null_second_type(T));
  if (kind != "first" && kind != "second" && kind != "both")
    throw ConfigError("params: 'kind' must be first, second, or both");
  return t;
}

Table exp_exceptional(const Json& p, uint64_t, const Pool&) {
  reject_unknown_keys(p, {"form", "t_search", "float_tol"}, "params");
  InhomForm f = req_inhom(p);
  double ts = req_number(p, "t_search");
  auto ws = exceptional_subspaces(f, ts, opt_number(p, "float_tol", 1e-8));
  Table t;
  t.cols = {"type", "residual", "wedge", "basis", "v_xi"};
  for (const ExceptionalWitness& w : ws)
    t.rows.push_back({fmt_i(w.type), fmt_d(w.residual), join_z(w.wedge), join_zmat(w.affine.basis),
                      join_z(w.affine.v_xi)});
  return t;
}

Table exp_quasinull(const Json& p, uint64_t, const Pool&) {
  reject_unknown_keys(p, {"form", "mu1", "t_grid"}, "params");
  if (!p.contains("form")) throw ConfigError("params: 'form' required");
  SymmetricForm q = form_from_json(p["form"]);
  double mu1 = opt_number(p, "mu1", 0.1);
  std::vector<double> grid = req_grid(p, "t_grid");
  Table t;
  t.cols = {"T", "count"};
  for (double T : grid) {
    auto ls = enumerate_quasinull(q, mu1, T);
    t.rows.push_back({fmt_d(T), fmt_i(static_cast<long long>(ls.size()))});
  }
  return t;
}

DiophMode parse_mode(const Json& p) {
  std::string m = opt_string(p, "mode", "per_coordinate");
  if (m == "per_coordinate") return DiophMode::PerCoordinate;
  if (m == "common_denominator") return DiophMode::CommonDenominator;
  throw ConfigError("params: 'mode' must be per_coordinate or common_denominator");
}

std::vector<Scalar> req_xi(const Json& p) {
  if (!p.contains("xi") || !p["xi"].is_array() || p["xi"].empty())
    throw ConfigError("params: 'xi' (nonempty array) required");
  std::vector<Scalar> xi;
  for (const Json& v : p["xi"]) xi.push_back(scalar_from_json(v, "xi"));
  return xi;
}

Table exp_diophantine(const Json& p, uint64_t, const Pool& pool) {
  reject_unknown_keys(p, {"xi", "delta_grid", "mode"}, "params");
  std::vector<Scalar> xi = req_xi(p);
  std::vector<double> grid = req_grid(p, "delta_grid");
  DiophReport rep = estimate_kappa(xi, grid, parse_mode(p), pool);
  Table t;
  t.cols = {"delta", "quality", "witnesses", "kappa_hat", "slope", "c_hat", "rational_at_scale"};
  for (size_t i = 0; i < grid.size(); ++i) {
    std::string ws;
    for (size_t j = 0; j < rep.witnesses[i].size(); ++j) {
      if (j) ws += ' ';
      ws += rep.witnesses[i][j].p.get_str() + "/" + rep.witnesses[i][j].q.get_str();
    }
    t.rows.push_back({fmt_d(grid[i]), fmt_d(rep.quality[i]), ws, fmt_d(rep.kappa_hat),
                      fmt_d(rep.slope), fmt_d(rep.c_hat), fmt_b(rep.rational_at_scale)});
  }
  return t;
}

Table exp_ewas(const Json& p, uint64_t, const Pool& pool) {
  reject_unknown_keys(p, {"form", "r_grid", "coeff_bound", "plane_bound"}, "params");
  if (!p.contains("form")) throw ConfigError("params: 'form' required");
  SymmetricForm q = form_from_json(p["form"]);
  std::vector<long long> rg = req_intgrid(p, "r_grid");
  long long cb = req_int(p, "coeff_bound");
  int pb = static_cast<int>(opt_int(p, "plane_bound", 2));
  EwasReport rep = ewas_search(q, rg, cb, pb, pool);
  Table t;
  t.cols = {"r", "has_candidate", "achieved", "certificate", "exponent_hat", "fit_valid"};
  for (const EwasEntry& e : rep.entries)
    t.rows.push_back({fmt_i(e.r), fmt_b(e.has_candidate), fmt_d(e.achieved),
                      e.has_candidate ? join_zmat(e.certificate) : std::string(),
                      fmt_d(rep.exponent_hat), fmt_b(rep.fit_valid)});
  return t;
}

Table exp_classify(const Json& p, uint64_t, const Pool& pool) {
  reject_unknown_keys(
      p, {"form", "r_grid", "coeff_bound", "delta_grid", "ewas_threshold", "kappa_threshold"},
      "params");
  InhomForm f = req_inhom(p);
  std::vector<long long> rg = req_intgrid(p, "r_grid");
  long long cb = req_int(p, "coeff_bound");
  std::vector<double> dg = req_grid(p, "delta_grid");
  ClassifyReport rep = classify_form(f, rg, cb, dg, opt_number(p, "ewas_threshold", 3.0),
                                     opt_number(p, "kappa_threshold", 4.0), pool);
  const char* verdict = rep.verdict == FormClass::DiophantineEvidence
                            ? "diophantine_evidence"
                            : rep.verdict == FormClass::EwasEvidenceAndShiftNonDioph
                                  ? "ewas_and_shift_non_diophantine"
                                  : "inconclusive";
  Table t;
  t.cols = {"verdict", "ewas_exponent", "ewas_fit_valid", "kappa_hat", "rational_at_scale",
            "ewas_threshold", "kappa_threshold"};
  t.rows.push_back({verdict, fmt_d(rep.ewas.exponent_hat), fmt_b(rep.ewas.fit_valid),
                    fmt_d(rep.dioph.kappa_hat), fmt_b(rep.dioph.rational_at_scale),
                    fmt_d(rep.ewas_exponent_threshold), fmt_d(rep.kappa_threshold)});
  return t;
}

Table exp_spectrum(const Json& p, uint64_t, const Pool& pool) {
  reject_unknown_keys(p, {"basis", "flux", "lambda_max"}, "params");
  Torus torus = req_torus(p);
  double lm = req_number(p, "lambda_max");
  FluxSpectrum s = eigenvalues(torus, lm, pool);
  Table t;
  t.cols = {"index", "lambda"};
  for (size_t i = 0; i < s.values.size(); ++i)
    t.rows.push_back({fmt_i(static_cast<long long>(i)), fmt_d(s.values[i])});
  return t;
}

Table exp_paircorr(const Json& p, uint64_t, const Pool& pool) {
  reject_unknown_keys(p, {"basis", "flux", "a", "b", "T"}, "params");
  Torus torus = req_torus(p);
  double a = req_number(p, "a"), b = req_number(p, "b"), T = req_number(p, "T");
  FluxSpectrum s = eigenvalues(torus, T, pool);
  double R = pair_correlation(s, a, b, T);
  double target = s.weyl_c * s.weyl_c * (b - a);
  WeylCheck wc = weyl_check(s, T / 2);
  Table t;
  t.cols = {"T", "a", "b", "pairs", "R", "target", "deviation", "weyl_c_hat", "weyl_c_theory"};
  t.rows.push_back({fmt_d(T), fmt_d(a), fmt_d(b), fmt_i(llround(R * T)), fmt_d(R), fmt_d(target),
                    fmt_d(std::abs(R / target - 1)), fmt_d(wc.c_hat), fmt_d(wc.c_theory)});
  return t;
}

Table exp_berry_tabor(const Json& p, uint64_t, const Pool& pool) {
  reject_unknown_keys(p, {"basis", "flux", "a", "b", "t_grid"}, "params");
  Torus torus = req_torus(p);
  double a = req_number(p, "a"), b = req_number(p, "b");
  std::vector<double> grid = req_grid(p, "t_grid");
  auto rows = berry_tabor_table(torus, a, b, grid, pool);
  Table t;
  t.cols = {"T", "pairs", "R", "target", "deviation"};
  for (const BerryTaborRow& r : rows)
    t.rows.push_back({fmt_d(r.T), fmt_i(r.pairs), fmt_d(r.R), fmt_d(r.target), fmt_d(r.deviation)});
  return t;
}

Table exp_alpha_moment(const Json& p, uint64_t, const Pool& pool) {
  reject_unknown_keys(p, {"i", "s", "t_grid", "m", "signature", "basis"}, "params");
  int i = static_cast<int>(req_int(p, "i"));
  double s = req_number(p, "s");
  std::vector<double> grid = req_grid(p, "t_grid");
  std::string sg = opt_string(p, "signature", "22");
  OrbitSignature sig;
  int n;
  int m;
  if (sg == "22") {
    sig = OrbitSignature::Sig22;
    n = 4;
    m = static_cast<int>(opt_int(p, "m", 8));
    if (m < 8) throw ConfigError("params: 'm' >= 8 for signature 22");
  } else if (sg == "21") {
    sig = OrbitSignature::Sig21;
    n = 3;
    m = static_cast<int>(opt_int(p, "m", 64));
    if (m < 64) throw ConfigError("params: 'm' >= 64 for signature 21");
  } else {
    throw ConfigError("params: 'signature' must be 22 or 21");
  }
  FullLattice lat;
  lat.basis = opt_basis(p, "basis", n);
  lat.shift = Eigen::VectorXd::Zero(n);
  MomentSweep sweep = orbit_moment_sweep(lat, i, s, grid, m, sig, pool);
  Table t;
  t.cols = {"t", "moment", "slope"};
  for (size_t k = 0; k < grid.size(); ++k)
    t.rows.push_back({fmt_d(grid[k]), fmt_d(sweep.moments[k]), fmt_d(sweep.slope)});
  return t;
}

TestFunction parse_test_function(const Json& p) {
  std::string kind = opt_string(p, "test", "radial_step");
  double scale = opt_number(p, "scale", 1.0);
  if (kind == "radial_step")
    return TestFunction::radial_step(static_cast<int>(opt_int(p, "n", 4)),
                                     opt_number(p, "radius", 1.0), scale);
  if (kind == "radial_tent")
    return TestFunction::radial_tent(static_cast<int>(opt_int(p, "n", 4)),
                                     opt_number(p, "radius", 1.0), scale);
  if (kind == "box") {
    if (!p.contains("halfwidths")) throw ConfigError("params: 'halfwidths' required for box");
    return TestFunction::box(req_grid(p, "halfwidths"), scale);
  }
  throw ConfigError("params: 'test' must be radial_step, box, or radial_tent");
}

Table exp_siegel(const Json& p, uint64_t seed, const Pool& pool) {
  reject_unknown_keys(p, {"test", "n", "radius", "halfwidths", "scale", "basis", "num_shifts"},
                      "params");
  TestFunction f = parse_test_function(p);
  FullLattice lat;
  lat.basis = opt_basis(p, "basis", f.n);
  lat.shift = Eigen::VectorXd::Zero(f.n);
  long long shifts = opt_int(p, "num_shifts", 1000);
  SiegelAverage sa = siegel_average(f, lat, shifts, seed, pool);
  Table t;
  t.cols = {"mean", "std_error", "exact", "shifts", "zscore"};
  double z = sa.std_error > 0 ? (sa.mean - sa.exact) / sa.std_error : 0.0;
  t.rows.push_back({fmt_d(sa.mean), fmt_d(sa.std_error), fmt_d(sa.exact), fmt_i(sa.shifts),
                    fmt_d(z)});
  return t;
}

Table exp_shrink(const Json& p, uint64_t, const Pool& pool) {
  reject_unknown_keys(p, {"basis", "plane", "t_grid", "delta_grid", "m"}, "params");
  if (!p.contains("plane") || !p["plane"].is_object())
    throw ConfigError("params: 'plane' required");
  const Json& pl = p["plane"];
  RationalSubspace l;
  l.ambient = 4;
  if (pl.contains("m") || pl.contains("n")) {
    reject_unknown_keys(pl, {"m", "n", "kind"}, "plane");
    long long m = req_int(pl, "m"), n = req_int(pl, "n");
    bool first = opt_string(pl, "kind", "first") == "first";
    ZVec v1(4, Int(0)), v2(4, Int(0));
    if (first) {
      v1[0] = static_cast<long>(m);
      v1[2] = static_cast<long>(n);
      v2[1] = static_cast<long>(m);
      v2[3] = static_cast<long>(n);
    } else {
      v1[0] = static_cast<long>(m);
      v1[1] = static_cast<long>(n);
      v2[2] = static_cast<long>(m);
      v2[3] = static_cast<long>(n);
    }
    l.basis = {v1, v2};
  } else {
    reject_unknown_keys(pl, {"basis"}, "plane");
    if (!pl.contains("basis") || !pl["basis"].is_array() || pl["basis"].size() != 2)
      throw ConfigError("plane: 'basis' (2x4 integers) required");
    l.basis = zmat(2, 4);
    for (int i = 0; i < 2; ++i) {
      const Json& row = pl["basis"][i];
      if (!row.is_array() || row.size() != 4)
        throw ConfigError("plane: 'basis' (2x4 integers) required");
      for (int j = 0; j < 4; ++j) {
        if (!row[j].is_number_integer()) throw ConfigError("plane: basis entries must be integers");
        l.basis[i][j] = static_cast<long>(row[j].get<long long>());
      }
    }
  }
  l.wedge = wedge2(l.basis[0], l.basis[1]);
  if (z_is_zero(l.wedge)) throw ConfigError("plane: basis rows are dependent");

  FullLattice lat;
  lat.basis = opt_basis(p, "basis", 4);
  lat.shift = Eigen::VectorXd::Zero(4);
  std::vector<double> tg = req_grid(p, "t_grid"), dg = req_grid(p, "delta_grid");
  int m = static_cast<int>(opt_int(p, "m", 64));
  ShrinkProfile prof = shrink_profile(l, lat, tg, dg, m, pool);
  Table t;
  t.cols = {"t", "delta", "measure", "theta_min", "theta_max", "phi_min", "phi_max", "empty",
            "t_exponent", "delta_exponent", "fits_valid"};
  for (const ShrinkRow& r : prof.rows)
    t.rows.push_back({fmt_d(r.t), fmt_d(r.delta), fmt_d(r.measure), fmt_d(r.theta_min),
                      fmt_d(r.theta_max), fmt_d(r.phi_min), fmt_d(r.phi_max), fmt_b(r.empty),
                      fmt_d(prof.t_exponent), fmt_d(prof.delta_exponent),
                      fmt_b(prof.fits_valid)});
  return t;
}

using Handler = Table (*)(const Json&, uint64_t, const Pool&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> h = {
      {"count", exp_count},
      {"asymptotic", exp_asymptotic},
      {"volume", exp_volume},
      {"subspaces", exp_subspaces},
      {"exceptional", exp_exceptional},
      {"quasinull-growth", exp_quasinull},
      {"diophantine", exp_diophantine},
      {"ewas", exp_ewas},
      {"classify", exp_classify},
      {"spectrum", exp_spectrum},
      {"paircorr", exp_paircorr},
      {"berry-tabor", exp_berry_tabor},
      {"alpha-moment", exp_alpha_moment},
      {"siegel", exp_siegel},
      {"shrink-profile", exp_shrink},
  };
  return h;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : handlers()) n.push_back(name);
    return n;
  }();
  return names;
}

std::string render_experiment(const RunOptions& opt) {
  if (opt.format != "csv" && opt.format != "json")
    throw ConfigError("format: must be csv or json");
  Handler fn = nullptr;
  for (const auto& [name, h] : handlers())
    if (name == opt.experiment) fn = h;
  if (!fn) throw ConfigError("experiment: unknown experiment '" + opt.experiment + "'");
  if (!opt.params.is_object()) throw ConfigError("params: config must be a JSON object");

  Pool pool(opt.threads);
  Table t = fn(opt.params, opt.seed, pool);

  if (opt.format == "csv") {
    std::vector<std::string> echo = {
        "experiment=" + opt.experiment,
        "seed=" + std::to_string(opt.seed),
        "params=" + opt.params.dump(),
    };
    return csv_document(echo, t.cols, t.rows);
  }
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row = Json::object();
    for (size_t i = 0; i < t.cols.size(); ++i) row[t.cols[i]] = r[i];
    rows.push_back(row);
  }
  Json j{{"experiment", opt.experiment},
         {"seed", opt.seed},
         {"params", opt.params},
         {"columns", t.cols},
         {"rows", rows}};
  return j.dump(2) + "\n";
}

int run_experiment(const RunOptions& opt) {
  std::string doc = render_experiment(opt);
  if (opt.output.empty())
    std::cout << doc;
  else
    atomic_write(opt.output, doc);
  return 0;
}

}  // namespace qflab
