#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qflab/diophantine.hpp"
#include "qflab/experiments.hpp"
#include "qflab/latgeo.hpp"
#include "qflab/serialize.hpp"
#include "qflab/spectra.hpp"
#include "qflab/subspaces.hpp"
#include "qflab/volume.hpp"

namespace py = pybind11;
using namespace qflab;

namespace {

// dict / list / str / number -> Json, through the same config grammar the CLI
// uses, so "1/2" and "sqrt(2)-1" stay exact
Json json_of(const py::handle& v, const char* what) {
  if (py::isinstance<py::str>(v)) {
    try {
      return Json::parse(v.cast<std::string>());
    } catch (const Json::parse_error&) {
      throw ConfigError(std::string(what) + ": not valid JSON");
    }
  }
  auto dumped = py::module_::import("json").attr("dumps")(v).cast<std::string>();
  return Json::parse(dumped);
}

Scalar scalar_of(const py::handle& v, const char* what) {
  return scalar_from_json(json_of(v, what), what);
}

Torus torus_of(const py::object& basis, const py::object& flux) {
  Json jb = json_of(basis, "basis");
  Json jf = json_of(flux, "flux");
  if (!jb.is_array() || jb.size() != 2) throw ConfigError("basis: 2x2 matrix required");
  Torus t;
  t.basis = qmat(2, 2);
  for (int i = 0; i < 2; ++i) {
    if (!jb[i].is_array() || jb[i].size() != 2) throw ConfigError("basis: 2x2 matrix required");
    for (int j = 0; j < 2; ++j) {
      Scalar s = scalar_from_json(jb[i][j], "basis");
      if (!s.rational) throw ConfigError("basis: rational entries required");
      t.basis[i][j] = s.q;
    }
  }
  if (!jf.is_array() || jf.size() != 2) throw ConfigError("flux: 2 entries required");
  for (const auto& e : jf) t.flux.push_back(scalar_from_json(e, "flux"));
  return t;
}

FullLattice lattice_of(const py::object& basis, const py::object& shift) {
  Json jb = json_of(basis, "basis");
  if (!jb.is_array() || jb.empty()) throw ConfigError("basis: square matrix required");
  int n = static_cast<int>(jb.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!jb[i].is_array() || static_cast<int>(jb[i].size()) != n)
      throw ConfigError("basis: square matrix required");
    for (int j = 0; j < n; ++j) m(i, j) = scalar_from_json(jb[i][j], "basis").value();
  }
  FullLattice lat;
  lat.basis = m;
  lat.shift = Eigen::VectorXd::Zero(n);
  if (!shift.is_none()) {
    Json js = json_of(shift, "shift");
    if (!js.is_array() || static_cast<int>(js.size()) != n)
      throw ConfigError("shift: length must match the basis dimension");
    for (int i = 0; i < n; ++i) lat.shift[i] = scalar_from_json(js[i], "shift").value();
  }
  return lat;
}

py::list z_list(const ZVec& v) {
  py::list out;
  for (const Int& x : v) out.append(static_cast<long long>(x.get_si()));
  return out;
}

py::list z_nested(const ZMat& m) {
  py::list out;
  for (const ZVec& row : m) out.append(z_list(row));
  return out;
}

py::dict count_dict(const CountResult& r, size_t n_subspaces) {
  py::dict d;
  d["n_total"] = r.n_total;
  d["n_tilde"] = r.n_tilde;
  d["subspaces"] = n_subspaces;
  py::list exc;
  for (long long e : r.excluded) exc.append(e);
  d["excluded"] = exc;
  d["boundary_flags"] = r.boundary_flags;
  d["exact"] = r.exact;
  return d;
}

}  // namespace

PYBIND11_MODULE(pyqflab, m) {
  m.doc() = "counting, volume, spectral and lattice-average operations for "
            "inhomogeneous quadratic forms";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);

  m.def("experiment_names", [] { return experiment_names(); },
        "registered experiment names, registry order");

  m.def(
      "run_experiment",
      [](const std::string& experiment, const py::object& params, uint64_t seed, int threads,
         const std::string& format) {
        RunOptions opt;
        opt.experiment = experiment;
        opt.params = json_of(params, "params");
        opt.seed = seed;
        opt.threads = threads;
        opt.format = format;
        return render_experiment(opt);
      },
      py::arg("experiment"), py::arg("params"), py::arg("seed") = 12345, py::arg("threads") = 0,
      py::arg("format") = "csv",
      "run a registered experiment and return the document the CLI would write");

  m.def(
      "count",
      [](const py::object& form, const py::object& region, const py::object& a,
         const py::object& b, const py::object& t, double exceptional_t_search, double float_tol,
         int threads) {
        InhomForm f = inhom_from_json(json_of(form, "form"));
        StarRegion omega = region_from_json(json_of(region, "region"));
        Scalar sa = scalar_of(a, "a"), sb = scalar_of(b, "b"), st = scalar_of(t, "T");
        Pool pool(threads);
        if (exceptional_t_search > 0) {
          auto wit = exceptional_subspaces(f, exceptional_t_search, float_tol);
          std::vector<ExceptionalAffine> exc;
          exc.reserve(wit.size());
          for (auto& w : wit) exc.push_back(w.affine);
          return count_dict(count_n_tilde(f, omega, sa, sb, st, exc, pool), exc.size());
        }
        return count_dict(count_n(f, omega, sa, sb, st, pool), 0);
      },
      py::arg("form"), py::arg("region"), py::arg("a"), py::arg("b"), py::arg("T"),
      py::arg("exceptional_t_search") = 0.0, py::arg("float_tol") = 1e-8, py::arg("threads") = 0,
      "N(a,b,T); with exceptional_t_search > 0 also the count with exceptional "
      "subspaces up to that norm excluded");

  m.def(
      "lambda_fit",
      [](const py::object& form, const py::object& region, const py::object& a,
         const py::object& b, const std::vector<double>& t_grid, long long samples_per_t,
         uint64_t seed, int threads) {
        InhomForm f = inhom_from_json(json_of(form, "form"));
        StarRegion omega = region_from_json(json_of(region, "region"));
        VolumeEstimate v = lambda_fit(f, omega, scalar_of(a, "a").value(),
                                      scalar_of(b, "b").value(), t_grid, samples_per_t, seed,
                                      Pool(threads));
        py::dict d;
        d["lambda_hat"] = v.lambda_hat;
        d["std_error"] = v.std_error;
        d["drift"] = v.drift;
        d["samples"] = v.samples;
        d["seed"] = v.seed;
        d["t_grid"] = v.t_grid;
        py::list per_t;
        for (size_t i = 0; i < v.per_t.size(); ++i) {
          py::dict row;
          row["t"] = v.t_grid[i];
          row["volume"] = v.per_t[i].value;
          row["std_error"] = v.per_t[i].std_error;
          row["accepted"] = v.per_t[i].accepted;
          row["samples"] = v.per_t[i].samples;
          row["low_stats"] = v.per_t[i].low_stats;
          per_t.append(row);
        }
        d["per_t"] = per_t;
        d["low_stats"] = v.low_stats;
        return d;
      },
      py::arg("form"), py::arg("region"), py::arg("a"), py::arg("b"), py::arg("t_grid"),
      py::arg("samples_per_t") = 200000, py::arg("seed") = 12345, py::arg("threads") = 0,
      "Monte Carlo fit of the volume coefficient lambda(Q, Omega)");

  m.def(
      "eigenvalues",
      [](const py::object& basis, const py::object& flux, double lambda_max, int threads) {
        FluxSpectrum s = eigenvalues(torus_of(basis, flux), lambda_max, Pool(threads));
        return s.values;
      },
      py::arg("basis"), py::arg("flux"), py::arg("lambda_max"), py::arg("threads") = 0,
      "sorted flux-torus Laplace eigenvalues up to lambda_max");

  m.def(
      "pair_correlation",
      [](const py::object& basis, const py::object& flux, double a, double b, double t,
         int threads) {
        Torus torus = torus_of(basis, flux);
        auto rows = berry_tabor_table(torus, a, b, {t}, Pool(threads));
        const BerryTaborRow& r = rows.at(0);
        py::dict d;
        d["T"] = r.T;
        d["pairs"] = r.pairs;
        d["R"] = r.R;
        d["target"] = r.target;
        d["deviation"] = r.deviation;
        return d;
      },
      py::arg("basis"), py::arg("flux"), py::arg("a"), py::arg("b"), py::arg("T"),
      py::arg("threads") = 0,
      "pair correlation R(a,b,T) against the Berry-Tabor target");

  m.def(
      "estimate_kappa",
      [](const py::object& xi, const std::vector<double>& delta_grid, const std::string& mode,
         int threads) {
        Json jx = json_of(xi, "xi");
        if (!jx.is_array() || jx.empty()) throw ConfigError("xi: nonempty array required");
        std::vector<Scalar> v;
        for (const auto& e : jx) v.push_back(scalar_from_json(e, "xi"));
        DiophMode dm;
        if (mode == "per_coordinate")
          dm = DiophMode::PerCoordinate;
        else if (mode == "common_denominator")
          dm = DiophMode::CommonDenominator;
        else
          throw ConfigError("mode: per_coordinate or common_denominator");
        DiophReport rep = estimate_kappa(v, delta_grid, dm, Pool(threads));
        py::dict d;
        d["kappa_hat"] = rep.kappa_hat;
        d["slope"] = rep.slope;
        d["c_hat"] = rep.c_hat;
        d["rational_at_scale"] = rep.rational_at_scale;
        d["delta_grid"] = rep.delta_grid;
        d["quality"] = rep.quality;
        return d;
      },
      py::arg("xi"), py::arg("delta_grid"), py::arg("mode") = "per_coordinate",
      py::arg("threads") = 0,
      "Diophantine exponent fit over a geometric delta grid (>= 6 points)");

  m.def(
      "exceptional_subspaces",
      [](const py::object& form, double t_search, double float_tol) {
        InhomForm f = inhom_from_json(json_of(form, "form"));
        auto wit = exceptional_subspaces(f, t_search, float_tol);
        py::list out;
        for (const auto& w : wit) {
          py::dict d;
          d["basis"] = z_nested(w.affine.basis);
          d["annihilator"] = z_nested(w.affine.annihilator);
          d["shift"] = z_list(w.affine.v_xi);
          d["wedge"] = z_list(w.wedge);
          d["residual"] = w.residual;
          d["type"] = w.type;
          out.append(d);
        }
        return out;
      },
      py::arg("form"), py::arg("t_search"), py::arg("float_tol") = 1e-8,
      "null subspaces through xi + Z^n with wedge norm up to t_search");

  m.def(
      "alpha",
      [](const py::object& basis, int i, const py::object& shift, long long search_cap) {
        AlphaResult r = alpha_i(lattice_of(basis, shift), i, search_cap);
        py::dict d;
        d["value"] = r.value;
        d["min_covol"] = r.min_covol;
        d["saturated"] = r.saturated;
        return d;
      },
      py::arg("basis"), py::arg("i"), py::arg("shift") = py::none(),
      py::arg("search_cap") = 4,
      "certified lower bound for alpha_i of the lattice generated by the "
      "columns of basis");
}
