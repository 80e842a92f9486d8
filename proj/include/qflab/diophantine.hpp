#pragma once

#include "qflab/forms.hpp"
#include "qflab/threadpool.hpp"

namespace qflab {

struct DiophWitness {
  Int p, q;
  double error = 0;
};

// quality(delta) = max_i min over 0 < q_i < 1/delta (strict) of |xi_i - p/q|.
// Denominators are independent per coordinate (the literal reading of the
// definition); mode common_denominator forces one q for all coordinates.
enum class DiophMode { PerCoordinate, CommonDenominator };

struct DiophQuality {
  double quality = 0;
  std::vector<DiophWitness> witnesses;  // one per coordinate (PerCoordinate mode)
};

DiophQuality dioph_quality(const std::vector<Scalar>& xi, double delta,
                           DiophMode mode = DiophMode::PerCoordinate);

struct DiophReport {
  std::vector<double> delta_grid;
  std::vector<double> quality;
  std::vector<std::vector<DiophWitness>> witnesses;
  double kappa_hat = 0;  // fitted exponent, Dirichlet-normalized: slope - 1
  double slope = 0;      // raw slope of log quality vs log delta
  double c_hat = 0;      // fitted constant exp(intercept)
  bool rational_at_scale = false;
  DiophMode mode = DiophMode::PerCoordinate;
};

// Least-squares fit of log quality against log delta over a geometric grid
// (>= 6 points).  kappa_hat subtracts the Dirichlet baseline of 1 so that
// badly approximable vectors land near 1.  quality == 0 anywhere marks the
// vector RationalAtScale and skips the fit.
DiophReport estimate_kappa(const std::vector<Scalar>& xi, const std::vector<double>& delta_grid,
                           DiophMode mode = DiophMode::PerCoordinate,
                           const Pool& pool = Pool::serial());

// truncated Liouville number sum 10^{-k!}, k = 1..terms
double liouville_value(int terms);

struct RationalMapRow {
  double delta;
  double quality_xi, quality_axi;
};
struct RationalMapReport {
  DiophReport base, mapped;
  std::vector<RationalMapRow> rows;
  double kappa_bound = 0;  // (n+1) * kappa_hat(xi) + 1
  bool within_bound = false;
};

// Twin Diophantine reports for xi and A xi with the linear-map bound
// kappa(Axi) <= (n+1) kappa(xi) + 1 checked at the tested scales (with the
// fitting margin added by the caller's tolerance).
RationalMapReport rational_map_preservation(const std::vector<Scalar>& xi, const QMat& a,
                                            const std::vector<double>& delta_grid,
                                            double margin = 0.5,
                                            const Pool& pool = Pool::serial());

// ----- EWAS search -----

struct EwasEntry {
  long long r = 0;
  bool has_candidate = false;
  SymmetricForm best;        // integral split form Q' (entries integers)
  double achieved = 0;       // || Q - Q'/r || in the max-coefficient norm
  ZMat certificate;          // 2x4 basis of an integral null plane of Q'
};

struct EwasReport {
  std::vector<EwasEntry> entries;
  double exponent_hat = 0;  // fitted N in achieved ~ r^{-N}
  bool fit_valid = false;
  std::string norm = "max-abs-coefficient";
};

// For each r: minimize ||Q - Q'/r|| over integral Q' carrying a certified
// integral null plane.  The search walks a catalog of candidate planes
// (Hermite bases, entries <= plane_bound), rounds the free coefficients of
// r*Q inside each plane's constraint space, and keeps the best certified
// candidate.  Certificates are exact by construction and re-verified.
EwasReport ewas_search(const SymmetricForm& q, const std::vector<long long>& r_grid,
                       long long coeff_bound, int plane_bound = 2,
                       const Pool& pool = Pool::serial());

enum class FormClass { DiophantineEvidence, EwasEvidenceAndShiftNonDioph, Inconclusive };

struct ClassifyReport {
  FormClass verdict = FormClass::Inconclusive;
  EwasReport ewas;
  DiophReport dioph;
  double ewas_exponent_threshold = 0;
  double kappa_threshold = 0;
};

// Def-1.8-style disjunction as evidence at scale: "not EWAS" evidence when
// the fitted approximation exponent stays below ewas_exponent_threshold,
// Diophantine evidence when kappa_hat stays below kappa_threshold.
ClassifyReport classify_form(const InhomForm& f, const std::vector<long long>& r_grid,
                             long long coeff_bound, const std::vector<double>& delta_grid,
                             double ewas_exponent_threshold = 3.0, double kappa_threshold = 4.0,
                             const Pool& pool = Pool::serial());

}  // namespace qflab
