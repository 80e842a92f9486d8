#pragma once

// Independent reference implementations for the tests.  Everything here is
// deliberately naive: nested loops, direct scans, O(N^2) pair walks.  None of
// it shares code with the library paths it checks.

#include <Eigen/Dense>
#include <vector>

#include "qflab/diophantine.hpp"
#include "qflab/forms.hpp"
#include "qflab/regions.hpp"

namespace qflab::oracle {

// exact count of integer points x in T*Omega (strict) with a < Q(x+xi) < b.
// All data must be rational; region kinds Ball / Ellipsoid / MaxSplit.
long long brute_count_exact(const InhomForm& f, const StarRegion& omega, const Rat& a,
                            const Rat& b, const Rat& T);

// same census with the excluded set removed: points with x + v in the row
// span of basis (annihilator rows pair to zero) do not count
long long brute_count_excluded(const InhomForm& f, const StarRegion& omega, const Rat& a,
                               const Rat& b, const Rat& T,
                               const std::vector<ExceptionalAffine>& exc);

// direct scan of the approximation quality over every denominator < 1/delta
double dioph_scan(const std::vector<double>& xi, double delta, DiophMode mode);

// ordered pairs (j,k), j != k, both values < T, difference in [a,b], over T
double pair_correlation_n2(const std::vector<double>& values, double a, double b, double T);

// midpoint-grid volume of {x in T*Omega : a < Q(x+xi) < b}
double grid_shell_volume(const InhomForm& f, const StarRegion& omega, double a, double b,
                         double T, int divisions);

// shortest nonzero vector of basis * Z^n over the coefficient box
double shortest_vector(const Eigen::MatrixXd& basis, int coeff_bound);

// columns generate the dual lattice
Eigen::MatrixXd dual_basis(const Eigen::MatrixXd& basis);

// number of lattice points of basis*Z^n + shift with ||v|| <= r
long long lattice_points_in_ball(const Eigen::MatrixXd& basis, const Eigen::VectorXd& shift,
                                 double r, int coeff_bound);

}  // namespace qflab::oracle
