#pragma once

#include "qflab/regions.hpp"
#include "qflab/rng.hpp"
#include "qflab/threadpool.hpp"

namespace qflab {

struct ShellVolume {
  double value = 0;
  double std_error = 0;
  long long accepted = 0;
  long long samples = 0;
  bool low_stats = false;  // fewer than 100 accepted points
};

// Monte Carlo volume of {x in T*Omega : a < Q(x+xi) < b}.  Uniform samples in
// the bounding box [-R,R]^n, R = T*nu_max; batches of 65536 with substream
// rng = CounterRng(seed, batch); binomial standard error.  Deterministic for
// a fixed seed regardless of thread count.
ShellVolume shell_volume_mc(const InhomForm& f, const StarRegion& omega, double a, double b,
                            double T, long long samples, uint64_t seed,
                            const Pool& pool = Pool::serial());

struct VolumeEstimate {
  double lambda_hat = 0;
  double std_error = 0;
  double drift = 0;  // slope of residuals against 1/T
  long long samples = 0;
  uint64_t seed = 0;
  std::vector<double> t_grid;
  std::vector<ShellVolume> per_t;
  bool low_stats = false;
};

// Weighted least squares of Vol/((b-a) T^{n-2}) over the grid, weights
// 1/stderr^2.  Per-T seeds derived from (seed, grid index).
VolumeEstimate lambda_fit(const InhomForm& f, const StarRegion& omega, double a, double b,
                          const std::vector<double>& t_grid, long long samples_per_t,
                          uint64_t seed, const Pool& pool = Pool::serial());

}  // namespace qflab
