#include "qflab/volume.hpp"

#include <cmath>
#include <stdexcept>

namespace qflab {

namespace {
constexpr long long kBatch = 65536;
}

ShellVolume shell_volume_mc(const InhomForm& f, const StarRegion& omega, double a, double b,
                            double T, long long samples, uint64_t seed, const Pool& pool) {
  int n = f.Q.n;
  if (omega.n != n || static_cast<int>(f.xi.size()) != n)
    throw std::invalid_argument("shell_volume_mc: dimension mismatch");
  if (!(a < b) || !(T > 0) || samples <= 0) throw std::invalid_argument("shell_volume_mc: bad window");

  double R = T * omega.nu_max();
  int64_t nbatch = (samples + kBatch - 1) / kBatch;
  std::vector<long long> acc(nbatch, 0);
  pool.run_chunks(nbatch, [&](int64_t bi) {
    CounterRng rng(seed, static_cast<uint64_t>(bi));
    long long lo = bi * kBatch;
    long long hi = std::min(samples, lo + kBatch);
    double x[16];
    long long hits = 0;
    for (long long s = lo; s < hi; ++s) {
      for (int k = 0; k < n; ++k) x[k] = R * rng.next_sym();
      if (!omega.contains(x, T)) continue;
      double v = evaluate_shifted(f, x);
      if (v > a && v < b) ++hits;
    }
    acc[bi] = hits;
  });
  long long hits = 0;
  for (long long h : acc) hits += h;

  double box = std::pow(2 * R, n);
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  ShellVolume out;
  out.accepted = hits;
  out.samples = samples;
  out.value = box * p;
  out.std_error = box * std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(samples));
  out.low_stats = hits < 100;
  return out;
}

VolumeEstimate lambda_fit(const InhomForm& f, const StarRegion& omega, double a, double b,
                          const std::vector<double>& t_grid, long long samples_per_t,
                          uint64_t seed, const Pool& pool) {
  if (t_grid.empty()) throw std::invalid_argument("lambda_fit: empty grid");
  int n = f.Q.n;
  VolumeEstimate est;
  est.seed = seed;
  est.t_grid = t_grid;
  est.samples = samples_per_t * static_cast<long long>(t_grid.size());

  // WLS of y_i = Vol_i/((b-a) T_i^{n-2}) against a constant
  double sw = 0, swy = 0;
  std::vector<double> y(t_grid.size()), w(t_grid.size());
  for (size_t i = 0; i < t_grid.size(); ++i) {
    double T = t_grid[i];
    ShellVolume sv = shell_volume_mc(f, omega, a, b, T, samples_per_t,
                                     CounterRng::derive(seed, 1000 + i), pool);
    est.per_t.push_back(sv);
    est.low_stats = est.low_stats || sv.low_stats;
    double scale = (b - a) * std::pow(T, n - 2);
    y[i] = sv.value / scale;
    double sigma = std::max(sv.std_error / scale, 1e-300);
    w[i] = 1.0 / (sigma * sigma);
    sw += w[i];
    swy += w[i] * y[i];
  }
  est.lambda_hat = swy / sw;
  est.std_error = std::sqrt(1.0 / sw);

  // residual trend against 1/T: nonzero slope flags a visible lower-order term
  double sx = 0, sxx = 0, sxy = 0, sy = 0, sn = 0;
  for (size_t i = 0; i < t_grid.size(); ++i) {
    double u = 1.0 / t_grid[i];
    double r = y[i] - est.lambda_hat;
    sn += 1;
    sx += u;
    sxx += u * u;
    sy += r;
    sxy += u * r;
  }
  double den = sn * sxx - sx * sx;
  est.drift = std::abs(den) > 1e-300 ? (sn * sxy - sx * sy) / den : 0.0;
  return est;
}

}  // namespace qflab
