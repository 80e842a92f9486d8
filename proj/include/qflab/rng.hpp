#pragma once
#include <cstdint>

namespace qflab {

// Counter-based splitmix64.  Output i of stream (seed, stream) is
// mix(key + i*GAMMA) with key = derive(seed, stream), so any draw is a pure
// function of (seed, stream, i): reproducible across platforms and thread
// counts.  Experiment code must use this generator, never std::mt19937.
struct CounterRng {
  static constexpr const char* kName = "splitmix64-counter";
  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  uint64_t key;
  uint64_t ctr = 0;

  explicit CounterRng(uint64_t seed, uint64_t stream = 0) : key(derive(seed, stream)) {}

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static uint64_t derive(uint64_t seed, uint64_t stream) {
    return mix(seed ^ mix(stream * kGamma + 0xD1B54A32D192ED03ull));
  }

  uint64_t next_u64() { return mix(key + (++ctr) * kGamma); }

  // uniform in [0,1), 53 random bits
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [-1,1)
  double next_sym() { return 2.0 * next_unit() - 1.0; }

  // unbiased uniform in [0,n) by rejection
  uint64_t next_below(uint64_t n) {
    uint64_t lim = ~0ull - ~0ull % n;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= lim);
    return v % n;
  }
};

}  // namespace qflab
