#pragma once
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace qflab {

// Fixed-chunk work distribution: chunk -> result-slot mapping is part of the
// work layout, not the schedule, so callers reduce slot arrays in index order
// and get bit-identical results for any thread count.
class Pool {
 public:
  explicit Pool(int threads = 0)
      : nthreads_(threads > 0 ? threads
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))) {}

  int threads() const { return nthreads_; }

  static const Pool& serial() {
    static const Pool p(1);
    return p;
  }

  void run_chunks(int64_t nchunks, const std::function<void(int64_t)>& body) const {
    if (nchunks <= 0) return;
    int workers = static_cast<int>(std::min<int64_t>(nthreads_, nchunks));
    if (workers <= 1) {
      for (int64_t i = 0; i < nchunks; ++i) body(i);
      return;
    }
    std::atomic<int64_t> next{0};
    std::vector<std::thread> ts;
    ts.reserve(workers);
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w) {
      ts.emplace_back([&] {
        for (;;) {
          int64_t i = next.fetch_add(1);
          if (i >= nchunks || failed.load()) return;
          try {
            body(i);
          } catch (...) {
            if (!failed.exchange(true)) err = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : ts) t.join();
    if (failed.load()) std::rethrow_exception(err);
  }

 private:
  int nthreads_;
};

}  // namespace qflab
