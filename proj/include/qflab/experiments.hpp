#pragma once

#include <iosfwd>

#include "qflab/serialize.hpp"
#include "qflab/threadpool.hpp"

namespace qflab {

struct RunOptions {
  std::string experiment;
  Json params;  // experiment-specific keys, strict schema
  uint64_t seed = 0;
  std::string output;  // path; empty -> stdout
  std::string format = "csv";  // csv or json
  int threads = 0;
};

// dispatches to the owning module and writes the artifact atomically.
// Returns 0; throws ConfigError (exit 2) or CapExceeded (exit 3).
int run_experiment(const RunOptions& opt);

// same pipeline, document returned instead of written (opt.output ignored)
std::string render_experiment(const RunOptions& opt);

const std::vector<std::string>& experiment_names();

}  // namespace qflab
