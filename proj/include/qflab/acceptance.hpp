#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qflab/threadpool.hpp"

namespace qflab {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// Runs the acceptance suite.  quick shrinks the scales to fit interactive
// runs; full uses the stated parameters.  golden_dir, when nonempty, is
// where full runs emit their tables (dated subdirectory) and where verify
// compares against committed goldens; drift sets ok=false.
struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool ok = false;
};

AcceptanceReport run_acceptance(bool full, const std::string& golden_dir, const Pool& pool,
                                std::ostream& log);

}  // namespace qflab
