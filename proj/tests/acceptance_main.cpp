#include <cstring>
#include <iostream>

#include "qflab/acceptance.hpp"

int main(int argc, char** argv) {
  bool full = false;
  std::string golden_dir;
  int threads = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full") == 0) {
      full = true;
    } else if (std::strcmp(argv[i], "--quick") == 0) {
      full = false;
    } else if (std::strcmp(argv[i], "--golden-dir") == 0 && i + 1 < argc) {
      golden_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
      threads = std::stoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance_gate [--quick|--full] [--golden-dir DIR] [--threads N]\n";
      return 2;
    }
  }
  qflab::Pool pool(threads);
  auto rep = qflab::run_acceptance(full, golden_dir, pool, std::cout);
  return rep.ok ? 0 : 1;
}
