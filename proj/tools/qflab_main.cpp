#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qflab/acceptance.hpp"
#include "qflab/experiments.hpp"

using namespace qflab;

int main(int argc, char** argv) {
  CLI::App app{"qflab: counting laboratory for inhomogeneous quadratic forms"};
  app.require_subcommand(0, 1);

  RunOptions opt;
  opt.seed = 12345;
  std::string config_path;
  bool list = false;
  app.add_option("--experiment", opt.experiment, "experiment name (--list shows all)");
  app.add_option("--config", config_path, "JSON parameter file (strict schema)");
  app.add_option("--seed", opt.seed, "RNG seed (default 12345)");
  app.add_option("--threads", opt.threads, "worker threads (default: hardware)");
  app.add_option("--output", opt.output, "artifact path (default stdout)");
  app.add_option("--format", opt.format, "csv or json (default csv)");
  app.add_flag("--list", list, "list experiments and exit");

  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
  bool full = false;
  std::string golden_dir;
  int vthreads = 0;
  verify->add_flag("--full", full, "full-scale suite (quick is the default)");
  verify->add_option("--golden-dir", golden_dir, "directory for golden tables");
  verify->add_option("--threads", vthreads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list) {
    for (const std::string& name : experiment_names()) std::cout << name << "\n";
    return 0;
  }

  if (verify->parsed()) {
    Pool pool(vthreads);
    AcceptanceReport rep = run_acceptance(full, golden_dir, pool, std::cout);
    return rep.ok ? 0 : 1;
  }

  if (opt.experiment.empty()) {
    std::cerr << "error: --experiment is required (or use verify / --list)\n";
    return 2;
  }
  if (config_path.empty()) {
    std::cerr << "error: --config is required\n";
    return 2;
  }
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config file '" << config_path << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    opt.params = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    std::cerr << "config error: " << config_path << " is not valid JSON: " << e.what() << "\n";
    return 2;
  }

  try {
    return run_experiment(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}
