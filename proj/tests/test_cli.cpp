#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflab/regions.hpp"
#include "qflab/serialize.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

std::string bin_path() {
  const char* p = std::getenv("QFLAB_BIN");
  REQUIRE(p != nullptr);
  return p;
}

Run run_cli(const std::string& args) {
  std::string cmd = "'" + bin_path() + "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path cfg_dir() {
  fs::path d = fs::temp_directory_path() / "qflab_cli_cfg";
  fs::create_directories(d);
  return d;
}

std::string write_cfg(const std::string& name, const std::string& text) {
  fs::path p = cfg_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

std::vector<std::string> split_csv(const std::string& l) {
  std::vector<std::string> out;
  std::stringstream ss(l);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

const char* kCountCfg = R"({
  "form": {
    "form": {"matrix": [[0,0,0,"1/2"],[0,0,"-1/2",0],[0,"-1/2",0,0],["1/2",0,0,0]]},
    "xi": ["1/3", 0, "-2/5", 0]
  },
  "region": {"kind": "ball", "n": 4, "radius": 1},
  "a": -1, "b": 1, "T": 6
})";

const char* kVolumeCfg = R"({
  "form": {
    "form": {"matrix": [[0,0,0,"1/2"],[0,0,"-1/2",0],[0,"-1/2",0,0],["1/2",0,0,0]]},
    "xi": ["1/3", 0, "-2/5", 0]
  },
  "region": {"kind": "ball", "n": 4, "radius": 1},
  "a": -1, "b": 1, "t_grid": [8, 12], "samples": 60000
})";

}  // namespace

TEST_CASE("--list names every experiment") {
  Run r = run_cli("--list");
  CHECK(r.code == 0);
  std::vector<std::string> names = lines_of(r.out);
  CHECK(names.size() == 15);
  for (const char* want :
       {"count", "asymptotic", "volume", "subspaces", "exceptional", "quasinull-growth",
        "diophantine", "ewas", "classify", "spectrum", "paircorr", "berry-tabor", "alpha-moment",
        "siegel", "shrink-profile"}) {
    bool found = false;
    for (const std::string& n : names) found = found || n == want;
    CHECK_MESSAGE(found, want);
  }
}

TEST_CASE("count experiment emits an annotated csv matching the library") {
  std::string cfg = write_cfg("count.json", kCountCfg);
  Run r = run_cli("--experiment count --config '" + cfg + "'");
  REQUIRE(r.code == 0);
  std::vector<std::string> ls = lines_of(r.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == "# experiment=count");
  CHECK(ls[1] == "# seed=12345");
  CHECK(ls[2].rfind("# params=", 0) == 0);
  CHECK(ls[3] == "a,b,T,n_total,n_tilde,subspaces,excluded,boundary_flags,exact");
  std::vector<std::string> row = split_csv(ls[4]);
  REQUIRE(row.size() == 9);
  CHECK(row[0] == "-1");
  CHECK(row[2] == "6");
  CHECK(row[8] == "1");

  Json j = Json::parse(kCountCfg);
  qflab::InhomForm f = qflab::inhom_from_json(j["form"]);
  qflab::StarRegion omega = qflab::region_from_json(j["region"]);
  qflab::CountResult c =
      qflab::count_n(f, omega, qflab::Scalar(-1), qflab::Scalar(1), qflab::Scalar(6));
  CHECK(row[3] == std::to_string(c.n_total));
}

TEST_CASE("json format mirrors the csv content") {
  std::string cfg = write_cfg("count.json", kCountCfg);
  Run csv = run_cli("--experiment count --config '" + cfg + "'");
  Run js = run_cli("--experiment count --config '" + cfg + "' --format json");
  REQUIRE(csv.code == 0);
  REQUIRE(js.code == 0);
  Json doc = Json::parse(js.out);
  CHECK(doc["experiment"] == "count");
  CHECK(doc["seed"] == 12345);
  CHECK(doc["params"] == Json::parse(kCountCfg));
  REQUIRE(doc["rows"].size() == 1);
  std::vector<std::string> row = split_csv(lines_of(csv.out)[4]);
  CHECK(doc["rows"][0]["n_total"] == row[3]);
  CHECK(doc["rows"][0]["exact"] == row[8]);
  CHECK(doc["columns"].size() == 9);
}

TEST_CASE("seeded reruns are byte identical across thread counts") {
  std::string cfg = write_cfg("volume.json", kVolumeCfg);
  std::string base = "--experiment volume --config '" + cfg + "' --seed 777";
  Run a = run_cli(base + " --threads 1");
  Run b = run_cli(base + " --threads 1");
  Run c = run_cli(base + " --threads 3");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(lines_of(a.out)[1] == "# seed=777");
}

TEST_CASE("--output writes the same bytes atomically") {
  std::string cfg = write_cfg("volume.json", kVolumeCfg);
  fs::path outfile = cfg_dir() / "vol_out.csv";
  fs::remove(outfile);
  std::string base = "--experiment volume --config '" + cfg + "' --seed 777 --threads 2";
  Run direct = run_cli(base);
  Run filed = run_cli(base + " --output '" + outfile.string() + "'");
  REQUIRE(filed.code == 0);
  CHECK(filed.out.empty());
  std::ifstream in(outfile, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == direct.out);
  CHECK_FALSE(fs::exists(outfile.string() + ".tmp"));
}

TEST_CASE("config mistakes exit 2 with a pointed message") {
  std::string good = write_cfg("count.json", kCountCfg);

  Json bogus = Json::parse(kCountCfg);
  bogus["bogus"] = 1;
  std::string with_bogus = write_cfg("bogus.json", bogus.dump());
  Run r = run_cli("--experiment count --config '" + with_bogus + "'");
  CHECK(r.code == 2);
  CHECK(r.out.find("unknown key 'bogus'") != std::string::npos);

  Json swapped = Json::parse(kCountCfg);
  swapped["a"] = 2;
  swapped["b"] = 1;
  std::string bad_iv = write_cfg("interval.json", swapped.dump());
  r = run_cli("--experiment count --config '" + bad_iv + "'");
  CHECK(r.code == 2);
  CHECK(r.out.find("a < b") != std::string::npos);

  std::string not_json = write_cfg("broken.json", "{ not json");
  r = run_cli("--experiment count --config '" + not_json + "'");
  CHECK(r.code == 2);
  CHECK(r.out.find("not valid JSON") != std::string::npos);

  r = run_cli("--experiment count --config /nonexistent/qflab.json");
  CHECK(r.code == 2);
  CHECK(r.out.find("cannot open") != std::string::npos);

  r = run_cli("--experiment nope --config '" + good + "'");
  CHECK(r.code == 2);
  CHECK(r.out.find("unknown experiment 'nope'") != std::string::npos);

  r = run_cli("--experiment count");
  CHECK(r.code == 2);
  CHECK(r.out.find("--config is required") != std::string::npos);

  r = run_cli("--config '" + good + "'");
  CHECK(r.code == 2);
  CHECK(r.out.find("--experiment is required") != std::string::npos);

  r = run_cli("--experiment count --config '" + good + "' --format xml");
  CHECK(r.code == 2);
  CHECK(r.out.find("csv or json") != std::string::npos);

  r = run_cli("--wat");
  CHECK(r.code == 2);
}

TEST_CASE("blown enumeration caps exit 3") {
  Json big = Json::parse(kCountCfg);
  big["T"] = 4000000000000LL;
  std::string cfg = write_cfg("huge.json", big.dump());
  Run r = run_cli("--experiment count --config '" + cfg + "'");
  CHECK(r.code == 3);
  CHECK(r.out.find("cap exceeded") != std::string::npos);
}

TEST_CASE("verify subcommand runs the quick acceptance suite") {
  Run r = run_cli("verify");
  CHECK(r.code == 0);
  CHECK(r.out.find("acceptance: OK (11/11)") != std::string::npos);
  int pass_lines = 0;
  for (const std::string& l : lines_of(r.out))
    if (l.rfind("criterion ", 0) == 0 && l.find(": PASS") != std::string::npos) ++pass_lines;
  CHECK(pass_lines == 11);
}
