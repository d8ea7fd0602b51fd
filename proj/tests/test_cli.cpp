#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iscc/cli.hpp"

using namespace iscc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = parse_and_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("iscc_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("validate-config") {
  CHECK(cli({"validate-config", "--profile", "paper"}).code == kExitOk);
  CHECK(cli({"validate-config"}).code == kExitOk);

  const Outcome missing = cli({"validate-config", "--config", "/nonexistent/iscc.conf"});
  CHECK(missing.code == kExitValidation);
  CHECK(missing.err.find("iscc.conf") != std::string::npos);

  const Outcome bad = cli({"validate-config", "--set", "num_subbands=12"});
  CHECK(bad.code == kExitValidation);
  CHECK_FALSE(bad.err.empty());

  CHECK(cli({"validate-config", "--set", "no_such_key=1"}).code == kExitValidation);
  CHECK(cli({"validate-config", "--set", "noequals"}).code == kExitValidation);
  CHECK(cli({"validate-config", "--profile", "huge"}).code == kExitValidation);
}

TEST_CASE("argument errors and help") {
  CHECK(cli({}).code == kExitValidation);
  CHECK(cli({"frobnicate"}).code == kExitValidation);
  CHECK(cli({"sweep", "--trials", "2"}).code == kExitValidation);  // --out is required
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"run", "--scheme", "NOPE"}).code == kExitValidation);
}

TEST_CASE("oracle-check passes every suite") {
  const Outcome o = cli({"oracle-check"});
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("FAIL") == std::string::npos);
  CHECK(o.out.find("PASS bnb-vs-exhaustive") != std::string::npos);
}

TEST_CASE("run prints a per-vehicle report") {
  const Outcome o = cli({"run", "--scheme", "joint", "--seed", "3"});
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("scheme JOINT") != std::string::npos);
  CHECK(o.out.find("sensing threshold met") != std::string::npos);

  // The computing-centric baseline ignores sensing and misses the threshold here.
  const Outcome c = cli({"run", "--scheme", "CCRA", "--seed", "3"});
  CHECK(c.code == kExitInfeasible);
}

TEST_CASE("sweep, report and an untouched config file") {
  const fs::path dir = scratch("sweep");
  const fs::path conf = dir / "desk.conf";
  {
    std::ofstream f(conf);
    f << "# small instance\nnum_vehicles = 8\nnum_subbands = 3\nsinr_threshold_db = 20\n";
  }
  const std::string before = slurp(conf);
  const Outcome s = cli({"sweep", "--config", conf.string(), "--scheme", "JOINT,FPCR", "--trials", "2", "--sweep",
                         "eta", "--grid", "0.1,0.2", "--threads", "1", "--out", (dir / "out").string()});
  CHECK(s.code == kExitOk);
  for (const char* f : {"raw.csv", "trials.csv", "aggregate.csv", "cdf.csv", "detection.csv", "manifest.json"}) {
    CHECK(fs::exists(dir / "out" / f));
  }
  CHECK(slurp(conf) == before);

  const Outcome r = cli({"report", "--in", (dir / "out").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("JOINT") != std::string::npos);
  CHECK(r.out.find("FPCR") != std::string::npos);
  CHECK(cli({"report", "--in", (dir / "missing").string()}).code == kExitValidation);

  const Outcome unknown = cli({"sweep", "--sweep", "colour", "--grid", "1", "--out", (dir / "x").string()});
  CHECK(unknown.code == kExitValidation);
  fs::remove_all(dir);
}
