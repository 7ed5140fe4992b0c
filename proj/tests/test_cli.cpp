#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cliBin() {
  const char* p = std::getenv("PENCIL_CLI_BIN");
  REQUIRE(p != nullptr);
  return p;
}

int runCli(const std::string& args) {
  std::string cmd = cliBin() + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("reduce command emits the canonical system") {
  int rc = runCli("--case example3 --h 1 --command reduce --out /tmp/cli_red");
  CHECK(rc == 0);
  std::string js = slurp("/tmp/cli_red/reduce.json");
  CHECK(js.find("\"Q\"") != std::string::npos);
  CHECK(js.find("\"H\"") != std::string::npos);
  CHECK(js.find("\"W\"") != std::string::npos);
}

TEST_CASE("malformed problem file exits with the parse code") {
  {
    std::ofstream out("/tmp/cli_bad.json");
    out << "{ not json";
  }
  int rc = runCli("--problem /tmp/cli_bad.json --command reduce --out /tmp/cli_badout");
  CHECK(rc == 2);
}

TEST_CASE("unknown command exits with the parse code") {
  int rc = runCli("--case example3 --h 1 --command frobnicate --out /tmp/cli_x");
  CHECK(rc == 2);
}

TEST_CASE("density output is deterministic") {
  std::string common =
      "--case example3 --h 1 --command density --method periodic "
      "--mu-from -0.3 --mu-to 0.3 --mu-step 0.1 ";
  CHECK(runCli(common + "--out /tmp/cli_d1") == 0);
  CHECK(runCli(common + "--out /tmp/cli_d2") == 0);
  CHECK(slurp("/tmp/cli_d1/density.csv") == slurp("/tmp/cli_d2/density.csv"));
  // header + 7 grid points
  std::string csv = slurp("/tmp/cli_d1/density.csv");
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 8);
}

TEST_CASE("verify command passes on a reference case") {
  int rc = runCli("--case example3 --h 1 --command verify --out /tmp/cli_v");
  CHECK(rc == 0);
  std::string js = slurp("/tmp/cli_v/verify.json");
  CHECK(js.find("false") == std::string::npos);
}

TEST_CASE("explicit problem file round trip") {
  {
    std::ofstream out("/tmp/cli_prob.json");
    out << R"({
      "r": 2, "d": 1,
      "l": {"q1": [{"tpow": 0, "lampow": 0, "value": [[1.0]]}],
             "s1": [{"tpow": 0, "lampow": 0, "value": [[1.0]]}]},
      "m": {"r": 2,
             "p0": [{"tpow": 0, "lampow": 0, "value": [[1.0]]}],
             "p1": [{"tpow": 0, "lampow": 0, "value": [[1.0]]}]},
      "n": {"r": 0,
             "p0": [{"tpow": 0, "lampow": -1, "value": [[-1.0]]}]},
      "excluded": [0.0]
    })";
  }
  int rc = runCli("--problem /tmp/cli_prob.json --command reduce --out /tmp/cli_probout");
  CHECK(rc == 0);
}
