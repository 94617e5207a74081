#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>

namespace fs = std::filesystem;
using Catch::Approx;
using nlohmann::json;

namespace {

struct Run {
  int status;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "andic_cli_test";
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string(ANDIC_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::string data(const std::string& name) { return std::string(ANDIC_DATA) + "/" + name; }

}  // namespace

TEST_CASE("ic on the uniform basis measure", "[cli]") {
  const Run r = run("ic " + data("uniform_k2.json"));
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["external_bits"].get<double>() == Approx(1.0).margin(1e-9));
  CHECK(j["internal_bits"].get<double>() == Approx(0.0).margin(1e-9));
}

TEST_CASE("ic on a point mass", "[cli]") {
  const Run r = run("ic " + data("point_k2.json"));
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["external_bits"].get<double>() == 0.0);
  CHECK(j["internal_bits"].get<double>() == 0.0);
}

TEST_CASE("error objects and exit codes", "[cli]") {
  const Run missing = run("ic /nonexistent/measure.json");
  CHECK(missing.status == 2);
  CHECK(json::parse(missing.err)["error"] == "parse");

  const Run flag = run("ic " + data("uniform_k2.json") + " --no-such-flag");
  CHECK(flag.status == 3);
  CHECK(json::parse(flag.err)["error"] == "invalid_argument");

  const fs::path file = fs::temp_directory_path() / "andic_cli_test" / "bad.json";
  std::ofstream(file) << R"({"k": 3, "mass": {"110": 1.0}})";
  const Run bad = run("ic - < " + file.string());
  CHECK(bad.status == 5);
  CHECK(json::parse(bad.err)["exit_code"] == 5);
}

TEST_CASE("uniform csv", "[cli]") {
  const Run r = run("uniform --k 2 3 --format csv");
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("k,closed_external_bits", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);

  const Run commas = run("uniform --k 2,3 --format csv");
  REQUIRE(commas.status == 0);
  CHECK(commas.out == r.out);
}

TEST_CASE("maximize with a trace file", "[cli]") {
  const fs::path trace = fs::temp_directory_path() / "andic_cli_test" / "trace.csv";
  const Run r = run("maximize --zero 11 --trace " + trace.string());
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["value_bits"].get<double>() == Approx(0.4827).margin(5e-4));
  CHECK(j["status"] == "converged");
  CHECK(slurp(trace).rfind("evaluation,phase,value_bits,best_bits", 0) == 0);
}

TEST_CASE("byte-identical output for identical runs", "[cli]") {
  const std::string args = "simulate-signal " + data("thirds_k2.json") + " --signal " + data("signal_reveal_x1.json") +
                           " --eps 0.1 --traces 200 --seed 5";
  const Run a = run(args);
  const Run b = run(args + " --workers 2");
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out)["bad_steps"] == 0);

  const Run c = run("continuity-check --pairs 10 --seed 3");
  const Run d = run("continuity-check --pairs 10 --seed 3");
  CHECK(c.status == 0);
  CHECK(c.out == d.out);
}

TEST_CASE("discretize and verify-concavity tables", "[cli]") {
  const Run disc = run("discretize " + data("thirds_k2.json") + " --j-from 3 --j-to 5");
  REQUIRE(disc.status == 0);
  CHECK(std::count(disc.out.begin(), disc.out.end(), '\n') == 4);

  const Run conc = run("verify-concavity --k 2 --beta 0.1 --eps 0.01");
  REQUIRE(conc.status == 0);
  CHECK(conc.out.rfind("k,s,beta,eps,feasible", 0) == 0);
  CHECK(std::count(conc.out.begin(), conc.out.end(), '\n') == 3);
}
