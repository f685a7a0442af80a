#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("PIBREAK_CLI");
  REQUIRE_MESSAGE(p != nullptr, "PIBREAK_CLI is not set");
  return p;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pibreak_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = "\"" + cli() + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(err)};
}

const char* kDecompose =
    "experiment: decompose\n"
    "ensemble:\n"
    "  subensembles:\n"
    "    - {n: 4, theta: pi/2, phi: 0}\n"
    "    - {n: 4, theta: pi/2, phi: 0}\n"
    "decompose:\n"
    "  phi_a: {start: 0, stop: pi, count: 3}\n";

}  // namespace

TEST_CASE("decompose writes tables and a manifest") {
  const auto dir = scratch("decompose");
  write(dir / "run.yaml", kDecompose);
  const auto r = run("decompose --config " + (dir / "run.yaml").string() + " --out " + (dir / "a").string(), dir);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const char* f : {"p_d.csv", "p_off.csv", "decompose_summary.csv", "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(dir / "a" / f), f);
  }
  const auto m = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(m["experiment"] == "decompose");
  CHECK(m["config_hash"].get<std::string>().size() == 16);
  CHECK(m["passed"] == true);

  const auto again = run("decompose --config " + (dir / "run.yaml").string() + " --out " + (dir / "b").string(), dir);
  REQUIRE(again.code == 0);
  for (const char* f : {"p_d.csv", "p_off.csv", "decompose_summary.csv"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
}

TEST_CASE("json output") {
  const auto dir = scratch("json");
  write(dir / "run.yaml", kDecompose);
  const auto r = run("decompose --format json --config " + (dir / "run.yaml").string() + " --out " + (dir / "o").string(), dir);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto j = nlohmann::json::parse(slurp(dir / "o" / "p_d.json"));
  CHECK(j.is_array());
  CHECK_FALSE(j.empty());
}

TEST_CASE("malformed configs fail with a located message") {
  const auto dir = scratch("bad");
  write(dir / "bad.yaml", "ensemble:\n  subensembles:\n    - {n: 2}\n  colour: red\n");
  const auto r = run("decompose --config " + (dir / "bad.yaml").string() + " --out " + (dir / "o").string(), dir);
  CHECK(r.code == 1);
  CHECK(r.err.find("bad.yaml:4") != std::string::npos);
  CHECK(r.err.find("colour") != std::string::npos);

  CHECK(run("decompose --config " + (dir / "absent.yaml").string(), dir).code == 1);
  CHECK(run("no-such-command", dir).code == 1);
}

TEST_CASE("pinned experiment must match the subcommand") {
  const auto dir = scratch("pinned");
  write(dir / "run.yaml", kDecompose);
  CHECK(run("meanfield --config " + (dir / "run.yaml").string() + " --out " + (dir / "o").string(), dir).code == 1);
}

TEST_CASE("validate passes on a small ensemble") {
  const auto dir = scratch("validate");
  write(dir / "run.yaml",
        "model: btc\n"
        "btc: {omega_x: 1.5, kappa: 1.0}\n"
        "ensemble:\n"
        "  subensembles:\n"
        "    - {n: 2, theta: pi/2}\n"
        "    - {n: 2, theta: pi/3, phi: pi/4}\n"
        "validate: {t_final: 5, samples: 6}\n");
  const auto r = run("validate --config " + (dir / "run.yaml").string() + " --out " + (dir / "o").string(), dir);
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(fs::exists(dir / "o" / "validation.csv"));
  CHECK_FALSE(r.out.empty());
}

TEST_CASE("evolve-exact handles the singlet sector") {
  const auto dir = scratch("evolve");
  write(dir / "run.yaml",
        "experiment: evolve-exact\n"
        "dicke: {g: 0.5}\n"
        "ensemble:\n"
        "  subensembles:\n"
        "    - {n: 2, theta: pi/2}\n"
        "    - {n: 2, theta: pi/2, phi: pi/2}\n"
        "evolve: {t_final: 5, samples: 11}\n");
  const auto r = run("evolve-exact --config " + (dir / "run.yaml").string() + " --out " + (dir / "o").string(), dir);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const char* f : {"sectors.csv", "observables.csv", "coherences.csv", "decay.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / "o" / f), f);
  }
}
