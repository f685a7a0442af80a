#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "pibreak/config.hpp"
#include "pibreak/table.hpp"

using namespace pibreak;
using std::numbers::pi;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pibreak_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("doubles round trip through their text form") {
  for (const double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 1e-17}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("csv round trip and quoting") {
  Table t;
  t.columns = {"name", "count", "value"};
  t.add_row({std::string("plain"), 3LL, 0.1});
  t.add_row({std::string("with, comma"), -7LL, 1.0 / 3.0});
  t.add_row({std::string("say \"hi\""), 0LL, -1e-12});
  const std::string csv = to_csv(t);
  CHECK(csv.find("\"with, comma\"") != std::string::npos);
  CHECK(csv.find("\"say \"\"hi\"\"\"") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);

  const Table back = parse_csv(csv);
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == 3);
  CHECK(back.text(1, "name") == "with, comma");
  CHECK(back.text(2, "name") == "say \"hi\"");
  CHECK(back.number(1, "count") == -7.0);
  CHECK(back.number(1, "value") == 1.0 / 3.0);
  CHECK(std::holds_alternative<long long>(back.rows[0][1]));
  CHECK_THROWS(back.column_index("missing"));
}

TEST_CASE("row width is checked") {
  Table t;
  t.columns = {"a", "b"};
  CHECK_THROWS(t.add_row({1LL}));
}

TEST_CASE("empty tables keep their header") {
  Table t;
  t.columns = {"t", "x"};
  CHECK(to_csv(t) == "t,x\n");
  const auto dir = scratch_dir("empty");
  const auto path = write_table(t, dir, "empty", TableFormat::csv);
  CHECK(path.filename() == "empty.csv");
  CHECK(read_csv(path).rows.empty());
}

TEST_CASE("json tables") {
  Table t;
  t.columns = {"k", "v"};
  t.add_row({std::string("a"), 1.5});
  const auto j = nlohmann::json::parse(to_json(t));
  REQUIRE(j.is_array());
  CHECK(j[0]["k"] == "a");
  CHECK(j[0]["v"] == 1.5);
  const auto dir = scratch_dir("json");
  CHECK(write_table(t, dir, "tab", TableFormat::json).filename() == "tab.json");
  CHECK(nlohmann::json::parse(slurp(dir / "tab.json")) == j);
}

TEST_CASE("angles") {
  CHECK(parse_angle("0.25") == 0.25);
  CHECK(parse_angle("pi") == doctest::Approx(pi));
  CHECK(parse_angle("pi/4") == doctest::Approx(pi / 4));
  CHECK(parse_angle("-3pi/4") == doctest::Approx(-3 * pi / 4));
  CHECK(parse_angle("2*pi/3") == doctest::Approx(2 * pi / 3));
  CHECK(parse_angle("0.5pi") == doctest::Approx(pi / 2));
  CHECK_THROWS_AS(parse_angle("tau"), DomainError);
}

TEST_CASE("ranges") {
  CHECK(Range{1.0, 2.0, 1}.values() == std::vector<double>{1.0});
  const auto v = Range{0.0, 1.0, 5}.values();
  REQUIRE(v.size() == 5);
  CHECK(v[2] == doctest::Approx(0.5));
  CHECK(v.back() == 1.0);
}

TEST_CASE("configuration defaults") {
  const auto cfg = parse_config("ensemble:\n  subensembles:\n    - {n: 4}\n    - {n: 4, phi: pi/2}\n");
  CHECK(cfg.model == ModelKind::dicke);
  CHECK(cfg.experiment.empty());
  CHECK(cfg.dicke.omega_z == 0.1);
  CHECK(cfg.dicke.n_total == 8);
  CHECK(cfg.ensemble.subensembles[1].params.phi == doctest::Approx(pi / 2));
  CHECK(cfg.output.format == TableFormat::csv);
  CHECK(cfg.gap_scan.sizes == std::vector<int>{16, 24, 32, 48, 64});
}

TEST_CASE("g_over_gcr resolves against the ensemble size") {
  const auto cfg = parse_config(
      "ensemble:\n  subensembles:\n    - {n: 5}\n    - {n: 5}\ndicke:\n  g_over_gcr: 2.0\n");
  const auto p = cfg.dicke_at(10);
  CHECK(p.g == doctest::Approx(2.0 * dicke_gcr(p)));
}

TEST_CASE("config errors carry the line") {
  const std::string text = "model: dicke\ndicke:\n  omega_z: 0.2\n  wobble: 1\n";
  try {
    parse_config(text, "bad.yaml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("bad.yaml:4") != std::string::npos);
    CHECK(std::string(e.what()).find("wobble") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("dicke:\n  g: 1\n  g_over_gcr: 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gap_scan:\n  sizes: [16, 17]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment: dance\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("model: [unclosed\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("ensemble:\n  subensembles:\n    - {n: 2, theta: 4}\n"), ConfigError);
}

TEST_CASE("custom models") {
  const auto cfg = parse_config(
      "model: custom\n"
      "custom:\n"
      "  n_total: 4\n"
      "  hamiltonian:\n"
      "    - {factors: [x], coefficient: 1.5}\n"
      "    - {factors: [x, x], coefficient: 0.2, n_power_scaling: true}\n"
      "  jumps:\n"
      "    - [{op: minus}]\n"
      "  rates: [[0.5]]\n");
  CHECK(cfg.model == ModelKind::custom);
  const auto spec = cfg.lindblad_spec(4);
  REQUIRE(spec.hamiltonian.size() == 2);
  CHECK(spec.hamiltonian[1].n_power_scaling);
  CHECK(spec.hamiltonian[1].factors.size() == 2);
  REQUIRE(spec.jumps.size() == 1);
  CHECK(spec.jumps[0].terms[0].first == Component::minus);
  CHECK(spec.rates(0, 0).real() == 0.5);
  CHECK_THROWS_AS(parse_config("model: custom\ncustom:\n  n_total: 2\n  jumps:\n    - [{op: minus}]\n  rates: [[1, 0]]\n"),
                  ConfigError);
}

TEST_CASE("config hash") {
  const auto h = config_hash("a: 1\n");
  CHECK(h.size() == 16);
  CHECK(h == config_hash("a: 1\n"));
  CHECK(h != config_hash("a: 2\n"));
  CHECK(config_hash("") == "cbf29ce484222325");
}
