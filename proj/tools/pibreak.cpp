#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pibreak/experiments.hpp"
#include "pibreak/oracle.hpp"

#ifndef PIBREAK_VERSION
#define PIBREAK_VERSION "0.0.0"
#endif

namespace {

struct Options {
  std::string config;
  std::string out;
  int threads = 1;
  std::string format;
};

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

int run(const std::string& experiment, const Options& opt) {
  using namespace pibreak;
  const auto start = std::chrono::steady_clock::now();
  RunConfig cfg = load_config(opt.config);
  if (!cfg.experiment.empty() && cfg.experiment != experiment) {
    throw ConfigError(opt.config, 0,
                      "config pins experiment '" + cfg.experiment + "' but '" + experiment + "' was requested");
  }
  if (!opt.out.empty()) cfg.output.directory = opt.out;
  if (opt.format == "json") cfg.output.format = TableFormat::json;
  if (opt.format == "csv") cfg.output.format = TableFormat::csv;

  const ExperimentOutput result = run_experiment(experiment, cfg, opt.threads);
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (const auto& [name, table] : result.tables) {
    outputs.push_back(write_table(table, cfg.output.directory, name, cfg.output.format).filename().string());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::ordered_json manifest;
  manifest["experiment"] = experiment;
  manifest["config"] = opt.config;
  manifest["config_hash"] = config_hash(cfg.source_text);
  manifest["version"] = PIBREAK_VERSION;
  manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION);
  manifest["threads"] = opt.threads;
  manifest["format"] = cfg.output.format == TableFormat::csv ? "csv" : "json";
  manifest["outputs"] = outputs;
  manifest["passed"] = result.passed;
  manifest["wall_time_seconds"] = wall;
  write_text_file(cfg.output.directory / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& [name, table] : result.tables) {
    if (name == "validation") std::cout << to_csv(table);
  }
  std::cerr << experiment << ": wrote " << result.tables.size() << " tables to " << cfg.output.directory.string()
            << " in " << wall << " s\n";
  return result.passed ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact block and mean-field dynamics of inhomogeneous collective spin ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PIBREAK_VERSION);

  Options opt;
  std::string chosen;
  auto add = [&](const std::string& name, const std::string& help, bool hidden = false) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (overrides output.directory)");
    sub->add_option("--threads", opt.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--format", opt.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
    sub->callback([&chosen, name] { chosen = name; });
    if (hidden) sub->group("");
  };
  add("decompose", "Sector weights p_d and p_off of the initial state over a phi_A grid");
  add("evolve-exact", "Exact block evolution of the two-subensemble state");
  add("gap-scan", "Liouvillian gap of a block versus system size");
  add("meanfield", "Mean-field trajectory with spectra and classification");
  add("phase-diagram", "Mean-field dynamical phases over a parameter grid");
  add("spectrum", "Power spectrum and peaks of a CSV time series");
  add("validate", "Cross-check the block engine against the full-space oracle");
  add("oracle", "Alias of validate for debugging", true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    return run(chosen == "oracle" ? "validate" : chosen, opt);
  } catch (const pibreak::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
