#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pibreak/config.hpp"
#include "pibreak/table.hpp"

namespace pibreak {

/// Named tables produced by one experiment, in emission order.
struct ExperimentOutput {
  std::vector<std::pair<std::string, Table>> tables;
  /// False when a validation check failed.
  bool passed = true;
};

ExperimentOutput run_decompose(const RunConfig& cfg);
ExperimentOutput run_evolve_exact(const RunConfig& cfg);
ExperimentOutput run_gap_scan(const RunConfig& cfg, int threads = 1);
ExperimentOutput run_meanfield(const RunConfig& cfg);
ExperimentOutput run_phase_diagram(const RunConfig& cfg, int threads = 1);
ExperimentOutput run_spectrum(const RunConfig& cfg);
ExperimentOutput run_validate(const RunConfig& cfg);

ExperimentOutput run_experiment(const std::string& name, const RunConfig& cfg, int threads = 1);

/// Mean-field trajectory of the configured model and ensemble in sector form
/// (column 0 symmetric, then the modes). Dicke runs use spin units, BTC runs
/// units of N/2.
VectorTrajectory mf_trajectory(const RunConfig& cfg);

/// Ensemble with the second subensemble rotated to phi_1 + phi_a.
EnsembleSpec with_phi_a(const EnsembleSpec& e, double phi_a);

}  // namespace pibreak
