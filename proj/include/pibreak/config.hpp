#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pibreak/analysis.hpp"
#include "pibreak/lindblad.hpp"
#include "pibreak/liouville_engine.hpp"
#include "pibreak/meanfield.hpp"
#include "pibreak/models.hpp"
#include "pibreak/state_prep.hpp"
#include "pibreak/table.hpp"

namespace pibreak {

/// Malformed or schema-violating configuration; `line` is 1-based, 0 when
/// unknown.
class ConfigError : public DomainError {
 public:
  ConfigError(const std::string& origin, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Evenly spaced values start, ..., stop (count >= 1; count == 1 gives start).
struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

enum class ModelKind { dicke, btc, custom };

struct EvolveConfig {
  double t_final = 100.0;
  std::size_t samples = 2001;
  EvolutionOptions options;
};

struct MeanfieldConfig {
  double t_final = 1000.0;
  std::size_t samples = 20001;
  IntegrationControls controls;
  JyConvention jy = JyConvention::product;
  BtcModeForm mode_form = BtcModeForm::torque;
  double trim_fraction = 0.5;
  Window window = Window::hann;
};

struct DecomposeConfig {
  Range phi_a{0.0, 3.141592653589793, 9};
};

enum class SectorRule { nearest_offdiag, top_diag };

struct GapScanConfig {
  std::vector<int> sizes{16, 24, 32, 48, 64};
  SectorRule sector = SectorRule::nearest_offdiag;
};

struct SweepAxis {
  std::string name;
  Range range;
};

struct PhaseDiagramConfig {
  std::vector<SweepAxis> axes;
};

struct SpectrumConfig {
  std::filesystem::path input;
  std::string time_column = "t";
  std::string value_column;
  double trim_fraction = 0.5;
  Window window = Window::hann;
};

struct ValidateConfig {
  double t_final = 10.0;
  std::size_t samples = 11;
  double tolerance = 1e-6;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  TableFormat format = TableFormat::csv;
};

struct RunConfig {
  std::string experiment;  // empty when the file does not pin one
  ModelKind model = ModelKind::dicke;
  DickeParams dicke;
  std::optional<double> g_over_gcr;
  BTCParams btc;
  AnticommutatorOrder btc_order = AnticommutatorOrder::lindblad;
  LindbladSpec custom;
  EnsembleSpec ensemble;
  EvolveConfig evolve;
  MeanfieldConfig meanfield;
  DecomposeConfig decompose;
  GapScanConfig gap_scan;
  PhaseDiagramConfig phase_diagram;
  SpectrumConfig spectrum;
  ValidateConfig validate;
  OutputConfig output;
  std::string source_text;

  /// Model parameters with n_total set to `n` and g resolved from g_over_gcr.
  DickeParams dicke_at(int n) const;
  BTCParams btc_at(int n) const;
  LindbladSpec lindblad_spec(int n) const;
  LindbladSpec lindblad_spec() const { return lindblad_spec(ensemble.total_spins()); }
};

inline const std::vector<std::string> kExperiments{"decompose", "evolve-exact", "gap-scan", "meanfield",
                                                   "phase-diagram", "spectrum", "validate"};

/// Parses an angle written as a number or as a multiple/fraction of pi
/// ("pi/4", "-3pi/4", "2*pi/3", "0.5pi").
double parse_angle(const std::string& text);

RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of the config bytes, hex encoded.
std::string config_hash(const std::string& text);

}  // namespace pibreak
