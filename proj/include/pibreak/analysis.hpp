#pragma once

#include <string_view>
#include <vector>

#include "pibreak/meanfield.hpp"
#include "pibreak/time_series.hpp"

namespace pibreak {

enum class Window { hann, rect };
enum class Classification { steady, limit_cycle, beating, unclassified };

Window parse_window(std::string_view name);
std::string_view to_string(Classification c);

struct Peak {
  double frequency = 0.0;  // cycles per time unit, interpolated
  double power = 0.0;      // summed over the peak's lobe
  double width = 0.0;      // full width at half maximum
};

struct SpectrumReport {
  std::vector<double> frequencies;  // one-sided, bin k at k / (n dt)
  std::vector<double> power;        // sums to `energy`
  std::vector<Peak> peaks;          // power descending
  Classification classification = Classification::unclassified;
  double bin_width = 0.0;
  double energy = 0.0;              // sum of squared windowed samples

  double dominant_frequency() const { return peaks.empty() ? 0.0 : peaks.front().frequency; }
};

struct SpectrumOptions {
  Window window = Window::hann;
  /// Reference magnitude of the steady rule; 0 uses max |x| of the series.
  double steady_scale = 0.0;
  double steady_fraction = 0.2;
  double steady_rel = 1e-6;
};

inline constexpr std::size_t kMinSpectrumLength = 64;

/// One-sided power spectrum of the mean-subtracted, windowed series, with
/// peaks and a classification. Throws DomainError below 64 samples.
SpectrumReport spectrum(const TimeSeries& series, const SpectrumOptions& options = {});
inline SpectrumReport spectrum(const TimeSeries& series, Window window) {
  SpectrumOptions o;
  o.window = window;
  return spectrum(series, o);
}

/// Drops the leading `fraction` of samples.
TimeSeries trim_transient(const TimeSeries& series, double fraction = 0.5);

struct LockingResult {
  bool locked = false;
  double detuning = 0.0;  // nu_a - nu_b
};

/// Locked when the dominant frequencies differ by at most one bin.
LockingResult locking_check(const SpectrumReport& a, const SpectrumReport& b);

struct ObservableClass {
  Eigen::Index column = 0;
  Axis axis = Axis::x;
  Classification classification = Classification::unclassified;
  double dominant_frequency = 0.0;
  std::size_t peak_count = 0;
};

struct PhaseOptions {
  double trim_fraction = 0.5;
  Window window = Window::hann;
  double steady_fraction = 0.2;
  double steady_rel = 1e-6;
};

/// Classifies every component of every column. The steady rule uses the
/// largest initial column length as reference.
std::vector<ObservableClass> classify_phase(const VectorTrajectory& traj, const PhaseOptions& options = {});

}  // namespace pibreak
