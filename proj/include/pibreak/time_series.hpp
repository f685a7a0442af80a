#pragma once

#include <string>
#include <vector>

namespace pibreak {

/// Uniformly sampled real signal; sample k sits at t0 + k dt.
struct TimeSeries {
  double dt = 1.0;
  std::vector<double> values;
  std::string label;
  double t0 = 0.0;

  std::size_t size() const { return values.size(); }
  double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
  double duration() const { return dt * static_cast<double>(values.size()); }
};

}  // namespace pibreak
