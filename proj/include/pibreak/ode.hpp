#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "pibreak/errors.hpp"

namespace pibreak {

struct IntegrationControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 200'000'000;
  /// Number of leading state entries that enter the error norm; 0 means
  /// all. For cascaded systems whose leading block is closed this makes the
  /// leading trajectory independent of what is integrated alongside it.
  Eigen::Index controlled_dims = 0;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

namespace detail {

template <typename State>
double scaled_rms(const State& v, const State& y0, const State& y1, const IntegrationControls& c) {
  const Eigen::Index n = c.controlled_dims > 0 ? std::min<Eigen::Index>(c.controlled_dims, v.size())
                                               : v.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = c.abs_tol + c.rel_tol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
    const double r = std::abs(v.data()[i]) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(n, 1)));
}

template <typename State>
bool all_finite(const State& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(std::abs(y.data()[i]))) return false;
  }
  return true;
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of dy/dt = rhs(t, y), returning
/// the state at each entry of `output_times` (sorted, none before t0). Steps
/// are clamped to land exactly on output times.
template <typename State, typename Rhs>
std::vector<State> integrate_dopri5(Rhs&& rhs, const State& y0, double t0,
                                    std::span<const double> output_times,
                                    const IntegrationControls& controls = {},
                                    IntegrationStats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;

  std::vector<State> out;
  out.reserve(output_times.size());
  State y = y0;
  double t = t0;
  State k1 = rhs(t, y);
  ++st.rhs_evaluations;
  if (!detail::all_finite(y) || !detail::all_finite(k1)) {
    throw NumericalError("integrate: non-finite initial state or derivative");
  }

  double h = controls.initial_step;
  if (h <= 0.0) {
    const State zero = State::Zero(y.rows(), y.cols());
    const double d0 = detail::scaled_rms(y, y, zero, controls);
    const double d1 = detail::scaled_rms(k1, y, zero, controls);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    const State y1 = y + h0 * k1;
    const State f1 = rhs(t + h0, y1);
    ++st.rhs_evaluations;
    const double d2 = detail::scaled_rms(State(f1 - k1), y, zero, controls) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min(h, controls.max_step);

  for (const double target : output_times) {
    if (target < t - 1e-12 * std::max(1.0, std::abs(t))) {
      throw DomainError("integrate: output times must be sorted and not precede t0");
    }
    while (t < target) {
      if (st.accepted + st.rejected >= controls.max_steps) {
        std::ostringstream msg;
        msg << "integrate: step budget exhausted at t=" << t;
        throw NumericalError(msg.str());
      }
      const double remaining = target - t;
      const bool clamped = h >= remaining;
      const double step = clamped ? remaining : h;
      if (step < 1e-14 * std::max(1.0, std::abs(t)) && !clamped) {
        std::ostringstream msg;
        msg << "integrate: step-size collapse at t=" << t << " (h=" << step << ")";
        throw NumericalError(msg.str());
      }

      const State k2 = rhs(t + c2 * step, State(y + step * a21 * k1));
      const State k3 = rhs(t + c3 * step, State(y + step * (a31 * k1 + a32 * k2)));
      const State k4 = rhs(t + c4 * step, State(y + step * (a41 * k1 + a42 * k2 + a43 * k3)));
      const State k5 =
          rhs(t + c5 * step, State(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      const State k6 = rhs(t + step, State(y + step * (a61 * k1 + a62 * k2 + a63 * k3 +
                                                        a64 * k4 + a65 * k5)));
      State y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const State k7 = rhs(t + step, y_new);
      st.rhs_evaluations += 6;

      if (!detail::all_finite(y_new) || !detail::all_finite(k7)) {
        std::ostringstream msg;
        msg << "integrate: non-finite values at t=" << t + step;
        throw NumericalError(msg.str());
      }
      const State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = detail::scaled_rms(err, y, y_new, controls);
      const double factor =
          en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);

      if (en <= 1.0) {
        ++st.accepted;
        t = clamped ? target : t + step;
        y = std::move(y_new);
        k1 = k7;
        // A clamped step says nothing about the natural step size.
        if (!clamped) h = std::min(step * factor, controls.max_step);
        else h = std::min(std::max(h, step * factor), controls.max_step);
      } else {
        ++st.rejected;
        h = step * std::max(factor, 0.1);
      }
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace pibreak
