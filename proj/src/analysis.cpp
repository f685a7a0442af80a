#include "pibreak/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/FFT>

namespace pibreak {

Window parse_window(std::string_view name) {
  if (name == "hann") return Window::hann;
  if (name == "rect") return Window::rect;
  throw DomainError("unknown window '" + std::string(name) + "' (expected hann or rect)");
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::steady: return "steady";
    case Classification::limit_cycle: return "limit_cycle";
    case Classification::beating: return "beating";
    case Classification::unclassified: return "unclassified";
  }
  return "unclassified";
}

TimeSeries trim_transient(const TimeSeries& series, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw DomainError("trim_transient: fraction must lie in [0, 1)");
  const auto drop = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(series.size())));
  TimeSeries out = series;
  out.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(drop), series.values.end());
  out.t0 = series.time(drop);
  return out;
}

namespace {

bool tail_is_steady(const std::vector<double>& v, double scale, double fraction, double rel) {
  const auto len = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(v.size()))), 1, v.size());
  const auto [lo, hi] = std::minmax_element(v.end() - static_cast<std::ptrdiff_t>(len), v.end());
  return (*hi - *lo) < rel * scale;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  return 0.5 * (upper + *std::max_element(v.begin(), mid));
}

Peak describe_peak(const std::vector<double>& p, std::size_t k, double df) {
  Peak peak;
  const std::size_t n = p.size();
  std::size_t lo = k, hi = k;
  while (lo > 0 && p[lo - 1] < p[lo]) --lo;
  while (hi + 1 < n && p[hi + 1] < p[hi]) ++hi;
  peak.power = std::accumulate(p.begin() + static_cast<std::ptrdiff_t>(lo),
                               p.begin() + static_cast<std::ptrdiff_t>(hi) + 1, 0.0);

  double offset = 0.0;
  if (k > 0 && k + 1 < n && p[k - 1] > 0.0 && p[k + 1] > 0.0) {
    const double a = std::log(p[k - 1]), b = std::log(p[k]), c = std::log(p[k + 1]);
    const double den = a - 2.0 * b + c;
    if (den < 0.0) offset = std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
  }
  peak.frequency = (static_cast<double>(k) + offset) * df;

  const double half = 0.5 * p[k];
  double left = static_cast<double>(k), right = static_cast<double>(k);
  for (std::size_t i = k; i > 0; --i) {
    if (p[i - 1] < half) {
      left = static_cast<double>(i) - (p[i] - half) / (p[i] - p[i - 1]);
      break;
    }
    left = static_cast<double>(i - 1);
  }
  for (std::size_t i = k; i + 1 < n; ++i) {
    if (p[i + 1] < half) {
      right = static_cast<double>(i) + (p[i] - half) / (p[i] - p[i + 1]);
      break;
    }
    right = static_cast<double>(i + 1);
  }
  peak.width = (right - left) * df;
  return peak;
}

bool harmonically_related(double f, double f0, double df) {
  if (f0 <= 0.0 || f <= 0.0) return false;
  const double hi = std::max(f, f0), lo = std::min(f, f0);
  const double k = std::round(hi / lo);
  return k >= 2.0 && std::abs(hi - k * lo) <= 1.5 * k * df;
}

Classification classify_peaks(const std::vector<Peak>& peaks, double df) {
  if (peaks.empty()) return Classification::unclassified;
  const Peak& top = peaks.front();
  double dominant = top.power, total = top.power;
  std::vector<const Peak*> independent{&top};
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    total += peaks[i].power;
    if (harmonically_related(peaks[i].frequency, top.frequency, df)) {
      dominant += peaks[i].power;
    } else {
      independent.push_back(&peaks[i]);
    }
  }
  if (dominant >= 0.9 * total) return Classification::limit_cycle;
  if (independent.size() >= 2 && independent[1]->power >= 0.1 * top.power) return Classification::beating;
  return Classification::unclassified;
}

}  // namespace

SpectrumReport spectrum(const TimeSeries& series, const SpectrumOptions& options) {
  const std::size_t n = series.size();
  if (n < kMinSpectrumLength) {
    throw DomainError("spectrum: need at least " + std::to_string(kMinSpectrumLength) + " samples, got " +
                      std::to_string(n));
  }
  if (!(series.dt > 0.0)) throw DomainError("spectrum: dt must be positive");

  const double mean = std::accumulate(series.values.begin(), series.values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = options.window == Window::hann
                         ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n))
                         : 1.0;
    x[k] = w * (series.values[k] - mean);
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, x);

  SpectrumReport rep;
  rep.bin_width = 1.0 / (static_cast<double>(n) * series.dt);
  rep.energy = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  const std::size_t half = n / 2;
  rep.frequencies.resize(half + 1);
  rep.power.resize(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    const bool doubled = k != 0 && !(n % 2 == 0 && k == half);
    rep.frequencies[k] = static_cast<double>(k) * rep.bin_width;
    rep.power[k] = (doubled ? 2.0 : 1.0) * std::norm(spec[k]) / static_cast<double>(n);
  }

  const double max_power = *std::max_element(rep.power.begin(), rep.power.end());
  if (max_power > 0.0) {
    const double threshold = std::max(10.0 * median(rep.power), 1e-10 * max_power);
    for (std::size_t k = 1; k < rep.power.size(); ++k) {
      const double p = rep.power[k];
      const bool rising = p > rep.power[k - 1];
      const bool falling = k + 1 == rep.power.size() || p >= rep.power[k + 1];
      if (rising && falling && p > threshold) rep.peaks.push_back(describe_peak(rep.power, k, rep.bin_width));
    }
    std::stable_sort(rep.peaks.begin(), rep.peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.power > b.power; });
  }

  double scale = options.steady_scale;
  if (scale <= 0.0) {
    for (const double v : series.values) scale = std::max(scale, std::abs(v));
  }
  if (tail_is_steady(series.values, scale, options.steady_fraction, options.steady_rel) || rep.energy == 0.0) {
    rep.classification = Classification::steady;
  } else {
    rep.classification = classify_peaks(rep.peaks, rep.bin_width);
  }
  return rep;
}

LockingResult locking_check(const SpectrumReport& a, const SpectrumReport& b) {
  if (a.peaks.empty() || b.peaks.empty()) throw DomainError("locking_check: both spectra need a peak");
  LockingResult r;
  r.detuning = a.dominant_frequency() - b.dominant_frequency();
  r.locked = std::abs(r.detuning) <= std::max(a.bin_width, b.bin_width);
  return r;
}

std::vector<ObservableClass> classify_phase(const VectorTrajectory& traj, const PhaseOptions& options) {
  if (traj.states.empty()) throw DomainError("classify_phase: empty trajectory");
  const double scale = traj.states.front().colwise().norm().maxCoeff();
  std::vector<ObservableClass> out;
  for (Eigen::Index col = 0; col < traj.states.front().cols(); ++col) {
    for (const Axis axis : {Axis::x, Axis::y, Axis::z}) {
      const TimeSeries full = traj.series(col, axis);
      ObservableClass oc{col, axis};
      if (tail_is_steady(full.values, scale, options.steady_fraction, options.steady_rel)) {
        oc.classification = Classification::steady;
      } else {
        SpectrumOptions so;
        so.window = options.window;
        so.steady_scale = scale;
        so.steady_fraction = options.steady_fraction;
        so.steady_rel = options.steady_rel;
        const auto rep = spectrum(trim_transient(full, options.trim_fraction), so);
        oc.classification = rep.classification;
        oc.dominant_frequency = rep.dominant_frequency();
        oc.peak_count = rep.peaks.size();
      }
      out.push_back(oc);
    }
  }
  return out;
}

}  // namespace pibreak
