#include "pibreak/meanfield.hpp"

#include <algorithm>
#include <cmath>

namespace pibreak {

DickeCouplings dicke_couplings(const DickeParams& p, JyConvention jy) {
  const auto [ap, am] = dicke_alpha(p);
  const double scale = 2.0 * p.g / std::sqrt(static_cast<double>(p.n_total));
  double im = 0.0;
  switch (jy) {
    case JyConvention::product: im = (ap * am).imag(); break;
    case JyConvention::difference: im = (ap - am).imag(); break;
    case JyConvention::sum: im = (ap + am).imag(); break;
  }
  return DickeCouplings{p.omega_z, scale * (ap + am).real(), -scale * im};
}

BtcCouplings btc_couplings(const BTCParams& p) {
  p.validate();
  return BtcCouplings{p.omega_x, p.kappa, p.j_xx};
}

Eigen::Vector3d dicke_torque(const Eigen::Vector3d& o, const DickeCouplings& c) {
  return {c.j_x * o.x() + c.j_y * o.y(), 0.0, c.omega_z};
}

Eigen::Vector3d btc_torque(const Eigen::Vector3d& o, const BtcCouplings& c) {
  return {c.omega_x + 2.0 * c.j_xx * o.x() - c.kappa * o.y(), c.kappa * o.x(), 0.0};
}

SectorObservables dicke_mf_rhs(const SectorObservables& s, const DickeCouplings& c) {
  const Eigen::Vector3d tau = dicke_torque(s.o_sym, c);
  SectorObservables d;
  d.o_sym = tau.cross(s.o_sym);
  for (const auto& m : s.o_modes) d.o_modes.push_back(tau.cross(m));
  return d;
}

SectorObservables btc_mf_rhs(const SectorObservables& s, const BtcCouplings& c, BtcModeForm form) {
  const Eigen::Vector3d tau = btc_torque(s.o_sym, c);
  SectorObservables d;
  d.o_sym = tau.cross(s.o_sym);
  for (const auto& m : s.o_modes) {
    Eigen::Vector3d dm = tau.cross(m);
    if (form == BtcModeForm::printed) dm.z() += c.omega_x * (s.o_sym.y() - m.y());
    d.o_modes.push_back(dm);
  }
  return d;
}

namespace {

template <typename Torque>
Eigen::Matrix3Xd torque_apply(const MFState& state, Torque&& torque) {
  const Eigen::Vector3d total = state.spins.rowwise().sum();
  const Eigen::Vector3d tau = torque(total);
  Eigen::Matrix3Xd d(3, state.spins.cols());
  for (Eigen::Index i = 0; i < state.spins.cols(); ++i) d.col(i) = tau.cross(state.spins.col(i));
  return d;
}

}  // namespace

Eigen::Matrix3Xd torque_rhs(const MFState& state, const DickeCouplings& c) {
  return torque_apply(state, [&](const Eigen::Vector3d& o) { return dicke_torque(o, c); });
}

Eigen::Matrix3Xd torque_rhs(const MFState& state, const BtcCouplings& c) {
  return torque_apply(state, [&](const Eigen::Vector3d& o) { return btc_torque(o, c); });
}

Eigen::MatrixXd mode_basis(int m) {
  if (m < 2) throw DomainError("mode_basis: need M >= 2");
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m, m);
  v.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(m)));
  for (int k = 1; k < m; ++k) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    v.col(k).head(k).setConstant(norm);
    v(k, k) = -k * norm;
  }
  return v;
}

SectorObservables project_modes(const MFState& state) {
  const int m = state.size();
  if (m == 1) return SectorObservables{state.spins.col(0), {}};
  const Eigen::MatrixXd v = mode_basis(m);
  const Eigen::Matrix3Xd proj = std::sqrt(static_cast<double>(m)) * (state.spins * v);
  return from_columns(proj);
}

MFState spins_from_modes(const SectorObservables& obs, double time) {
  const Eigen::Matrix3Xd cols = to_columns(obs);
  const auto m = static_cast<int>(cols.cols());
  if (m == 1) return MFState{cols, time};
  const Eigen::MatrixXd v = mode_basis(m);
  return MFState{(cols * v.transpose()) / std::sqrt(static_cast<double>(m)), time};
}

Eigen::Matrix3Xd to_columns(const SectorObservables& obs) {
  Eigen::Matrix3Xd cols(3, 1 + static_cast<Eigen::Index>(obs.o_modes.size()));
  cols.col(0) = obs.o_sym;
  for (std::size_t k = 0; k < obs.o_modes.size(); ++k) cols.col(static_cast<Eigen::Index>(k) + 1) = obs.o_modes[k];
  return cols;
}

SectorObservables from_columns(const Eigen::Matrix3Xd& cols) {
  SectorObservables obs;
  obs.o_sym = cols.col(0);
  for (Eigen::Index k = 1; k < cols.cols(); ++k) obs.o_modes.push_back(cols.col(k));
  return obs;
}

MFState normalized(const MFState& state, int n_total) {
  if (n_total < 1) throw DomainError("normalized: n_total must be positive");
  return MFState{state.spins * (2.0 / n_total), state.time};
}

TimeSeries VectorTrajectory::series(Eigen::Index column, Axis axis, std::string label) const {
  TimeSeries ts;
  ts.dt = dt();
  ts.t0 = times.empty() ? 0.0 : times.front();
  ts.label = std::move(label);
  const auto row = static_cast<Eigen::Index>(axis);
  ts.values.reserve(states.size());
  for (const auto& s : states) ts.values.push_back(s(row, column));
  return ts;
}

std::vector<double> VectorTrajectory::norms(Eigen::Index column) const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.col(column).squaredNorm());
  return out;
}

VectorTrajectory integrate_vectors(const VectorField& rhs, const Eigen::Matrix3Xd& initial,
                                   double t_final, std::size_t samples,
                                   const IntegrationControls& controls,
                                   Eigen::Index controlled_columns) {
  if (!(t_final > 0.0)) throw DomainError("integrate: t_final must be positive");
  if (samples < 2) throw DomainError("integrate: need at least two samples");
  VectorTrajectory traj;
  traj.times.resize(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    traj.times[k] = t_final * static_cast<double>(k) / static_cast<double>(samples - 1);
  }
  IntegrationControls c = controls;
  if (controlled_columns > 0) c.controlled_dims = 3 * controlled_columns;
  const Eigen::Index cols = initial.cols();
  auto flat_rhs = [&](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    const Eigen::Map<const Eigen::Matrix3Xd> m(y.data(), 3, cols);
    const Eigen::Matrix3Xd d = rhs(m);
    return Eigen::Map<const Eigen::VectorXd>(d.data(), 3 * cols);
  };
  const Eigen::VectorXd y0 = Eigen::Map<const Eigen::VectorXd>(initial.data(), 3 * cols);
  const auto flat = integrate_dopri5(flat_rhs, y0, 0.0, std::span<const double>(traj.times), c);
  traj.states.reserve(samples);
  for (const auto& y : flat) traj.states.emplace_back(Eigen::Map<const Eigen::Matrix3Xd>(y.data(), 3, cols));
  return traj;
}

namespace {

std::size_t tail_start(std::size_t n, double fraction) {
  const auto len = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  return n - std::clamp<std::size_t>(len, 1, n);
}

}  // namespace

bool is_steady(const TimeSeries& series, double scale, double fraction, double rel) {
  if (series.values.empty()) return false;
  const auto begin = series.values.begin() + static_cast<std::ptrdiff_t>(tail_start(series.size(), fraction));
  const auto [lo, hi] = std::minmax_element(begin, series.values.end());
  return (*hi - *lo) < rel * scale;
}

bool is_steady(const VectorTrajectory& traj, double fraction, double rel) {
  if (traj.states.empty()) return false;
  const double scale = traj.states.front().colwise().norm().maxCoeff();
  const std::size_t start = tail_start(traj.states.size(), fraction);
  Eigen::Matrix3Xd lo = traj.states[start], hi = traj.states[start];
  for (std::size_t k = start + 1; k < traj.states.size(); ++k) {
    lo = lo.cwiseMin(traj.states[k]);
    hi = hi.cwiseMax(traj.states[k]);
  }
  return ((hi - lo).maxCoeff()) < rel * scale;
}

double dressed_frequency(const Eigen::Vector3d& o, const DickeCouplings& c) {
  const double b = c.j_x * o.x() + c.j_y * o.y();
  return std::sqrt(c.omega_z * c.omega_z + b * b);
}

}  // namespace pibreak
