#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pibreak/angular_momentum.hpp"
#include "pibreak/mf_state.hpp"
#include "pibreak/models.hpp"
#include "pibreak/ode.hpp"
#include "pibreak/time_series.hpp"

namespace pibreak {

/// Reading of the J_y coupling -2g Im(a+ ? a-)/sqrt(N).
enum class JyConvention { product, difference, sum };

/// Dicke mean-field couplings in spin units: the torque on every subensemble
/// is (J_x O_x + J_y O_y, 0, omega_z) with O = sum of all spin vectors.
struct DickeCouplings {
  double omega_z = 0.0;
  double j_x = 0.0;
  double j_y = 0.0;
};

DickeCouplings dicke_couplings(const DickeParams& p, JyConvention jy = JyConvention::product);

/// BTC couplings. Spin vectors are measured in units of N/2, so a fully
/// polarized ensemble has |O_S| = 1.
struct BtcCouplings {
  double omega_x = 0.0;
  double kappa = 1.0;
  double j_xx = 0.0;
};

BtcCouplings btc_couplings(const BTCParams& p);

/// Form of the antisymmetric z equation. `torque` follows from the
/// per-subensemble torque and conserves every mode norm; `printed` drives
/// O_{A,z} with omega_x O_{S,y} instead of omega_x O_{A,y}.
enum class BtcModeForm { torque, printed };

Eigen::Vector3d dicke_torque(const Eigen::Vector3d& o_sym, const DickeCouplings& c);
/// (omega_x + 2 J_xx O_x - kappa O_y, kappa O_x, 0).
Eigen::Vector3d btc_torque(const Eigen::Vector3d& o_sym, const BtcCouplings& c);

/// Sector equations: O_S' = tau x O_S and O_k' = tau x O_k with tau built from
/// O_S alone. Any number of modes is accepted.
SectorObservables dicke_mf_rhs(const SectorObservables& state, const DickeCouplings& c);
SectorObservables btc_mf_rhs(const SectorObservables& state, const BtcCouplings& c,
                             BtcModeForm form = BtcModeForm::torque);

/// dS_i/dt = tau x S_i for every subensemble; returns the 3 x M derivative.
Eigen::Matrix3Xd torque_rhs(const MFState& state, const DickeCouplings& c);
Eigen::Matrix3Xd torque_rhs(const MFState& state, const BtcCouplings& c);

/// Orthonormal columns, symmetric (1,...,1)/sqrt(M) first, then the Helmert
/// null-space vectors (1,...,1,-k,0,...)/sqrt(k(k+1)).
Eigen::MatrixXd mode_basis(int m);

/// O_k = sqrt(M) sum_i (v_k)_i S_i, so O_S is the plain vector sum and for
/// M = 2 the single mode is S_1 - S_2.
SectorObservables project_modes(const MFState& state);
MFState spins_from_modes(const SectorObservables& obs, double time = 0.0);

/// Column 0 holds O_S, column k the k-th mode.
Eigen::Matrix3Xd to_columns(const SectorObservables& obs);
SectorObservables from_columns(const Eigen::Matrix3Xd& cols);

/// Spin-unit vectors rescaled by 2/N.
MFState normalized(const MFState& state, int n_total);

using VectorField = std::function<Eigen::Matrix3Xd(const Eigen::Matrix3Xd&)>;

/// Uniformly sampled solution of a 3 x K vector ODE.
struct VectorTrajectory {
  std::vector<double> times;
  std::vector<Eigen::Matrix3Xd> states;

  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  TimeSeries series(Eigen::Index column, Axis axis, std::string label = {}) const;
  /// Squared length of a column over time.
  std::vector<double> norms(Eigen::Index column) const;
};

/// Adaptive Dormand-Prince integration on [0, t_final] with `samples`
/// uniform output points. With `controlled_columns` > 0 only the leading
/// columns enter step control.
VectorTrajectory integrate_vectors(const VectorField& rhs, const Eigen::Matrix3Xd& initial,
                                   double t_final, std::size_t samples,
                                   const IntegrationControls& controls = {},
                                   Eigen::Index controlled_columns = 0);

/// Steady when over the last `fraction` of samples the peak-to-peak range of
/// every component stays below `rel` times the largest initial column length.
bool is_steady(const VectorTrajectory& traj, double fraction = 0.2, double rel = 1e-6);
/// The same rule applied to a single series with an explicit scale.
bool is_steady(const TimeSeries& series, double scale, double fraction = 0.2, double rel = 1e-6);

/// sqrt(omega_z^2 + (J_x O_x + J_y O_y)^2), an angular frequency.
double dressed_frequency(const Eigen::Vector3d& steady_sym, const DickeCouplings& c);

}  // namespace pibreak
