#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pibreak/meanfield.hpp"
#include "pibreak/state_prep.hpp"

using namespace pibreak;
using std::numbers::pi;

namespace {

MFState random_state(int m, unsigned seed) {
  std::srand(seed);
  MFState s;
  s.spins = Eigen::Matrix3Xd::Random(3, m) * 2.0;
  return s;
}

}  // namespace

TEST_CASE("mode basis") {
  const auto b2 = mode_basis(2);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK((b2.col(0) - Eigen::Vector2d(r, r)).norm() < 1e-15);
  CHECK((b2.col(1) - Eigen::Vector2d(r, -r)).norm() < 1e-15);

  const auto b3 = mode_basis(3);
  CHECK((b3.col(1) - Eigen::Vector3d(1, -1, 0) / std::sqrt(2.0)).norm() < 1e-15);
  CHECK((b3.col(2) - Eigen::Vector3d(1, 1, -2) / std::sqrt(6.0)).norm() < 1e-15);

  for (const int m : {2, 4, 7}) {
    const auto b = mode_basis(m);
    CHECK((b.transpose() * b - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK_THROWS_AS(mode_basis(1), DomainError);
}

TEST_CASE("mode projection round trip") {
  const auto s = random_state(2, 3);
  const auto obs = project_modes(s);
  CHECK((obs.o_sym - (s.spins.col(0) + s.spins.col(1))).norm() < 1e-14);
  REQUIRE(obs.o_modes.size() == 1);
  CHECK((obs.o_modes[0] - (s.spins.col(0) - s.spins.col(1))).norm() < 1e-14);

  const auto s5 = random_state(5, 11);
  CHECK((spins_from_modes(project_modes(s5)).spins - s5.spins).cwiseAbs().maxCoeff() < 1e-13);
  const auto cols = to_columns(project_modes(s5));
  CHECK(cols.cols() == 5);
  CHECK((to_columns(from_columns(cols)) - cols).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Dicke couplings") {
  DickeParams p;
  p.g = 0.8;
  p.n_total = 12;
  const auto [ap, am] = dicke_alpha(p);
  const double root_n = std::sqrt(12.0);
  const auto c = dicke_couplings(p);
  CHECK(c.omega_z == 0.1);
  CHECK(c.j_x == doctest::Approx(2 * 0.8 * (ap + am).real() / root_n));
  CHECK(c.j_y == doctest::Approx(-2 * 0.8 * (ap * am).imag() / root_n));
  CHECK(dicke_couplings(p, JyConvention::sum).j_y == doctest::Approx(-2 * 0.8 * (ap + am).imag() / root_n));
  CHECK(dicke_couplings(p, JyConvention::difference).j_y == doctest::Approx(-2 * 0.8 * (ap - am).imag() / root_n));
}

TEST_CASE("fixed points and dark configurations") {
  DickeParams p;
  p.g = 1.0;
  p.n_total = 8;
  const auto c = dicke_couplings(p);
  SectorObservables pole;
  pole.o_sym = {0, 0, 3};
  pole.o_modes = {Eigen::Vector3d::Zero()};
  const auto d = dicke_mf_rhs(pole, c);
  CHECK(d.o_sym.norm() == 0.0);
  CHECK(d.o_modes[0].norm() == 0.0);

  SectorObservables zero;
  zero.o_modes = {Eigen::Vector3d(0.1, 0.2, 0.3)};
  const auto bz = btc_mf_rhs(zero, btc_couplings(BTCParams{0.0, 1.0, 0.0, 4}));
  CHECK(bz.o_sym.norm() == 0.0);
  CHECK(bz.o_modes[0].norm() == 0.0);

  // dark configuration: net magnetization zero, each spin sees only omega_z
  MFState dark;
  dark.spins.resize(3, 2);
  dark.spins.col(0) = Eigen::Vector3d(1, 0.5, 0.2);
  dark.spins.col(1) = -dark.spins.col(0);
  const auto r = torque_rhs(dark, c);
  const Eigen::Vector3d tau(0, 0, c.omega_z);
  CHECK((r.col(0) - tau.cross(dark.spins.col(0))).norm() < 1e-15);

  // aligned with the torque
  MFState aligned;
  aligned.spins = Eigen::Matrix3Xd::Zero(3, 1);
  const BtcCouplings bc{0.0, 1.0, 0.0};
  aligned.spins.col(0) = Eigen::Vector3d(0.0, 0.0, 0.5);
  CHECK(torque_rhs(aligned, bc).norm() < 1e-15);
}

TEST_CASE("sector equations agree with the per-spin torque") {
  DickeParams p;
  p.g = 0.9;
  p.n_total = 10;
  const auto dc = dicke_couplings(p);
  const BtcCouplings bc{1.3, 0.7, 0.2};
  for (const int m : {2, 3, 5}) {
    const auto s = random_state(m, 7 + static_cast<unsigned>(m));
    const auto obs = project_modes(s);
    const Eigen::Matrix3Xd per_spin = torque_rhs(s, dc);
    MFState moved;
    moved.spins = per_spin;
    CHECK((to_columns(project_modes(moved)) - to_columns(dicke_mf_rhs(obs, dc))).cwiseAbs().maxCoeff() < 1e-13);
    moved.spins = torque_rhs(s, bc);
    CHECK((to_columns(project_modes(moved)) - to_columns(btc_mf_rhs(obs, bc))).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("BTC torque at J_xx = 0 matches the closed-form equations") {
  const BtcCouplings c{1.5, 1.0, 0.0};
  const Eigen::Vector3d o(0.3, -0.4, 0.5);
  SectorObservables s;
  s.o_sym = o;
  s.o_modes = {Eigen::Vector3d(0.1, 0.2, -0.3)};
  const auto d = btc_mf_rhs(s, c);
  // dO_x = kappa O_x O_z, dO_y = -omega_x O_z + kappa O_y O_z, dO_z = omega_x O_y - kappa (O_x^2 + O_y^2)
  CHECK(d.o_sym.x() == doctest::Approx(c.kappa * o.x() * o.z()));
  CHECK(d.o_sym.y() == doctest::Approx(-c.omega_x * o.z() + c.kappa * o.y() * o.z()));
  CHECK(d.o_sym.z() == doctest::Approx(c.omega_x * o.y() - c.kappa * (o.x() * o.x() + o.y() * o.y())));

  const auto printed = btc_mf_rhs(s, c, BtcModeForm::printed);
  CHECK((printed.o_sym - d.o_sym).norm() == 0.0);
  CHECK(printed.o_modes[0].z() != doctest::Approx(d.o_modes[0].z()));
}

TEST_CASE("harmonic oscillator energy drift") {
  const VectorField rhs = [](const Eigen::Matrix3Xd& y) {
    Eigen::Matrix3Xd d = Eigen::Matrix3Xd::Zero(3, 1);
    d(0, 0) = y(1, 0);
    d(1, 0) = -y(0, 0);
    return d;
  };
  Eigen::Matrix3Xd init = Eigen::Matrix3Xd::Zero(3, 1);
  init(0, 0) = 1.0;
  IntegrationControls ctl;
  ctl.rel_tol = 1e-12;
  ctl.abs_tol = 1e-14;
  const auto traj = integrate_vectors(rhs, init, 100.0, 1001, ctl);
  double drift = 0.0;
  for (const double e : traj.norms(0)) drift = std::max(drift, std::abs(e - 1.0));
  CHECK(drift < 1e-8);
  CHECK(traj.dt() == doctest::Approx(0.1));
  CHECK(traj.states.back()(0, 0) == doctest::Approx(std::cos(100.0)).epsilon(1e-8));
}

TEST_CASE("integrator failures are reported") {
  const VectorField blowup = [](const Eigen::Matrix3Xd& y) { return Eigen::Matrix3Xd(y.array().square() * 10.0); };
  Eigen::Matrix3Xd init = Eigen::Matrix3Xd::Ones(3, 1);
  CHECK_THROWS_AS(integrate_vectors(blowup, init, 10.0, 11), NumericalError);
}

TEST_CASE("norms are conserved along Dicke trajectories") {
  DickeParams p;
  p.n_total = 16;
  p.g = 1.2;
  const auto c = dicke_couplings(p);
  const EnsembleSpec e{{{8, {pi / 2, 0.0}}, {8, {pi / 3, 1.0}}}};
  IntegrationControls ctl;
  ctl.rel_tol = 1e-12;
  ctl.abs_tol = 1e-14;
  const auto traj = integrate_vectors(
      [c](const Eigen::Matrix3Xd& y) { return to_columns(dicke_mf_rhs(from_columns(y), c)); },
      to_columns(project_modes(mf_initial_vectors(e))), 2000.0, 2001, ctl);
  for (const Eigen::Index col : {0, 1}) {
    const auto n = traj.norms(col);
    for (const double v : n) CHECK(std::abs(v - n.front()) / n.front() < 1e-9);
  }
}

TEST_CASE("steady detection and dressed frequency") {
  VectorTrajectory still;
  for (int k = 0; k < 100; ++k) {
    still.times.push_back(k);
    still.states.push_back(Eigen::Matrix3Xd::Constant(3, 1, 1.0));
  }
  CHECK(is_steady(still));
  still.states[95](0, 0) += 1e-3;
  CHECK_FALSE(is_steady(still));

  const DickeCouplings c{0.1, 0.05, 0.0};
  CHECK(dressed_frequency(Eigen::Vector3d(0, 0, -4), c) == doctest::Approx(0.1));
  CHECK(dressed_frequency(Eigen::Vector3d(2, 0, -1), c) == doctest::Approx(std::sqrt(2.0) * 0.1));
}

TEST_CASE("normalized vectors") {
  MFState s;
  s.spins = Eigen::Matrix3Xd::Constant(3, 2, 4.0);
  CHECK(normalized(s, 16).spins(0, 0) == doctest::Approx(0.5));
}
