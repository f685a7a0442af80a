#include "pibreak/oracle.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace pibreak {

namespace {

using cd = std::complex<double>;

void check_size(int n, int limit) {
  if (n < 1 || n > limit) {
    throw UnsupportedError("oracle: n = " + std::to_string(n) + " outside the supported range 1.." +
                           std::to_string(limit));
  }
}

/// Single-spin operator in the (up, down) basis.
Eigen::Matrix2cd single(Component c) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (c) {
    case Component::x: m << 0.0, 0.5, 0.5, 0.0; break;
    case Component::y: m << 0.0, cd(0, -0.5), cd(0, 0.5), 0.0; break;
    case Component::z: m << 0.5, 0.0, 0.0, -0.5; break;
    case Component::plus: m << 0.0, 1.0, 0.0, 0.0; break;
    case Component::minus: m << 0.0, 0.0, 1.0, 0.0; break;
  }
  return m;
}

/// Isometry from |j = n/2, m> (descending m) onto n spins.
Eigen::MatrixXd symmetric_isometry(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dim, n + 1);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const int downs = std::popcount(static_cast<unsigned long long>(b));
    v(b, downs) = 1.0;
  }
  for (int k = 0; k <= n; ++k) v.col(k).normalize();
  return v;
}

}  // namespace

Eigen::MatrixXcd full_collective_op(int n, Component c) {
  check_size(n, kOracleMaxSpins);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  const Eigen::Matrix2cd s = single(c);
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXcd left = Eigen::MatrixXcd::Identity(Eigen::Index{1} << i, Eigen::Index{1} << i);
    const Eigen::MatrixXcd right =
        Eigen::MatrixXcd::Identity(Eigen::Index{1} << (n - 1 - i), Eigen::Index{1} << (n - 1 - i));
    total += Eigen::kroneckerProduct(Eigen::MatrixXcd(Eigen::kroneckerProduct(left, s)), right);
  }
  return total;
}

FullState product_coherent_state(const EnsembleSpec& spec) {
  spec.validate();
  const int n = spec.total_spins();
  check_size(n, kOracleMaxSpins);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
  for (const auto& sub : spec.subensembles) {
    Eigen::Vector2cd one;
    one << std::polar(std::sin(0.5 * sub.params.theta), -sub.params.phi), std::cos(0.5 * sub.params.theta);
    for (int i = 0; i < sub.n_spins; ++i) psi = Eigen::kroneckerProduct(psi, one).eval();
  }
  return FullState{n, psi * psi.adjoint()};
}

namespace {

std::array<Eigen::MatrixXcd, 5> full_components(int n) {
  return {full_collective_op(n, Component::x), full_collective_op(n, Component::y),
          full_collective_op(n, Component::z), full_collective_op(n, Component::plus),
          full_collective_op(n, Component::minus)};
}

struct FullGenerator {
  Eigen::MatrixXcd h;
  std::vector<Eigen::MatrixXcd> jumps;
  Eigen::MatrixXcd rates;
  AnticommutatorOrder order;

  Eigen::MatrixXcd anti(std::size_t a, std::size_t b) const {
    return order == AnticommutatorOrder::lindblad ? Eigen::MatrixXcd(jumps[b].adjoint() * jumps[a])
                                                  : Eigen::MatrixXcd(jumps[a] * jumps[b].adjoint());
  }

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const {
    Eigen::MatrixXcd d = cd(0, -1) * (h * rho - rho * h);
    for (std::size_t a = 0; a < jumps.size(); ++a) {
      for (std::size_t b = 0; b < jumps.size(); ++b) {
        const cd g = rates(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (g == cd(0.0)) continue;
        const Eigen::MatrixXcd k = anti(a, b);
        d += g * (jumps[a] * rho * jumps[b].adjoint() - 0.5 * (k * rho + rho * k));
      }
    }
    return d;
  }
};

FullGenerator full_generator(const LindbladSpec& spec, int n) {
  spec.validate();
  const auto comps = full_components(n);
  return FullGenerator{assemble_hamiltonian(spec, comps), assemble_jumps(spec, comps), spec.rates,
                       spec.anticommutator};
}

}  // namespace

Eigen::MatrixXcd full_superoperator(const LindbladSpec& spec, int n) {
  check_size(n, kOracleMaxDenseEvolution / 2 + 1);
  const FullGenerator gen = full_generator(spec, n);
  const Eigen::Index dim = gen.h.rows();
  Eigen::MatrixXcd sup(dim * dim, dim * dim);
  // Column j of the superoperator is the image of the j-th unit matrix.
  for (Eigen::Index j = 0; j < dim * dim; ++j) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(dim, dim);
    e(j % dim, j / dim) = 1.0;
    const Eigen::MatrixXcd img = gen.apply(e);
    sup.col(j) = Eigen::Map<const Eigen::VectorXcd>(img.data(), dim * dim);
  }
  return sup;
}

IntegrationControls oracle_controls() {
  IntegrationControls c;
  c.rel_tol = 1e-11;
  c.abs_tol = 1e-13;
  return c;
}

FullTrajectory full_lindblad_evolve(const LindbladSpec& spec, const FullState& rho0,
                                    std::span<const double> t_grid, const IntegrationControls& controls) {
  check_size(rho0.n, kOracleMaxDenseEvolution);
  const FullGenerator gen = full_generator(spec, rho0.n);
  const auto rhos = integrate_dopri5(
      [&gen](double, const Eigen::MatrixXcd& rho) -> Eigen::MatrixXcd { return gen.apply(rho); }, rho0.rho,
      t_grid.empty() ? 0.0 : t_grid.front(), t_grid, controls);
  FullTrajectory traj;
  traj.times.assign(t_grid.begin(), t_grid.end());
  for (const auto& r : rhos) traj.states.push_back(FullState{rho0.n, r});
  return traj;
}

BlockProjection project_full_to_blocks(const FullState& rho, int n1, int n2, double max_leakage) {
  if (n1 < 1 || n2 < 1 || n1 + n2 != rho.n) throw DomainError("project_full_to_blocks: split must sum to n");
  const Eigen::MatrixXcd v =
      Eigen::kroneckerProduct(symmetric_isometry(n1), symmetric_isometry(n2)).eval().cast<cd>();
  const Eigen::MatrixXcd inside = v.adjoint() * rho.rho * v;
  BlockProjection out;
  out.leakage = std::abs(rho.rho.trace().real() - inside.trace().real());
  if (out.leakage > max_leakage) {
    throw NumericalError("project_full_to_blocks: leakage " + std::to_string(out.leakage) +
                         " outside the symmetric subspaces");
  }
  const auto map = couple_basis(SpinQuantum::from_spin_count(n1), SpinQuantum::from_spin_count(n2));
  const Eigen::MatrixXcd u = map.dense().cast<cd>();
  out.blocks = BlockDensityMatrix(BlockMatrix::partition(map, u * inside * u.transpose()));
  return out;
}

}  // namespace pibreak
