#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pibreak/lindblad.hpp"
#include "pibreak/ode.hpp"
#include "pibreak/state_prep.hpp"

namespace pibreak {

inline constexpr int kOracleMaxSpins = 10;
inline constexpr int kOracleMaxDenseEvolution = 8;

/// Density matrix of n spin-1/2 particles. Basis index bit (n-1-i) is 1 when
/// spin i is down, so index 0 is all-up and spin 0 is the most significant.
struct FullState {
  int n = 0;
  Eigen::MatrixXcd rho;
};

/// sum_i sigma_i^c / 2 (c = x, y, z) or the ladder sums, 2^n x 2^n.
Eigen::MatrixXcd full_collective_op(int n, Component c);

/// Tensor product of single-spin coherent states, spins of subensemble 1
/// first.
FullState product_coherent_state(const EnsembleSpec& spec);

/// The full-space generator acting on column-stacked rho (4^n square).
Eigen::MatrixXcd full_superoperator(const LindbladSpec& spec, int n);

struct FullTrajectory {
  std::vector<double> times;
  std::vector<FullState> states;
};

IntegrationControls oracle_controls();

/// Direct matrix-valued integration of the master equation.
FullTrajectory full_lindblad_evolve(const LindbladSpec& spec, const FullState& rho0,
                                    std::span<const double> t_grid,
                                    const IntegrationControls& controls = oracle_controls());

struct BlockProjection {
  BlockDensityMatrix blocks;
  double leakage = 0.0;  // weight outside sym(n1) x sym(n2)
};

/// Restricts to the product of the two symmetric subspaces and changes to the
/// coupled basis. Throws NumericalError when the leakage exceeds
/// `max_leakage`.
BlockProjection project_full_to_blocks(const FullState& rho, int n1, int n2, double max_leakage = 1e-10);

}  // namespace pibreak
