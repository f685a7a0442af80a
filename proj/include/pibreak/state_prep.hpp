#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pibreak/angular_momentum.hpp"
#include "pibreak/mf_state.hpp"

namespace pibreak {

/// Orientation of a spin-coherent subensemble. |0> is spin down (m = -1/2),
/// so theta = 0 points every spin along -z.
struct CoherentParams {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi), wrapped on construction of states
};

struct Subensemble {
  int n_spins = 1;
  CoherentParams params;
};

struct EnsembleSpec {
  std::vector<Subensemble> subensembles;

  int size() const { return static_cast<int>(subensembles.size()); }
  int total_spins() const;
  void validate() const;
};

struct BlockDensityMatrix : BlockMatrix {
  BlockDensityMatrix() = default;
  explicit BlockDensityMatrix(BlockMatrix m) : BlockMatrix(std::move(m)) {}

  /// Sum of the traces of the diagonal blocks.
  std::complex<double> trace() const;
};

/// Amplitudes of the spin coherent state on |j, m>, descending m:
///   sqrt(C(2j, j+m)) cos(theta/2)^(j-m) (e^{-i phi} sin(theta/2))^(j+m).
Eigen::VectorXcd coherent_amplitudes(SpinQuantum j, CoherentParams p);

/// Product of two coherent subensembles in the coupled block basis.
BlockDensityMatrix initial_block_state(const EnsembleSpec& spec);
BlockDensityMatrix initial_block_state(const EnsembleSpec& spec, const CoupledBasisMap& map);

/// Density matrix of a coupled-basis pure state, partitioned into blocks.
BlockDensityMatrix pure_block_state(const CoupledBasisMap& map, const Eigen::VectorXcd& coupled);

struct DiagWeight {
  SpinQuantum s;
  double p_d;
};

struct OffDiagWeight {
  SpinQuantum s, s_prime;
  double p_off;
};

/// p_d(S) = Tr rho_{S,S}, sectors in descending S.
std::vector<DiagWeight> diag_distribution(const BlockDensityMatrix& rho);
/// p_off(S,S') = Tr(rho_{S,S'}^dagger rho_{S,S'}) for S != S'.
std::vector<OffDiagWeight> offdiag_distribution(const BlockDensityMatrix& rho);

double mean_total_spin(const std::vector<DiagWeight>& dist);
/// Sum over S of p_off(S, S-1).
double nearest_neighbor_weight(const std::vector<OffDiagWeight>& dist);

/// Trace distance 1/2 ||a - b||_1 between two block states on the same map.
double trace_distance(const BlockDensityMatrix& a, const BlockDensityMatrix& b,
                      const CoupledBasisMap& map);

/// Mean-field spin vectors (N_i/2)(sin th cos ph, sin th sin ph, -cos th).
MFState mf_initial_vectors(const EnsembleSpec& spec);

}  // namespace pibreak
