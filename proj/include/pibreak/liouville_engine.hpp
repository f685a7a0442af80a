#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "pibreak/angular_momentum.hpp"
#include "pibreak/lindblad.hpp"
#include "pibreak/state_prep.hpp"
#include "pibreak/time_series.hpp"

namespace pibreak {

using SparseMatrixXcd = Eigen::SparseMatrix<std::complex<double>>;

/// Generator restricted to the (S, S') block, acting on column-stacked
/// vec(rho_{S,S'}): entry i + (2S+1) j holds rho_{S,S'}(i, j).
struct BlockSuperoperator {
  SectorPair sectors;
  SparseMatrixXcd matrix;

  Eigen::Index block_rows() const { return sectors.row.dim(); }
  Eigen::Index block_cols() const { return sectors.col.dim(); }
  Eigen::Index dim() const { return matrix.rows(); }

  /// Index sets closed under the generator (connected components of its
  /// coupling graph), each sorted ascending; components ordered by first
  /// index.
  std::vector<std::vector<Eigen::Index>> invariant_subspaces() const;
};

BlockSuperoperator build_block_superoperator(const LindbladSpec& spec, SpinQuantum s,
                                             SpinQuantum s_prime);
BlockSuperoperator build_block_superoperator(const LindbladSpec& spec, const SectorOperators& left,
                                             const SectorOperators& right);

enum class EvolutionMethod { automatic, propagator, ode };

struct EvolutionOptions {
  EvolutionMethod method = EvolutionMethod::automatic;
  /// Blocks with (2S+1)(2S'+1) above this use ODE integration under
  /// `automatic`.
  Eigen::Index max_dense_dim = 4096;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
};

struct BlockTrajectory {
  std::vector<double> times;
  std::vector<BlockDensityMatrix> states;
};

/// Evolves one block; entry k of the result is the block at t_grid[k].
std::vector<Eigen::MatrixXcd> evolve_block(const BlockSuperoperator& generator,
                                           const Eigen::MatrixXcd& initial,
                                           std::span<const double> t_grid,
                                           const EvolutionOptions& options = {});

/// Evolves every block of `rho0` independently. The grid must be increasing
/// and start at 0; identically-zero blocks stay zero without work.
BlockTrajectory evolve_blocks(const LindbladSpec& spec, const BlockDensityMatrix& rho0,
                              std::span<const double> t_grid, const EvolutionOptions& options = {});

/// sum over (S,S') of Tr(op_{S',S} rho_{S,S'}).
std::complex<double> expectation(const BlockOperator& op, const BlockDensityMatrix& rho);
/// Contribution of one density block, Tr(op_{S',S} rho_{S,S'}).
std::complex<double> block_expectation(const BlockOperator& op, const BlockDensityMatrix& rho,
                                       SectorPair rho_block);

struct SpectralResult {
  SectorPair sectors;
  std::vector<std::complex<double>> eigenvalues;  // sorted by Re descending, then Im
  /// -max Re(lambda); diagonal blocks exclude stationary modes
  /// (|Re lambda| < 1e-9), off-diagonal blocks exclude nothing.
  double gap = 0.0;
  std::vector<double> gap_imag;  // Im of the eigenvalues attaining the gap
  /// -max Re(lambda) over eigenvalues with |Re lambda| >= 1e-9, for every
  /// block; differs from `gap` only when an off-diagonal block has zero modes.
  double gap_excluding_zero = 0.0;
  bool conventions_differ = false;
};

inline constexpr double kStationaryThreshold = 1e-9;

SpectralResult block_spectrum(const LindbladSpec& spec, SpinQuantum s, SpinQuantum s_prime);
/// Gap bookkeeping from a precomputed eigenvalue list.
SpectralResult summarize_spectrum(SectorPair sectors, std::vector<std::complex<double>> eigenvalues);

struct DecayFit {
  double rate = 0.0;
  double fit_quality = 0.0;  // coefficient of determination
  std::size_t points = 0;
  bool envelope = false;     // fitted through local maxima of |signal|
};

/// Asymptotic decay rate from the slope of log|signal| over the tail (last
/// 40% of samples above 1e-12). Oscillating tails are fitted through their
/// envelope peaks. Throws NotApplicableError for non-decaying input.
DecayFit asymptotic_decay_rate(const TimeSeries& series);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
};

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct GapScanRow {
  int n = 0;
  SectorPair sectors;
  double gap = 0.0;
  std::vector<double> gap_imag;
  double gap_excluding_zero = 0.0;
};

struct GapScanResult {
  std::vector<GapScanRow> rows;  // ordered as the input sizes
  PowerLawFit fit;               // gap versus N, over successful rows
  std::vector<std::pair<int, std::string>> failures;
};

GapScanResult gap_scaling_scan(std::span<const int> sizes,
                               const std::function<LindbladSpec(int)>& family,
                               const std::function<SectorPair(int)>& sector_rule, int threads = 1);

}  // namespace pibreak
