#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pibreak/angular_momentum.hpp"

namespace pibreak {

/// Ordered product of collective operators with a coefficient. With
/// `n_power_scaling` the coefficient is divided by N^(p-1), p = factors.size().
struct HamiltonianTerm {
  std::vector<Component> factors;
  std::complex<double> coefficient = 0.0;
  bool n_power_scaling = false;
};

/// Jump operator as a linear combination of collective operators.
struct JumpOperator {
  std::vector<std::pair<Component, std::complex<double>>> terms;
};

/// Ordering of the operator product inside the anticommutator of each
/// dissipator term. `lindblad` uses (L_b)^dagger L_a, the trace-preserving
/// form; `reversed` uses L_a (L_b)^dagger.
enum class AnticommutatorOrder { lindblad, reversed };

/// d rho/dt = -i[H, rho] + sum_ab rates(a,b) (L_a rho L_b^dag - 1/2 {L_b^dag L_a, rho}).
struct LindbladSpec {
  std::vector<HamiltonianTerm> hamiltonian;
  std::vector<JumpOperator> jumps;
  Eigen::MatrixXcd rates;  // jumps.size() square, Hermitian PSD
  int n_total = 1;
  AnticommutatorOrder anticommutator = AnticommutatorOrder::lindblad;

  /// Throws DomainError for a non-Hermitian or non-PSD rate matrix, a size
  /// mismatch, an empty monomial or n_total < 1.
  void validate() const;
};

/// Hamiltonian and jump operators of a spec materialised on one sector.
struct SectorOperators {
  SpinQuantum sector;
  Eigen::MatrixXcd hamiltonian;
  std::vector<Eigen::MatrixXcd> jumps;
};

/// Throws DomainError if the assembled Hamiltonian is not Hermitian.
SectorOperators sector_operators(const LindbladSpec& spec, SpinQuantum s);

/// The same operators on an arbitrary representation, given the matrices of
/// sx, sy, sz, s+, s- (used by the full-space oracle).
Eigen::MatrixXcd assemble_hamiltonian(const LindbladSpec& spec,
                                      const std::array<Eigen::MatrixXcd, 5>& components);
std::vector<Eigen::MatrixXcd> assemble_jumps(const LindbladSpec& spec,
                                             const std::array<Eigen::MatrixXcd, 5>& components);

}  // namespace pibreak
