#pragma once

#include <complex>
#include <optional>
#include <utility>

#include "pibreak/lindblad.hpp"

namespace pibreak {

/// Spin-only Dicke model after eliminating a lossy cavity mode.
struct DickeParams {
  double omega_z = 0.1;
  double omega_0 = 1.0;
  double kappa = 1.0;
  double g = 0.0;
  int n_total = 2;

  void validate() const;
};

/// Collective decay competing with a transverse drive.
struct BTCParams {
  double omega_x = 0.0;
  double kappa = 1.0;
  double j_xx = 0.0;
  int n_total = 2;

  void validate() const;
};

/// alpha_pm = -g / [2 sqrt(N) (omega_0 pm omega_z - i kappa)].
std::pair<std::complex<double>, std::complex<double>> dicke_alpha(const DickeParams& p);

/// H = omega_z Sz + g/(2 sqrt N) (Sx D + D^dag Sx), jump D = a+ S+ + a- S- at
/// rate kappa. Monomials are kept in the written order.
LindbladSpec dicke_effective_spec(const DickeParams& p);

/// sqrt(omega_z (omega_0^2 + kappa^2) / omega_0 * N / (2 norm_s)). `norm_s`
/// is the length of the symmetric spin vector in spin units, N/2 when the
/// ensemble is fully symmetric (the default).
double dicke_gcr(const DickeParams& p, std::optional<double> norm_s = std::nullopt);

/// H = omega_x Sx + (2 J_xx / N) Sx^2, jump S- at rate 2 kappa / N.
LindbladSpec btc_spec(const BTCParams& p, AnticommutatorOrder order = AnticommutatorOrder::lindblad);

/// Threshold omega_x = kappa; throws NotApplicableError when J_xx != 0.
double btc_critical(const BTCParams& p);

}  // namespace pibreak
