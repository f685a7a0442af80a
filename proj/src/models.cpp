#include "pibreak/models.hpp"

#include <cmath>

namespace pibreak {

namespace {
using cd = std::complex<double>;
}

void DickeParams::validate() const {
  if (!(kappa > 0.0)) throw DomainError("dicke: kappa must be positive");
  if (!(omega_0 > 0.0)) throw DomainError("dicke: omega_0 must be positive");
  if (n_total < 2) throw DomainError("dicke: n_total must be >= 2");
  if (!std::isfinite(omega_z) || !std::isfinite(g)) throw DomainError("dicke: non-finite parameter");
}

void BTCParams::validate() const {
  if (!(kappa > 0.0)) throw DomainError("btc: kappa must be positive");
  if (n_total < 1) throw DomainError("btc: n_total must be positive");
  if (!std::isfinite(omega_x) || !std::isfinite(j_xx)) throw DomainError("btc: non-finite parameter");
}

std::pair<cd, cd> dicke_alpha(const DickeParams& p) {
  p.validate();
  const double root_n = std::sqrt(static_cast<double>(p.n_total));
  const cd den_plus(p.omega_0 + p.omega_z, -p.kappa);
  const cd den_minus(p.omega_0 - p.omega_z, -p.kappa);
  if (den_plus == cd(0.0) || den_minus == cd(0.0)) throw DomainError("dicke_alpha: zero denominator");
  return {-p.g / (2.0 * root_n * den_plus), -p.g / (2.0 * root_n * den_minus)};
}

LindbladSpec dicke_effective_spec(const DickeParams& p) {
  const auto [ap, am] = dicke_alpha(p);
  const double c = p.g / (2.0 * std::sqrt(static_cast<double>(p.n_total)));
  using C = Component;
  LindbladSpec spec;
  spec.n_total = p.n_total;
  spec.hamiltonian = {
      {{C::z}, p.omega_z, false},
      {{C::x, C::plus}, c * ap, false},
      {{C::x, C::minus}, c * am, false},
      {{C::minus, C::x}, c * std::conj(ap), false},
      {{C::plus, C::x}, c * std::conj(am), false},
  };
  spec.jumps = {JumpOperator{{{C::plus, ap}, {C::minus, am}}}};
  spec.rates = Eigen::MatrixXcd::Constant(1, 1, p.kappa);
  return spec;
}

double dicke_gcr(const DickeParams& p, std::optional<double> norm_s) {
  p.validate();
  const double n = static_cast<double>(p.n_total);
  const double ns = norm_s.value_or(0.5 * n);
  if (!(ns > 0.0)) throw DomainError("dicke_gcr: norm_S must be positive");
  return std::sqrt(p.omega_z * (p.omega_0 * p.omega_0 + p.kappa * p.kappa) / p.omega_0 * n / (2.0 * ns));
}

LindbladSpec btc_spec(const BTCParams& p, AnticommutatorOrder order) {
  p.validate();
  using C = Component;
  const double n = static_cast<double>(p.n_total);
  LindbladSpec spec;
  spec.n_total = p.n_total;
  spec.anticommutator = order;
  spec.hamiltonian = {{{C::x}, p.omega_x, false}, {{C::x, C::x}, 2.0 * p.j_xx, true}};
  spec.jumps = {JumpOperator{{{C::minus, 1.0}}}};
  spec.rates = Eigen::MatrixXcd::Constant(1, 1, 2.0 * p.kappa / n);
  return spec;
}

double btc_critical(const BTCParams& p) {
  p.validate();
  if (p.j_xx != 0.0) throw NotApplicableError("btc_critical: closed form only at J_xx = 0");
  return p.kappa;
}

}  // namespace pibreak
