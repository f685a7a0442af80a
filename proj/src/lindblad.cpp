#include "pibreak/lindblad.hpp"

#include <array>
#include <cmath>

namespace pibreak {

namespace {

std::size_t slot(Component c) { return static_cast<std::size_t>(c); }

}  // namespace

void LindbladSpec::validate() const {
  if (n_total < 1) throw DomainError("LindbladSpec: n_total must be positive");
  for (const auto& term : hamiltonian) {
    if (term.factors.empty()) throw DomainError("LindbladSpec: empty Hamiltonian monomial");
  }
  const auto k = static_cast<Eigen::Index>(jumps.size());
  if (rates.rows() != k || rates.cols() != k) {
    throw DomainError("LindbladSpec: rate matrix must be " + std::to_string(k) + "x" +
                      std::to_string(k));
  }
  if (k == 0) return;
  const double scale = std::max(1.0, rates.cwiseAbs().maxCoeff());
  if ((rates - rates.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("LindbladSpec: rate matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rates, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw DomainError("LindbladSpec: rate matrix is not positive semidefinite");
  }
}

Eigen::MatrixXcd assemble_hamiltonian(const LindbladSpec& spec,
                                      const std::array<Eigen::MatrixXcd, 5>& components) {
  const Eigen::Index d = components[0].rows();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& term : spec.hamiltonian) {
    Eigen::MatrixXcd product = components[slot(term.factors.front())];
    for (std::size_t i = 1; i < term.factors.size(); ++i) {
      product = product * components[slot(term.factors[i])];
    }
    std::complex<double> c = term.coefficient;
    if (term.n_power_scaling) {
      c /= std::pow(static_cast<double>(spec.n_total), static_cast<double>(term.factors.size() - 1));
    }
    h += c * product;
  }
  return h;
}

std::vector<Eigen::MatrixXcd> assemble_jumps(const LindbladSpec& spec,
                                             const std::array<Eigen::MatrixXcd, 5>& components) {
  const Eigen::Index d = components[0].rows();
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& jump : spec.jumps) {
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& [c, coeff] : jump.terms) l += coeff * components[slot(c)];
    out.push_back(std::move(l));
  }
  return out;
}

SectorOperators sector_operators(const LindbladSpec& spec, SpinQuantum s) {
  const auto ops = build_collective_ops(s);
  const std::array<Eigen::MatrixXcd, 5> comps{ops.sx, ops.sy, ops.sz, ops.s_plus, ops.s_minus};
  SectorOperators out{s, assemble_hamiltonian(spec, comps), assemble_jumps(spec, comps)};
  const double scale = std::max(1.0, out.hamiltonian.cwiseAbs().maxCoeff());
  if ((out.hamiltonian - out.hamiltonian.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw DomainError("LindbladSpec: Hamiltonian is not Hermitian on sector S=" + s.str());
  }
  return out;
}

}  // namespace pibreak
