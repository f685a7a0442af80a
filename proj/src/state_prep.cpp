#include "pibreak/state_prep.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace pibreak {

int EnsembleSpec::total_spins() const {
  return std::accumulate(subensembles.begin(), subensembles.end(), 0,
                         [](int acc, const Subensemble& s) { return acc + s.n_spins; });
}

void EnsembleSpec::validate() const {
  if (subensembles.empty()) throw DomainError("ensemble: no subensembles");
  for (const auto& s : subensembles) {
    if (s.n_spins < 1) throw DomainError("ensemble: n_spins must be >= 1");
    if (!(s.params.theta >= 0.0 && s.params.theta <= std::numbers::pi + 1e-12)) {
      throw DomainError("ensemble: theta must lie in [0, pi]");
    }
    if (!std::isfinite(s.params.phi)) throw DomainError("ensemble: phi must be finite");
  }
}

std::complex<double> BlockDensityMatrix::trace() const {
  std::complex<double> t = 0.0;
  for (const auto& [key, block] : blocks) {
    if (key.diagonal()) t += block.trace();
  }
  return t;
}

Eigen::VectorXcd coherent_amplitudes(SpinQuantum j, CoherentParams p) {
  const int n = j.twice();
  const double c = std::cos(0.5 * p.theta);
  const double s = std::sin(0.5 * p.theta);
  const double phi = std::fmod(p.phi, 2.0 * std::numbers::pi);
  Eigen::VectorXcd amp(j.dim());
  for (int k = 0; k < j.dim(); ++k) {
    const int ups = n - k;  // j + m
    const double log_binom = std::lgamma(n + 1.0) - std::lgamma(ups + 1.0) - std::lgamma(k + 1.0);
    const double mag = std::exp(0.5 * log_binom) * std::pow(c, k) * std::pow(s, ups);
    amp(k) = std::polar(mag, -phi * ups);
  }
  return amp;
}

BlockDensityMatrix pure_block_state(const CoupledBasisMap& map, const Eigen::VectorXcd& coupled) {
  BlockDensityMatrix rho;
  rho.j1 = map.j1;
  rho.j2 = map.j2;
  for (const auto& s : map.sectors) {
    const auto cs = coupled.segment(map.offset(s), s.dim());
    for (const auto& sp : map.sectors) {
      const auto csp = coupled.segment(map.offset(sp), sp.dim());
      rho.blocks.emplace(SectorPair{s, sp}, cs * csp.adjoint());
    }
  }
  return rho;
}

BlockDensityMatrix initial_block_state(const EnsembleSpec& spec, const CoupledBasisMap& map) {
  spec.validate();
  if (spec.size() != 2) {
    throw UnsupportedError("initial_block_state: exact block states need exactly M = 2 subensembles");
  }
  const auto j1 = SpinQuantum::from_spin_count(spec.subensembles[0].n_spins);
  const auto j2 = SpinQuantum::from_spin_count(spec.subensembles[1].n_spins);
  if (map.j1 != j1 || map.j2 != j2) throw DomainError("initial_block_state: map does not match spec");
  const Eigen::VectorXcd a1 = coherent_amplitudes(j1, spec.subensembles[0].params);
  const Eigen::VectorXcd a2 = coherent_amplitudes(j2, spec.subensembles[1].params);
  Eigen::VectorXcd product(j1.dim() * j2.dim());
  for (int i1 = 0; i1 < j1.dim(); ++i1) product.segment(i1 * j2.dim(), j2.dim()) = a1(i1) * a2;
  const Eigen::VectorXcd coupled = map.unitary.cast<std::complex<double>>() * product;
  return pure_block_state(map, coupled);
}

BlockDensityMatrix initial_block_state(const EnsembleSpec& spec) {
  spec.validate();
  if (spec.size() != 2) {
    throw UnsupportedError("initial_block_state: exact block states need exactly M = 2 subensembles");
  }
  return initial_block_state(spec, couple_basis(SpinQuantum::from_spin_count(spec.subensembles[0].n_spins),
                                                SpinQuantum::from_spin_count(spec.subensembles[1].n_spins)));
}

std::vector<DiagWeight> diag_distribution(const BlockDensityMatrix& rho) {
  std::vector<DiagWeight> out;
  for (auto it = rho.blocks.rbegin(); it != rho.blocks.rend(); ++it) {
    if (it->first.diagonal()) out.push_back({it->first.row, it->second.trace().real()});
  }
  return out;
}

std::vector<OffDiagWeight> offdiag_distribution(const BlockDensityMatrix& rho) {
  std::vector<OffDiagWeight> out;
  for (auto it = rho.blocks.rbegin(); it != rho.blocks.rend(); ++it) {
    if (!it->first.diagonal()) {
      out.push_back({it->first.row, it->first.col, it->second.squaredNorm()});
    }
  }
  return out;
}

double mean_total_spin(const std::vector<DiagWeight>& dist) {
  double num = 0.0, den = 0.0;
  for (const auto& w : dist) {
    num += w.s.value() * w.p_d;
    den += w.p_d;
  }
  return den > 0.0 ? num / den : 0.0;
}

double nearest_neighbor_weight(const std::vector<OffDiagWeight>& dist) {
  double sum = 0.0;
  for (const auto& w : dist) {
    if (w.s.twice() - w.s_prime.twice() == 2) sum += w.p_off;
  }
  return sum;
}

double trace_distance(const BlockDensityMatrix& a, const BlockDensityMatrix& b,
                      const CoupledBasisMap& map) {
  const Eigen::MatrixXcd diff = a.assemble(map) - b.assemble(map);
  const Eigen::MatrixXcd herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

MFState mf_initial_vectors(const EnsembleSpec& spec) {
  spec.validate();
  MFState state;
  state.spins.resize(3, spec.size());
  for (int i = 0; i < spec.size(); ++i) {
    const auto& s = spec.subensembles[i];
    const double r = 0.5 * s.n_spins;
    state.spins.col(i) << r * std::sin(s.params.theta) * std::cos(s.params.phi),
        r * std::sin(s.params.theta) * std::sin(s.params.phi), -r * std::cos(s.params.theta);
  }
  return state;
}

}  // namespace pibreak
