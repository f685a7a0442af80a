#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "pibreak/state_prep.hpp"

using namespace pibreak;
using std::numbers::pi;

namespace {

SpinQuantum sq(int twice) { return SpinQuantum::from_twice(twice); }

EnsembleSpec pair(int n1, CoherentParams a, int n2, CoherentParams b) { return EnsembleSpec{{{n1, a}, {n2, b}}}; }

double p_of(const std::vector<DiagWeight>& d, int twice) {
  for (const auto& w : d) {
    if (w.s.twice() == twice) return w.p_d;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("coherent amplitudes") {
  const auto down = coherent_amplitudes(sq(4), {0.0, 1.3});
  CHECK(std::abs(down(4) - 1.0) < 1e-15);
  CHECK(down.head(4).norm() < 1e-15);

  const double phi = 0.7;
  const auto up = coherent_amplitudes(sq(4), {pi, phi});
  CHECK(std::abs(up(0) - std::polar(1.0, -phi * 4)) < 1e-14);
  CHECK(up.tail(4).norm() < 1e-14);

  const auto half = coherent_amplitudes(sq(1), {pi / 2, 0.0});
  CHECK(std::abs(half(0) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(half(1) - 1.0 / std::sqrt(2.0)) < 1e-15);

  for (int twice : {1, 7, 40}) CHECK(coherent_amplitudes(sq(twice), {1.1, 2.2}).norm() == doctest::Approx(1.0));
}

TEST_CASE("two-spin initial states") {
  const auto aligned = initial_block_state(pair(1, {pi / 2, 0.0}, 1, {pi / 2, 0.0}));
  const auto d = diag_distribution(aligned);
  CHECK(p_of(d, 2) == doctest::Approx(1.0));
  CHECK(p_of(d, 0) < 1e-15);

  const auto opposite = initial_block_state(pair(1, {pi / 2, 0.0}, 1, {pi / 2, pi}));
  const auto d2 = diag_distribution(opposite);
  CHECK(p_of(d2, 2) == doctest::Approx(0.5));
  CHECK(p_of(d2, 0) == doctest::Approx(0.5));
  const auto off = offdiag_distribution(opposite);
  REQUIRE(off.size() == 2);
  for (const auto& w : off) CHECK(w.p_off == doctest::Approx(0.25));
  CHECK(nearest_neighbor_weight(off) == doctest::Approx(0.25));
}

TEST_CASE("co-aligned states live in the top sector") {
  for (const double theta : {0.0, 0.4, pi / 2, 2.9}) {
    for (const int n : {3, 8}) {
      const auto rho = initial_block_state(pair(n, {theta, 1.2}, n + 1, {theta, 1.2}));
      const auto d = diag_distribution(rho);
      CHECK(d.front().s.twice() == 2 * n + 1);
      CHECK(d.front().p_d == doctest::Approx(1.0).epsilon(1e-13));
      for (const auto& w : offdiag_distribution(rho)) CHECK(w.p_off < 1e-24);
    }
  }
}

TEST_CASE("block state round trips to the uncoupled product") {
  const auto spec = pair(3, {0.8, 0.3}, 2, {2.1, 4.0});
  const auto map = couple_basis(sq(3), sq(2));
  const auto rho = initial_block_state(spec, map);
  const Eigen::VectorXcd a = coherent_amplitudes(sq(3), spec.subensembles[0].params);
  const Eigen::VectorXcd b = coherent_amplitudes(sq(2), spec.subensembles[1].params);
  const Eigen::VectorXcd prod = Eigen::kroneckerProduct(a, b);
  const Eigen::MatrixXd u = map.dense();
  const Eigen::MatrixXcd back = u.transpose() * rho.assemble(map) * u;
  CHECK((back - prod * prod.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("block density matrix invariants") {
  const auto map = couple_basis(sq(10), sq(10));
  for (const double phi_a : {0.3, 1.7, pi}) {
    const auto rho = initial_block_state(pair(10, {pi / 2, 0.0}, 10, {1.0, phi_a}), map);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
    double total = 0.0;
    for (const auto& w : diag_distribution(rho)) total += w.p_d;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    for (const auto& [key, blk] : rho.blocks) {
      const auto* mirror = rho.find({key.col, key.row});
      REQUIRE(mirror != nullptr);
      CHECK((blk - mirror->adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
    const Eigen::MatrixXcd full = rho.assemble(map);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(full);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    const auto off = offdiag_distribution(rho);
    for (const auto& w : off) {
      for (const auto& v : off) {
        if (v.s == w.s_prime && v.s_prime == w.s) CHECK(v.p_off == doctest::Approx(w.p_off).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("mean S decreases with phi_A") {
  const auto map = couple_basis(sq(16), sq(16));
  double prev = 1e9;
  for (int k = 0; k <= 8; ++k) {
    const double mean = mean_total_spin(diag_distribution(initial_block_state(pair(16, {pi / 2, 0.0}, 16, {pi / 2, k * pi / 8}), map)));
    CHECK(mean <= prev + 1e-12);
    prev = mean;
  }
}

TEST_CASE("trace distance") {
  const auto map = couple_basis(sq(1), sq(1));
  const auto a = initial_block_state(pair(1, {0.0, 0.0}, 1, {0.0, 0.0}), map);
  const auto b = initial_block_state(pair(1, {pi, 0.0}, 1, {pi, 0.0}), map);
  CHECK(trace_distance(a, a, map) < 1e-15);
  CHECK(trace_distance(a, b, map) == doctest::Approx(1.0));
}

TEST_CASE("mean-field initial vectors") {
  const EnsembleSpec e{{{4, {0.0, 0.0}}, {6, {pi / 2, 0.0}}, {2, {pi / 2, pi / 4}}}};
  const auto s = mf_initial_vectors(e).spins;
  CHECK((s.col(0) - Eigen::Vector3d(0, 0, -2)).norm() < 1e-15);
  CHECK((s.col(1) - Eigen::Vector3d(3, 0, 0)).norm() < 1e-15);
  CHECK((s.col(2) - Eigen::Vector3d(std::sqrt(0.5), std::sqrt(0.5), 0)).norm() < 1e-15);
}

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS((EnsembleSpec{{{0, {0.0, 0.0}}}}.validate()), DomainError);
  CHECK_THROWS_AS((EnsembleSpec{{{2, {4.0, 0.0}}}}.validate()), DomainError);
  CHECK_THROWS_AS((initial_block_state(EnsembleSpec{{{2, {0.0, 0.0}}, {2, {0.0, 0.0}}, {2, {0.0, 0.0}}}})), UnsupportedError);
  CHECK(pair(3, {}, 5, {}).total_spins() == 8);
}
