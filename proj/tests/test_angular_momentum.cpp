#include <doctest.h>

#include <cmath>
#include <complex>

#include "exact_cg.hpp"
#include "pibreak/angular_momentum.hpp"

using namespace pibreak;
using C = std::complex<double>;

namespace {

SpinQuantum sq(int twice) { return SpinQuantum::from_twice(twice); }

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Eigen::MatrixXcd block_or_zero(const BlockOperator& op, SectorPair key) {
  if (const auto* b = op.find(key)) return *b;
  return Eigen::MatrixXcd::Zero(key.row.dim(), key.col.dim());
}

}  // namespace

TEST_CASE("spin quantum bookkeeping") {
  const auto s = sq(3);
  CHECK(s.dim() == 4);
  CHECK(s.value() == doctest::Approx(1.5));
  CHECK(s.str() == "3/2");
  CHECK(sq(4).str() == "2");
  CHECK(s.admits(1));
  CHECK_FALSE(s.admits(2));
  CHECK_FALSE(s.admits(5));
  CHECK(s.index_of(3) == 0);
  CHECK(s.two_m_at(3) == -3);
  CHECK_THROWS_AS(SpinQuantum::from_twice(-1), DomainError);
}

TEST_CASE("collective operators follow the ladder formula") {
  const auto one = build_collective_ops(sq(2));
  // |1,0> is index 1, |1,1> index 0
  CHECK(std::abs(one.s_plus(0, 1) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(one.sz(2, 2) - C(-1.0)) < 1e-15);

  const auto half = build_collective_ops(sq(1));
  Eigen::Matrix2cd pauli_x;
  pauli_x << 0, 1, 1, 0;
  CHECK(max_abs(half.sx - 0.5 * pauli_x) < 1e-15);
}

TEST_CASE("collective operator algebra up to 2S = 128") {
  for (int twice = 0; twice <= 128; ++twice) {
    const auto ops = build_collective_ops(sq(twice));
    const double s = 0.5 * twice;
    const Eigen::MatrixXcd comm = ops.sx * ops.sy - ops.sy * ops.sx - C(0, 1) * ops.sz;
    Eigen::MatrixXcd cas = ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
    cas.diagonal().array() -= s * (s + 1.0);
    CHECK(max_abs(comm) < 1e-12 * std::max(1.0, s));
    CHECK(max_abs(cas) < 1e-12 * std::max(1.0, s * (s + 1.0)));
  }
}

TEST_CASE("Clebsch-Gordan examples") {
  CHECK(cg_coefficient(sq(1), 1, sq(1), 1, sq(2), 2) == doctest::Approx(1.0));
  CHECK(cg_coefficient(sq(1), 1, sq(1), -1, sq(2), 0) == doctest::Approx(0.70710678118654752));
  CHECK(cg_coefficient(sq(1), -1, sq(1), 1, sq(0), 0) == doctest::Approx(-0.70710678118654752));
  CHECK(cg_coefficient(sq(2), 2, sq(2), 0, sq(2), 0) == 0.0);  // M != m1 + m2
  CHECK(cg_coefficient(sq(2), 0, sq(2), 0, sq(6), 0) == 0.0);  // outside the triangle
  CHECK_THROWS_AS(cg_coefficient(sq(2), 1, sq(2), 0, sq(2), 1), DomainError);
  CHECK_THROWS_AS(cg_coefficient(sq(2), 4, sq(2), 0, sq(2), 4), DomainError);
}

TEST_CASE("Clebsch-Gordan agrees with exact rational Racah sums") {
  const int pairs[][2] = {{1, 1}, {2, 1}, {3, 4}, {7, 5}, {12, 9}, {20, 20}, {31, 16}, {60, 57}};
  for (const auto& p : pairs) {
    const int a = p[0], b = p[1];
    for (int two_s = std::abs(a - b); two_s <= a + b; two_s += 2) {
      for (int two_m1 = -a; two_m1 <= a; two_m1 += std::max(2, a / 3 * 2)) {
        for (int two_m2 = -b; two_m2 <= b; two_m2 += 2) {
          const int two_m = two_m1 + two_m2;
          if (std::abs(two_m) > two_s) continue;
          const double got = cg_coefficient(sq(a), two_m1, sq(b), two_m2, sq(two_s), two_m);
          const double want = exact_cg(a, two_m1, b, two_m2, two_s, two_m);
          CHECK(std::abs(got - want) < 1e-13);
        }
      }
    }
  }
}

TEST_CASE("coupled basis of two spin halves") {
  const auto map = couple_basis(sq(1), sq(1));
  REQUIRE(map.sectors.size() == 2);
  const Eigen::MatrixXd u = map.dense();
  const double r = 1.0 / std::sqrt(2.0);
  // singlet is the last row; uncoupled order (up up, up down, down up, down down)
  CHECK(std::abs(u(3, 0)) < 1e-15);
  CHECK(std::abs(u(3, 1) - r) < 1e-15);
  CHECK(std::abs(u(3, 2) + r) < 1e-15);
  CHECK(std::abs(u(3, 3)) < 1e-15);
  CHECK(map.offset(sq(2)) == 0);
  CHECK(map.offset(sq(0)) == 3);
}

TEST_CASE("coupled basis shapes and identity limit") {
  const auto ones = couple_basis(sq(2), sq(2));
  CHECK(ones.dim() == 9);
  REQUIRE(ones.sectors.size() == 3);
  CHECK(ones.sectors[0] == sq(4));
  CHECK(ones.sectors[2] == sq(0));

  const auto trivial = couple_basis(sq(7), sq(0));
  CHECK((trivial.dense() - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("coupled basis is orthogonal") {
  for (const auto& [a, b] : {std::pair{3, 5}, std::pair{16, 16}, std::pair{40, 23}}) {
    const Eigen::MatrixXd u = couple_basis(sq(a), sq(b)).dense();
    const auto n = u.rows();
    CHECK((u * u.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((u.transpose() * u - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("block assemble and partition round trip") {
  const auto map = couple_basis(sq(3), sq(2));
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(map.dim(), map.dim());
  const auto blocks = BlockMatrix::partition(map, m);
  CHECK(blocks.blocks.size() == map.sectors.size() * map.sectors.size());
  CHECK(max_abs(blocks.assemble(map) - m) == 0.0);
  CHECK(blocks.max_abs() == doctest::Approx(m.cwiseAbs().maxCoeff()));
}

TEST_CASE("subensemble operators in the coupled basis") {
  const auto map = couple_basis(sq(1), sq(1));
  const auto z1 = subensemble_operator(1, Component::z, map);
  const auto triplet = block_or_zero(z1, {sq(2), sq(2)});
  CHECK(std::abs(triplet(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(triplet(1, 1)) < 1e-15);
  CHECK(std::abs(triplet(2, 2) + 0.5) < 1e-15);

  const auto solo = couple_basis(sq(5), sq(0));
  const auto ops = build_collective_ops(sq(5));
  for (const auto c : {Component::x, Component::y, Component::z, Component::plus, Component::minus}) {
    CHECK(max_abs(block_or_zero(subensemble_operator(1, c, solo), {sq(5), sq(5)}) - ops.get(c)) < 1e-14);
  }
  CHECK_THROWS_AS(subensemble_operator(3, Component::x, map), DomainError);
}

TEST_CASE("symmetric observables reproduce the sector operators") {
  for (const auto& [a, b] : {std::pair{4, 4}, std::pair{5, 2}, std::pair{8, 7}}) {
    const auto map = couple_basis(sq(a), sq(b));
    for (const auto c : {Component::x, Component::y, Component::z, Component::plus, Component::minus}) {
      const auto sym = symmetric_observable(c, map);
      for (const auto s : map.sectors) {
        for (const auto s2 : map.sectors) {
          const auto blk = block_or_zero(sym, {s, s2});
          if (s == s2) {
            CHECK(max_abs(blk - build_collective_ops(s).get(c)) < 1e-12);
          } else {
            CHECK(max_abs(blk) < 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("antisymmetric observable selection rules") {
  const auto map = couple_basis(sq(6), sq(6));
  for (const auto c : {Component::x, Component::y, Component::z}) {
    const auto anti = antisymmetric_observable(c, map);
    for (const auto& [key, blk] : anti.blocks) {
      const int gap = std::abs(key.row.twice() - key.col.twice());
      if (gap != 2) CHECK(max_abs(blk) < 1e-12);
    }
  }
  // [O_S,z, O_A^+-] = +-O_A^+-
  const Eigen::MatrixXcd sz = symmetric_observable(Component::z, map).assemble(map);
  for (const auto& [c, sign] : {std::pair{Component::plus, 1.0}, std::pair{Component::minus, -1.0}}) {
    const Eigen::MatrixXcd a = antisymmetric_observable(c, map).assemble(map);
    CHECK(max_abs(sz * a - a * sz - sign * a) < 1e-12);
  }
}

TEST_CASE("overlap profile") {
  const auto map = couple_basis(sq(30), sq(30));
  double nn = 0.0, total = 0.0;
  for (const auto& e : offdiag_overlap_profile(antisymmetric_observable(Axis::x, map), map)) {
    const int gap = std::abs(e.s.twice() - e.s_tilde.twice());
    if (gap == 2) nn += e.weight;
    else CHECK(e.weight < 1e-10);
    total += e.weight;
  }
  CHECK(nn > 0.0);
  CHECK(nn == doctest::Approx(total));

  for (const auto& e : offdiag_overlap_profile(symmetric_observable(Axis::x, couple_basis(sq(4), sq(4))),
                                               couple_basis(sq(4), sq(4)))) {
    if (e.s != e.s_tilde) CHECK(e.weight < 1e-12);
  }
}

TEST_CASE("axis and component names") {
  CHECK(parse_axis("y") == Axis::y);
  CHECK(parse_component("plus") == Component::plus);
  CHECK(parse_component("-") == Component::minus);
  CHECK(to_string(Component::minus) == "minus");
  CHECK_THROWS_AS(parse_axis("w"), DomainError);
  CHECK_THROWS_AS(parse_component("q"), DomainError);
}
