#pragma once

#include <complex>
#include <map>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "pibreak/spin_quantum.hpp"

namespace pibreak {

template <typename Scalar>
using MatrixXc = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

enum class Axis { x, y, z };

/// Collective operators that may appear in Hamiltonian monomials and jumps.
enum class Component { x, y, z, plus, minus };

Axis parse_axis(std::string_view name);
Component parse_component(std::string_view name);
std::string_view to_string(Axis a);
std::string_view to_string(Component c);
constexpr Component as_component(Axis a) {
  return a == Axis::x ? Component::x : a == Axis::y ? Component::y : Component::z;
}

/// Spin operators of one total-spin multiplet in the |S, m> basis ordered by
/// descending m. Unnormalized: eigenvalues of sz are S, S-1, ..., -S.
template <typename Scalar = double>
struct CollectiveOps {
  SpinQuantum sector;
  MatrixXc<Scalar> sx, sy, sz, s_plus, s_minus;

  const MatrixXc<Scalar>& get(Component c) const {
    switch (c) {
      case Component::x: return sx;
      case Component::y: return sy;
      case Component::z: return sz;
      case Component::plus: return s_plus;
      case Component::minus: return s_minus;
    }
    return sz;
  }
};

template <typename Scalar = double>
CollectiveOps<Scalar> build_collective_ops(SpinQuantum s) {
  using C = std::complex<Scalar>;
  const int d = s.dim();
  CollectiveOps<Scalar> ops;
  ops.sector = s;
  ops.sz = MatrixXc<Scalar>::Zero(d, d);
  ops.s_plus = MatrixXc<Scalar>::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const int two_m = s.two_m_at(k);
    ops.sz(k, k) = C(Scalar(two_m) / Scalar(2));
    if (k > 0) {
      // S+ |S,m> = sqrt((S-m)(S+m+1)) |S,m+1>; the product is an exact
      // integer over 4.
      const long long num = static_cast<long long>(s.twice() - two_m) * (s.twice() + two_m + 2);
      ops.s_plus(k - 1, k) = C(std::sqrt(Scalar(num)) / Scalar(2));
    }
  }
  ops.s_minus = ops.s_plus.adjoint();
  ops.sx = (ops.s_plus + ops.s_minus) * C(Scalar(0.5));
  ops.sy = (ops.s_plus - ops.s_minus) * C(Scalar(0), Scalar(-0.5));
  return ops;
}

/// Condon-Shortley Clebsch-Gordan coefficient <j1 m1; j2 m2 | S M>, all
/// projections given as twice their value. Zero when M != m1 + m2 or S is
/// outside the triangle; throws DomainError for parity or range violations.
double cg_coefficient(SpinQuantum j1, int two_m1, SpinQuantum j2, int two_m2, SpinQuantum s,
                      int two_m);

/// Orthogonal change of basis from |j1 m1> (x) |j2 m2> (column index
/// i1 * (2j2+1) + i2, both descending m) to coupled |S M> (rows ordered by S
/// descending, then M descending).
struct CoupledBasisMap {
  SpinQuantum j1, j2;
  std::vector<SpinQuantum> sectors;  // j1+j2 down to |j1-j2|
  Eigen::SparseMatrix<double, Eigen::RowMajor> unitary;

  Eigen::Index dim() const { return unitary.rows(); }
  /// First coupled row belonging to sector S.
  Eigen::Index offset(SpinQuantum s) const;
  bool has_sector(SpinQuantum s) const;
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(unitary); }
};

CoupledBasisMap couple_basis(SpinQuantum j1, SpinQuantum j2);

/// (row sector, column sector) label of a block.
struct SectorPair {
  SpinQuantum row, col;
  constexpr auto operator<=>(const SectorPair&) const = default;
  bool diagonal() const { return row == col; }
};

/// Indexed family of dense complex blocks between total-spin sectors of two
/// coupled subensembles. Absent keys are identically zero.
struct BlockMatrix {
  SpinQuantum j1, j2;
  std::map<SectorPair, Eigen::MatrixXcd> blocks;

  const Eigen::MatrixXcd* find(SectorPair key) const;
  /// Dense matrix in the coupled basis of `map`.
  Eigen::MatrixXcd assemble(const CoupledBasisMap& map) const;
  /// Splits a dense coupled-basis matrix into blocks; zero blocks dropped
  /// when `keep_zero_blocks` is false.
  static BlockMatrix partition(const CoupledBasisMap& map, const Eigen::MatrixXcd& full,
                               bool keep_zero_blocks = true);
  double max_abs() const;
};

struct BlockOperator : BlockMatrix {
  BlockOperator() = default;
  explicit BlockOperator(BlockMatrix m) : BlockMatrix(std::move(m)) {}
};

BlockOperator operator+(const BlockOperator& a, const BlockOperator& b);
BlockOperator operator-(const BlockOperator& a, const BlockOperator& b);
BlockOperator operator*(std::complex<double> c, const BlockOperator& a);

/// Spin operator of subensemble `which` (1 or 2) expressed in the coupled
/// basis.
BlockOperator subensemble_operator(int which, Component c, const CoupledBasisMap& map);

/// O_S = S_1 + S_2 and O_A = S_1 - S_2 along an axis (or ladder component).
BlockOperator symmetric_observable(Component c, const CoupledBasisMap& map);
BlockOperator antisymmetric_observable(Component c, const CoupledBasisMap& map);
inline BlockOperator antisymmetric_observable(Axis a, const CoupledBasisMap& map) {
  return antisymmetric_observable(as_component(a), map);
}
inline BlockOperator symmetric_observable(Axis a, const CoupledBasisMap& map) {
  return symmetric_observable(as_component(a), map);
}

struct OverlapEntry {
  SpinQuantum s, s_tilde;
  double weight;  // sum of |<S,m| O |S~,m'>|
};

/// Summed absolute matrix elements per sector pair, sorted by (S, S~)
/// descending. Pairs whose block is absent are reported with weight zero.
std::vector<OverlapEntry> offdiag_overlap_profile(const BlockOperator& op,
                                                  const CoupledBasisMap& map);

}  // namespace pibreak
