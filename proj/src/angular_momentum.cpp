#include "pibreak/angular_momentum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <quadmath.h>
#include <unsupported/Eigen/KroneckerProduct>

namespace pibreak {

namespace {

using Quad = __float128;

// log(n!) in quad precision. 2j <= 256 needs arguments up to 385.
constexpr int kLogFactorialTable = 2048;

Quad log_factorial(int n) {
  static const std::array<Quad, kLogFactorialTable> table = [] {
    std::array<Quad, kLogFactorialTable> t{};
    t[0] = 0;
    for (int k = 1; k < kLogFactorialTable; ++k) t[k] = t[k - 1] + logq(Quad(k));
    return t;
  }();
  if (n < 0) throw DomainError("log_factorial: negative argument");
  if (n < kLogFactorialTable) return table[n];
  return lgammaq(Quad(n) + 1);
}

void require_projection(SpinQuantum j, int two_m, const char* what) {
  if (!j.admits(two_m)) {
    throw DomainError(std::string("cg_coefficient: invalid projection ") + what + " (2j=" +
                      std::to_string(j.twice()) + ", 2m=" + std::to_string(two_m) + ")");
  }
}

}  // namespace

Axis parse_axis(std::string_view name) {
  if (name == "x") return Axis::x;
  if (name == "y") return Axis::y;
  if (name == "z") return Axis::z;
  throw DomainError("unknown axis '" + std::string(name) + "'");
}

Component parse_component(std::string_view name) {
  if (name == "x") return Component::x;
  if (name == "y") return Component::y;
  if (name == "z") return Component::z;
  if (name == "+" || name == "plus") return Component::plus;
  if (name == "-" || name == "minus") return Component::minus;
  throw DomainError("unknown collective operator '" + std::string(name) + "'");
}

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

std::string_view to_string(Component c) {
  switch (c) {
    case Component::x: return "x";
    case Component::y: return "y";
    case Component::z: return "z";
    case Component::plus: return "plus";
    case Component::minus: return "minus";
  }
  return "?";
}

double cg_coefficient(SpinQuantum j1, int two_m1, SpinQuantum j2, int two_m2, SpinQuantum s,
                      int two_m) {
  require_projection(j1, two_m1, "m1");
  require_projection(j2, two_m2, "m2");
  require_projection(s, two_m, "M");
  if ((j1.twice() + j2.twice() + s.twice()) % 2 != 0) {
    throw DomainError("cg_coefficient: j1 + j2 + S is not an integer");
  }
  if (two_m != two_m1 + two_m2) return 0.0;
  if (s.twice() > j1.twice() + j2.twice() || s.twice() < std::abs(j1.twice() - j2.twice())) {
    return 0.0;
  }

  // Racah's closed form. All arguments below are integers.
  const int J1 = j1.twice(), J2 = j2.twice(), S = s.twice();
  const int a = (J1 + J2 - S) / 2;
  const int b = (J1 - two_m1) / 2;
  const int c = (J2 + two_m2) / 2;
  const int d = (S - J2 + two_m1) / 2;
  const int e = (S - J1 - two_m2) / 2;
  const int k_min = std::max({0, -d, -e});
  const int k_max = std::min({a, b, c});
  if (k_min > k_max) return 0.0;

  const Quad log_prefactor =
      0.5Q * (logq(Quad(S + 1)) + log_factorial(a) + log_factorial((J1 - J2 + S) / 2) +
              log_factorial((-J1 + J2 + S) / 2) - log_factorial((J1 + J2 + S) / 2 + 1) +
              log_factorial((J1 + two_m1) / 2) + log_factorial(b) + log_factorial(c) +
              log_factorial((J2 - two_m2) / 2) + log_factorial((S + two_m) / 2) +
              log_factorial((S - two_m) / 2));
  const Quad log_first = -(log_factorial(k_min) + log_factorial(a - k_min) +
                           log_factorial(b - k_min) + log_factorial(c - k_min) +
                           log_factorial(d + k_min) + log_factorial(e + k_min));

  // Remaining terms relative to the first through the exact term ratio.
  Quad sum = 1, term = 1;
  for (int k = k_min; k < k_max; ++k) {
    term *= -Quad(a - k) * Quad(b - k) * Quad(c - k) /
            (Quad(k + 1) * Quad(d + k + 1) * Quad(e + k + 1));
    sum += term;
  }
  const Quad sign = (k_min % 2 == 0) ? 1 : -1;
  return static_cast<double>(sign * expq(log_prefactor + log_first) * sum);
}

Eigen::Index CoupledBasisMap::offset(SpinQuantum s) const {
  Eigen::Index off = 0;
  for (const auto& sector : sectors) {
    if (sector == s) return off;
    off += sector.dim();
  }
  throw DomainError("sector S=" + s.str() + " not present in coupled basis");
}

bool CoupledBasisMap::has_sector(SpinQuantum s) const {
  return std::find(sectors.begin(), sectors.end(), s) != sectors.end();
}

CoupledBasisMap couple_basis(SpinQuantum j1, SpinQuantum j2) {
  CoupledBasisMap map;
  map.j1 = j1;
  map.j2 = j2;
  const int d1 = j1.dim(), d2 = j2.dim();
  for (int two_s = j1.twice() + j2.twice(); two_s >= std::abs(j1.twice() - j2.twice());
       two_s -= 2) {
    map.sectors.push_back(SpinQuantum::from_twice(two_s));
  }

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::Index row = 0;
  for (const auto& s : map.sectors) {
    for (int k = 0; k < s.dim(); ++k, ++row) {
      const int two_m = s.two_m_at(k);
      for (int i1 = 0; i1 < d1; ++i1) {
        const int two_m1 = j1.two_m_at(i1);
        const int two_m2 = two_m - two_m1;
        if (!j2.admits(two_m2)) continue;
        const double v = cg_coefficient(j1, two_m1, j2, two_m2, s, two_m);
        if (v != 0.0) triplets.emplace_back(row, i1 * d2 + j2.index_of(two_m2), v);
      }
    }
  }
  map.unitary.resize(d1 * d2, d1 * d2);
  map.unitary.setFromTriplets(triplets.begin(), triplets.end());
  map.unitary.makeCompressed();
  return map;
}

const Eigen::MatrixXcd* BlockMatrix::find(SectorPair key) const {
  auto it = blocks.find(key);
  return it == blocks.end() ? nullptr : &it->second;
}

Eigen::MatrixXcd BlockMatrix::assemble(const CoupledBasisMap& map) const {
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(map.dim(), map.dim());
  for (const auto& [key, block] : blocks) {
    full.block(map.offset(key.row), map.offset(key.col), block.rows(), block.cols()) = block;
  }
  return full;
}

BlockMatrix BlockMatrix::partition(const CoupledBasisMap& map, const Eigen::MatrixXcd& full,
                                   bool keep_zero_blocks) {
  if (full.rows() != map.dim() || full.cols() != map.dim()) {
    throw DomainError("BlockMatrix::partition: dimension mismatch");
  }
  BlockMatrix out;
  out.j1 = map.j1;
  out.j2 = map.j2;
  for (const auto& s : map.sectors) {
    for (const auto& sp : map.sectors) {
      Eigen::MatrixXcd b = full.block(map.offset(s), map.offset(sp), s.dim(), sp.dim());
      if (keep_zero_blocks || b.cwiseAbs().maxCoeff() > 0.0) out.blocks.emplace(SectorPair{s, sp}, b);
    }
  }
  return out;
}

double BlockMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& [key, block] : blocks) {
    if (block.size() > 0) m = std::max(m, block.cwiseAbs().maxCoeff());
  }
  return m;
}

namespace {

BlockOperator combine(const BlockOperator& a, const BlockOperator& b, std::complex<double> sb) {
  if (a.j1 != b.j1 || a.j2 != b.j2) throw DomainError("BlockOperator: mismatched subensembles");
  BlockOperator out = a;
  for (const auto& [key, block] : b.blocks) {
    auto it = out.blocks.find(key);
    if (it == out.blocks.end()) {
      out.blocks.emplace(key, sb * block);
    } else {
      it->second += sb * block;
    }
  }
  return out;
}

}  // namespace

BlockOperator operator+(const BlockOperator& a, const BlockOperator& b) { return combine(a, b, 1.0); }
BlockOperator operator-(const BlockOperator& a, const BlockOperator& b) { return combine(a, b, -1.0); }
BlockOperator operator*(std::complex<double> c, const BlockOperator& a) {
  BlockOperator out = a;
  for (auto& [key, block] : out.blocks) block *= c;
  return out;
}

BlockOperator subensemble_operator(int which, Component c, const CoupledBasisMap& map) {
  if (which != 1 && which != 2) throw DomainError("subensemble_operator: which must be 1 or 2");
  using SparseC = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;
  const SpinQuantum j = which == 1 ? map.j1 : map.j2;
  const SparseC single = build_collective_ops(j).get(c).sparseView();
  SparseC identity(which == 1 ? map.j2.dim() : map.j1.dim(),
                   which == 1 ? map.j2.dim() : map.j1.dim());
  identity.setIdentity();
  const SparseC uncoupled = which == 1 ? SparseC(Eigen::kroneckerProduct(single, identity))
                                       : SparseC(Eigen::kroneckerProduct(identity, single));
  const SparseC u = map.unitary.cast<std::complex<double>>();
  const SparseC ut = u.transpose();
  const SparseC coupled = u * uncoupled * ut;

  // Coupled row -> (sector position, local index).
  std::vector<std::pair<int, int>> locate(map.dim());
  {
    Eigen::Index row = 0;
    for (int si = 0; si < static_cast<int>(map.sectors.size()); ++si) {
      for (int k = 0; k < map.sectors[si].dim(); ++k) locate[row++] = {si, k};
    }
  }

  BlockOperator out;
  out.j1 = map.j1;
  out.j2 = map.j2;
  for (Eigen::Index r = 0; r < coupled.outerSize(); ++r) {
    for (SparseC::InnerIterator it(coupled, r); it; ++it) {
      if (it.value() == std::complex<double>(0.0)) continue;
      const auto [si, ki] = locate[it.row()];
      const auto [sj, kj] = locate[it.col()];
      const SectorPair key{map.sectors[si], map.sectors[sj]};
      auto [pos, inserted] = out.blocks.try_emplace(key);
      if (inserted) pos->second = Eigen::MatrixXcd::Zero(key.row.dim(), key.col.dim());
      pos->second(ki, kj) = it.value();
    }
  }
  return out;
}

BlockOperator symmetric_observable(Component c, const CoupledBasisMap& map) {
  return subensemble_operator(1, c, map) + subensemble_operator(2, c, map);
}

BlockOperator antisymmetric_observable(Component c, const CoupledBasisMap& map) {
  return subensemble_operator(1, c, map) - subensemble_operator(2, c, map);
}

std::vector<OverlapEntry> offdiag_overlap_profile(const BlockOperator& op,
                                                  const CoupledBasisMap& map) {
  std::vector<OverlapEntry> out;
  for (const auto& s : map.sectors) {
    for (const auto& st : map.sectors) {
      const auto* block = op.find({s, st});
      out.push_back({s, st, block ? block->cwiseAbs().sum() : 0.0});
    }
  }
  return out;
}

}  // namespace pibreak
