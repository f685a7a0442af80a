#include "pibreak/liouville_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <thread>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "pibreak/ode.hpp"

namespace pibreak {

namespace {

using cd = std::complex<double>;

SparseMatrixXcd sparse(const Eigen::MatrixXcd& m) { return m.sparseView(); }

SparseMatrixXcd identity(Eigen::Index d) {
  SparseMatrixXcd id(d, d);
  id.setIdentity();
  return id;
}

/// Union-find over the nonzero pattern.
std::vector<std::vector<Eigen::Index>> components_of(const SparseMatrixXcd& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrixXcd::InnerIterator it(m, k); it; ++it) {
      if (it.value() == cd(0.0)) continue;
      const Eigen::Index a = find(it.row()), b = find(it.col());
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::map<Eigen::Index, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<Eigen::Index>> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

Eigen::MatrixXcd restrict_dense(const SparseMatrixXcd& m, const std::vector<Eigen::Index>& idx) {
  std::vector<Eigen::Index> local(static_cast<std::size_t>(m.rows()), -1);
  for (std::size_t k = 0; k < idx.size(); ++k) local[idx[k]] = static_cast<Eigen::Index>(k);
  const auto d = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (const Eigen::Index col : idx) {
    for (SparseMatrixXcd::InnerIterator it(m, col); it; ++it) {
      const Eigen::Index r = local[it.row()];
      if (r >= 0) out(r, local[col]) = it.value();
    }
  }
  return out;
}

SparseMatrixXcd restrict_sparse(const SparseMatrixXcd& m, const std::vector<Eigen::Index>& idx) {
  if (static_cast<Eigen::Index>(idx.size()) == m.rows()) return m;
  std::vector<Eigen::Index> local(static_cast<std::size_t>(m.rows()), -1);
  for (std::size_t k = 0; k < idx.size(); ++k) local[idx[k]] = static_cast<Eigen::Index>(k);
  std::vector<Eigen::Triplet<cd>> trip;
  for (const Eigen::Index col : idx) {
    for (SparseMatrixXcd::InnerIterator it(m, col); it; ++it) {
      const Eigen::Index r = local[it.row()];
      if (r >= 0) trip.emplace_back(r, local[col], it.value());
    }
  }
  const auto d = static_cast<Eigen::Index>(idx.size());
  SparseMatrixXcd out(d, d);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw DomainError("evolve: empty time grid");
  if (t_grid.front() != 0.0) throw DomainError("evolve: time grid must start at 0");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw DomainError("evolve: time grid must be increasing");
  }
}

std::vector<Eigen::VectorXcd> propagate_dense(const Eigen::MatrixXcd& gen, const Eigen::VectorXcd& v0,
                                              std::span<const double> t_grid) {
  std::vector<Eigen::VectorXcd> out;
  out.reserve(t_grid.size());
  out.push_back(v0);
  Eigen::MatrixXcd step;
  double step_dt = -1.0;
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double dt = t_grid[k] - t_grid[k - 1];
    // Grids built as k*dt jitter in the last bits; reuse the propagator.
    if (std::abs(dt - step_dt) > 1e-13 * dt) {
      step = (gen * cd(dt)).exp();
      step_dt = dt;
    }
    Eigen::VectorXcd next = step * out.back();
    if (!next.allFinite()) {
      throw NumericalError("evolve: non-finite values at t=" + std::to_string(t_grid[k]));
    }
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace

std::vector<std::vector<Eigen::Index>> BlockSuperoperator::invariant_subspaces() const {
  return components_of(matrix);
}

BlockSuperoperator build_block_superoperator(const LindbladSpec& spec, const SectorOperators& left,
                                             const SectorOperators& right) {
  spec.validate();
  const Eigen::Index dl = left.sector.dim(), dr = right.sector.dim();
  const SparseMatrixXcd il = identity(dl), ir = identity(dr);

  SparseMatrixXcd gen = cd(0.0, -1.0) * (SparseMatrixXcd(Eigen::kroneckerProduct(ir, sparse(left.hamiltonian))) -
                                         SparseMatrixXcd(Eigen::kroneckerProduct(
                                             sparse(right.hamiltonian.transpose()), il)));
  const auto k = static_cast<Eigen::Index>(spec.jumps.size());
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      const cd rate = spec.rates(a, b);
      if (rate == cd(0.0)) continue;
      const auto& la_l = left.jumps[a];
      const auto& lb_l = left.jumps[b];
      const auto& la_r = right.jumps[a];
      const auto& lb_r = right.jumps[b];
      Eigen::MatrixXcd anti_l, anti_r;
      if (spec.anticommutator == AnticommutatorOrder::lindblad) {
        anti_l = lb_l.adjoint() * la_l;
        anti_r = lb_r.adjoint() * la_r;
      } else {
        anti_l = la_l * lb_l.adjoint();
        anti_r = la_r * lb_r.adjoint();
      }
      SparseMatrixXcd term = Eigen::kroneckerProduct(sparse(lb_r.conjugate()), sparse(la_l));
      term -= cd(0.5) * SparseMatrixXcd(Eigen::kroneckerProduct(ir, sparse(anti_l)));
      term -= cd(0.5) * SparseMatrixXcd(Eigen::kroneckerProduct(sparse(anti_r.transpose()), il));
      gen += rate * term;
    }
  }
  gen.prune(cd(0.0));
  gen.makeCompressed();
  return BlockSuperoperator{SectorPair{left.sector, right.sector}, std::move(gen)};
}

BlockSuperoperator build_block_superoperator(const LindbladSpec& spec, SpinQuantum s,
                                             SpinQuantum s_prime) {
  const auto left = sector_operators(spec, s);
  if (s == s_prime) return build_block_superoperator(spec, left, left);
  return build_block_superoperator(spec, left, sector_operators(spec, s_prime));
}

std::vector<Eigen::MatrixXcd> evolve_block(const BlockSuperoperator& generator,
                                           const Eigen::MatrixXcd& initial,
                                           std::span<const double> t_grid,
                                           const EvolutionOptions& options) {
  check_grid(t_grid);
  const Eigen::Index rows = generator.block_rows(), cols = generator.block_cols();
  if (initial.rows() != rows || initial.cols() != cols) {
    throw DomainError("evolve: initial block has the wrong shape");
  }
  std::vector<Eigen::MatrixXcd> out(t_grid.size(), Eigen::MatrixXcd::Zero(rows, cols));
  out.front() = initial;
  if (initial.isZero(0.0)) return out;

  const Eigen::Map<const Eigen::VectorXcd> v0(initial.data(), rows * cols);
  const bool dense = options.method == EvolutionMethod::propagator ||
                     (options.method == EvolutionMethod::automatic &&
                      generator.dim() <= options.max_dense_dim);

  for (const auto& comp : generator.invariant_subspaces()) {
    Eigen::VectorXcd c0(static_cast<Eigen::Index>(comp.size()));
    for (std::size_t i = 0; i < comp.size(); ++i) c0(static_cast<Eigen::Index>(i)) = v0(comp[i]);
    if (c0.isZero(0.0)) continue;

    std::vector<Eigen::VectorXcd> traj;
    if (dense) {
      traj = propagate_dense(restrict_dense(generator.matrix, comp), c0, t_grid);
    } else {
      const SparseMatrixXcd sub = restrict_sparse(generator.matrix, comp);
      IntegrationControls controls;
      controls.rel_tol = options.rel_tol;
      controls.abs_tol = options.abs_tol;
      traj = integrate_dopri5([&sub](double, const Eigen::VectorXcd& y) -> Eigen::VectorXcd { return sub * y; },
                              c0, 0.0, t_grid, controls);
    }
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      cd* dst = out[k].data();
      for (std::size_t i = 0; i < comp.size(); ++i) dst[comp[i]] = traj[k](static_cast<Eigen::Index>(i));
    }
  }
  out.front() = initial;
  return out;
}

BlockTrajectory evolve_blocks(const LindbladSpec& spec, const BlockDensityMatrix& rho0,
                              std::span<const double> t_grid, const EvolutionOptions& options) {
  check_grid(t_grid);
  spec.validate();
  std::map<SpinQuantum, SectorOperators> ops;
  auto ops_for = [&](SpinQuantum s) -> const SectorOperators& {
    auto it = ops.find(s);
    if (it == ops.end()) it = ops.emplace(s, sector_operators(spec, s)).first;
    return it->second;
  };

  BlockTrajectory traj;
  traj.times.assign(t_grid.begin(), t_grid.end());
  traj.states.assign(t_grid.size(), BlockDensityMatrix{});
  for (auto& st : traj.states) {
    st.j1 = rho0.j1;
    st.j2 = rho0.j2;
  }
  for (const auto& [key, block] : rho0.blocks) {
    std::vector<Eigen::MatrixXcd> evolved;
    if (block.isZero(0.0)) {
      evolved.assign(t_grid.size(), block);
    } else {
      const auto gen = build_block_superoperator(spec, ops_for(key.row), ops_for(key.col));
      evolved = evolve_block(gen, block, t_grid, options);
    }
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      traj.states[k].blocks.emplace(key, std::move(evolved[k]));
    }
  }
  return traj;
}

std::complex<double> block_expectation(const BlockOperator& op, const BlockDensityMatrix& rho,
                                       SectorPair rho_block) {
  if (op.j1 != rho.j1 || op.j2 != rho.j2) throw DomainError("expectation: sector structure mismatch");
  const auto* r = rho.find(rho_block);
  if (r == nullptr) return 0.0;
  const auto* o = op.find(SectorPair{rho_block.col, rho_block.row});
  if (o == nullptr) return 0.0;
  if (o->rows() != r->cols() || o->cols() != r->rows()) {
    throw DomainError("expectation: block shapes do not match");
  }
  // Tr(O R) without forming the product.
  return (o->transpose().cwiseProduct(*r)).sum();
}

std::complex<double> expectation(const BlockOperator& op, const BlockDensityMatrix& rho) {
  if (op.j1 != rho.j1 || op.j2 != rho.j2) throw DomainError("expectation: sector structure mismatch");
  cd acc = 0.0;
  for (const auto& [key, block] : rho.blocks) acc += block_expectation(op, rho, key);
  return acc;
}

SpectralResult summarize_spectrum(SectorPair sectors, std::vector<std::complex<double>> eigenvalues) {
  std::sort(eigenvalues.begin(), eigenvalues.end(), [](cd a, cd b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
  });
  SpectralResult res;
  res.sectors = sectors;
  res.eigenvalues = std::move(eigenvalues);

  auto max_re = [&](bool exclude_zero) {
    double best = -std::numeric_limits<double>::infinity();
    for (const cd l : res.eigenvalues) {
      if (exclude_zero && std::abs(l.real()) < kStationaryThreshold) continue;
      best = std::max(best, l.real());
    }
    return best;
  };
  const double with_zero = max_re(false);
  const double without_zero = max_re(true);
  const double chosen = sectors.diagonal() ? without_zero : with_zero;
  res.gap = std::isfinite(chosen) ? -chosen : 0.0;
  res.gap_excluding_zero = std::isfinite(without_zero) ? -without_zero : 0.0;
  res.conventions_differ = !sectors.diagonal() && res.gap != res.gap_excluding_zero;

  if (std::isfinite(chosen)) {
    const double tol = kStationaryThreshold + 1e-8 * std::abs(chosen);
    for (const cd l : res.eigenvalues) {
      if (sectors.diagonal() && std::abs(l.real()) < kStationaryThreshold) continue;
      if (std::abs(l.real() - chosen) <= tol) res.gap_imag.push_back(l.imag());
    }
  }
  return res;
}

SpectralResult block_spectrum(const LindbladSpec& spec, SpinQuantum s, SpinQuantum s_prime) {
  const auto gen = build_block_superoperator(spec, s, s_prime);
  std::vector<cd> eig;
  eig.reserve(static_cast<std::size_t>(gen.dim()));
  for (const auto& comp : gen.invariant_subspaces()) {
    if (comp.size() == 1) {
      eig.push_back(gen.matrix.coeff(comp[0], comp[0]));
      continue;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(restrict_dense(gen.matrix, comp), false);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("block_spectrum: eigen-solver failed on block (" + s.str() + "," +
                           s_prime.str() + ")");
    }
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) eig.push_back(solver.eigenvalues()(i));
  }
  return summarize_spectrum(gen.sectors, std::move(eig));
}

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace

DecayFit asymptotic_decay_rate(const TimeSeries& series) {
  constexpr double floor = 1e-12;
  const std::size_t n = series.size();
  if (n < 8) throw NotApplicableError("decay fit: series too short");
  std::vector<double> mag(n);
  for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(series.values[k]);
  const double overall = *std::max_element(mag.begin(), mag.end());
  const double last_third = *std::max_element(mag.begin() + static_cast<std::ptrdiff_t>(n - n / 3), mag.end());
  if (!(last_third < overall)) throw NotApplicableError("decay fit: signal has no decaying tail");

  const std::size_t start = n - (2 * n) / 5;
  std::vector<std::size_t> tail;
  for (std::size_t k = start; k < n; ++k) {
    if (mag[k] > floor) tail.push_back(k);
  }
  if (tail.size() < 3) throw NotApplicableError("decay fit: tail lies below the noise floor");

  std::size_t sign_changes = 0;
  for (std::size_t i = 1; i < tail.size(); ++i) {
    if ((series.values[tail[i]] > 0) != (series.values[tail[i - 1]] > 0)) ++sign_changes;
  }

  std::vector<double> xs, ys;
  DecayFit fit;
  if (sign_changes >= 2) {
    fit.envelope = true;
    for (std::size_t k = std::max<std::size_t>(start, 1); k + 1 < n; ++k) {
      if (mag[k] <= floor || mag[k - 1] <= floor || mag[k + 1] <= floor) continue;
      if (!(mag[k] >= mag[k - 1] && mag[k] > mag[k + 1])) continue;
      // Parabola through the three log-magnitudes around the sample maximum.
      const double l0 = std::log(mag[k - 1]), l1 = std::log(mag[k]), l2 = std::log(mag[k + 1]);
      const double den = l0 - 2.0 * l1 + l2;
      const double off = den != 0.0 ? std::clamp(0.5 * (l0 - l2) / den, -0.5, 0.5) : 0.0;
      xs.push_back(series.time(k) + off * series.dt);
      ys.push_back(l1 - 0.25 * (l0 - l2) * off);
    }
    if (xs.size() < 3) throw NotApplicableError("decay fit: fewer than three envelope peaks in the tail");
  } else {
    for (const std::size_t k : tail) {
      xs.push_back(series.time(k));
      ys.push_back(std::log(mag[k]));
    }
  }
  const auto line = least_squares(xs, ys);
  fit.rate = -line.slope;
  fit.fit_quality = line.r2;
  fit.points = xs.size();
  return fit;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("power-law fit: need >= 2 paired points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("power-law fit: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const auto line = least_squares(lx, ly);
  return PowerLawFit{line.slope, std::exp(line.intercept), line.r2};
}

GapScanResult gap_scaling_scan(std::span<const int> sizes,
                               const std::function<LindbladSpec(int)>& family,
                               const std::function<SectorPair(int)>& sector_rule, int threads) {
  if (sizes.size() < 4) throw DomainError("gap scan: need at least 4 system sizes");
  std::vector<std::optional<GapScanRow>> rows(sizes.size());
  std::vector<std::string> errors(sizes.size());

  auto work = [&](std::size_t i) {
    try {
      const int n = sizes[i];
      const SectorPair sp = sector_rule(n);
      const auto res = block_spectrum(family(n), sp.row, sp.col);
      rows[i] = GapScanRow{n, sp, res.gap, res.gap_imag, res.gap_excluding_zero};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, static_cast<int>(sizes.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < sizes.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < sizes.size(); i += workers) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  GapScanResult out;
  std::vector<double> ns, gaps;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (rows[i]) {
      out.rows.push_back(*rows[i]);
      if (rows[i]->gap > 0.0) {
        ns.push_back(rows[i]->n);
        gaps.push_back(rows[i]->gap);
      }
    } else {
      out.failures.emplace_back(sizes[i], errors[i]);
    }
  }
  if (ns.size() >= 2) {
    out.fit = fit_power_law(ns, gaps);
  } else {
    out.fit.exponent = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace pibreak
