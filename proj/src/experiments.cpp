#include "pibreak/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "pibreak/oracle.hpp"

namespace pibreak {

namespace {

using cd = std::complex<double>;

Cell sq(SpinQuantum s) { return s.str(); }

std::vector<double> uniform_grid(double t_final, std::size_t samples) {
  std::vector<double> t(samples);
  for (std::size_t k = 0; k < samples; ++k) t[k] = t_final * static_cast<double>(k) / static_cast<double>(samples - 1);
  return t;
}

void require_pair(const EnsembleSpec& e, const std::string& who) {
  if (e.size() != 2) throw UnsupportedError(who + ": exact block dynamics need exactly two subensembles");
}

std::vector<std::string> mode_names(Eigen::Index columns) {
  std::vector<std::string> names{"O_S"};
  for (Eigen::Index k = 1; k < columns; ++k) names.push_back(columns == 2 ? "O_A" : "O_" + std::to_string(k));
  return names;
}

const char* axis_suffix(Axis a) { return a == Axis::x ? "_x" : a == Axis::y ? "_y" : "_z"; }

}  // namespace

EnsembleSpec with_phi_a(const EnsembleSpec& e, double phi_a) {
  require_pair(e, "phi_a");
  EnsembleSpec out = e;
  out.subensembles[1].params.phi = out.subensembles[0].params.phi + phi_a;
  return out;
}

ExperimentOutput run_decompose(const RunConfig& cfg) {
  require_pair(cfg.ensemble, "decompose");
  const auto j1 = SpinQuantum::from_spin_count(cfg.ensemble.subensembles[0].n_spins);
  const auto j2 = SpinQuantum::from_spin_count(cfg.ensemble.subensembles[1].n_spins);
  const auto map = couple_basis(j1, j2);

  Table pd{{"phi_a", "S", "p_d"}, {}};
  Table poff{{"phi_a", "S", "S_prime", "p_off"}, {}};
  Table summary{{"phi_a", "mean_S", "nn_weight", "norm_S", "g_cr"}, {}};
  for (const double phi_a : cfg.decompose.phi_a.values()) {
    const auto spec = with_phi_a(cfg.ensemble, phi_a);
    const auto rho = initial_block_state(spec, map);
    const auto d = diag_distribution(rho);
    const auto o = offdiag_distribution(rho);
    for (const auto& w : d) pd.add_row({phi_a, sq(w.s), w.p_d});
    for (const auto& w : o) poff.add_row({phi_a, sq(w.s), sq(w.s_prime), w.p_off});
    const double norm_s = mf_initial_vectors(spec).spins.rowwise().sum().norm();
    double gcr = std::nan("");
    if (cfg.model == ModelKind::dicke && norm_s > 0.0) {
      gcr = dicke_gcr(cfg.dicke_at(spec.total_spins()), norm_s);
    }
    summary.add_row({phi_a, mean_total_spin(d), nearest_neighbor_weight(o), norm_s, gcr});
  }

  Table overlap{{"S", "S_tilde", "weight"}, {}};
  for (const auto& e : offdiag_overlap_profile(antisymmetric_observable(Axis::x, map), map)) {
    overlap.add_row({sq(e.s), sq(e.s_tilde), e.weight});
  }
  return {{{"p_d", pd}, {"p_off", poff}, {"decompose_summary", summary}, {"overlap_O_A_x", overlap}}, true};
}

ExperimentOutput run_evolve_exact(const RunConfig& cfg) {
  require_pair(cfg.ensemble, "evolve-exact");
  const auto j1 = SpinQuantum::from_spin_count(cfg.ensemble.subensembles[0].n_spins);
  const auto j2 = SpinQuantum::from_spin_count(cfg.ensemble.subensembles[1].n_spins);
  const auto map = couple_basis(j1, j2);
  const auto rho0 = initial_block_state(cfg.ensemble, map);
  const auto grid = uniform_grid(cfg.evolve.t_final, cfg.evolve.samples);
  const auto traj = evolve_blocks(cfg.lindblad_spec(), rho0, grid, cfg.evolve.options);

  std::vector<BlockOperator> ops;
  for (const Axis a : {Axis::x, Axis::y, Axis::z}) ops.push_back(symmetric_observable(a, map));
  for (const Axis a : {Axis::x, Axis::y, Axis::z}) ops.push_back(antisymmetric_observable(a, map));
  const BlockOperator oax = ops[3];

  Table sectors{{"t", "S", "p_d"}, {}};
  Table obs{{"t", "trace", "O_S_x", "O_S_y", "O_S_z", "O_A_x", "O_A_y", "O_A_z"}, {}};
  Table coh{{"t", "S", "S_prime", "re", "im"}, {}};
  std::vector<std::pair<SectorPair, std::vector<double>>> nn_series;
  for (const auto& s : map.sectors) {
    if (s.twice() < 2) continue;
    const SpinQuantum below = SpinQuantum::from_twice(s.twice() - 2);
    if (map.has_sector(below)) nn_series.push_back({SectorPair{s, below}, {}});
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& rho = traj.states[k];
    for (const auto& w : diag_distribution(rho)) sectors.add_row({grid[k], sq(w.s), w.p_d});
    std::vector<Cell> row{grid[k], rho.trace().real()};
    for (const auto& op : ops) row.emplace_back(expectation(op, rho).real());
    obs.add_row(std::move(row));
    for (auto& [key, series] : nn_series) {
      const cd v = block_expectation(oax, rho, key);
      coh.add_row({grid[k], sq(key.row), sq(key.col), v.real(), v.imag()});
      series.push_back(v.real());
    }
  }

  Table decay{{"S", "S_prime", "rate", "fit_quality", "points", "envelope"}, {}};
  const double dt = grid[1] - grid[0];
  for (const auto& [key, series] : nn_series) {
    try {
      const auto fit = asymptotic_decay_rate(TimeSeries{dt, series, "O_A_x", 0.0});
      decay.add_row({sq(key.row), sq(key.col), fit.rate, fit.fit_quality, static_cast<long long>(fit.points),
                     static_cast<long long>(fit.envelope)});
    } catch (const NotApplicableError&) {
      decay.add_row({sq(key.row), sq(key.col), std::nan(""), std::nan(""), 0LL, 0LL});
    }
  }
  return {{{"sectors", sectors}, {"observables", obs}, {"coherences", coh}, {"decay", decay}}, true};
}

ExperimentOutput run_gap_scan(const RunConfig& cfg, int threads) {
  const auto rule = cfg.gap_scan.sector;
  const auto result = gap_scaling_scan(
      cfg.gap_scan.sizes, [&cfg](int n) { return cfg.lindblad_spec(n); },
      [rule](int n) {
        const auto top = SpinQuantum::from_spin_count(n);
        return rule == SectorRule::top_diag ? SectorPair{top, top}
                                            : SectorPair{top, SpinQuantum::from_twice(n - 2)};
      },
      threads);

  Table rows{{"N", "S", "S_prime", "gap", "gap_excluding_zero", "gap_imag_max", "gap_modes"}, {}};
  Table modes{{"N", "im"}, {}};
  for (const auto& r : result.rows) {
    double im_max = 0.0;
    for (const double im : r.gap_imag) {
      im_max = std::max(im_max, std::abs(im));
      modes.add_row({static_cast<long long>(r.n), im});
    }
    rows.add_row({static_cast<long long>(r.n), sq(r.sectors.row), sq(r.sectors.col), r.gap, r.gap_excluding_zero,
                  im_max, static_cast<long long>(r.gap_imag.size())});
  }
  Table fit{{"exponent", "prefactor", "r2", "failures"}, {}};
  std::string failures;
  for (const auto& [n, what] : result.failures) failures += (failures.empty() ? "" : "; ") + std::to_string(n) + ": " + what;
  fit.add_row({result.fit.exponent, result.fit.prefactor, result.fit.r2, failures});
  ExperimentOutput out{{{"gap_scan", rows}, {"gap_modes", modes}, {"gap_fit", fit}}, result.failures.empty()};
  return out;
}

VectorTrajectory mf_trajectory(const RunConfig& cfg) {
  cfg.ensemble.validate();
  const MFState spins = mf_initial_vectors(cfg.ensemble);
  const int n = cfg.ensemble.total_spins();
  const auto& mf = cfg.meanfield;
  if (cfg.model == ModelKind::dicke) {
    const auto c = dicke_couplings(cfg.dicke_at(n), mf.jy);
    const auto init = to_columns(project_modes(spins));
    return integrate_vectors([c](const Eigen::Matrix3Xd& y) { return to_columns(dicke_mf_rhs(from_columns(y), c)); },
                             init, mf.t_final, mf.samples, mf.controls);
  }
  if (cfg.model == ModelKind::btc) {
    const auto c = btc_couplings(cfg.btc_at(n));
    const auto form = mf.mode_form;
    const auto init = to_columns(project_modes(normalized(spins, n)));
    return integrate_vectors(
        [c, form](const Eigen::Matrix3Xd& y) { return to_columns(btc_mf_rhs(from_columns(y), c, form)); }, init,
        mf.t_final, mf.samples, mf.controls);
  }
  throw UnsupportedError("meanfield: only the dicke and btc models have mean-field equations");
}

ExperimentOutput run_meanfield(const RunConfig& cfg) {
  const auto traj = mf_trajectory(cfg);
  const Eigen::Index cols = traj.states.front().cols();
  const auto names = mode_names(cols);

  Table trj{{"t"}, {}};
  for (const auto& nm : names) {
    for (const Axis a : {Axis::x, Axis::y, Axis::z}) trj.columns.push_back(nm + axis_suffix(a));
  }
  for (const auto& nm : names) trj.columns.push_back("N" + nm.substr(1));
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<Cell> row{traj.times[k]};
    const auto& s = traj.states[k];
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (int a = 0; a < 3; ++a) row.emplace_back(s(a, c));
    }
    for (Eigen::Index c = 0; c < cols; ++c) row.emplace_back(s.col(c).squaredNorm());
    trj.add_row(std::move(row));
  }

  PhaseOptions po;
  po.trim_fraction = cfg.meanfield.trim_fraction;
  po.window = cfg.meanfield.window;
  Table cls{{"observable", "classification", "dominant_frequency", "peaks"}, {}};
  for (const auto& oc : classify_phase(traj, po)) {
    cls.add_row({names[static_cast<std::size_t>(oc.column)] + axis_suffix(oc.axis), std::string(to_string(oc.classification)),
                 oc.dominant_frequency, static_cast<long long>(oc.peak_count)});
  }

  Table spec{{"observable", "frequency", "power"}, {}};
  SpectrumOptions so;
  so.window = cfg.meanfield.window;
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (const Axis a : {Axis::x, Axis::y, Axis::z}) {
      const auto rep = spectrum(trim_transient(traj.series(c, a), cfg.meanfield.trim_fraction), so);
      const std::string label = names[static_cast<std::size_t>(c)] + axis_suffix(a);
      for (std::size_t k = 0; k < rep.frequencies.size(); ++k) spec.add_row({label, rep.frequencies[k], rep.power[k]});
    }
  }

  Table summary{{"quantity", "value"}, {}};
  const Eigen::Vector3d final_sym = traj.states.back().col(0);
  summary.add_row({std::string("norm_S"), traj.states.front().col(0).norm()});
  if (cfg.model == ModelKind::dicke) {
    const int n = cfg.ensemble.total_spins();
    const auto p = cfg.dicke_at(n);
    const auto c = dicke_couplings(p, cfg.meanfield.jy);
    summary.add_row({std::string("g"), p.g});
    summary.add_row({std::string("j_x"), c.j_x});
    summary.add_row({std::string("j_y"), c.j_y});
    summary.add_row({std::string("g_cr"), dicke_gcr(p, traj.states.front().col(0).norm())});
    const double w = dressed_frequency(final_sym, c);
    summary.add_row({std::string("dressed_angular_frequency"), w});
    summary.add_row({std::string("dressed_frequency"), w / (2.0 * std::numbers::pi)});
  }
  return {{{"trajectory", trj}, {"classification", cls}, {"spectra", spec}, {"meanfield_summary", summary}}, true};
}

namespace {

RunConfig apply_sweep(RunConfig cfg, const std::string& name, double v) {
  if (name == "g") {
    cfg.dicke.g = v;
    cfg.g_over_gcr.reset();
  } else if (name == "g_over_gcr") {
    cfg.g_over_gcr = v;
  } else if (name == "omega_z") {
    cfg.dicke.omega_z = v;
  } else if (name == "omega_x") {
    cfg.btc.omega_x = v;
  } else if (name == "j_xx") {
    cfg.btc.j_xx = v;
  } else if (name == "kappa") {
    cfg.dicke.kappa = v;
    cfg.btc.kappa = v;
  } else if (name == "phi_a") {
    cfg.ensemble = with_phi_a(cfg.ensemble, v);
  } else {
    throw DomainError("unknown sweep parameter '" + name + "'");
  }
  return cfg;
}

}  // namespace

ExperimentOutput run_phase_diagram(const RunConfig& cfg, int threads) {
  const auto& axes = cfg.phase_diagram.axes;
  if (axes.empty()) throw DomainError("phase-diagram: no sweep axes configured");
  std::vector<std::vector<double>> points;
  for (const double a : axes[0].range.values()) {
    if (axes.size() == 1) {
      points.push_back({a});
    } else {
      for (const double b : axes[1].range.values()) points.push_back({a, b});
    }
  }

  std::vector<std::vector<ObservableClass>> results(points.size());
  std::vector<std::string> errors(points.size());
  PhaseOptions po;
  po.trim_fraction = cfg.meanfield.trim_fraction;
  po.window = cfg.meanfield.window;
  auto work = [&](std::size_t i) {
    try {
      RunConfig c = cfg;
      for (std::size_t k = 0; k < axes.size(); ++k) c = apply_sweep(std::move(c), axes[k].name, points[i][k]);
      results[i] = classify_phase(mf_trajectory(c), po);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  const auto workers = static_cast<std::size_t>(std::clamp<long long>(threads, 1, static_cast<long long>(points.size())));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < points.size(); i += workers) work(i);
    });
  }
  for (std::size_t i = 0; i < points.size(); i += workers) work(i);
  for (auto& t : pool) t.join();

  Table t{{}, {}};
  for (const auto& ax : axes) t.columns.push_back(ax.name);
  for (const char* c : {"observable", "classification", "dominant_frequency", "error"}) t.columns.push_back(c);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i].empty()) {
      std::vector<Cell> row(points[i].begin(), points[i].end());
      row.insert(row.end(), {std::string(), std::string("unclassified"), std::nan(""), errors[i]});
      t.add_row(std::move(row));
      continue;
    }
    const auto names = mode_names(static_cast<Eigen::Index>(results[i].size() / 3));
    for (const auto& oc : results[i]) {
      std::vector<Cell> row(points[i].begin(), points[i].end());
      row.insert(row.end(), {names[static_cast<std::size_t>(oc.column)] + axis_suffix(oc.axis),
                             std::string(to_string(oc.classification)), oc.dominant_frequency, std::string()});
      t.add_row(std::move(row));
    }
  }
  const bool ok = std::all_of(errors.begin(), errors.end(), [](const std::string& e) { return e.empty(); });
  return {{{"phase_diagram", t}}, ok};
}

ExperimentOutput run_spectrum(const RunConfig& cfg) {
  if (cfg.spectrum.input.empty()) throw DomainError("spectrum: 'spectrum.input' is required");
  if (cfg.spectrum.value_column.empty()) throw DomainError("spectrum: 'spectrum.value_column' is required");
  const Table in = read_csv(cfg.spectrum.input);
  TimeSeries ts;
  ts.label = cfg.spectrum.value_column;
  const std::size_t n = in.rows.size();
  if (n < 2) throw DomainError("spectrum: input has fewer than two samples");
  for (std::size_t k = 0; k < n; ++k) ts.values.push_back(in.number(k, cfg.spectrum.value_column));
  const double t0 = in.number(0, cfg.spectrum.time_column);
  const double t1 = in.number(n - 1, cfg.spectrum.time_column);
  ts.dt = (t1 - t0) / static_cast<double>(n - 1);
  ts.t0 = t0;
  for (std::size_t k = 1; k < n; ++k) {
    const double step = in.number(k, cfg.spectrum.time_column) - in.number(k - 1, cfg.spectrum.time_column);
    if (std::abs(step - ts.dt) > 1e-6 * ts.dt) throw DomainError("spectrum: time column is not uniformly sampled");
  }
  SpectrumOptions so;
  so.window = cfg.spectrum.window;
  const auto rep = spectrum(trim_transient(ts, cfg.spectrum.trim_fraction), so);
  Table power{{"frequency", "power"}, {}};
  for (std::size_t k = 0; k < rep.frequencies.size(); ++k) power.add_row({rep.frequencies[k], rep.power[k]});
  Table peaks{{"frequency", "power", "width"}, {}};
  for (const auto& p : rep.peaks) peaks.add_row({p.frequency, p.power, p.width});
  Table summary{{"classification", "dominant_frequency", "bin_width", "energy"}, {}};
  summary.add_row({std::string(to_string(rep.classification)), rep.dominant_frequency(), rep.bin_width, rep.energy});
  return {{{"spectrum", power}, {"peaks", peaks}, {"spectrum_summary", summary}}, true};
}

ExperimentOutput run_validate(const RunConfig& cfg) {
  require_pair(cfg.ensemble, "validate");
  const int n1 = cfg.ensemble.subensembles[0].n_spins;
  const int n2 = cfg.ensemble.subensembles[1].n_spins;
  if (n1 + n2 > kOracleMaxDenseEvolution) {
    throw UnsupportedError("validate: the oracle handles at most " + std::to_string(kOracleMaxDenseEvolution) +
                           " spins");
  }
  const auto map = couple_basis(SpinQuantum::from_spin_count(n1), SpinQuantum::from_spin_count(n2));
  const auto grid = uniform_grid(cfg.validate.t_final, cfg.validate.samples);
  const double tol = cfg.validate.tolerance;
  Table checks{{"check", "value", "tolerance", "pass"}, {}};
  bool ok = true;
  auto record = [&](const std::string& name, double value, double limit, bool gating = true) {
    const bool pass = value <= limit;
    if (gating) ok = ok && pass;
    checks.add_row({name, value, limit, std::string(pass ? "yes" : "no")});
  };

  auto compare = [&](const LindbladSpec& spec, const std::string& tag, bool gating) {
    const auto rho0 = initial_block_state(cfg.ensemble, map);
    const auto engine = evolve_blocks(spec, rho0, grid, cfg.evolve.options);
    const auto full = full_lindblad_evolve(spec, product_coherent_state(cfg.ensemble), grid);
    double dist = 0.0, trace = 0.0, leak = 0.0, pd_drift = 0.0;
    const auto pd0 = diag_distribution(rho0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto proj = project_full_to_blocks(full.states[k], n1, n2, 1.0);
      leak = std::max(leak, proj.leakage);
      dist = std::max(dist, trace_distance(engine.states[k], proj.blocks, map));
      trace = std::max(trace, std::abs(engine.states[k].trace() - 1.0));
      const auto pd = diag_distribution(engine.states[k]);
      for (std::size_t i = 0; i < pd.size(); ++i) pd_drift = std::max(pd_drift, std::abs(pd[i].p_d - pd0[i].p_d));
    }
    record(tag + ":trace_distance_vs_oracle", dist, tol, gating);
    record(tag + ":oracle_leakage", leak, 1e-10, gating);
    record(tag + ":trace_drift", trace, 1e-8, gating);
    record(tag + ":p_d_drift", pd_drift, 1e-8, gating);
  };

  const auto spec = cfg.lindblad_spec();
  compare(spec, "configured", true);
  if (cfg.model == ModelKind::btc) {
    // The other anticommutator ordering is reported without gating.
    const auto other = cfg.btc_order == AnticommutatorOrder::lindblad ? AnticommutatorOrder::reversed
                                                                       : AnticommutatorOrder::lindblad;
    compare(btc_spec(cfg.btc_at(n1 + n2), other),
            other == AnticommutatorOrder::lindblad ? "btc_lindblad_order" : "btc_printed_order", false);
  }
  return {{{"validation", checks}}, ok};
}

ExperimentOutput run_experiment(const std::string& name, const RunConfig& cfg, int threads) {
  if (name == "decompose") return run_decompose(cfg);
  if (name == "evolve-exact") return run_evolve_exact(cfg);
  if (name == "gap-scan") return run_gap_scan(cfg, threads);
  if (name == "meanfield") return run_meanfield(cfg);
  if (name == "phase-diagram") return run_phase_diagram(cfg, threads);
  if (name == "spectrum") return run_spectrum(cfg);
  if (name == "validate") return run_validate(cfg);
  throw DomainError("unknown experiment '" + name + "'");
}

}  // namespace pibreak
