#include "pibreak/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace pibreak {

ConfigError::ConfigError(const std::string& origin, int line, const std::string& what)
    : DomainError(origin + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}

std::vector<double> Range::values() const {
  if (count < 1) throw DomainError("range: count must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    v[static_cast<std::size_t>(i)] = count == 1 ? start : start + (stop - start) * i / (count - 1);
  }
  return v;
}

double parse_angle(const std::string& raw) {
  std::string s;
  for (const char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  auto number = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw DomainError("cannot parse angle '" + raw + "'");
    }
    if (used != t.size()) throw DomainError("cannot parse angle '" + raw + "'");
    return v;
  };
  const auto pi_at = s.find("pi");
  if (pi_at == std::string::npos) return number(s);
  std::string coef = s.substr(0, pi_at);
  std::string rest = s.substr(pi_at + 2);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double c = 1.0;
  if (coef == "-") c = -1.0;
  else if (coef == "+" || coef.empty()) c = 1.0;
  else c = number(coef);
  double d = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw DomainError("cannot parse angle '" + raw + "'");
    d = number(rest.substr(1));
    if (d == 0.0) throw DomainError("angle '" + raw + "' divides by zero");
  }
  return c * std::numbers::pi / d;
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

/// Mapping node with tracked key usage; unknown keys are rejected by
/// `finish`.
class Section {
 public:
  Section(const YAML::Node& node, std::string path, const std::string& origin)
      : node_(node ? node : YAML::Node(YAML::NodeType::Map)), present_(static_cast<bool>(node)),
        path_(std::move(path)), origin_(origin) {
    if (present_ && !node_.IsMap()) fail(node_, "'" + path_ + "' must be a mapping");
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& what) const {
    throw ConfigError(origin_, line_of(at ? at : node_), what);
  }

  static int line_of(const YAML::Node& n) {
    if (!n) return 0;
    const int line = n.Mark().line;
    return line >= 0 ? line + 1 : 0;
  }

  bool has(const std::string& key) {
    allowed_.insert(key);
    return static_cast<bool>(lookup(key));
  }

  YAML::Node get(const std::string& key) {
    allowed_.insert(key);
    return lookup(key);
  }

  template <typename T>
  T scalar(const std::string& key, T fallback) {
    const YAML::Node n = get(key);
    if (!n) return fallback;
    if (!n.IsScalar()) fail(n, "'" + path_ + "." + key + "' must be a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + path_ + "." + key + "' has an invalid value '" + n.Scalar() + "'");
    }
  }

  double number(const std::string& key, double fallback) { return scalar<double>(key, fallback); }

  double angle(const std::string& key, double fallback) {
    const YAML::Node n = get(key);
    if (!n) return fallback;
    if (!n.IsScalar()) fail(n, "'" + path_ + "." + key + "' must be an angle");
    try {
      return parse_angle(n.Scalar());
    } catch (const DomainError& e) {
      fail(n, "'" + path_ + "." + key + "': " + e.what());
    }
  }

  int integer(const std::string& key, int fallback) { return scalar<int>(key, fallback); }

  std::string text(const std::string& key, const std::string& fallback) {
    return scalar<std::string>(key, fallback);
  }

  template <typename E>
  E choice(const std::string& key, E fallback, const std::vector<std::pair<std::string, E>>& options) {
    const YAML::Node n = get(key);
    if (!n) return fallback;
    const std::string v = scalar<std::string>(key, "");
    for (const auto& [name, value] : options) {
      if (name == v) return value;
    }
    std::string list;
    for (const auto& [name, value] : options) list += (list.empty() ? "" : ", ") + name;
    fail(n, "'" + path_ + "." + key + "' must be one of {" + list + "}, got '" + v + "'");
  }

  Section child(const std::string& key) { return Section(get(key), path_ + "." + key, origin_); }

  void finish() const {
    if (!present_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed_.count(key)) fail(kv.first, "unknown key '" + key + "' in '" + path_ + "'");
    }
  }

  explicit operator bool() const { return present_; }
  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }

 private:
  YAML::Node lookup(const std::string& key) const {
    const YAML::Node& n = node_;
    return n[key];
  }

  YAML::Node node_;
  bool present_;
  std::string path_;
  const std::string& origin_;
  std::set<std::string> allowed_;
};

Range read_range(Section s) {
  Range r;
  r.start = s.angle("start", 0.0);
  r.stop = s.angle("stop", r.start);
  r.count = s.integer("count", 1);
  if (r.count < 1) s.fail(s.get("count"), "'" + s.path() + ".count' must be >= 1");
  s.finish();
  return r;
}

std::complex<double> read_complex(const YAML::Node& n, Section& owner, const std::string& what) {
  try {
    if (n.IsScalar()) return n.as<double>();
    if (n.IsSequence() && n.size() == 2) return {n[0].as<double>(), n[1].as<double>()};
  } catch (const YAML::Exception&) {
  }
  owner.fail(n, what + " must be a number or a [re, im] pair");
}

Component read_component(const YAML::Node& n, Section& owner) {
  try {
    return parse_component(n.as<std::string>());
  } catch (const std::exception&) {
    owner.fail(n, "unknown operator '" + (n.IsScalar() ? n.Scalar() : std::string("?")) +
                      "' (expected x, y, z, plus, minus)");
  }
}

LindbladSpec read_custom(Section s, const std::string& origin) {
  LindbladSpec spec;
  spec.n_total = s.integer("n_total", 0);
  spec.anticommutator = s.choice<AnticommutatorOrder>(
      "anticommutator", AnticommutatorOrder::lindblad,
      {{"lindblad", AnticommutatorOrder::lindblad}, {"reversed", AnticommutatorOrder::reversed}});
  const YAML::Node h = s.get("hamiltonian");
  if (h) {
    if (!h.IsSequence()) s.fail(h, "'custom.hamiltonian' must be a list");
    for (const auto& item : h) {
      Section t(item, "custom.hamiltonian[]", origin);
      HamiltonianTerm term;
      const YAML::Node f = t.get("factors");
      if (!f || !f.IsSequence() || f.size() == 0) t.fail(item, "hamiltonian term needs a non-empty 'factors' list");
      for (const auto& c : f) term.factors.push_back(read_component(c, t));
      const YAML::Node c = t.get("coefficient");
      if (!c) t.fail(item, "hamiltonian term needs a 'coefficient'");
      term.coefficient = read_complex(c, t, "coefficient");
      term.n_power_scaling = t.scalar<bool>("n_power_scaling", false);
      t.finish();
      spec.hamiltonian.push_back(std::move(term));
    }
  }
  const YAML::Node j = s.get("jumps");
  if (j) {
    if (!j.IsSequence()) s.fail(j, "'custom.jumps' must be a list");
    for (const auto& item : j) {
      if (!item.IsSequence()) s.fail(item, "each jump must be a list of {op, coefficient}");
      JumpOperator jump;
      for (const auto& termnode : item) {
        Section t(termnode, "custom.jumps[][]", origin);
        const YAML::Node op = t.get("op");
        if (!op) t.fail(termnode, "jump term needs 'op'");
        const Component c = read_component(op, t);
        const YAML::Node co = t.get("coefficient");
        const std::complex<double> v = co ? read_complex(co, t, "coefficient") : 1.0;
        t.finish();
        jump.terms.emplace_back(c, v);
      }
      spec.jumps.push_back(std::move(jump));
    }
  }
  const auto k = static_cast<Eigen::Index>(spec.jumps.size());
  spec.rates = Eigen::MatrixXcd::Zero(k, k);
  const YAML::Node r = s.get("rates");
  if (r) {
    if (!r.IsSequence() || static_cast<Eigen::Index>(r.size()) != k) {
      s.fail(r, "'custom.rates' must be a " + std::to_string(k) + "x" + std::to_string(k) + " matrix");
    }
    for (Eigen::Index a = 0; a < k; ++a) {
      const YAML::Node row = r[static_cast<std::size_t>(a)];
      if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != k) s.fail(row, "rate matrix row has wrong length");
      for (Eigen::Index b = 0; b < k; ++b) spec.rates(a, b) = read_complex(row[static_cast<std::size_t>(b)], s, "rate");
    }
  } else if (k > 0) {
    s.fail(s.node(), "'custom.rates' is required when jumps are given");
  }
  s.finish();
  return spec;
}

}  // namespace

DickeParams RunConfig::dicke_at(int n) const {
  DickeParams p = dicke;
  p.n_total = n;
  if (g_over_gcr) p.g = *g_over_gcr * dicke_gcr(p);
  return p;
}

BTCParams RunConfig::btc_at(int n) const {
  BTCParams p = btc;
  p.n_total = n;
  return p;
}

LindbladSpec RunConfig::lindblad_spec(int n) const {
  switch (model) {
    case ModelKind::dicke: return dicke_effective_spec(dicke_at(n));
    case ModelKind::btc: return btc_spec(btc_at(n), btc_order);
    case ModelKind::custom: {
      LindbladSpec s = custom;
      if (s.n_total <= 0) s.n_total = n;
      return s;
    }
  }
  return custom;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin, e.mark.line + 1, e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(origin, 0, "empty configuration");
  Section top(root, "config", origin);
  RunConfig cfg;
  cfg.source_text = text;

  if (top.has("experiment")) {
    cfg.experiment = top.text("experiment", "");
    if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end()) {
      top.fail(top.get("experiment"), "unknown experiment '" + cfg.experiment + "'");
    }
  }
  cfg.model = top.choice<ModelKind>("model", ModelKind::dicke,
                                    {{"dicke", ModelKind::dicke}, {"btc", ModelKind::btc}, {"custom", ModelKind::custom}});

  // Ensemble first: model defaults depend on its size.
  {
    Section e = top.child("ensemble");
    const YAML::Node subs = e.get("subensembles");
    if (subs) {
      if (!subs.IsSequence() || subs.size() == 0) e.fail(subs, "'ensemble.subensembles' must be a non-empty list");
      for (const auto& item : subs) {
        Section s(item, "ensemble.subensembles[]", origin);
        Subensemble sub;
        sub.n_spins = s.integer("n", 0);
        if (sub.n_spins < 1) s.fail(item, "subensemble needs 'n' >= 1");
        sub.params.theta = s.angle("theta", 0.0);
        sub.params.phi = s.angle("phi", 0.0);
        if (sub.params.theta < 0.0 || sub.params.theta > std::numbers::pi + 1e-12) {
          s.fail(s.get("theta"), "theta must lie in [0, pi]");
        }
        s.finish();
        cfg.ensemble.subensembles.push_back(sub);
      }
    } else {
      cfg.ensemble.subensembles = {{8, {std::numbers::pi / 2, 0.0}}, {8, {std::numbers::pi / 2, 0.0}}};
    }
    e.finish();
  }
  const int n_default = cfg.ensemble.total_spins();

  {
    Section d = top.child("dicke");
    cfg.dicke.omega_z = d.number("omega_z", 0.1);
    cfg.dicke.omega_0 = d.number("omega_0", 1.0);
    cfg.dicke.kappa = d.number("kappa", 1.0);
    cfg.dicke.n_total = d.integer("n_total", n_default);
    if (d.has("g") && d.has("g_over_gcr")) d.fail(d.get("g_over_gcr"), "give either 'g' or 'g_over_gcr', not both");
    cfg.dicke.g = d.number("g", 0.0);
    if (d.has("g_over_gcr")) cfg.g_over_gcr = d.number("g_over_gcr", 1.0);
    cfg.meanfield.jy = d.choice<JyConvention>(
        "jy_convention", JyConvention::product,
        {{"product", JyConvention::product}, {"difference", JyConvention::difference}, {"sum", JyConvention::sum}});
    d.finish();
    if (cfg.model == ModelKind::dicke) {
      try {
        cfg.dicke.validate();
      } catch (const DomainError& ex) {
        d.fail(d.node(), ex.what());
      }
    }
  }
  {
    Section b = top.child("btc");
    cfg.btc.omega_x = b.number("omega_x", 1.5);
    cfg.btc.kappa = b.number("kappa", 1.0);
    cfg.btc.j_xx = b.number("j_xx", 0.0);
    cfg.btc.n_total = b.integer("n_total", n_default);
    cfg.btc_order = b.choice<AnticommutatorOrder>(
        "anticommutator", AnticommutatorOrder::lindblad,
        {{"lindblad", AnticommutatorOrder::lindblad}, {"printed", AnticommutatorOrder::reversed}});
    cfg.meanfield.mode_form = b.choice<BtcModeForm>("mode_equation", BtcModeForm::torque,
                                                    {{"torque", BtcModeForm::torque}, {"printed", BtcModeForm::printed}});
    b.finish();
    if (cfg.model == ModelKind::btc) {
      try {
        cfg.btc.validate();
      } catch (const DomainError& ex) {
        b.fail(b.node(), ex.what());
      }
    }
  }
  {
    Section c = top.child("custom");
    if (c) {
      cfg.custom = read_custom(c, origin);
    } else if (cfg.model == ModelKind::custom) {
      top.fail(root, "model 'custom' needs a 'custom' section");
    }
    if (cfg.model == ModelKind::custom) {
      try {
        LindbladSpec s = cfg.custom;
        if (s.n_total <= 0) s.n_total = n_default;
        s.validate();
      } catch (const DomainError& ex) {
        c.fail(c.node(), ex.what());
      }
    }
  }
  {
    Section e = top.child("evolve");
    cfg.evolve.t_final = e.number("t_final", cfg.evolve.t_final);
    cfg.evolve.samples = static_cast<std::size_t>(e.integer("samples", static_cast<int>(cfg.evolve.samples)));
    cfg.evolve.options.method = e.choice<EvolutionMethod>(
        "method", EvolutionMethod::automatic,
        {{"auto", EvolutionMethod::automatic}, {"propagator", EvolutionMethod::propagator}, {"ode", EvolutionMethod::ode}});
    cfg.evolve.options.max_dense_dim = e.integer("max_dense_dim", 4096);
    cfg.evolve.options.rel_tol = e.number("rel_tol", 1e-8);
    cfg.evolve.options.abs_tol = e.number("abs_tol", 1e-10);
    if (!(cfg.evolve.t_final > 0.0)) e.fail(e.get("t_final"), "'evolve.t_final' must be positive");
    if (cfg.evolve.samples < 2) e.fail(e.get("samples"), "'evolve.samples' must be >= 2");
    e.finish();
  }
  {
    Section m = top.child("meanfield");
    cfg.meanfield.t_final = m.number("t_final", cfg.meanfield.t_final);
    cfg.meanfield.samples = static_cast<std::size_t>(m.integer("samples", static_cast<int>(cfg.meanfield.samples)));
    cfg.meanfield.controls.rel_tol = m.number("rel_tol", 1e-10);
    cfg.meanfield.controls.abs_tol = m.number("abs_tol", 1e-12);
    cfg.meanfield.trim_fraction = m.number("trim_fraction", 0.5);
    cfg.meanfield.window = m.choice<Window>("window", Window::hann, {{"hann", Window::hann}, {"rect", Window::rect}});
    if (!(cfg.meanfield.t_final > 0.0)) m.fail(m.get("t_final"), "'meanfield.t_final' must be positive");
    if (cfg.meanfield.samples < 2) m.fail(m.get("samples"), "'meanfield.samples' must be >= 2");
    if (!(cfg.meanfield.trim_fraction >= 0.0 && cfg.meanfield.trim_fraction < 1.0)) {
      m.fail(m.get("trim_fraction"), "'meanfield.trim_fraction' must lie in [0, 1)");
    }
    m.finish();
  }
  {
    Section d = top.child("decompose");
    if (d.has("phi_a")) cfg.decompose.phi_a = read_range(d.child("phi_a"));
    d.finish();
  }
  {
    Section g = top.child("gap_scan");
    const YAML::Node sizes = g.get("sizes");
    if (sizes) {
      if (!sizes.IsSequence()) g.fail(sizes, "'gap_scan.sizes' must be a list of integers");
      cfg.gap_scan.sizes.clear();
      for (const auto& s : sizes) {
        try {
          cfg.gap_scan.sizes.push_back(s.as<int>());
        } catch (const YAML::Exception&) {
          g.fail(s, "'gap_scan.sizes' entries must be integers");
        }
        if (cfg.gap_scan.sizes.back() < 2 || cfg.gap_scan.sizes.back() % 2 != 0) {
          g.fail(s, "'gap_scan.sizes' entries must be even and >= 2");
        }
      }
    }
    cfg.gap_scan.sector = g.choice<SectorRule>(
        "sector", SectorRule::nearest_offdiag,
        {{"nearest_offdiag", SectorRule::nearest_offdiag}, {"top_diag", SectorRule::top_diag}});
    g.finish();
  }
  {
    Section p = top.child("phase_diagram");
    const YAML::Node axes = p.get("axes");
    if (axes) {
      if (!axes.IsSequence() || axes.size() == 0 || axes.size() > 2) {
        p.fail(axes, "'phase_diagram.axes' must list one or two sweep axes");
      }
      for (const auto& a : axes) {
        Section s(a, "phase_diagram.axes[]", origin);
        SweepAxis ax;
        ax.name = s.text("name", "");
        static const std::vector<std::string> names{"g", "g_over_gcr", "omega_z", "omega_x", "j_xx", "phi_a", "kappa"};
        if (std::find(names.begin(), names.end(), ax.name) == names.end()) {
          s.fail(a, "unknown sweep parameter '" + ax.name + "'");
        }
        ax.range.start = s.angle("start", 0.0);
        ax.range.stop = s.angle("stop", ax.range.start);
        ax.range.count = s.integer("count", 1);
        if (ax.range.count < 1) s.fail(a, "sweep count must be >= 1");
        s.finish();
        cfg.phase_diagram.axes.push_back(ax);
      }
    }
    p.finish();
  }
  {
    Section s = top.child("spectrum");
    cfg.spectrum.input = s.text("input", "");
    cfg.spectrum.time_column = s.text("time_column", "t");
    cfg.spectrum.value_column = s.text("value_column", "");
    cfg.spectrum.trim_fraction = s.number("trim_fraction", 0.5);
    cfg.spectrum.window = s.choice<Window>("window", Window::hann, {{"hann", Window::hann}, {"rect", Window::rect}});
    s.finish();
  }
  {
    Section v = top.child("validate");
    cfg.validate.t_final = v.number("t_final", 10.0);
    cfg.validate.samples = static_cast<std::size_t>(v.integer("samples", 11));
    cfg.validate.tolerance = v.number("tolerance", 1e-6);
    if (cfg.validate.samples < 2) v.fail(v.get("samples"), "'validate.samples' must be >= 2");
    v.finish();
  }
  {
    Section o = top.child("output");
    cfg.output.directory = o.text("directory", "out");
    cfg.output.format = o.choice<TableFormat>("format", TableFormat::csv, {{"csv", TableFormat::csv}, {"json", TableFormat::json}});
    o.finish();
  }
  top.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot read configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace pibreak
