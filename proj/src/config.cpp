#include "qimp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qimp {

namespace {

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (...) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("config: key '" + key + "' has trailing characters in '" + v + "'");
  return x;
}

long parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (std::floor(x) != x)
    throw std::invalid_argument("config: key '" + key + "' expects an integer");
  return static_cast<long>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("config: key '" + key + "' expects 0/1, got '" + v + "'");
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "model") model_path = value;
  else if (key == "solver") {
    if (value == "quantum-sim") solver = SolverKind::QuantumSim;
    else if (value == "ed") solver = SolverKind::Ed;
    else throw std::invalid_argument("config: solver must be quantum-sim or ed");
  } else if (key == "estimator") {
    if (value == "exact") estimator_exact = true;
    else if (value == "shots") estimator_exact = false;
    else throw std::invalid_argument("config: estimator must be exact or shots");
  } else if (key == "n_meas") n_meas = static_cast<int>(parse_int(key, value));
  else if (key == "spin_degenerate") spin_degenerate = parse_bool(key, value);
  else if (key == "t_min") t_min = parse_double(key, value);
  else if (key == "t_max") t_max = parse_double(key, value);
  else if (key == "n_t") n_t = static_cast<int>(parse_int(key, value));
  else if (key == "beta") beta = parse_double(key, value);
  else if (key == "n_omega") n_omega = static_cast<int>(parse_int(key, value));
  else if (key == "eta") eta = parse_double(key, value);
  else if (key == "omega_min") omega_min = parse_double(key, value);
  else if (key == "omega_max") omega_max = parse_double(key, value);
  else if (key == "n_omega_real") n_omega_real = static_cast<int>(parse_int(key, value));
  else if (key == "trotter_order") trotter_order = static_cast<int>(parse_int(key, value));
  else if (key == "trotter_step") trotter_step = parse_double(key, value);
  else if (key == "prep_start") {
    if (value == "free") prep_start = PrepStart::FreeFermion;
    else if (value == "atomic") prep_start = PrepStart::AtomicLimit;
    else throw std::invalid_argument("config: prep_start must be free or atomic");
  } else if (key == "t_prep") t_prep = parse_double(key, value);
  else if (key == "prep_steps") prep_steps = static_cast<int>(parse_int(key, value));
  else if (key == "prep_step") prep_step = parse_double(key, value);
  else if (key == "qpe_bits") qpe_bits = static_cast<int>(parse_int(key, value));
  else if (key == "qpe_tau") qpe_tau = parse_double(key, value);
  else if (key == "qpe_rounds") qpe_rounds = static_cast<int>(parse_int(key, value));
  else if (key == "retry_budget") retry_budget = static_cast<int>(parse_int(key, value));
  else if (key == "calibration_preps") calibration_preps = static_cast<int>(parse_int(key, value));
  else if (key == "n_up") n_up = static_cast<int>(parse_int(key, value));
  else if (key == "n_down") n_down = static_cast<int>(parse_int(key, value));
  else if (key == "u") u = parse_double(key, value);
  else if (key == "mu") mu = parse_double(key, value);
  else if (key == "n_bath") n_bath = static_cast<int>(parse_int(key, value));
  else if (key == "dos") dos = value;
  else if (key == "dmft_tol") dmft_tol = parse_double(key, value);
  else if (key == "dmft_max_iter") dmft_max_iter = static_cast<int>(parse_int(key, value));
  else if (key == "dmft_mix") dmft_mix = parse_double(key, value);
  else if (key == "fit_starts") fit_starts = static_cast<int>(parse_int(key, value));
  else if (key == "fit_v_prune") fit_v_prune = parse_double(key, value);
  else if (key == "ph_symmetrize") ph_symmetrize = parse_bool(key, value);
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, value));
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("config: " + what);
  };
  require(n_meas >= 1, "n_meas must be >= 1");
  require(t_min > 0.0, "t_min must be > 0");
  require(t_max > t_min, "t_max must exceed t_min");
  require(n_t >= 2, "n_t must be >= 2");
  require(beta > 0.0, "beta must be > 0");
  require(n_omega >= 1, "n_omega must be >= 1");
  require(eta >= 0.0, "eta must be >= 0");
  require(omega_max > omega_min, "omega_max must exceed omega_min");
  require(n_omega_real >= 2, "n_omega_real must be >= 2");
  require(trotter_order == 1 || trotter_order == 2, "trotter_order must be 1 or 2");
  require(t_prep > 0.0, "t_prep must be > 0");
  require(prep_steps >= 1, "prep_steps must be >= 1");
  require(prep_step > 0.0, "prep_step must be > 0");
  require(qpe_bits >= 1, "qpe_bits must be >= 1");
  require(qpe_tau > 0.0, "qpe_tau must be > 0");
  require(qpe_rounds >= 1, "qpe_rounds must be >= 1");
  require(retry_budget >= 1, "retry_budget must be >= 1");
  require(calibration_preps >= 1, "calibration_preps must be >= 1");
  require(n_bath >= 0, "n_bath must be >= 0");
  require(n_bath % 2 == 0, "n_bath counts spin-orbitals and must be even");
  require(dos == "bethe" || !dos.empty(), "dos must be bethe or a table path");
  require(effective_tol() > 0.0, "dmft_tol must be > 0");
  require(dmft_max_iter >= 1, "dmft_max_iter must be >= 1");
  require(dmft_mix > 0.0 && dmft_mix <= 1.0, "dmft_mix must be in (0, 1]");
  require(fit_starts >= 1, "fit_starts must be >= 1");
  require(fit_v_prune >= 0.0, "fit_v_prune must be >= 0");
}

RunConfig config_from_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string value;
    std::string eq;
    // accept both `key = value` and `key value`
    if (key.find('=') != std::string::npos) {
      const auto p = key.find('=');
      value = key.substr(p + 1);
      key = key.substr(0, p);
      if (value.empty()) ls >> value;
    } else {
      ls >> value;
      if (value == "=") ls >> value;
      else if (!value.empty() && value[0] == '=') value = value.substr(1);
    }
    if (value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": missing value for '" + key + "'");
    cfg.set(key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return config_from_string(ss.str());
}

std::string config_to_string(const RunConfig& cfg) {
  std::ostringstream os;
  os << "model = " << cfg.model_path << "\n";
  os << "solver = " << (cfg.solver == SolverKind::Ed ? "ed" : "quantum-sim")
     << "\n";
  os << "estimator = " << (cfg.estimator_exact ? "exact" : "shots") << "\n";
  os << "n_meas = " << cfg.n_meas << "\n";
  os << "spin_degenerate = " << (cfg.spin_degenerate ? 1 : 0) << "\n";
  os << "t_min = " << cfg.t_min << "\nt_max = " << cfg.t_max
     << "\nn_t = " << cfg.n_t << "\n";
  os << "beta = " << cfg.beta << "\nn_omega = " << cfg.n_omega << "\n";
  os << "eta = " << cfg.eta << "\n";
  os << "u = " << cfg.u << "\nmu = " << cfg.effective_mu() << "\n";
  os << "n_bath = " << cfg.n_bath << "\n";
  os << "seed = " << cfg.seed << "\n";
  return os.str();
}

SweepConfig sweep_config(const RunConfig& cfg, const ImpurityModel& m) {
  SweepConfig sc;
  sc.grid = TimeGrid::logarithmic(cfg.t_min, cfg.t_max, cfg.n_t);
  sc.exact = cfg.estimator_exact;
  sc.n_meas = cfg.n_meas;
  sc.spin_degenerate = cfg.spin_degenerate;
  sc.trotter_order = cfg.trotter_order;
  sc.trotter_dt = trotter_step_for(cfg, m);
  sc.seed = cfg.seed;
  return sc;
}

PrepConfig prep_config(const RunConfig& cfg) {
  PrepConfig pc;
  pc.start = cfg.prep_start;
  pc.t_prep = cfg.t_prep;
  pc.ramp_steps = cfg.prep_steps;
  pc.order = cfg.trotter_order;
  pc.qpe.tau = cfg.qpe_tau;
  pc.qpe.bits = cfg.qpe_bits;
  pc.qpe.window_width = 0.0; // auto window around the start-state energy
  pc.qpe_rounds = cfg.qpe_rounds;
  pc.retry_budget = cfg.retry_budget;
  pc.calibration_preps = cfg.calibration_preps;
  pc.filling.n_up = cfg.n_up;
  pc.filling.n_down = cfg.n_down;
  pc.trotter_dt = cfg.prep_step;
  return pc;
}

double trotter_step_for(const RunConfig& cfg, const ImpurityModel& m) {
  if (cfg.trotter_step > 0.0) return cfg.trotter_step;
  const double cmax = coefficient_max(build_term_groups(m));
  return cmax > 0.0 ? 0.05 / cmax : 0.05;
}

DmftConfig dmft_config(const RunConfig& cfg) {
  DmftConfig dc;
  dc.u = cfg.u;
  dc.mu = cfg.effective_mu();
  if (cfg.n_bath % 2 != 0)
    throw std::invalid_argument("config: n_bath must be even");
  dc.n_bath_per_spin = cfg.n_bath / 2;
  if (cfg.dos == "bethe") {
    dc.dos.kind = DosSpec::Kind::Bethe;
  } else {
    dc.dos.kind = DosSpec::Kind::Tabulated;
    std::ifstream f(cfg.dos);
    if (!f)
      throw std::invalid_argument("config: cannot open dos table: " + cfg.dos);
    double e, d;
    while (f >> e >> d) dc.dos.table.push_back({e, d});
  }
  dc.grid = MatsubaraGrid::make(cfg.beta, cfg.n_omega);
  dc.tgrid = TimeGrid::logarithmic(cfg.t_min, cfg.t_max, cfg.n_t);
  dc.solver = cfg.solver;
  // the sweep grid is set per solve; the template model is built per
  // iteration, so the trotter step rule is evaluated there
  const ImpurityModel probe = make_single_impurity(
      cfg.u, cfg.effective_mu(), std::vector<double>(cfg.n_bath / 2, 1.0),
      std::vector<double>(cfg.n_bath / 2, 0.5));
  dc.sweep = sweep_config(cfg, probe);
  dc.prep = prep_config(cfg);
  dc.tolerance = cfg.effective_tol();
  dc.max_iter = cfg.dmft_max_iter;
  dc.mixing = cfg.dmft_mix;
  dc.fit_starts = cfg.fit_starts;
  dc.v_prune = cfg.fit_v_prune;
  dc.ph_symmetrize = cfg.ph_symmetrize;
  dc.seed = cfg.seed;
  return dc;
}

} // namespace qimp
