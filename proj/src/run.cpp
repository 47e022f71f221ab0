#include "qimp/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qimp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> real_omega_grid(const RunConfig& cfg) {
  std::vector<double> om(cfg.n_omega_real);
  for (int i = 0; i < cfg.n_omega_real; ++i)
    om[i] = cfg.omega_min +
            (cfg.omega_max - cfg.omega_min) * i / (cfg.n_omega_real - 1);
  return om;
}

json tally_json(const GateTally& t) {
  json j;
  for (int k = 0; k < static_cast<int>(GateKind::kCount); ++k)
    j[gate_kind_name(static_cast<GateKind>(k))] = t.counts[k];
  j["total"] = t.total;
  return j;
}

void write_outputs(const RunConfig& cfg, const std::string& out_dir,
                   const SolveOutput& solve, const json& resources) {
  fs::create_directories(out_dir);
  save_greens_rt(solve.rtgf, out_dir + "/greens_rt.tsv");
  const MatsubaraGrid grid = MatsubaraGrid::make(cfg.beta, cfg.n_omega);
  const HilbertResult hr = hilbert_to_matsubara(solve.rtgf, grid, 0.0);
  save_matsubara(hr.gf, out_dir + "/greens_iw.tsv");
  const SpectralFunction aw =
      spectral_function(solve.rtgf, real_omega_grid(cfg), cfg.eta);
  save_spectral(aw, out_dir + "/aw.tsv");
  std::ofstream f(out_dir + "/resources.json");
  f << resources.dump(2) << "\n";
}

json solve_resources(const RunConfig& cfg, const SolveOutput& solve) {
  json j;
  j["solver"] = cfg.solver == SolverKind::Ed ? "ed" : "quantum-sim";
  j["estimator"] = cfg.estimator_exact ? "exact" : "shots";
  j["ground_energy"] = solve.e0;
  if (cfg.solver == SolverKind::QuantumSim) {
    j["gates_per_preparation"] = solve.prep_gates;
    j["preparations_from_scratch"] =
        solve.preparations + solve.sweep_stats.repreparations;
    j["qpe_reprojections"] = solve.sweep_stats.qpe_reprojections;
    j["qpe_runs_preparation"] = solve.qpe_runs;
    j["total_measurements"] = solve.sweep_stats.total_bits;
    j["gates_per_measurement_circuit_mean"] =
        solve.sweep_stats.mean_circuit_gates;
    j["measurement_gates"] = solve.sweep_stats.measurement_gates;
    j["reprojection_success_rate"] =
        solve.sweep_stats.reprojection_success_rate;
    const double prep_total =
        static_cast<double>(solve.prep_gates) *
        (solve.preparations + solve.sweep_stats.repreparations);
    j["preparation_gates"] = prep_total;
    j["total_gates"] =
        prep_total + static_cast<double>(solve.sweep_stats.measurement_gates);
    j["prep_tally"] = tally_json(solve.total_tally);
  }
  return j;
}

SolveOutput run_one_solve(const RunConfig& cfg, SolverKind solver) {
  if (cfg.model_path.empty())
    throw std::invalid_argument("config: key 'model' is required");
  const ImpurityModel m = load_model(cfg.model_path);
  const TimeGrid grid = TimeGrid::logarithmic(cfg.t_min, cfg.t_max, cfg.n_t);
  SweepConfig sc = sweep_config(cfg, m);
  sc.mirror_spin = false;
  return solve_impurity(m, solver, grid, sc, prep_config(cfg), cfg.seed);
}

} // namespace

void run_solve_impurity(const RunConfig& cfg, const std::string& out_dir) {
  const SolveOutput solve = run_one_solve(cfg, cfg.solver);
  write_outputs(cfg, out_dir, solve, solve_resources(cfg, solve));
}

void run_ed_reference(const RunConfig& cfg, const std::string& out_dir) {
  RunConfig ed_cfg = cfg;
  ed_cfg.solver = SolverKind::Ed;
  const SolveOutput solve = run_one_solve(ed_cfg, SolverKind::Ed);
  write_outputs(ed_cfg, out_dir, solve, solve_resources(ed_cfg, solve));
}

void run_dmft_loop(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  DmftConfig dc = dmft_config(cfg);
  dc.history_dir = out_dir;
  const DmftResult r = run_dmft(dc);

  save_greens_rt(r.final_rtgf, out_dir + "/greens_rt.tsv");
  save_matsubara(r.final_giw, out_dir + "/greens_iw.tsv");
  const SpectralFunction aw =
      spectral_function(r.final_rtgf, real_omega_grid(cfg), cfg.eta);
  save_spectral(aw, out_dir + "/aw.tsv");

  json j;
  j["converged"] = r.converged;
  j["iterations"] = r.history.size();
  j["u"] = cfg.u;
  j["mu"] = cfg.effective_mu();
  j["solver"] = cfg.solver == SolverKind::Ed ? "ed" : "quantum-sim";
  j["estimator"] = cfg.estimator_exact ? "exact" : "shots";
  if (!r.history.empty()) {
    const auto& last = r.history.back();
    j["final_metric"] = last.metric;
    j["final_fit_residual"] = last.fit_residual;
    j["ground_energy"] = last.e0;
    if (cfg.solver == SolverKind::QuantumSim) {
      std::uint64_t bits = 0, meas_gates = 0, repreps = 0, reproj = 0;
      double prep_gates_total = 0.0;
      for (const auto& it : r.history) {
        bits += it.sweep_stats.total_bits;
        meas_gates += it.sweep_stats.measurement_gates;
        repreps += it.sweep_stats.repreparations + it.preparations;
        reproj += it.sweep_stats.qpe_reprojections;
        prep_gates_total += static_cast<double>(it.prep_gates) *
                            (it.preparations + it.sweep_stats.repreparations);
      }
      j["total_measurements"] = bits;
      j["measurement_gates"] = meas_gates;
      j["preparations_from_scratch"] = repreps;
      j["qpe_reprojections"] = reproj;
      j["gates_per_preparation"] = r.history.back().prep_gates;
      j["total_gates"] = prep_gates_total + static_cast<double>(meas_gates);
    }
  }
  {
    json conv = json::array();
    for (const auto& it : r.history)
      conv.push_back({{"iteration", it.index},
                      {"metric", it.metric},
                      {"fit_residual", it.fit_residual}});
    j["history"] = conv;
  }
  std::ofstream f(out_dir + "/resources.json");
  f << j.dump(2) << "\n";
}

std::string report_resources_json(const RunConfig& cfg) {
  // Plan arithmetic: channels x parts x spins x points x shots.
  const int spins = cfg.spin_degenerate ? 1 : 2;
  const std::uint64_t per_point =
      static_cast<std::uint64_t>(measurements_per_point(false)) * spins;
  const std::uint64_t total_meas =
      per_point * static_cast<std::uint64_t>(cfg.n_t) *
      static_cast<std::uint64_t>(cfg.n_meas);

  // Reference model for gate tallies: the configured model file if given,
  // else the loop's single-impurity template with a generic bath.
  ImpurityModel m;
  if (!cfg.model_path.empty()) {
    m = load_model(cfg.model_path);
  } else {
    const int nb = cfg.n_bath / 2;
    std::vector<double> eps(nb), v(nb, 0.45);
    for (int i = 0; i < nb; ++i)
      eps[i] = nb > 1 ? -1.6 + 3.2 * i / (nb - 1) : 0.0;
    m = make_single_impurity(cfg.u, cfg.effective_mu(), eps, v);
  }
  const TermGroups groups = build_term_groups(m);
  const double dt = trotter_step_for(cfg, m);

  // single-step tallies
  GateTally step_plain, step_ctrl;
  {
    Statevector psi(m.n_modes());
    TrotterStepper st(groups, cfg.trotter_order, std::nullopt);
    st.step(psi, dt, step_plain);
    Statevector psic(m.n_modes() + 1);
    TrotterStepper stc(groups, cfg.trotter_order, m.n_modes());
    stc.step(psic, dt, step_ctrl);
  }

  const double qpe_time = cfg.qpe_tau * (std::ldexp(1.0, cfg.qpe_bits) - 1.0);
  const std::uint64_t qpe_steps =
      static_cast<std::uint64_t>(std::ceil(qpe_time / cfg.prep_step));
  const std::uint64_t qpe_gates =
      qpe_steps * step_ctrl.total + 3u * cfg.qpe_bits;
  const std::uint64_t ramp_gates =
      static_cast<std::uint64_t>(cfg.prep_steps) * step_plain.total;
  // initial-state circuit: one Givens network (counted from a dry build)
  GateTally init_tally;
  {
    ImpurityModel m0 = m;
    m0.u.clear();
    m0.mu = 0.0;
    Filling f;
    f.n_up = cfg.n_up;
    f.n_down = cfg.n_down;
    if (!f.n_up) f.n_up = m.n_modes() / 4;
    if (!f.n_down) f.n_down = m.n_modes() / 4;
    (void)prepare_slater(m0, f, init_tally);
  }
  const std::uint64_t prep_gates = init_tally.total + ramp_gates + qpe_gates;

  // measurement circuits: controlled evolution to t plus the fixed
  // interferometer overhead, averaged over the log grid
  const TimeGrid grid = TimeGrid::logarithmic(cfg.t_min, cfg.t_max, cfg.n_t);
  GateTally q_overhead;
  tally_pauli_circuit(jw_q1(0).second, true, q_overhead);
  tally_pauli_circuit(jw_q1(0).second, true, q_overhead);
  double mean_meas_gates = 0.0;
  double total_meas_gates = 0.0;
  for (double t : grid.points) {
    const std::uint64_t steps =
        static_cast<std::uint64_t>(std::ceil(t / dt));
    const double g = static_cast<double>(steps * step_ctrl.total +
                                         q_overhead.total + 2);
    mean_meas_gates += g;
    total_meas_gates += g * per_point * cfg.n_meas;
  }
  mean_meas_gates /= grid.points.size();

  json j;
  j["plan"] = {{"time_points", cfg.n_t},
               {"n_meas", cfg.n_meas},
               {"channels_per_point", measurements_per_point(false)},
               {"channels_per_point_anomalous", measurements_per_point(true)},
               {"spin_channels", spins},
               {"total_measurements", total_meas}};
  j["gates"] = {{"per_preparation", prep_gates},
                {"initial_state", init_tally.total},
                {"ramp", ramp_gates},
                {"qpe_verification", qpe_gates},
                {"per_trotter_step", step_plain.total},
                {"per_controlled_trotter_step", step_ctrl.total},
                {"per_measurement_circuit_mean", mean_meas_gates},
                {"measurement_total", total_meas_gates},
                {"per_qpe_reprojection", qpe_gates}};
  j["model"] = {{"n_so", m.n_so},
                {"n_b", m.n_b},
                {"fermionic_terms", fermion_terms(m).size()},
                {"commuting_groups", groups.group_count()}};
  {
    json table = json::array();
    for (int n_so : {1, 2, 3, 4, 5, 6})
      for (int n_b : {0, 5, 10, 20})
        table.push_back({{"n_so", n_so},
                         {"n_b", n_b},
                         {"sparse", count_terms(n_so, n_b, false)},
                         {"dense", count_terms(n_so, n_b, true)}});
    j["term_count_table"] = table;
  }
  return j.dump(2) + "\n";
}

double compare_greens_files(const std::string& a, const std::string& b) {
  auto load_numeric = [](const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open file: " + path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      double x;
      while (ls >> x) vals.push_back(x);
    }
    return vals;
  };
  const auto va = load_numeric(a);
  const auto vb = load_numeric(b);
  if (va.size() != vb.size())
    throw std::runtime_error("files have different shapes: " + a + " vs " + b);
  double m = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i)
    m = std::max(m, std::abs(va[i] - vb[i]));
  return m;
}

} // namespace qimp
