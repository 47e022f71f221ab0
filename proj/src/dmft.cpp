#include "qimp/dmft.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qimp/rng.hpp"

namespace qimp {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double table_interp(const std::vector<std::pair<double, double>>& tab,
                    double x) {
  if (x <= tab.front().first || x >= tab.back().first) return 0.0;
  auto it = std::upper_bound(
      tab.begin(), tab.end(), std::make_pair(x, 0.0),
      [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double f = (x - lo.first) / (hi.first - lo.first);
  return lo.second + f * (hi.second - lo.second);
}

cplx adaptive_simpson(const std::function<cplx(double)>& f, double a, double b,
                      cplx fa, cplx fm, cplx fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const cplx flm = f(lm), frm = f(rm);
  const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const cplx delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) < 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

} // namespace

void DosSpec::validate() const {
  if (kind == Kind::Bethe) return;
  if (table.size() < 2) throw std::invalid_argument("dos table too short");
  for (std::size_t i = 0; i + 1 < table.size(); ++i)
    if (table[i].first >= table[i + 1].first)
      throw std::invalid_argument("dos table must be sorted");
  for (const auto& [e, d] : table) {
    (void)e;
    if (d < 0.0) throw std::invalid_argument("dos must be non-negative");
  }
  if (std::abs(integral() - 1.0) > 1e-6)
    throw std::invalid_argument("dos must integrate to 1");
}

double DosSpec::integral() const {
  if (kind == Kind::Bethe) return 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < table.size(); ++i)
    acc += 0.5 * (table[i].second + table[i + 1].second) *
           (table[i + 1].first - table[i].first);
  return acc;
}

std::vector<cplx> self_energy(const std::vector<cplx>& g0_inverse,
                              const std::vector<cplx>& g_imp) {
  if (g0_inverse.size() != g_imp.size())
    throw std::invalid_argument("self_energy: size mismatch");
  std::vector<cplx> out(g_imp.size());
  for (std::size_t k = 0; k < g_imp.size(); ++k) {
    if (std::abs(g_imp[k]) < 1e-12)
      throw std::runtime_error("self_energy: singular G at frequency index " +
                               std::to_string(k));
    out[k] = g0_inverse[k] - 1.0 / g_imp[k];
  }
  return out;
}

MatsubaraGF self_energy(const MatsubaraGF& g0, const MatsubaraGF& g) {
  if (g0.values.size() != g.values.size() || g0.n_so != g.n_so)
    throw std::invalid_argument("self_energy: grid mismatch");
  MatsubaraGF out;
  out.grid = g.grid;
  out.n_so = g.n_so;
  out.resize();
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    const auto& gm = g.values[k];
    if (std::abs(gm.determinant()) < 1e-12)
      throw std::runtime_error("self_energy: singular G at frequency index " +
                               std::to_string(k));
    out.values[k] = g0.values[k].inverse() - gm.inverse();
  }
  return out;
}

cplx bethe_g(cplx z) {
  if (std::abs(z) > 1e8) return 1.0 / z; // asymptotic guard
  const cplx w = std::sqrt(z * z - 4.0);
  const cplx g1 = 0.5 * (z - w);
  const cplx g2 = 0.5 * (z + w);
  // causal branch: Im G and Im z have opposite signs on the Matsubara axis
  if (z.imag() > 0.0) return g1.imag() <= 0.0 ? g1 : g2;
  return g1.imag() >= 0.0 ? g1 : g2;
}

std::vector<cplx> lattice_g(const std::vector<cplx>& sigma,
                            const DosSpec& dos, double mu,
                            const MatsubaraGrid& grid) {
  dos.validate();
  std::vector<cplx> out(grid.omegas.size());
  for (std::size_t k = 0; k < grid.omegas.size(); ++k) {
    const cplx z = cplx{mu, grid.omegas[k]} - sigma[k];
    if (dos.kind == DosSpec::Kind::Bethe) {
      out[k] = bethe_g(z);
    } else {
      auto f = [&](double e) { return table_interp(dos.table, e) / (z - e); };
      const double a = dos.table.front().first;
      const double b = dos.table.back().first;
      const double m = 0.5 * (a + b);
      out[k] =
          adaptive_simpson(f, a, b, f(a), f(m), f(b), 1e-9, 40);
    }
  }
  return out;
}

std::vector<cplx> new_g0_inverse(const std::vector<cplx>& g_imp,
                                 const std::vector<cplx>& sigma,
                                 const DosSpec& dos, double mu,
                                 const MatsubaraGrid& grid,
                                 bool bethe_shortcut) {
  std::vector<cplx> out(grid.omegas.size());
  if (bethe_shortcut) {
    if (dos.kind != DosSpec::Kind::Bethe)
      throw std::invalid_argument("bethe shortcut needs the bethe dos");
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = cplx{mu, grid.omegas[k]} - g_imp[k];
    return out;
  }
  const auto gl = lattice_g(sigma, dos, mu, grid);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (std::abs(gl[k]) < 1e-14)
      throw std::runtime_error("new_g0: singular lattice G at index " +
                               std::to_string(k));
    out[k] = 1.0 / gl[k] + sigma[k];
  }
  return out;
}

SolveOutput solve_impurity(const ImpurityModel& m, SolverKind solver,
                           const TimeGrid& tgrid, const SweepConfig& sweep,
                           const PrepConfig& prep, std::uint64_t seed) {
  SolveOutput out;
  if (solver == SolverKind::Ed) {
    const EdSolution sol = ed_ground(m);
    out.rtgf = ed_greens(sol, m, tgrid);
    out.e0 = sol.e0;
    return out;
  }
  // quantum path: adiabatic preparation from the free model, then the
  // interference-circuit sweep
  ImpurityModel m0 = m;
  m0.u.clear();
  m0.mu = 0.0;
  AdiabaticSchedule sched{m0, m, prep.t_prep, prep.ramp_steps, prep.order};
  PrepConfig cfg = prep;
  if (cfg.qpe.window_width == 0.0) {
    cfg.qpe.window_width = 2.0 * 3.14159265358979323846 / cfg.qpe.tau;
    GateTally scratch;
    const Statevector probe = prepare_slater(m0, cfg.filling, scratch);
    cfg.qpe.window_center =
        expectation_value(probe, jordan_wigner(m)).real();
  }
  const PrepResult pr = prepare_ground_state(
      sched, cfg, cfg.trotter_dt, derive_seed(seed, seed_tag::prepare));
  if (!pr.success)
    throw std::runtime_error(
        "quantum solver: ground-state preparation exhausted its retry "
        "budget");
  out.prep_gates = pr.tally_single_prep.total;
  out.preparations = pr.preparations;
  out.qpe_runs = pr.qpe_runs;
  out.e0 = pr.energy;
  out.total_tally = pr.tally;
  SweepConfig sc = sweep;
  sc.grid = tgrid;
  sc.seed = derive_seed(seed, seed_tag::gf_sweep);
  out.rtgf = sweep_greens(m, pr.state, sc, &out.sweep_stats);
  return out;
}

namespace {

void persist_iteration(const std::string& dir, const DmftIteration& it,
                       const MatsubaraGrid& grid) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream f(dir + "/bath_" + std::to_string(it.index) + ".txt");
    f << "# discrete bath, one spin channel\n";
    f << "mu " << g17(it.bath.mu) << "\n";
    for (int i = 0; i < it.bath.n_sites(); ++i)
      f << "eps " << i << " " << g17(it.bath.eps[i]) << "\n";
    for (int i = 0; i < it.bath.n_sites(); ++i)
      f << "V " << i << " " << g17(it.bath.v[i]) << "\n";
  }
  auto write_scalar = [&](const std::string& path,
                          const std::vector<cplx>& vals) {
    MatsubaraGF gf;
    gf.grid = grid;
    gf.n_so = 1;
    gf.resize();
    for (std::size_t k = 0; k < vals.size(); ++k)
      gf.values[k](0, 0) = vals[k];
    save_matsubara(gf, path);
  };
  write_scalar(dir + "/giw_" + std::to_string(it.index) + ".tsv", it.g_imp);
  write_scalar(dir + "/sigma_" + std::to_string(it.index) + ".tsv", it.sigma);
}

void append_convergence(const std::string& dir, const DmftIteration& it,
                        bool first) {
  std::ofstream f(dir + "/convergence.tsv",
                  first ? std::ios::trunc : std::ios::app);
  if (first) f << "# iteration\tmetric\tfit_residual\n";
  f << it.index << "\t" << g17(it.metric) << "\t" << g17(it.fit_residual)
    << "\n";
}

} // namespace

DmftResult run_dmft(const DmftConfig& cfg) {
  cfg.dos.validate();
  const double mu = cfg.mu.value_or(cfg.u / 2.0);
  const auto& grid = cfg.grid;
  const int nb = cfg.n_bath_per_spin;

  // Hartree-shifted start: Sigma = U/2 keeps the particle-hole symmetric
  // point at half filling.
  std::vector<cplx> sigma_init(grid.omegas.size(), cplx{cfg.u / 2.0, 0.0});
  std::vector<cplx> target_inv =
      new_g0_inverse({}, sigma_init, cfg.dos, mu, grid, false);
  std::vector<cplx> prev_target_g0(target_inv.size());
  for (std::size_t k = 0; k < target_inv.size(); ++k)
    prev_target_g0[k] = 1.0 / target_inv[k];

  const bool symmetrize =
      cfg.ph_symmetrize && std::abs(mu - cfg.u / 2.0) < 1e-12;
  // Pruned levels decouple exactly (their Delta contribution is O(v^2));
  // with the symmetrized zero-pinned level, the degenerate occupations
  // average out of the spin-averaged Green's function.
  auto prune_and_symmetrize = [&](BathParameters& b) {
    if (symmetrize) b.ph_symmetrize();
    for (int i = 0; i < b.n_sites(); ++i)
      if (std::abs(b.v[i]) < cfg.v_prune) b.v[i] = 0.0;
    b.canonicalize();
  };

  BathParameters bath;
  bath.mu = mu;
  {
    const BathFitResult fr = fit_bath(target_inv, grid, nb, bath,
                                      derive_seed(cfg.seed, seed_tag::bath_fit,
                                                  0),
                                      cfg.fit_starts);
    bath = fr.bath;
    prune_and_symmetrize(bath);
  }

  DmftResult result;
  std::vector<cplx> g_prev;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    DmftIteration rec;
    rec.index = iter;
    rec.bath = bath;

    const ImpurityModel model =
        make_single_impurity(cfg.u, mu, bath.eps, bath.v);
    PrepConfig prep = cfg.prep;
    const int modes_per_spin = 1 + nb;
    prep.filling.n_up = modes_per_spin / 2;
    prep.filling.n_down = modes_per_spin / 2;
    SweepConfig sweep = cfg.sweep;
    // Both spin channels are measured on the same prepared state: for
    // degenerate local-moment grounds the spin-averaged Green's function
    // is then independent of which moment state the projection selected.
    sweep.mirror_spin = false;
    sweep.seed = derive_seed(cfg.seed, seed_tag::dmft_iter, iter);
    SolveOutput solve = solve_impurity(model, cfg.solver, cfg.tgrid, sweep,
                                       prep,
                                       derive_seed(cfg.seed, seed_tag::dmft_iter,
                                                   iter, 1));
    rec.sweep_stats = solve.sweep_stats;
    rec.prep_gates = solve.prep_gates;
    rec.preparations = solve.preparations;
    rec.qpe_runs = solve.qpe_runs;
    rec.e0 = solve.e0;

    const HilbertResult hr = hilbert_to_matsubara(solve.rtgf, grid, 0.0);
    rec.g_imp.resize(grid.omegas.size());
    for (std::size_t k = 0; k < rec.g_imp.size(); ++k) {
      cplx acc{0.0, 0.0};
      for (int a = 0; a < hr.gf.n_so; ++a) acc += hr.gf.values[k](a, a);
      rec.g_imp[k] = acc / static_cast<double>(hr.gf.n_so);
    }

    const auto g0_inv_used = g0_inverse_discrete(bath, grid);
    rec.sigma = self_energy(g0_inv_used, rec.g_imp);

    rec.metric = 1.0;
    if (!g_prev.empty()) {
      double m = 0.0;
      for (std::size_t k = 0; k < g_prev.size(); ++k)
        m = std::max(m, std::abs(rec.g_imp[k] - g_prev[k]));
      rec.metric = m;
    }
    g_prev = rec.g_imp;

    // new Weiss field, mixed in G0 and refit to the discrete bath
    const bool bethe = cfg.dos.kind == DosSpec::Kind::Bethe;
    std::vector<cplx> tgt_inv =
        new_g0_inverse(rec.g_imp, rec.sigma, cfg.dos, mu, grid, bethe);
    std::vector<cplx> tgt_g0(tgt_inv.size());
    for (std::size_t k = 0; k < tgt_inv.size(); ++k)
      tgt_g0[k] = 1.0 / tgt_inv[k];
    for (std::size_t k = 0; k < tgt_g0.size(); ++k)
      tgt_g0[k] = cfg.mixing * tgt_g0[k] + (1.0 - cfg.mixing) * prev_target_g0[k];
    prev_target_g0 = tgt_g0;
    for (std::size_t k = 0; k < tgt_inv.size(); ++k)
      tgt_inv[k] = 1.0 / tgt_g0[k];

    BathFitResult fr =
        fit_bath(tgt_inv, grid, nb, bath,
                 derive_seed(cfg.seed, seed_tag::bath_fit, iter),
                 cfg.fit_starts);
    prune_and_symmetrize(fr.bath);
    fr.residual = bath_cost(fr.bath, grid, tgt_inv);
    rec.fit_residual = fr.residual;

    result.history.push_back(rec);
    if (!cfg.history_dir.empty()) {
      persist_iteration(cfg.history_dir, rec, grid);
      append_convergence(cfg.history_dir, rec, iter == 1);
    }

    result.final_bath = bath;
    result.final_rtgf = solve.rtgf;
    result.final_giw = hr.gf;
    bath = fr.bath;

    if (iter > 1 && rec.metric < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

} // namespace qimp
