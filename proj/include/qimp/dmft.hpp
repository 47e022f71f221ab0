#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qimp/bath.hpp"
#include "qimp/ed.hpp"
#include "qimp/gf_measure.hpp"
#include "qimp/matsubara.hpp"
#include "qimp/prepare.hpp"

namespace qimp {

// Lattice density of states: the infinite-coordination semicircle (band
// [-2, 2], unit hopping) or a tabulated curve.
struct DosSpec {
  enum class Kind { Bethe, Tabulated };
  Kind kind = Kind::Bethe;
  std::vector<std::pair<double, double>> table; // (eps, D(eps)), sorted

  void validate() const;
  double integral() const;
};

// Sigma(i w_n) = G0^{-1} - G^{-1}, scalar channel.
std::vector<cplx> self_energy(const std::vector<cplx>& g0_inverse,
                              const std::vector<cplx>& g_imp);
// Matrix form for multi-orbital data; throws on a singular G with the
// frequency index in the message.
MatsubaraGF self_energy(const MatsubaraGF& g0, const MatsubaraGF& g);

// G(i w_n) = integral deps D(eps) / (i w_n + mu - Sigma - eps); the Bethe
// branch uses the closed form (z - sqrt(z^2 - 4))/2 with Im G < 0.
std::vector<cplx> lattice_g(const std::vector<cplx>& sigma,
                            const DosSpec& dos, double mu,
                            const MatsubaraGrid& grid);
cplx bethe_g(cplx z);

// New Weiss field: general double-inversion form, or the Bethe shortcut
// G0^{-1} = i w + mu - G_imp.
std::vector<cplx> new_g0_inverse(const std::vector<cplx>& g_imp,
                                 const std::vector<cplx>& sigma,
                                 const DosSpec& dos, double mu,
                                 const MatsubaraGrid& grid,
                                 bool bethe_shortcut);

enum class SolverKind { QuantumSim, Ed };

struct DmftConfig {
  double u = 8.0;
  std::optional<double> mu;     // default u/2 (half filling)
  int n_bath_per_spin = 5;
  DosSpec dos;
  MatsubaraGrid grid = MatsubaraGrid::make(20.0, 400);
  TimeGrid tgrid = TimeGrid::logarithmic(1e-5, 40.0, 1200);
  SolverKind solver = SolverKind::Ed;
  SweepConfig sweep;            // estimator, trotter, n_meas, seed set here
  PrepConfig prep;
  double tolerance = 1e-5;
  int max_iter = 30;
  double mixing = 0.7;
  int fit_starts = 8;
  // Couplings fitted below this floor decouple exactly: the level's
  // contribution to Delta is O(v^2) while a stray near-zero coupling
  // creates unresolved near-degeneracies that poison the projective
  // preparation in the insulating phase.
  double v_prune = 0.05;
  // Enforce the particle-hole symmetry of the half-filled problem on the
  // fitted bath (applied only when mu == u/2).
  bool ph_symmetrize = true;
  std::uint64_t seed = 1;
  std::string history_dir;      // per-iteration files when non-empty
};

struct DmftIteration {
  int index = 0;
  BathParameters bath;            // bath used for this solve
  std::vector<cplx> g_imp;        // spin-averaged impurity G(i w_n)
  std::vector<cplx> sigma;
  double metric = 0.0;            // max_n |G_imp - G_imp_prev|
  double fit_residual = 0.0;      // cost of the refit after this solve
  SweepStats sweep_stats;
  std::uint64_t prep_gates = 0;   // single-preparation gate cost
  int preparations = 0;
  int qpe_runs = 0;
  double e0 = 0.0;
};

struct DmftResult {
  bool converged = false;
  std::vector<DmftIteration> history;
  BathParameters final_bath;
  RealTimeGF final_rtgf;        // real-time data of the last solve
  MatsubaraGF final_giw;
};

DmftResult run_dmft(const DmftConfig& cfg);

// Lowest-level solve used by both the loop and the one-shot driver:
// impurity real-time Green's functions for one model instance.
struct SolveOutput {
  RealTimeGF rtgf;
  SweepStats sweep_stats;
  std::uint64_t prep_gates = 0;
  int preparations = 0;
  int qpe_runs = 0;
  double e0 = 0.0;
  GateTally total_tally;
};
SolveOutput solve_impurity(const ImpurityModel& m, SolverKind solver,
                           const TimeGrid& tgrid, const SweepConfig& sweep,
                           const PrepConfig& prep, std::uint64_t seed);

} // namespace qimp
