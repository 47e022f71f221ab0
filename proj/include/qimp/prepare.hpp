#pragma once

#include <optional>
#include <vector>

#include "qimp/model.hpp"
#include "qimp/qpe.hpp"
#include "qimp/statevector.hpp"
#include "qimp/trotter.hpp"

namespace qimp {

enum class PrepStart { FreeFermion, AtomicLimit };

// Adiabatic interpolation H0 -> H with per-parameter linear ramps.
struct AdiabaticSchedule {
  ImpurityModel initial;
  ImpurityModel final_model;
  double t_prep = 0.0;
  int steps = 1;
  int order = 1;
};

// Target occupation per spin species; half filling when unset.
struct Filling {
  std::optional<int> n_up;
  std::optional<int> n_down;
};

// Fermionic Gaussian state preparation: occupy the lowest orbitals of the
// quadratic part in their natural basis, then rotate to the site basis with
// a Givens network (JW strings handled by the hopping kernel).
Statevector prepare_slater(const ImpurityModel& m, const Filling& filling,
                           GateTally& tally);

// Product state of the atomic limit (all hoppings and couplings off),
// occupations chosen by lowest on-site energy within the filling sector.
Statevector prepare_atomic(const ImpurityModel& m, const Filling& filling,
                           GateTally& tally);

struct PrepConfig {
  PrepStart start = PrepStart::FreeFermion;
  double t_prep = 50.0;
  int ramp_steps = 2500;
  int order = 1;
  QpeConfig qpe;
  int qpe_rounds = 1;
  int retry_budget = 100;
  int calibration_preps = 4;
  Filling filling;
  double trotter_dt = 0.01; // step ceiling for the ramp-side phase estimation
};

struct PrepResult {
  Statevector state{1};
  double energy = 0.0; // QPE-resolution-limited ground energy
  bool success = false;
  GateTally tally;                     // total gates over all attempts
  GateTally tally_single_prep;         // one ramp + one QPE round
  int preparations = 0;                // ramps run from scratch
  int qpe_runs = 0;
  std::vector<double> measured_energies; // per QPE run, for failure reports
};

// Adiabatic preparation followed by phase-estimation verification; repeats
// until the measured energy reproduces the smallest calibrated energy in
// `qpe_rounds` consecutive rounds or the retry budget is exhausted.
PrepResult prepare_ground_state(const AdiabaticSchedule& schedule,
                                const PrepConfig& cfg, double trotter_dt,
                                std::uint64_t seed);

// Phase accumulated by one Trotter step on a (near-)eigenstate, as an
// energy: arg(<psi|U_step(dt)|psi>)/(-dt). Matches the propagator the
// measurement circuits actually apply, so phase corrections cancel the
// Trotter bias exactly.
double trotter_phase_energy(const TermGroups& groups, int order,
                            const Statevector& psi, double dt);

} // namespace qimp
