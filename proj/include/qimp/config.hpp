#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qimp/dmft.hpp"

namespace qimp {

// Flat key=value run configuration with '#' comments. Every key is
// validated on load; unknown keys and malformed values are reported by
// name. Energies are in units of the lattice hopping, times in its
// inverse.
struct RunConfig {
  // model input (solve-impurity, ed-reference)
  std::string model_path;
  // solver
  SolverKind solver = SolverKind::QuantumSim;
  bool estimator_exact = true;
  int n_meas = 400;
  bool spin_degenerate = false;
  // time grid
  double t_min = 1e-5;
  double t_max = 40.0;
  int n_t = 1000;
  // matsubara
  double beta = 20.0;
  int n_omega = 400;
  // spectra
  double eta = 0.05;
  double omega_min = -8.0;
  double omega_max = 8.0;
  int n_omega_real = 801;
  // trotter
  int trotter_order = 1;
  double trotter_step = 0.0; // <= 0: use 0.05 / max|coefficient|
  // preparation
  PrepStart prep_start = PrepStart::FreeFermion;
  double t_prep = 50.0;
  int prep_steps = 2500;
  double prep_step = 0.02;
  int qpe_bits = 8;
  double qpe_tau = 0.3;
  int qpe_rounds = 1;
  int retry_budget = 100;
  int calibration_preps = 4;
  std::optional<int> n_up, n_down;
  // dmft loop
  double u = 8.0;
  std::optional<double> mu; // default u/2
  int n_bath = 10;          // bath spin-orbitals in total
  std::string dos = "bethe";
  std::optional<double> dmft_tol; // default 1e-5 exact, 1e-3 shots
  int dmft_max_iter = 30;
  double dmft_mix = 0.7;
  int fit_starts = 8;
  double fit_v_prune = 0.05;
  bool ph_symmetrize = true;
  std::uint64_t seed = 1;

  void set(const std::string& key, const std::string& value);
  void validate() const;

  double effective_tol() const {
    return dmft_tol.value_or(estimator_exact ? 1e-5 : 1e-3);
  }
  double effective_mu() const { return mu.value_or(u / 2.0); }
};

RunConfig config_from_string(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_string(const RunConfig& cfg);

// Assembled sub-configurations.
SweepConfig sweep_config(const RunConfig& cfg, const ImpurityModel& m);
PrepConfig prep_config(const RunConfig& cfg);
DmftConfig dmft_config(const RunConfig& cfg);
double trotter_step_for(const RunConfig& cfg, const ImpurityModel& m);

} // namespace qimp
