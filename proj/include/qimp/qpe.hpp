#pragma once

#include <cstdint>
#include <vector>

#include "qimp/statevector.hpp"
#include "qimp/trotter.hpp"

namespace qimp {

// Iterative single-ancilla phase estimation of exp(-i H tau): bits measured
// sequentially with feedback rotations. Resolution 2*pi/(tau * 2^bits).
struct QpeConfig {
  double tau = 0.2;            // evolution time per (least significant) bit
  int bits = 10;
  double window_center = 0.0;  // energies resolved within center +- width/2
  double window_width = 0.0;   // 0 -> full non-aliased range 2*pi/tau

  double resolution() const;
  void validate() const;
};

struct QpeResult {
  double energy = 0.0;
  double phase = 0.0; // measured m-bit fraction in [0, 1)
};

// Measures the energy of `psi` with the Trotterized propagator of
// `stepper_groups`; the state collapses under the measurement back-action.
// `dt` is the Trotter step ceiling for the controlled evolutions.
QpeResult qpe_measure_energy(Statevector& psi, const TermGroups& groups,
                             int order, double dt, const QpeConfig& cfg,
                             std::uint64_t seed, GateTally& tally);

// One QPE round interpreted as a ground-state projection test: success iff
// the measured energy lands strictly within half a resolution of e0.
struct ProjectResult {
  bool success = false;
  double energy = 0.0;
};
ProjectResult project_to_ground(Statevector& psi, const TermGroups& groups,
                                int order, double dt, const QpeConfig& cfg,
                                double e0, std::uint64_t seed,
                                GateTally& tally);

// Helper: embed an n-qubit state into n+1 qubits with the ancilla (highest
// qubit) in |0>.
Statevector with_ancilla(const Statevector& psi);

} // namespace qimp
