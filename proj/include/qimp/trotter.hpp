#pragma once

#include <optional>
#include <vector>

#include "qimp/jw.hpp"
#include "qimp/statevector.hpp"

namespace qimp {

// One product-formula pass: exp(-iHt) ~ (prod_i exp(-i H_i t/N))^N with the
// groups of build_term_groups. order 2 uses the symmetric splitting.
struct TrotterPlan {
  double t = 0.0;
  int steps = 1;
  int order = 1;
};

// Executes Trotter steps over a fixed group list; caches the diagonal phase
// tables per step size. An optional control qubit turns every factor into
// its controlled version (the ancilla must lie outside the model register).
class TrotterStepper {
 public:
  TrotterStepper(const TermGroups& groups, int order,
                 std::optional<int> control = std::nullopt);

  const TermGroups& groups() const { return groups_; }
  int order() const { return order_; }

  // Applies exp(-i H dt) once (one first-order or symmetric step).
  void step(Statevector& psi, double dt, GateTally& tally);
  // Fixed-step evolution: n identical steps of t/n.
  void evolve(Statevector& psi, double t, int n_steps, GateTally& tally);
  // Evolution with a step ceiling; uses ceil(|t|/max_dt) steps.
  void evolve_dt(Statevector& psi, double t, double max_dt, GateTally& tally);

  // Linear interpolation between two group lists with identical structure;
  // s runs over the midpoints of the schedule.
  static void evolve_ramp(Statevector& psi, const TermGroups& from,
                          const TermGroups& to, double t_total, int n_steps,
                          int order, std::optional<int> control,
                          GateTally& tally);

 private:
  TermGroups groups_;
  int order_;
  std::optional<int> control_;
  // cached diagonal factor tables keyed by dt
  struct Cache {
    double dt = 0.0;
    bool valid = false;
    std::vector<cplx> table;
  };
  Cache cache_full_, cache_half_;
  std::vector<double> diag_phase_; // phase(b) without dt factor

  const std::vector<cplx>& diag_table(double dt, Cache& slot);
  void apply_groups(Statevector& psi, double dt, GateTally& tally);
  friend class AdiabaticRampImpl;
};

void trotter_evolve(Statevector& psi, const TermGroups& groups,
                    const TrotterPlan& plan, std::optional<int> control,
                    GateTally& tally);

// --- kernels (exposed for tests) ---

// phase(b) = constant + sum_k c_k (-1)^{popcount(b & mask_k)}
std::vector<double> diag_phase_vector(const DiagTerms& d, int n_model);
// psi[b] *= table[b & model_mask] on the control's |1> slice (or all).
void kernel_diag(Statevector& psi, const std::vector<cplx>& table,
                 std::optional<int> control);
// exp(-i dt H_hop) for one number-conserving pair group.
void kernel_hop(Statevector& psi, const HopTerm& hop, double dt,
                std::optional<int> control);
// exp(-i theta P) for one Pauli string with a real coefficient folded into
// theta.
void kernel_string_rot(Statevector& psi, const PauliString& s, double theta,
                       std::optional<int> control);

// Reference gate circuits used for tallies and cross-checks.
// exp(-i angle n_p): a single phase rotation.
std::vector<Gate> level_phase_circuit(int p, double angle,
                                      std::optional<int> control);
// exp(-i T U n_p n_q) with theta = T*U/2: two CNOTs and three phase gates.
std::vector<Gate> density_phase_circuit(int p, int q, double theta,
                                        std::optional<int> control);

// Gate cost of the reference decomposition per group application.
void tally_diag(const DiagTerms& d, bool controlled, GateTally& tally);
void tally_hop(const HopTerm& h, bool controlled, GateTally& tally);
void tally_string_rot(const PauliString& s, bool controlled, GateTally& tally);

} // namespace qimp
