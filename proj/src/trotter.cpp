#include "qimp/trotter.hpp"

#include <bit>
#include <cmath>

namespace qimp {

std::vector<double> diag_phase_vector(const DiagTerms& d, int n_model) {
  const basis_t dim = basis_t{1} << n_model;
  std::vector<double> phase(dim, d.constant);
  for (const auto& [c, mask] : d.zs) {
    for (basis_t b = 0; b < dim; ++b)
      phase[b] += (std::popcount(b & mask) & 1) ? -c : c;
  }
  return phase;
}

void kernel_diag(Statevector& psi, const std::vector<cplx>& table,
                 std::optional<int> control) {
  const basis_t model_mask = table.size() - 1;
  cplx* a = psi.amplitudes().data();
  const basis_t dim = psi.dim();
  if (!control) {
    for (basis_t b = 0; b < dim; ++b) a[b] *= table[b & model_mask];
    return;
  }
  const basis_t cbit = basis_t{1} << *control;
  for (basis_t b = cbit; b < dim; b = (b + 1) | cbit)
    a[b] *= table[b & model_mask];
}

void kernel_hop(Statevector& psi, const HopTerm& hop, double dt,
                std::optional<int> control) {
  const double r = std::abs(hop.h);
  if (r == 0.0 || dt == 0.0) return;
  const cplx hdir = hop.h / r;
  const double c = std::cos(r * dt), s = std::sin(r * dt);
  const cplx f21 = cplx{0.0, -1.0} * s * hdir;        // pair sign +1
  const cplx f12 = cplx{0.0, -1.0} * s * std::conj(hdir);
  const basis_t pbit = basis_t{1} << hop.p;
  const basis_t qbit = basis_t{1} << hop.q;
  const basis_t cbit = control ? basis_t{1} << *control : 0;
  cplx* a = psi.amplitudes().data();
  const basis_t dim = psi.dim();
  for (basis_t b = 0; b < dim; ++b) {
    if (!(b & pbit) || (b & qbit)) continue; // pick p=1, q=0 representative
    if (cbit && !(b & cbit)) continue;
    const basis_t b2 = b ^ (pbit | qbit);
    const bool odd = std::popcount(b & hop.string_mask) & 1;
    const cplx a1 = a[b], a2 = a[b2];
    if (odd) {
      a[b] = c * a1 - f12 * a2;
      a[b2] = c * a2 - f21 * a1;
    } else {
      a[b] = c * a1 + f12 * a2;
      a[b2] = c * a2 + f21 * a1;
    }
  }
}

void kernel_string_rot(Statevector& psi, const PauliString& s, double theta,
                       std::optional<int> control) {
  if (theta == 0.0) return;
  // exp(-i theta P) = cos(theta) - i sin(theta) P, with P^2 = 1.
  basis_t flip = 0, sign = 0;
  int n_y = 0;
  for (const auto& [q, p] : s.ops) {
    const basis_t bit = basis_t{1} << q;
    if (p == Pauli::X) flip |= bit;
    if (p == Pauli::Y) {
      flip |= bit;
      sign |= bit;
      ++n_y;
    }
    if (p == Pauli::Z) sign |= bit;
  }
  cplx ipy{1.0, 0.0};
  for (int k = 0; k < (n_y & 3); ++k) ipy *= I_UNIT;
  const double co = std::cos(theta), si = std::sin(theta);
  const basis_t cbit = control ? basis_t{1} << *control : 0;
  cplx* a = psi.amplitudes().data();
  const basis_t dim = psi.dim();
  if (flip == 0) {
    for (basis_t b = 0; b < dim; ++b) {
      if (cbit && !(b & cbit)) continue;
      const double z = (std::popcount(b & sign) & 1) ? -1.0 : 1.0;
      a[b] *= cplx{co, -si * z};
    }
    return;
  }
  const basis_t pick = flip & (~flip + 1);
  for (basis_t b = 0; b < dim; ++b) {
    if (b & pick) continue;
    if (cbit && !(b & cbit)) continue;
    const basis_t b2 = b ^ flip;
    const cplx ph1 = (std::popcount(b & sign) & 1) ? -ipy : ipy;
    const cplx ph2 = (std::popcount(b2 & sign) & 1) ? -ipy : ipy;
    const cplx a1 = a[b], a2 = a[b2];
    a[b] = co * a1 - I_UNIT * si * ph2 * a2;
    a[b2] = co * a2 - I_UNIT * si * ph1 * a1;
  }
}

std::vector<Gate> level_phase_circuit(int p, double angle,
                                      std::optional<int> control) {
  return {Gate::r(p, -angle, control.value_or(-1))};
}

std::vector<Gate> density_phase_circuit(int p, int q, double theta,
                                        std::optional<int> control) {
  const int c = control.value_or(-1);
  return {Gate::r(p, -theta, c), Gate::r(q, -theta, c), Gate::cnot(p, q),
          Gate::r(q, theta, c), Gate::cnot(p, q)};
}

void tally_diag(const DiagTerms& d, bool controlled, GateTally& tally) {
  tally.add(GateKind::R, d.n_level_terms);
  tally.add(GateKind::R, 3 * d.n_density_terms);
  tally.add(GateKind::CNOT, 2 * d.n_density_terms);
  if (controlled) tally.add(GateKind::R, 1); // constant-term phase
}

void tally_hop(const HopTerm& h, bool controlled, GateTally& tally) {
  (void)controlled;
  const int string_len = std::popcount(h.string_mask);
  tally.add(GateKind::CNOT, 2 * string_len + 4);
  tally.add(GateKind::H, 4);
  tally.add(GateKind::Y, 4);
  tally.add(GateKind::R, 2);
}

void tally_string_rot(const PauliString& s, bool controlled, GateTally& tally) {
  (void)controlled;
  int nx = 0, ny = 0, k = 0;
  for (const auto& [q, p] : s.ops) {
    (void)q;
    nx += p == Pauli::X;
    ny += p == Pauli::Y;
    ++k;
  }
  tally.add(GateKind::H, 2 * nx);
  tally.add(GateKind::Y, 2 * ny);
  if (k > 1) tally.add(GateKind::CNOT, 2 * (k - 1));
  tally.add(GateKind::R, 1);
}

TrotterStepper::TrotterStepper(const TermGroups& groups, int order,
                               std::optional<int> control)
    : groups_(groups), order_(order), control_(control) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("trotter order must be 1 or 2");
  diag_phase_ = diag_phase_vector(groups_.diag, groups_.n_qubits);
}

const std::vector<cplx>& TrotterStepper::diag_table(double dt, Cache& slot) {
  if (!slot.valid || slot.dt != dt) {
    slot.table.resize(diag_phase_.size());
    for (std::size_t b = 0; b < diag_phase_.size(); ++b)
      slot.table[b] = std::polar(1.0, -dt * diag_phase_[b]);
    slot.dt = dt;
    slot.valid = true;
  }
  return slot.table;
}

void TrotterStepper::step(Statevector& psi, double dt, GateTally& tally) {
  const bool ctl = control_.has_value();
  if (order_ == 1) {
    kernel_diag(psi, diag_table(dt, cache_full_), control_);
    tally_diag(groups_.diag, ctl, tally);
    for (const auto& h : groups_.hops) {
      kernel_hop(psi, h, dt, control_);
      tally_hop(h, ctl, tally);
    }
    for (const auto& t : groups_.generic) {
      kernel_string_rot(psi, t.string, t.coeff.real() * dt, control_);
      tally_string_rot(t.string, ctl, tally);
    }
    return;
  }
  // symmetric order 2: half-steps out and back around the last group
  const std::size_t n_groups = groups_.group_count();
  kernel_diag(psi, diag_table(dt / 2, cache_half_), control_);
  tally_diag(groups_.diag, ctl, tally);
  const std::size_t n_hops = groups_.hops.size();
  for (std::size_t i = 0; i < n_hops; ++i) {
    const bool last = (i + 1 == n_groups - 1) && groups_.generic.empty();
    kernel_hop(psi, groups_.hops[i], last ? dt : dt / 2, control_);
    tally_hop(groups_.hops[i], ctl, tally);
    if (last) break;
  }
  for (std::size_t i = 0; i < groups_.generic.size(); ++i) {
    const bool last = i + 1 == groups_.generic.size();
    kernel_string_rot(psi, groups_.generic[i].string,
                      groups_.generic[i].coeff.real() * (last ? dt : dt / 2),
                      control_);
    tally_string_rot(groups_.generic[i].string, ctl, tally);
  }
  for (std::size_t i = groups_.generic.size(); i-- > 1;) {
    kernel_string_rot(psi, groups_.generic[i - 1].string,
                      groups_.generic[i - 1].coeff.real() * dt / 2, control_);
    tally_string_rot(groups_.generic[i - 1].string, ctl, tally);
  }
  for (std::size_t i = n_hops; i-- > 0;) {
    if ((i + 1 == n_groups - 1) && groups_.generic.empty()) continue;
    kernel_hop(psi, groups_.hops[i], dt / 2, control_);
    tally_hop(groups_.hops[i], ctl, tally);
  }
  kernel_diag(psi, diag_table(dt / 2, cache_half_), control_);
  tally_diag(groups_.diag, ctl, tally);
}

void TrotterStepper::evolve(Statevector& psi, double t, int n_steps,
                            GateTally& tally) {
  if (n_steps < 1) throw std::invalid_argument("trotter steps must be >= 1");
  const double dt = t / n_steps;
  for (int k = 0; k < n_steps; ++k) step(psi, dt, tally);
}

void TrotterStepper::evolve_dt(Statevector& psi, double t, double max_dt,
                               GateTally& tally) {
  if (max_dt <= 0.0) throw std::invalid_argument("max_dt must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t) / max_dt)));
  evolve(psi, t, n, tally);
}

void trotter_evolve(Statevector& psi, const TermGroups& groups,
                    const TrotterPlan& plan, std::optional<int> control,
                    GateTally& tally) {
  TrotterStepper stepper(groups, plan.order, control);
  stepper.evolve(psi, plan.t, plan.steps, tally);
}

void TrotterStepper::evolve_ramp(Statevector& psi, const TermGroups& from,
                                 const TermGroups& to, double t_total,
                                 int n_steps, int order,
                                 std::optional<int> control,
                                 GateTally& tally) {
  if (from.n_qubits != to.n_qubits || from.hops.size() != to.hops.size() ||
      from.generic.size() != to.generic.size())
    throw std::invalid_argument("ramp endpoints must share term structure");
  for (std::size_t i = 0; i < from.hops.size(); ++i)
    if (from.hops[i].p != to.hops[i].p || from.hops[i].q != to.hops[i].q)
      throw std::invalid_argument("ramp endpoints must share hop pairs");

  const std::vector<double> phase_a = diag_phase_vector(from.diag, from.n_qubits);
  std::vector<double> phase_b = diag_phase_vector(to.diag, to.n_qubits);
  for (std::size_t b = 0; b < phase_b.size(); ++b) phase_b[b] -= phase_a[b];

  const double dt = t_total / n_steps;
  const bool ctl = control.has_value();
  std::vector<cplx> table(phase_a.size());
  TermGroups interp = from;
  for (int k = 0; k < n_steps; ++k) {
    const double s = (k + 0.5) / n_steps;
    for (std::size_t i = 0; i < interp.hops.size(); ++i)
      interp.hops[i].h = from.hops[i].h + s * (to.hops[i].h - from.hops[i].h);
    for (std::size_t i = 0; i < interp.generic.size(); ++i)
      interp.generic[i].coeff = from.generic[i].coeff +
                                s * (to.generic[i].coeff - from.generic[i].coeff);
    const double half = order == 2 ? 0.5 : 1.0;
    for (std::size_t b = 0; b < table.size(); ++b)
      table[b] = std::polar(1.0, -dt * half * (phase_a[b] + s * phase_b[b]));
    kernel_diag(psi, table, control);
    tally_diag(interp.diag, ctl, tally);
    if (order == 1) {
      for (const auto& h : interp.hops) {
        kernel_hop(psi, h, dt, control);
        tally_hop(h, ctl, tally);
      }
      for (const auto& t : interp.generic) {
        kernel_string_rot(psi, t.string, t.coeff.real() * dt, control);
        tally_string_rot(t.string, ctl, tally);
      }
    } else {
      const std::size_t n_groups = interp.group_count();
      const std::size_t n_hops = interp.hops.size();
      for (std::size_t i = 0; i < n_hops; ++i) {
        const bool last = (i + 1 == n_groups - 1) && interp.generic.empty();
        kernel_hop(psi, interp.hops[i], last ? dt : dt / 2, control);
        tally_hop(interp.hops[i], ctl, tally);
      }
      for (std::size_t i = 0; i < interp.generic.size(); ++i) {
        const bool last = i + 1 == interp.generic.size();
        kernel_string_rot(psi, interp.generic[i].string,
                          interp.generic[i].coeff.real() * (last ? dt : dt / 2),
                          control);
        tally_string_rot(interp.generic[i].string, ctl, tally);
      }
      for (std::size_t i = interp.generic.size(); i-- > 1;) {
        kernel_string_rot(psi, interp.generic[i - 1].string,
                          interp.generic[i - 1].coeff.real() * dt / 2, control);
        tally_string_rot(interp.generic[i - 1].string, ctl, tally);
      }
      for (std::size_t i = n_hops; i-- > 0;) {
        if ((i + 1 == n_groups - 1) && interp.generic.empty()) continue;
        kernel_hop(psi, interp.hops[i], dt / 2, control);
        tally_hop(interp.hops[i], ctl, tally);
      }
      for (std::size_t b = 0; b < table.size(); ++b)
        table[b] = std::polar(1.0, -dt * 0.5 * (phase_a[b] + s * phase_b[b]));
      kernel_diag(psi, table, control);
      tally_diag(interp.diag, ctl, tally);
    }
  }
}

} // namespace qimp
