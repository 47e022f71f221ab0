#include "qimp/gf_measure.hpp"

#include <cmath>

#include "qimp/prepare.hpp"
#include "qimp/rng.hpp"

namespace qimp {

namespace {
constexpr double kHalfPi = 1.5707963267948966192;

std::pair<cplx, PauliString> q_string(QKind kind, int mode) {
  return kind == QKind::Q1 ? jw_q1(mode) : jw_q2(mode);
}

// Exact spin symmetry under the paired layout (2k, 2k+1): the down-spin
// channel then shares the up-spin circuit distributions.
bool spin_mirror_valid(const ImpurityModel& m) {
  if (m.n_so != 2 || m.n_b % 2 != 0) return false;
  if (std::abs(m.t(0, 0) - m.t(1, 1)) > 1e-14) return false;
  if (std::abs(m.t(0, 1)) > 1e-14) return false;
  for (int k = 0; 2 * k + 1 < m.n_b; ++k) {
    if (std::abs(m.eps[2 * k] - m.eps[2 * k + 1]) > 1e-14) return false;
    if (std::abs(m.v(0, 2 * k) - m.v(1, 2 * k + 1)) > 1e-14) return false;
    if (std::abs(m.v(1, 2 * k)) > 1e-14 || std::abs(m.v(0, 2 * k + 1)) > 1e-14)
      return false;
  }
  return m.bath_hop.empty();
}

} // namespace

GfPair reconstruct_gf(cplx u11, cplx u12) {
  return {0.5 * (u11 + I_UNIT * u12), 0.5 * (u11 - I_UNIT * u12)};
}

int measurements_per_point(bool anomalous) { return anomalous ? 8 : 4; }

UmeasRegister::UmeasRegister(const Statevector& ground,
                             const TermGroups& groups, int order, double dt,
                             QKind beta_kind, int beta_mode, GateTally& tally)
    : work_(with_ancilla(ground)),
      anc_(ground.n_qubits()),
      stepper_(groups, order, ground.n_qubits()),
      dt_(dt) {
  const std::uint64_t before = tally.total;
  work_.apply(Gate::h(anc_), tally);
  auto [coeff, str] = q_string(beta_kind, beta_mode);
  apply_pauli(work_, str, coeff, anc_);
  tally_pauli_circuit(str, true, tally);
  overhead_gates_ = tally.total - before;
  // the closing controlled-q_alpha and interferometer add per-channel cost
  GateTally closing;
  tally_pauli_circuit(str, true, closing);
  overhead_gates_ += closing.total + 2;
}

void UmeasRegister::advance_to(double t, GateTally& tally) {
  if (t < t_now_ - 1e-15)
    throw std::invalid_argument("umeas register cannot rewind");
  const double delta = t - t_now_;
  if (delta <= 0.0) return;
  const std::uint64_t before = tally.total;
  stepper_.evolve_dt(work_, delta, dt_, tally);
  evolution_gates_ += tally.total - before;
  t_now_ = t;
}

std::uint64_t UmeasRegister::circuit_gates() const {
  return evolution_gates_ + overhead_gates_;
}

Statevector UmeasRegister::closing_circuit(QKind alpha_kind, int alpha_mode,
                                           bool imag_part) const {
  Statevector probe = work_;
  GateTally scratch;
  auto [coeff, str] = q_string(alpha_kind, alpha_mode);
  apply_pauli(probe, str, coeff, anc_);
  if (imag_part) probe.apply(Gate::r(anc_, -kHalfPi), scratch);
  probe.apply(Gate::h(anc_), scratch);
  return probe;
}

double UmeasRegister::expectation(QKind alpha_kind, int alpha_mode,
                                  bool imag_part) const {
  return closing_circuit(alpha_kind, alpha_mode, imag_part)
      .expectation_z(anc_);
}

UmeasRegister::ChannelStats UmeasRegister::stats(
    QKind alpha_kind, int alpha_mode, bool imag_part,
    const Statevector& reference_ground) const {
  Statevector probe = closing_circuit(alpha_kind, alpha_mode, imag_part);
  ChannelStats out;
  out.p1 = probe.prob_one(anc_);
  for (int outcome = 0; outcome < 2; ++outcome) {
    const double p = outcome ? out.p1 : 1.0 - out.p1;
    if (p < 1e-14) {
      out.weight[outcome] = 0.0;
      continue;
    }
    Statevector collapsed = probe;
    collapsed.collapse_qubit(anc_, outcome);
    const Statevector sys = collapsed.drop_qubit(anc_, outcome);
    out.weight[outcome] = std::norm(reference_ground.inner_product(sys));
  }
  return out;
}

UmeasBit measure_umeas(const Statevector& ground, const TermGroups& groups,
                       int order, double dt, QKind alpha_kind, int alpha_mode,
                       QKind beta_kind, int beta_mode, double t,
                       bool imag_part, std::uint64_t seed, GateTally& tally) {
  if (alpha_mode >= ground.n_qubits() || beta_mode >= ground.n_qubits())
    throw std::out_of_range("umeas orbital index out of range");
  if (t < 0.0) throw std::invalid_argument("umeas requires t >= 0");
  UmeasRegister reg(ground, groups, order, dt, beta_kind, beta_mode, tally);
  reg.advance_to(t, tally);
  Statevector probe = reg.closing_circuit(alpha_kind, alpha_mode, imag_part);
  const int anc = ground.n_qubits();
  Rng rng(seed);
  UmeasBit out;
  out.bit = probe.measure_qubit(anc, rng);
  out.post_system = probe.drop_qubit(anc, out.bit);
  return out;
}

RealTimeGF sweep_greens(const ImpurityModel& m, const Statevector& ground,
                        const SweepConfig& cfg, SweepStats* stats) {
  cfg.grid.validate();
  const TermGroups groups = build_term_groups(m);
  const double e0_eff =
      trotter_phase_energy(groups, cfg.trotter_order, ground, cfg.trotter_dt);

  RealTimeGF gf;
  gf.grid = cfg.grid;
  gf.n_so = m.n_so;
  gf.exact = cfg.exact;
  gf.n_meas = cfg.exact ? 0 : cfg.n_meas;
  gf.resize();

  // (target orbital, register orbital): the register orbital's circuits
  // supply the distribution; mirrored targets draw independent bits from
  // the identical down-spin circuits of an exactly symmetric model.
  std::vector<std::pair<int, int>> targets;
  std::vector<int> register_orbitals;
  if (cfg.spin_degenerate) {
    register_orbitals = {0};
    targets = {{0, 0}};
  } else if (cfg.mirror_spin && spin_mirror_valid(m)) {
    register_orbitals = {0};
    targets = {{0, 0}, {1, 0}};
  } else {
    for (int a = 0; a < m.n_so; ++a) {
      register_orbitals.push_back(a);
      targets.push_back({a, a});
    }
  }

  SweepStats local;
  SweepStats& st = stats ? *stats : local;
  st = SweepStats{};
  GateTally evolve_tally;
  double rp_success_acc = 0.0;
  std::uint64_t rp_attempts = 0;

  for (int a : register_orbitals) {
    UmeasRegister reg1(ground, groups, cfg.trotter_order, cfg.trotter_dt,
                       QKind::Q1, a, evolve_tally);
    UmeasRegister reg2(ground, groups, cfg.trotter_order, cfg.trotter_dt,
                       QKind::Q2, a, evolve_tally);
    for (std::size_t i = 0; i < cfg.grid.points.size(); ++i) {
      const double t = cfg.grid.points[i];
      reg1.advance_to(t, evolve_tally);
      reg2.advance_to(t, evolve_tally);
      const cplx phase = std::polar(1.0, e0_eff * t);
      if (cfg.exact) {
        const cplx u11{reg1.expectation(QKind::Q1, a, false),
                       reg1.expectation(QKind::Q1, a, true)};
        const cplx u12{reg2.expectation(QKind::Q1, a, false),
                       reg2.expectation(QKind::Q1, a, true)};
        const GfPair g = reconstruct_gf(phase * u11, phase * u12);
        for (const auto& [orb, src] : targets) {
          if (src != a) continue;
          gf.gp[i](orb, orb) = g.gp;
          gf.gh[i](orb, orb) = g.gh;
        }
      } else {
        const auto s11r = reg1.stats(QKind::Q1, a, false, ground);
        const auto s11i = reg1.stats(QKind::Q1, a, true, ground);
        const auto s12r = reg2.stats(QKind::Q1, a, false, ground);
        const auto s12i = reg2.stats(QKind::Q1, a, true, ground);
        const std::uint64_t per_bit_gates =
            (reg1.circuit_gates() + reg2.circuit_gates()) / 2;
        for (const auto& [orb, src] : targets) {
          if (src != a) continue;
          auto estimate = [&](const UmeasRegister::ChannelStats& cs,
                              int channel_tag) {
            Rng rng(derive_seed(cfg.seed, seed_tag::gf_sweep,
                                (std::uint64_t(i) << 8) |
                                    std::uint64_t(channel_tag),
                                orb));
            int ones = 0;
            for (int k = 0; k < cfg.n_meas; ++k) {
              const int bit = rng.bernoulli(cs.p1) ? 1 : 0;
              ones += bit;
              ++st.total_bits;
              ++st.qpe_reprojections;
              rp_success_acc += cs.weight[bit];
              ++rp_attempts;
              if (!rng.bernoulli(cs.weight[bit])) ++st.repreparations;
            }
            st.measurement_gates += std::uint64_t(cfg.n_meas) * per_bit_gates;
            return 1.0 - 2.0 * static_cast<double>(ones) / cfg.n_meas;
          };
          const cplx u11{estimate(s11r, 1), estimate(s11i, 2)};
          const cplx u12{estimate(s12r, 3), estimate(s12i, 4)};
          const GfPair g = reconstruct_gf(phase * u11, phase * u12);
          gf.gp[i](orb, orb) = g.gp;
          gf.gh[i](orb, orb) = g.gh;
        }
      }
    }
  }

  if (cfg.spin_degenerate && m.n_so == 2) {
    for (std::size_t i = 0; i < cfg.grid.points.size(); ++i) {
      gf.gp[i](1, 1) = gf.gp[i](0, 0);
      gf.gh[i](1, 1) = gf.gh[i](0, 0);
    }
  }

  gf.total_bits = st.total_bits;
  if (rp_attempts > 0)
    st.reprojection_success_rate = rp_success_acc / rp_attempts;
  if (st.total_bits > 0)
    st.mean_circuit_gates =
        static_cast<double>(st.measurement_gates) / st.total_bits;
  return gf;
}

} // namespace qimp
