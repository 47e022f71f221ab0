#include "qimp/prepare.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "qimp/rng.hpp"

namespace qimp {

namespace {

// Spin channels of the quadratic part: per-spin mode lists when the
// one-body matrix does not mix the spin tags, otherwise one channel.
std::vector<std::vector<int>> quadratic_channels(const ImpurityModel& m,
                                                 const Eigen::MatrixXcd& h) {
  const int n = m.n_modes();
  std::vector<int> up, dn;
  for (int i = 0; i < n; ++i) (m.spin[i] == 0 ? up : dn).push_back(i);
  bool mixed = false;
  for (int i : up)
    for (int j : dn)
      if (std::abs(h(i, j)) > 1e-14) mixed = true;
  if (mixed || up.empty() || dn.empty()) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return {all};
  }
  return {up, dn};
}

int fill_count(const Filling& f, int spin, const Eigen::VectorXd& evals) {
  if (spin == 0 && f.n_up) return *f.n_up;
  if (spin == 1 && f.n_down) return *f.n_down;
  // default: occupy the strictly negative orbitals
  int n = 0;
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    if (evals[i] < -1e-12) ++n;
  return n;
}

struct GivensRot {
  int p = 0, q = 0;  // mode pair, p < q
  basis_t mask = 0;  // JW string between
  cplx h;            // kernel parameter at dt = 1
};

// Adjacent-in-channel Givens elimination bringing the channel unitary to
// diagonal form; returns rotations in application order for the state
// preparation (inverse rotations, last elimination first).
std::vector<GivensRot> givens_network(const std::vector<int>& modes,
                                      const Eigen::MatrixXcd& w_channel) {
  const int L = static_cast<int>(modes.size());
  Eigen::MatrixXcd w = w_channel;
  struct Elim {
    int jm1, j;
    double c;
    cplx s;
  };
  std::vector<Elim> elims;
  for (int k = 0; k < L - 1; ++k) {
    for (int j = L - 1; j > k; --j) {
      const cplx a = w(j - 1, k), b = w(j, k);
      if (std::abs(b) < 1e-14) continue;
      const double r = std::sqrt(std::norm(a) + std::norm(b));
      double c;
      cplx s;
      if (std::abs(a) < 1e-14) {
        c = 0.0;
        s = std::conj(b) / std::abs(b);
      } else {
        c = std::abs(a) / r;
        s = (a / std::abs(a)) * std::conj(b) / r;
      }
      // rows (j-1, j) <- [[c, s], [-conj(s), c]] * rows
      for (int col = 0; col < L; ++col) {
        const cplx x = w(j - 1, col), y = w(j, col);
        w(j - 1, col) = c * x + s * y;
        w(j, col) = -std::conj(s) * x + c * y;
      }
      elims.push_back({j - 1, j, c, s});
    }
  }
  std::vector<GivensRot> rots;
  rots.reserve(elims.size());
  for (auto it = elims.rbegin(); it != elims.rend(); ++it) {
    // Apply G† = [[c, -s], [conj(s), c]] on the mode pair.
    const double rt = std::atan2(std::abs(it->s), it->c);
    if (rt == 0.0) continue;
    const cplx sdir = it->s / std::abs(it->s);
    GivensRot g;
    g.p = modes[it->jm1];
    g.q = modes[it->j];
    for (int q = g.p + 1; q < g.q; ++q) g.mask |= basis_t{1} << q;
    g.h = rt * I_UNIT * std::conj(sdir);
    rots.push_back(g);
  }
  return rots;
}

} // namespace

Statevector prepare_slater(const ImpurityModel& m, const Filling& filling,
                           GateTally& tally) {
  const Eigen::MatrixXcd h = m.one_body();
  const auto channels = quadratic_channels(m, h);
  const int n = m.n_modes();

  basis_t init = 0;
  std::vector<GivensRot> rots;
  for (const auto& modes : channels) {
    const int L = static_cast<int>(modes.size());
    Eigen::MatrixXcd hc(L, L);
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) hc(i, j) = h(modes[i], modes[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hc);
    const int spin = channels.size() == 2 ? m.spin[modes[0]] : 0;
    const int nf = fill_count(filling, spin, es.eigenvalues());
    if (nf < 0 || nf > L) throw std::invalid_argument("invalid filling");
    // Channel unitary: occupied orbitals in the first nf columns, rest of
    // the eigenbasis as completion.
    Eigen::MatrixXcd w = es.eigenvectors();
    for (int k = 0; k < nf; ++k) init |= basis_t{1} << modes[k];
    auto channel_rots = givens_network(modes, w);
    rots.insert(rots.end(), channel_rots.begin(), channel_rots.end());
  }

  Statevector psi(n, 0);
  for (int q = 0; q < n; ++q)
    if (init & (basis_t{1} << q)) psi.apply(Gate::x(q), tally);
  for (const auto& g : rots) {
    HopTerm hop;
    hop.p = g.p;
    hop.q = g.q;
    hop.string_mask = g.mask;
    hop.h = g.h;
    kernel_hop(psi, hop, 1.0, std::nullopt);
    tally_hop(hop, false, tally);
  }
  return psi;
}

Statevector prepare_atomic(const ImpurityModel& m, const Filling& filling,
                           GateTally& tally) {
  const Eigen::MatrixXcd h = m.one_body();
  const int n = m.n_modes();
  std::vector<int> up, dn;
  for (int i = 0; i < n; ++i) (m.spin[i] == 0 ? up : dn).push_back(i);
  auto diag_of = [&](const std::vector<int>& modes) {
    Eigen::VectorXd d(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k)
      d[k] = h(modes[k], modes[k]).real();
    return d;
  };
  const int n_up = fill_count(filling, 0, diag_of(up));
  const int n_dn = fill_count(filling, 1, diag_of(dn));

  // The atomic Hamiltonian is Fock-diagonal; pick the cheapest pattern in
  // the filling sector, interactions included.
  auto diag_energy = [&](basis_t b) {
    double e = 0.0;
    for (int i = 0; i < n; ++i)
      if (b & (basis_t{1} << i)) e += h(i, i).real();
    for (const auto& el : m.u) {
      if (el.a == el.d && el.b == el.c && el.a != el.b) {
        if ((b & (basis_t{1} << el.a)) && (b & (basis_t{1} << el.b)))
          e += el.v.real();
      }
    }
    return e;
  };
  basis_t best = 0;
  double best_e = 0.0;
  bool first = true;
  // enumerate the sector (desk scale: <= 2^16 patterns before the cut)
  for (basis_t b = 0; b < (basis_t{1} << n); ++b) {
    int cu = 0, cd = 0;
    for (int i = 0; i < n; ++i)
      if (b & (basis_t{1} << i)) (m.spin[i] == 0 ? cu : cd)++;
    if (cu != n_up || cd != n_dn) continue;
    const double e = diag_energy(b);
    if (first || e < best_e - 1e-14) {
      best = b;
      best_e = e;
      first = false;
    }
  }
  Statevector psi(n, 0);
  for (int q = 0; q < n; ++q)
    if (best & (basis_t{1} << q)) psi.apply(Gate::x(q), tally);
  return psi;
}

double trotter_phase_energy(const TermGroups& groups, int order,
                            const Statevector& psi, double dt) {
  Statevector evolved = psi;
  TrotterStepper stepper(groups, order, std::nullopt);
  GateTally scratch;
  stepper.step(evolved, dt, scratch);
  const cplx overlap = psi.inner_product(evolved);
  return -std::arg(overlap) / dt;
}

PrepResult prepare_ground_state(const AdiabaticSchedule& schedule,
                                const PrepConfig& cfg, double trotter_dt,
                                std::uint64_t seed) {
  cfg.qpe.validate();
  const TermGroups groups_init = build_term_groups(schedule.initial);
  const TermGroups groups_final = build_term_groups(schedule.final_model);
  const double res = cfg.qpe.resolution();

  PrepResult out;
  bool have_e0 = false;
  double e0 = 0.0;
  bool single_recorded = false;
  std::vector<double> prep_readings; // first-round energies only

  // A reading counts as the ground energy once it has been reproduced;
  // single-shot phase estimates carry occasional multi-bin outliers, so the
  // smallest raw value is not trusted on its own.
  const int repeat_threshold = std::min(2, std::max(1, cfg.calibration_preps));
  auto lowest_repeated = [&]() -> std::optional<double> {
    std::optional<double> found;
    for (double e : prep_readings) {
      int count = 0;
      for (double o : prep_readings)
        if (std::abs(o - e) < 0.5 * res) ++count;
      if (count >= repeat_threshold && (!found || e < *found - 0.5 * res))
        found = e;
    }
    return found;
  };

  while (out.preparations < cfg.retry_budget) {
    ++out.preparations;
    Statevector psi =
        cfg.start == PrepStart::FreeFermion
            ? prepare_slater(schedule.initial, cfg.filling, out.tally)
            : prepare_atomic(schedule.initial, cfg.filling, out.tally);
    TrotterStepper::evolve_ramp(psi, groups_init, groups_final,
                                schedule.t_prep, cfg.ramp_steps,
                                schedule.order, std::nullopt, out.tally);
    QpeResult r = qpe_measure_energy(
        psi, groups_final, schedule.order, trotter_dt, cfg.qpe,
        derive_seed(seed, seed_tag::qpe, out.preparations, 0), out.tally);
    ++out.qpe_runs;
    out.measured_energies.push_back(r.energy);
    prep_readings.push_back(r.energy);
    if (!single_recorded) {
      out.tally_single_prep = out.tally;
      single_recorded = true;
    }

    if (!have_e0) {
      if (out.preparations < cfg.calibration_preps) continue;
      const auto cand_e0 = lowest_repeated();
      if (!cand_e0) continue;
      e0 = *cand_e0;
      have_e0 = true;
    }
    if (std::abs(r.energy - e0) >= 0.5 * res)
      continue; // excited-state collapse, re-prepare

    bool ok = true;
    for (int round = 1; round < cfg.qpe_rounds; ++round) {
      QpeResult rr = qpe_measure_energy(
          psi, groups_final, schedule.order, trotter_dt, cfg.qpe,
          derive_seed(seed, seed_tag::qpe, out.preparations, round),
          out.tally);
      ++out.qpe_runs;
      out.measured_energies.push_back(rr.energy);
      if (std::abs(rr.energy - e0) >= 0.5 * res) {
        ok = false;
        break;
      }
    }
    if (ok) {
      out.state = std::move(psi);
      out.energy = e0;
      out.success = true;
      return out;
    }
  }
  out.success = false;
  if (have_e0) out.energy = e0;
  return out;
}

} // namespace qimp
