#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "qimp/ed.hpp"
#include "qimp/prepare.hpp"
#include "qimp/qpe.hpp"
#include "qimp/trotter.hpp"

using namespace qimp;

namespace {

Statevector random_state(int n, std::uint64_t seed) {
  Rng rng(seed);
  Statevector psi(n);
  for (auto& a : psi.amplitudes())
    a = cplx{rng.next_double() - 0.5, rng.next_double() - 0.5};
  psi.normalize();
  return psi;
}

double max_diff(const Statevector& psi, const Eigen::VectorXcd& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < psi.dim(); ++i)
    m = std::max(m, std::abs(psi.amplitudes()[i] - v[i]));
  return m;
}

} // namespace

TEST_CASE("single commuting term evolves exactly") {
  ImpurityModel m;
  m.n_so = 1;
  m.n_b = 0;
  m.t = Eigen::MatrixXcd::Constant(1, 1, 1.3);
  m.v = Eigen::MatrixXcd::Zero(1, 0);
  m.set_default_spins();
  const TermGroups g = build_term_groups(m);
  Statevector psi(1, 1);
  GateTally t;
  trotter_evolve(psi, g, {2.5, 7, 1}, std::nullopt, t);
  CHECK(std::abs(psi.amplitude(1) - std::polar(1.0, -1.3 * 2.5)) < 1e-12);
}

TEST_CASE("kernel groups match dense exponentials on a 6-qubit model") {
  const ImpurityModel m = make_test_model(2, 4, false, 21);
  const TermGroups g = build_term_groups(m);
  const Eigen::MatrixXcd h = oracle::dense_hamiltonian(m);
  // group list reassembles the Hamiltonian exactly
  const Eigen::MatrixXcd hsum = dense_matrix(g.all_terms(), m.n_modes());
  CHECK((h - hsum).norm() < 1e-11);

  const double dt = 0.37;
  // diagonal group alone
  {
    TermGroups only_diag = g;
    only_diag.hops.clear();
    only_diag.generic.clear();
    Statevector psi = random_state(6, 1);
    Eigen::VectorXcd v = oracle::to_vector(psi);
    const Eigen::MatrixXcd hd =
        dense_matrix(only_diag.all_terms(), m.n_modes());
    GateTally t;
    TrotterStepper st(only_diag, 1);
    st.step(psi, dt, t);
    CHECK(max_diff(psi, oracle::dense_evolve(hd, v, dt)) < 1e-12);
  }
  // each hop group alone
  for (std::size_t k = 0; k < g.hops.size(); ++k) {
    TermGroups only_hop = g;
    only_hop.diag = DiagTerms{};
    only_hop.generic.clear();
    only_hop.hops = {g.hops[k]};
    Statevector psi = random_state(6, 2 + k);
    Eigen::VectorXcd v = oracle::to_vector(psi);
    const Eigen::MatrixXcd hh = dense_matrix(only_hop.all_terms(), 6);
    GateTally t;
    TrotterStepper st(only_hop, 1);
    st.step(psi, dt, t);
    CHECK(max_diff(psi, oracle::dense_evolve(hh, v, dt)) < 1e-12);
  }
}

TEST_CASE("first-order trotter error halves as steps double") {
  const ImpurityModel m = make_test_model(2, 4, false, 33);
  const TermGroups g = build_term_groups(m);
  const Eigen::MatrixXcd h = oracle::dense_hamiltonian(m);
  const double t = 1.0;
  const Statevector init = random_state(6, 5);
  const Eigen::VectorXcd want =
      oracle::dense_evolve(h, oracle::to_vector(init), t);
  double prev = 0.0;
  for (int n : {64, 128, 256}) {
    Statevector psi = init;
    GateTally tl;
    trotter_evolve(psi, g, {t, n, 1}, std::nullopt, tl);
    const double err = max_diff(psi, want);
    if (prev > 0.0) {
      CHECK(prev / err > 1.6);
      CHECK(prev / err < 2.4);
    }
    prev = err;
  }
}

TEST_CASE("second order beats first order and converges as dt^2") {
  const ImpurityModel m = make_test_model(2, 4, false, 57);
  const TermGroups g = build_term_groups(m);
  const Eigen::MatrixXcd h = oracle::dense_hamiltonian(m);
  const double t = 1.0;
  const Statevector init = random_state(6, 6);
  const Eigen::VectorXcd want =
      oracle::dense_evolve(h, oracle::to_vector(init), t);
  double e1 = 0.0, e2a = 0.0, e2b = 0.0;
  {
    Statevector psi = init;
    GateTally tl;
    trotter_evolve(psi, g, {t, 128, 1}, std::nullopt, tl);
    e1 = max_diff(psi, want);
  }
  {
    Statevector psi = init;
    GateTally tl;
    trotter_evolve(psi, g, {t, 128, 2}, std::nullopt, tl);
    e2a = max_diff(psi, want);
  }
  {
    Statevector psi = init;
    GateTally tl;
    trotter_evolve(psi, g, {t, 256, 2}, std::nullopt, tl);
    e2b = max_diff(psi, want);
  }
  CHECK(e2a < e1);
  CHECK(e2a / e2b > 3.0); // ~4x for a second-order method
  CHECK(e2a / e2b < 5.0);
}

TEST_CASE("density phase circuit reproduces exp(-iTU n n) including |11>") {
  // theta = T*U/2 with U = pi, T = 1: |11> picks up e^{-i pi}
  const double u = M_PI, T = 1.0;
  Statevector psi(2);
  psi.apply(Gate::h(0));
  psi.apply(Gate::h(1));
  GateTally t;
  for (const Gate& g : density_phase_circuit(0, 1, T * u / 2, std::nullopt))
    psi.apply(g, t);
  CHECK(std::abs(psi.amplitude(0b11) - 0.5 * std::polar(1.0, -M_PI)) < 1e-12);
  CHECK(std::abs(psi.amplitude(0b01) - cplx{0.5, 0.0}) < 1e-12);
  CHECK(std::abs(psi.amplitude(0b00) - cplx{0.5, 0.0}) < 1e-12);
  CHECK(t.counts[static_cast<int>(GateKind::R)] == 3);
  CHECK(t.counts[static_cast<int>(GateKind::CNOT)] == 2);
}

TEST_CASE("controlled evolution is identity on the |0> control slice") {
  const ImpurityModel m = make_test_model(2, 2, false, 8);
  const TermGroups g = build_term_groups(m);
  Statevector psi = random_state(4, 9);
  Statevector work = with_ancilla(psi); // ancilla |0>
  GateTally t;
  trotter_evolve(work, g, {1.5, 40, 2}, 4, t);
  for (std::size_t b = 0; b < psi.dim(); ++b)
    CHECK(std::abs(work.amplitude(b) - psi.amplitude(b)) < 1e-12);
}

TEST_CASE("controlled evolution applies the full phase on the |1> slice") {
  const ImpurityModel m = make_test_model(1, 2, false, 13);
  const TermGroups g = build_term_groups(m);
  const Eigen::MatrixXcd h = oracle::dense_hamiltonian(m);
  Statevector sys = random_state(3, 14);
  Statevector work = with_ancilla(sys);
  work.apply(Gate::h(3));
  GateTally t;
  const double tt = 0.8;
  trotter_evolve(work, g, {tt, 4000, 2}, 3, t);
  const Eigen::VectorXcd want =
      oracle::dense_evolve(h, oracle::to_vector(sys), tt);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t b = 0; b < sys.dim(); ++b) {
    CHECK(std::abs(work.amplitude(b) - inv_sqrt2 * sys.amplitude(b)) < 1e-9);
    CHECK(std::abs(work.amplitude(b | 8) - inv_sqrt2 * want[b]) < 1e-4);
  }
}

TEST_CASE("evolution composes: U(t1+t2) = U(t2) U(t1) for exact groups") {
  ImpurityModel m;
  m.n_so = 2;
  m.n_b = 0;
  m.t = Eigen::MatrixXcd::Zero(2, 2);
  m.t(0, 0) = 0.9;
  m.t(1, 1) = -0.4;
  m.u.push_back({0, 1, 1, 0, cplx{2.0, 0.0}});
  m.v = Eigen::MatrixXcd::Zero(2, 0);
  m.set_default_spins();
  const TermGroups g = build_term_groups(m); // diagonal only: exact
  Statevector a = random_state(2, 3), b = a;
  GateTally t;
  trotter_evolve(a, g, {0.7, 3, 1}, std::nullopt, t);
  trotter_evolve(a, g, {0.9, 4, 1}, std::nullopt, t);
  trotter_evolve(b, g, {1.6, 5, 1}, std::nullopt, t);
  for (std::size_t i = 0; i < a.dim(); ++i)
    CHECK(std::abs(a.amplitudes()[i] - b.amplitudes()[i]) < 1e-12);
}

TEST_CASE("slater preparation matches the free ground state") {
  ImpurityModel m = make_test_model(2, 6, false, 77);
  m.u.clear();
  m.mu = 0.0;
  GateTally t;
  Statevector psi = prepare_slater(m, {}, t);
  CHECK(t.total > 0);
  const EdSolution ed = ed_ground(m);
  const Statevector want = ed_to_statevector(ed);
  const double overlap = std::abs(psi.inner_product(want));
  CHECK(overlap > 1.0 - 1e-10);
  // energy check too
  const Eigen::MatrixXcd h = oracle::dense_hamiltonian(m);
  const Eigen::VectorXcd v = oracle::to_vector(psi);
  const double e = std::real((v.adjoint() * (h * v))(0, 0));
  CHECK(e == doctest::Approx(ed.e0).epsilon(1e-10));
}

TEST_CASE("atomic preparation picks the cheapest sector pattern") {
  // half-filled atom at mu = U/2: single occupation, not double
  ImpurityModel m;
  m.n_so = 2;
  m.n_b = 0;
  m.t = Eigen::MatrixXcd::Zero(2, 2);
  m.u.push_back({0, 1, 1, 0, cplx{4.0, 0.0}});
  m.mu = 2.0;
  m.v = Eigen::MatrixXcd::Zero(2, 0);
  m.set_default_spins();
  GateTally t;
  Filling f;
  f.n_up = 1;
  f.n_down = 0;
  Statevector psi = prepare_atomic(m, f, t);
  CHECK(std::abs(psi.amplitude(0b01) - 1.0) < 1e-14);
}

TEST_CASE("qpe on an exact eigenstate returns its energy and keeps it") {
  const ImpurityModel m = make_test_model(2, 2, false, 15);
  const TermGroups g = build_term_groups(m);
  const EdSolution ed = ed_ground(m);
  const Statevector before = ed_to_statevector(ed);
  QpeConfig qpe;
  qpe.tau = 0.15;
  qpe.bits = 11;
  qpe.window_center = ed.e0;
  qpe.window_width = 2.0 * M_PI / qpe.tau;
  // single-shot estimates carry rare multi-bin tails; the median is clean
  std::vector<double> errs;
  for (int s = 0; s < 11; ++s) {
    Statevector psi = before;
    GateTally t;
    const QpeResult r =
        qpe_measure_energy(psi, g, 2, 5e-4, qpe, derive_seed(99, s), t);
    errs.push_back(std::abs(r.energy - ed.e0));
    const double fid = std::abs(before.inner_product(psi));
    CHECK(fid > 1.0 - 1e-6); // eigenstate survives regardless of outcome
  }
  std::sort(errs.begin(), errs.end());
  CHECK(errs[errs.size() / 2] < qpe.resolution());
}

TEST_CASE("qpe on a two-eigenstate superposition collapses by Born rule") {
  // two-level diagonal toy: |0> (E=0) and |1> (E=e1)
  ImpurityModel m;
  m.n_so = 1;
  m.n_b = 0;
  m.t = Eigen::MatrixXcd::Constant(1, 1, 1.0);
  m.v = Eigen::MatrixXcd::Zero(1, 0);
  m.set_default_spins();
  const TermGroups g = build_term_groups(m);
  QpeConfig qpe;
  qpe.tau = 0.5;
  qpe.bits = 6;
  qpe.window_center = 0.5;
  qpe.window_width = 2.0 * M_PI / qpe.tau;
  int hits_low = 0, clean = 0;
  const int reps = 400;
  for (int s = 0; s < reps; ++s) {
    Statevector psi(1);
    psi.apply(Gate::h(0));
    GateTally t;
    const QpeResult r = qpe_measure_energy(psi, g, 1, 1e-3, qpe,
                                           derive_seed(1234, 77, s), t);
    const bool low = std::abs(r.energy) < std::abs(r.energy - 1.0);
    hits_low += low;
    const double fid = std::abs(psi.amplitude(low ? 0 : 1));
    clean += fid > 0.9;
  }
  // p = 1/2 each, 3 sigma = 3*sqrt(0.25/400)*400 = 30
  CHECK(std::abs(hits_low - 200) < 30);
  CHECK(clean >= reps * 85 / 100); // collapse is projective up to tails
}

TEST_CASE("qpe median error shrinks with extra bits") {
  // random 4-qubit states collapse onto assorted eigenstates; the median
  // quantization error tracks the resolution
  const ImpurityModel m = make_test_model(2, 2, false, 29);
  const TermGroups g = build_term_groups(m);
  const Eigen::MatrixXcd h = oracle::dense_hamiltonian(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  QpeConfig qpe;
  qpe.tau = 0.5;
  qpe.window_center = 0.5 * (es.eigenvalues().minCoeff() +
                             es.eigenvalues().maxCoeff());
  qpe.window_width = 2.0 * M_PI / qpe.tau;
  auto nearest_level = [&](double e) {
    double best = 1e300;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      best = std::min(best, std::abs(e - es.eigenvalues()[i]));
    return best;
  };
  double first_med = -1.0, last_med = -1.0;
  for (int bits : {6, 8}) {
    qpe.bits = bits;
    std::vector<double> errs;
    for (int s = 0; s < 31; ++s) {
      Statevector psi = random_state(4, 1000 + s);
      GateTally t;
      const QpeResult r =
          qpe_measure_energy(psi, g, 2, 1e-3, qpe, derive_seed(17, bits, s), t);
      errs.push_back(nearest_level(r.energy));
    }
    std::sort(errs.begin(), errs.end());
    const double med = errs[errs.size() / 2];
    if (first_med < 0.0) first_med = med;
    last_med = med;
  }
  // two extra bits shrink the median error by roughly 4x; allow noise
  CHECK(last_med < first_med / 2.0);
}

TEST_CASE("project_to_ground accepts the ground and rejects orthogonal") {
  const ImpurityModel m = make_test_model(2, 2, false, 41);
  const TermGroups g = build_term_groups(m);
  const EdSolution ed = ed_ground(m);
  QpeConfig qpe;
  qpe.tau = 0.13;
  qpe.bits = 9;
  qpe.window_center = ed.e0;
  qpe.window_width = 2.0 * M_PI / qpe.tau;
  int ok = 0;
  for (int s = 0; s < 10; ++s) {
    Statevector psi = ed_to_statevector(ed);
    GateTally t;
    const auto r = project_to_ground(psi, g, 2, 5e-4, qpe, ed.e0,
                                     derive_seed(5, 6, s), t);
    ok += r.success;
  }
  CHECK(ok == 10);
  // a basis state orthogonal to the half-filled ground sector
  int bad = 0;
  for (int s = 0; s < 10; ++s) {
    Statevector psi(m.n_modes(), 0); // vacuum: N = 0 sector
    GateTally t;
    const auto r = project_to_ground(psi, g, 2, 5e-4, qpe, ed.e0,
                                     derive_seed(7, 8, s), t);
    bad += r.success;
  }
  CHECK(bad == 0);
}

TEST_CASE("prepare_ground_state finds the interacting ground state") {
  const ImpurityModel m = make_single_impurity(4.0, 2.0, {-0.6, 0.0, 0.9}, {0.45, 0.4, 0.45});
  ImpurityModel m0 = m;
  m0.u.clear();
  m0.mu = 0.0;
  AdiabaticSchedule sched{m0, m, 18.0, 600, 2};
  PrepConfig cfg;
  cfg.qpe.tau = 0.12;
  cfg.qpe.bits = 10;
  cfg.qpe.window_width = 2.0 * M_PI / cfg.qpe.tau;
  const EdSolution ed = ed_ground(m);
  cfg.qpe.window_center = std::round(ed.e0); // rough prior, honest window
  cfg.qpe_rounds = 2;
  cfg.filling.n_up = ed.sector.n_up;
  cfg.filling.n_down = ed.sector.n_down;
  const PrepResult r = prepare_ground_state(sched, cfg, 2e-3, 2024);
  REQUIRE(r.success);
  CHECK(std::abs(r.energy - ed.e0) < cfg.qpe.resolution());
  const Statevector want = ed_to_statevector(ed);
  CHECK(std::abs(r.state.inner_product(want)) > 0.99);
  CHECK(r.tally.total > 0);
  CHECK(r.preparations >= 1);
}

TEST_CASE("u=0 schedule with identical endpoints succeeds immediately") {
  ImpurityModel m = make_test_model(2, 4, false, 63);
  m.u.clear();
  m.mu = 0.0;
  AdiabaticSchedule sched{m, m, 1.0, 10, 1};
  PrepConfig cfg;
  cfg.qpe.tau = 0.1;
  cfg.qpe.bits = 10;
  cfg.qpe.window_width = 2.0 * M_PI / cfg.qpe.tau;
  const EdSolution ed = ed_ground(m);
  cfg.qpe.window_center = ed.e0 + 0.2;
  cfg.calibration_preps = 1;
  const PrepResult r = prepare_ground_state(sched, cfg, 1e-3, 5);
  REQUIRE(r.success);
  CHECK(r.preparations == 1);
  CHECK(std::abs(r.energy - ed.e0) < cfg.qpe.resolution());
}

TEST_CASE("too fast a ramp loses ground-state overlap") {
  const ImpurityModel m = make_single_impurity(6.0, 3.0, {-0.8, 0.0, 0.8}, {0.5, 0.4, 0.5});
  ImpurityModel m0 = m;
  m0.u.clear();
  m0.mu = 0.0;
  const EdSolution ed = ed_ground(m);
  const Statevector want = ed_to_statevector(ed);
  const TermGroups g0 = build_term_groups(m0);
  const TermGroups g1 = build_term_groups(m);
  Filling fill;
  fill.n_up = ed.sector.n_up;
  fill.n_down = ed.sector.n_down;
  auto overlap_for = [&](double t_prep, int steps) {
    GateTally t;
    Statevector psi = prepare_slater(m0, fill, t);
    TrotterStepper::evolve_ramp(psi, g0, g1, t_prep, steps, 2, std::nullopt,
                                t);
    return std::abs(psi.inner_product(want));
  };
  const double slow = overlap_for(25.0, 800);
  const double fast = overlap_for(0.4, 20);
  CHECK(slow > 0.99);
  CHECK(fast < slow - 0.05);
}

TEST_CASE("adiabatic overlap is monotone in preparation time") {
  const ImpurityModel m = make_single_impurity(5.0, 2.5, {-0.7, 0.0, 1.1}, {0.5, 0.35, 0.4});
  ImpurityModel m0 = m;
  m0.u.clear();
  m0.mu = 0.0;
  const EdSolution ed = ed_ground(m);
  const Statevector want = ed_to_statevector(ed);
  const TermGroups g0 = build_term_groups(m0);
  const TermGroups g1 = build_term_groups(m);
  Filling fill;
  fill.n_up = ed.sector.n_up;
  fill.n_down = ed.sector.n_down;
  double prev = 0.0;
  for (double t_prep : {0.5, 2.0, 8.0, 32.0}) {
    GateTally t;
    Statevector psi = prepare_slater(m0, fill, t);
    TrotterStepper::evolve_ramp(psi, g0, g1, t_prep,
                                std::max(20, int(t_prep / 0.02)), 2,
                                std::nullopt, t);
    const double ov = std::abs(psi.inner_product(want));
    CHECK(ov > prev - 0.02); // allow tiny non-monotonic wiggle
    prev = ov;
  }
  CHECK(prev > 0.98);
}

TEST_CASE("trotter phase energy tracks the propagator not the Hamiltonian") {
  const ImpurityModel m = make_test_model(2, 2, false, 90);
  const TermGroups g = build_term_groups(m);
  const EdSolution ed = ed_ground(m);
  const Statevector psi = ed_to_statevector(ed);
  const double e_fine = trotter_phase_energy(g, 2, psi, 1e-4);
  CHECK(std::abs(e_fine - ed.e0) < 1e-5);
}
