#include "qimp/qpe.hpp"

#include <cmath>

namespace qimp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925;
}

double QpeConfig::resolution() const {
  return kTwoPi / (tau * std::ldexp(1.0, bits));
}

void QpeConfig::validate() const {
  if (tau <= 0.0) throw std::invalid_argument("qpe: tau must be positive");
  if (bits < 1) throw std::invalid_argument("qpe: bits must be >= 1");
  if (window_width < 0.0)
    throw std::invalid_argument("qpe: window width must be >= 0");
  if (window_width > kTwoPi / tau + 1e-12)
    throw std::invalid_argument(
        "qpe: window width exceeds the non-aliased range 2*pi/tau");
}

Statevector with_ancilla(const Statevector& psi) {
  Statevector out(psi.n_qubits() + 1);
  auto& amp = out.amplitudes();
  std::fill(amp.begin(), amp.end(), cplx{0.0, 0.0});
  std::copy(psi.amplitudes().begin(), psi.amplitudes().end(), amp.begin());
  return out;
}

QpeResult qpe_measure_energy(Statevector& psi, const TermGroups& groups,
                             int order, double dt, const QpeConfig& cfg,
                             std::uint64_t seed, GateTally& tally) {
  cfg.validate();
  const int anc = psi.n_qubits();
  const int m = cfg.bits;
  Statevector work = with_ancilla(psi);
  TrotterStepper stepper(groups, order, anc);
  Rng rng(seed);

  double phase = 0.0; // accumulates measured bits of the binary fraction
  for (int j = m; j >= 1; --j) {
    work.apply(Gate::h(anc), tally);
    // controlled exp(-i H tau 2^{j-1})
    stepper.evolve_dt(work, cfg.tau * std::ldexp(1.0, j - 1), dt, tally);
    // cancel the already-measured lower bits of 2^{j-1} * phase
    const double tail = std::ldexp(phase, j - 1);
    const double fb = -kTwoPi * (tail - std::floor(tail));
    if (fb != 0.0) work.apply(Gate::r(anc, fb), tally);
    work.apply(Gate::h(anc), tally);
    const int bit = work.measure_qubit(anc, rng);
    if (bit) work.apply(Gate::x(anc), tally); // reset ancilla to |0>
    phase += std::ldexp(static_cast<double>(bit), -j);
  }
  psi = work.drop_qubit(anc, 0);

  // e^{-i E tau} = e^{2 pi i phase}: pick the alias closest to the window
  // center.
  const double base = -kTwoPi * phase / cfg.tau;
  const double period = kTwoPi / cfg.tau;
  const double k = std::round((cfg.window_center - base) / period);
  QpeResult r;
  r.phase = phase;
  r.energy = base + k * period;
  return r;
}

ProjectResult project_to_ground(Statevector& psi, const TermGroups& groups,
                                int order, double dt, const QpeConfig& cfg,
                                double e0, std::uint64_t seed,
                                GateTally& tally) {
  QpeResult r = qpe_measure_energy(psi, groups, order, dt, cfg, seed, tally);
  ProjectResult out;
  out.energy = r.energy;
  out.success = std::abs(r.energy - e0) < 0.5 * cfg.resolution();
  return out;
}

} // namespace qimp
