#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qimp/rng.hpp"
#include "qimp/types.hpp"

namespace qimp {

// Gate set used by the circuits: Hadamard, Paulis X/Z, the phase gate
// S = sqrt(Z), the phase rotation R(theta) = diag(1, e^{i theta}), the
// basis-change gate Y = (1 + iX)/sqrt(2), and CNOT. Any gate can carry an
// extra control qubit (control == -1 means uncontrolled).
enum class GateKind : int { H = 0, X, Y, S, Z, R, CNOT, kCount };

const char* gate_kind_name(GateKind k);

struct Gate {
  GateKind kind;
  int target = 0;
  int control = -1;      // extra control (for CNOT this is a second control)
  int cnot_control = -1; // CNOT's own control qubit
  double theta = 0.0;    // R only

  static Gate h(int t, int c = -1) { return {GateKind::H, t, c}; }
  static Gate x(int t, int c = -1) { return {GateKind::X, t, c}; }
  static Gate y(int t, int c = -1) { return {GateKind::Y, t, c}; }
  static Gate s(int t, int c = -1) { return {GateKind::S, t, c}; }
  static Gate z(int t, int c = -1) { return {GateKind::Z, t, c}; }
  static Gate r(int t, double th, int c = -1) {
    return {GateKind::R, t, c, -1, th};
  }
  static Gate cnot(int ctrl, int t, int c = -1) {
    return {GateKind::CNOT, t, c, ctrl};
  }

  // 2x2 matrix for single-qubit kinds (row-major). CNOT is handled apart.
  std::array<cplx, 4> matrix() const;
};

struct GateTally {
  std::array<std::uint64_t, static_cast<int>(GateKind::kCount)> counts{};
  std::uint64_t total = 0;

  void add(GateKind k, std::uint64_t n = 1) {
    counts[static_cast<int>(k)] += n;
    total += n;
  }
  GateTally& operator+=(const GateTally& o) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    total += o.total;
    return *this;
  }
};

// Dense statevector over n qubits; qubit 0 is the least significant bit of
// the basis-state index. Value semantics throughout.
class Statevector {
 public:
  explicit Statevector(int n_qubits, basis_t basis_state = 0);

  int n_qubits() const { return nq_; }
  std::size_t dim() const { return amp_.size(); }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  std::vector<cplx>& amplitudes() { return amp_; }
  cplx amplitude(basis_t b) const { return amp_[b]; }

  double norm_sq() const;
  void normalize();

  void apply(const Gate& g, GateTally& tally);
  void apply(const Gate& g) {
    GateTally scratch;
    apply(g, scratch);
  }

  // Probability that qubit q reads 1.
  double prob_one(int q) const;
  // <Z_q> without collapse.
  double expectation_z(int q) const;

  // Projective measurement of one qubit; collapses and renormalizes.
  int measure_qubit(int q, Rng& rng);
  // Forced collapse onto a given outcome; returns the outcome probability.
  // Throws if that probability is numerically zero.
  double collapse_qubit(int q, int outcome);

  // Extracts the register state given a known product structure on qubit q
  // (call only after q was measured/collapsed). The returned state has
  // n_qubits-1 qubits with q removed from the index.
  Statevector drop_qubit(int q, int known_outcome) const;

  cplx inner_product(const Statevector& other) const;

 private:
  void check_qubit(int q) const;
  void apply_single(const std::array<cplx, 4>& u, int t, int c);
  void apply_cnot(int ctrl, int t, int c);

  int nq_;
  std::vector<cplx> amp_;
};

} // namespace qimp
