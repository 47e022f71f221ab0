#include "qimp/statevector.hpp"

#include <cmath>

namespace qimp {

namespace {
constexpr double kSqrtHalf = 0.70710678118654752440;
}

const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::S: return "S";
    case GateKind::Z: return "Z";
    case GateKind::R: return "R";
    case GateKind::CNOT: return "CNOT";
    default: return "?";
  }
}

std::array<cplx, 4> Gate::matrix() const {
  switch (kind) {
    case GateKind::H:
      return {kSqrtHalf, kSqrtHalf, kSqrtHalf, -kSqrtHalf};
    case GateKind::X:
      return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y:
      // Basis-change gate (1 + iX)/sqrt(2), not the Pauli matrix.
      return {kSqrtHalf, I_UNIT * kSqrtHalf, I_UNIT * kSqrtHalf, kSqrtHalf};
    case GateKind::S:
      return {1.0, 0.0, 0.0, I_UNIT};
    case GateKind::Z:
      return {1.0, 0.0, 0.0, -1.0};
    case GateKind::R:
      return {1.0, 0.0, 0.0, std::polar(1.0, theta)};
    default:
      throw std::logic_error("matrix() called on CNOT");
  }
}

Statevector::Statevector(int n_qubits, basis_t basis_state) : nq_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 28)
    throw std::invalid_argument("statevector: unsupported qubit count");
  amp_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  if (basis_state >= amp_.size())
    throw std::invalid_argument("statevector: basis state out of range");
  amp_[basis_state] = 1.0;
}

void Statevector::check_qubit(int q) const {
  if (q < 0 || q >= nq_) throw std::out_of_range("qubit index out of range");
}

double Statevector::norm_sq() const {
  double s = 0.0;
  for (const cplx& a : amp_) s += std::norm(a);
  return s;
}

void Statevector::normalize() {
  const double n = std::sqrt(norm_sq());
  if (n <= 0.0) throw std::runtime_error("cannot normalize zero vector");
  const double inv = 1.0 / n;
  for (cplx& a : amp_) a *= inv;
}

void Statevector::apply(const Gate& g, GateTally& tally) {
  check_qubit(g.target);
  if (g.control >= 0) {
    check_qubit(g.control);
    if (g.control == g.target)
      throw std::invalid_argument("gate control equals target");
  }
  if (g.kind == GateKind::CNOT) {
    check_qubit(g.cnot_control);
    if (g.cnot_control == g.target)
      throw std::invalid_argument("CNOT control equals target");
    if (g.control == g.cnot_control)
      throw std::invalid_argument("duplicate control qubit");
    apply_cnot(g.cnot_control, g.target, g.control);
  } else {
    apply_single(g.matrix(), g.target, g.control);
  }
  tally.add(g.kind);
}

void Statevector::apply_single(const std::array<cplx, 4>& u, int t, int c) {
  const basis_t tbit = basis_t{1} << t;
  const basis_t cbit = c >= 0 ? (basis_t{1} << c) : 0;
  const basis_t dim = amp_.size();
  const bool diagonal = (u[1] == cplx{0.0, 0.0} && u[2] == cplx{0.0, 0.0});
  cplx* a = amp_.data();
  if (diagonal) {
    const cplx d0 = u[0], d1 = u[3];
    if (d0 == cplx{1.0, 0.0}) {
      // Phase-type gate: touch only the |1> slice.
      for (basis_t b = tbit; b < dim; b = (b + 1) | tbit) {
        if (!cbit || (b & cbit)) a[b] *= d1;
      }
      return;
    }
    for (basis_t b = 0; b < dim; ++b) {
      if (cbit && !(b & cbit)) continue;
      a[b] *= (b & tbit) ? d1 : d0;
    }
    return;
  }
  for (basis_t b = 0; b < dim; ++b) {
    if (b & tbit) continue;
    if (cbit && !(b & cbit)) continue;
    const basis_t b1 = b | tbit;
    const cplx a0 = a[b], a1 = a[b1];
    a[b] = u[0] * a0 + u[1] * a1;
    a[b1] = u[2] * a0 + u[3] * a1;
  }
}

void Statevector::apply_cnot(int ctrl, int t, int c) {
  const basis_t kbit = basis_t{1} << ctrl;
  const basis_t tbit = basis_t{1} << t;
  const basis_t cbit = c >= 0 ? (basis_t{1} << c) : 0;
  const basis_t dim = amp_.size();
  cplx* a = amp_.data();
  for (basis_t b = 0; b < dim; ++b) {
    if (!(b & kbit) || (b & tbit)) continue;
    if (cbit && !(b & cbit)) continue;
    std::swap(a[b], a[b | tbit]);
  }
}

double Statevector::prob_one(int q) const {
  check_qubit(q);
  const basis_t qbit = basis_t{1} << q;
  double p = 0.0;
  for (basis_t b = 0; b < amp_.size(); ++b)
    if (b & qbit) p += std::norm(amp_[b]);
  return p;
}

double Statevector::expectation_z(int q) const { return 1.0 - 2.0 * prob_one(q); }

int Statevector::measure_qubit(int q, Rng& rng) {
  const double p1 = prob_one(q);
  const int outcome = rng.bernoulli(p1) ? 1 : 0;
  collapse_qubit(q, outcome);
  return outcome;
}

double Statevector::collapse_qubit(int q, int outcome) {
  check_qubit(q);
  const basis_t qbit = basis_t{1} << q;
  const double p1 = prob_one(q);
  const double p = outcome ? p1 : 1.0 - p1;
  if (p < 1e-300)
    throw std::runtime_error("collapse onto zero-probability outcome");
  const double inv = 1.0 / std::sqrt(p);
  for (basis_t b = 0; b < amp_.size(); ++b) {
    const bool hit = (b & qbit) != 0;
    if (hit == (outcome != 0))
      amp_[b] *= inv;
    else
      amp_[b] = 0.0;
  }
  return p;
}

Statevector Statevector::drop_qubit(int q, int known_outcome) const {
  check_qubit(q);
  Statevector out(nq_ - 1);
  const basis_t qbit = basis_t{1} << q;
  const basis_t low_mask = qbit - 1;
  for (basis_t b = 0; b < out.amp_.size(); ++b) {
    basis_t full = (b & low_mask) | ((b & ~low_mask) << 1);
    if (known_outcome) full |= qbit;
    out.amp_[b] = amp_[full];
  }
  return out;
}

cplx Statevector::inner_product(const Statevector& other) const {
  if (other.dim() != dim())
    throw std::invalid_argument("inner product: dimension mismatch");
  cplx s{0.0, 0.0};
  for (basis_t b = 0; b < amp_.size(); ++b)
    s += std::conj(amp_[b]) * other.amp_[b];
  return s;
}

} // namespace qimp
