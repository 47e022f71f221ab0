#include "qimp/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace qimp {

bool PauliString::is_diagonal() const {
  for (const auto& [q, p] : ops)
    if (p != Pauli::Z) return false;
  return true;
}

basis_t PauliString::z_mask() const {
  basis_t m = 0;
  for (const auto& [q, p] : ops)
    if (p == Pauli::Z) m |= basis_t{1} << q;
  return m;
}

int PauliString::max_qubit() const {
  return ops.empty() ? -1 : ops.back().first;
}

std::string PauliString::to_string() const {
  if (ops.empty()) return "I";
  std::ostringstream os;
  for (const auto& [q, p] : ops) os << "XYZ"[static_cast<int>(p) - 1] << q;
  return os.str();
}

std::pair<cplx, PauliString> multiply(const PauliString& a,
                                      const PauliString& b) {
  cplx phase{1.0, 0.0};
  PauliString out;
  out.ops.reserve(a.ops.size() + b.ops.size());
  auto ia = a.ops.begin();
  auto ib = b.ops.begin();
  while (ia != a.ops.end() && ib != b.ops.end()) {
    if (ia->first < ib->first) {
      out.ops.push_back(*ia++);
    } else if (ib->first < ia->first) {
      out.ops.push_back(*ib++);
    } else {
      const int pa = static_cast<int>(ia->second);
      const int pb = static_cast<int>(ib->second);
      if (pa == pb) {
        // P*P = I
      } else {
        const int pc = 6 - pa - pb;
        // XY=iZ, YZ=iX, ZX=iY; reversed order picks up -i.
        const bool cyclic = (pa == 1 && pb == 2) || (pa == 2 && pb == 3) ||
                            (pa == 3 && pb == 1);
        phase *= cyclic ? I_UNIT : -I_UNIT;
        out.ops.emplace_back(ia->first, static_cast<Pauli>(pc));
      }
      ++ia;
      ++ib;
    }
  }
  out.ops.insert(out.ops.end(), ia, a.ops.end());
  out.ops.insert(out.ops.end(), ib, b.ops.end());
  return {phase, std::move(out)};
}

void PauliSum::add(cplx coeff, PauliString s) {
  terms_.push_back({coeff, std::move(s)});
}

void PauliSum::add(const PauliSum& other, cplx scale) {
  for (const auto& t : other.terms_) terms_.push_back({t.coeff * scale, t.string});
}

PauliSum PauliSum::product(const PauliSum& a, const PauliSum& b) {
  PauliSum out;
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      auto [ph, s] = multiply(ta.string, tb.string);
      out.terms_.push_back({ta.coeff * tb.coeff * ph, std::move(s)});
    }
  }
  out.compress();
  return out;
}

void PauliSum::compress() {
  std::sort(terms_.begin(), terms_.end(),
            [](const QubitTerm& x, const QubitTerm& y) {
              return x.string < y.string;
            });
  std::vector<QubitTerm> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().string == t.string)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(t);
  }
  terms_ = std::move(merged);
}

std::vector<QubitTerm> PauliSum::terms(double drop_below) const {
  PauliSum tmp = *this;
  tmp.compress();
  std::vector<QubitTerm> out;
  for (const auto& t : tmp.terms_)
    if (std::abs(t.coeff) > drop_below) out.push_back(t);
  return out;
}

namespace {

struct PauliMasks {
  basis_t flip = 0;  // X and Y positions
  basis_t sign = 0;  // Y and Z positions contribute (-1)^bit
  int n_y = 0;
};

PauliMasks masks_of(const PauliString& s) {
  PauliMasks m;
  for (const auto& [q, p] : s.ops) {
    const basis_t bit = basis_t{1} << q;
    switch (p) {
      case Pauli::X: m.flip |= bit; break;
      case Pauli::Y: m.flip |= bit; m.sign |= bit; ++m.n_y; break;
      case Pauli::Z: m.sign |= bit; break;
    }
  }
  return m;
}

// Phase acquired by P acting on basis state b (before the bit flips):
// each Y gives i on |0> and -i on |1>, each Z gives (-1)^bit.
inline cplx basis_phase(const PauliMasks& m, basis_t b, cplx i_pow_ny) {
  const int par = std::popcount(b & m.sign) & 1;
  return par ? -i_pow_ny : i_pow_ny;
}

cplx i_power(int n) {
  switch (n & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

} // namespace

void apply_pauli(Statevector& state, const PauliString& s, cplx unit_coeff,
                 int control) {
  const PauliMasks m = masks_of(s);
  if (s.max_qubit() >= state.n_qubits())
    throw std::out_of_range("pauli string exceeds register");
  if (control >= 0 && (m.flip | m.sign) & (basis_t{1} << control))
    throw std::invalid_argument("pauli control overlaps string support");
  const cplx ipy = i_power(m.n_y) * unit_coeff;
  const basis_t cbit = control >= 0 ? basis_t{1} << control : 0;
  cplx* a = state.amplitudes().data();
  const basis_t dim = state.dim();
  if (m.flip == 0) {
    for (basis_t b = 0; b < dim; ++b) {
      if (cbit && !(b & cbit)) continue;
      a[b] *= basis_phase(m, b, ipy);
    }
    return;
  }
  const basis_t pick = m.flip & (~m.flip + 1); // lowest flip bit
  for (basis_t b = 0; b < dim; ++b) {
    if (b & pick) continue;
    if (cbit && !(b & cbit)) continue;
    const basis_t b2 = b ^ m.flip;
    const cplx v1 = a[b], v2 = a[b2];
    a[b2] = basis_phase(m, b, ipy) * v1;
    a[b] = basis_phase(m, b2, ipy) * v2;
  }
}

void tally_pauli_circuit(const PauliString& s, bool controlled,
                         GateTally& tally) {
  int k = 0;
  for (const auto& [q, p] : s.ops) {
    (void)q;
    if (p == Pauli::X) tally.add(GateKind::H, 2);
    if (p == Pauli::Y) tally.add(GateKind::Y, 2);
    ++k;
  }
  if (k > 1) tally.add(GateKind::CNOT, 2 * (k - 1));
  if (controlled) {
    tally.add(GateKind::H, 2);
    tally.add(GateKind::CNOT, 1);
    tally.add(GateKind::R, 1);
  } else if (k > 0) {
    tally.add(GateKind::Z, 1);
  }
}

cplx expectation_value(const Statevector& psi,
                       const std::vector<QubitTerm>& terms) {
  const cplx* a = psi.amplitudes().data();
  const basis_t dim = psi.dim();
  cplx total{0.0, 0.0};
  for (const auto& t : terms) {
    const PauliMasks m = masks_of(t.string);
    const cplx ipy = i_power(m.n_y);
    cplx acc{0.0, 0.0};
    for (basis_t b = 0; b < dim; ++b)
      acc += std::conj(a[b ^ m.flip]) * basis_phase(m, b, ipy) * a[b];
    total += t.coeff * acc;
  }
  return total;
}

Eigen::MatrixXcd dense_matrix(const std::vector<QubitTerm>& terms,
                              int n_qubits) {
  if (n_qubits > 12)
    throw std::invalid_argument("dense_matrix limited to 12 qubits");
  const basis_t dim = basis_t{1} << n_qubits;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms) {
    const PauliMasks m = masks_of(t.string);
    const cplx ipy = i_power(m.n_y);
    for (basis_t b = 0; b < dim; ++b)
      out(b ^ m.flip, b) += t.coeff * basis_phase(m, b, ipy);
  }
  return out;
}

} // namespace qimp
