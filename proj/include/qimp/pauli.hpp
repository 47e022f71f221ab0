#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qimp/statevector.hpp"
#include "qimp/types.hpp"

#include <Eigen/Dense>

namespace qimp {

enum class Pauli : std::uint8_t { X = 1, Y = 2, Z = 3 };

// Sparse Pauli word: (qubit, operator) pairs sorted by qubit index.
// Identity is the empty word.
struct PauliString {
  std::vector<std::pair<int, Pauli>> ops;

  bool is_identity() const { return ops.empty(); }
  bool is_diagonal() const;
  // Bitmask of qubits carrying Z (valid only for diagonal strings).
  basis_t z_mask() const;
  int max_qubit() const;
  std::string to_string() const;

  bool operator==(const PauliString& o) const { return ops == o.ops; }
  bool operator<(const PauliString& o) const { return ops < o.ops; }
};

// phase * result = a * b  (phase in {1, i, -1, -i}).
std::pair<cplx, PauliString> multiply(const PauliString& a,
                                      const PauliString& b);

struct QubitTerm {
  cplx coeff;
  PauliString string;
};

// Sum of Pauli terms; accumulates like terms and drops negligible ones.
class PauliSum {
 public:
  void add(cplx coeff, PauliString s);
  void add(const PauliSum& other, cplx scale = 1.0);
  // Multiply this sum by (coeff, string) monomial from the right.
  static PauliSum product(const PauliSum& a, const PauliSum& b);

  std::vector<QubitTerm> terms(double drop_below = 1e-14) const;

 private:
  std::vector<QubitTerm> terms_;
  void compress();
};

// |psi> <- c * P |psi>, |c| = 1. One pass over the amplitudes; when
// `control` >= 0 only the control's |1> slice is touched and the scalar c
// becomes a controlled phase.
void apply_pauli(Statevector& state, const PauliString& s, cplx unit_coeff,
                 int control = -1);

// Gate count of the circuit-level realization of a controlled Pauli string
// (CNOT ladder + controlled single-qubit core + phase), used for tallies.
void tally_pauli_circuit(const PauliString& s, bool controlled,
                         GateTally& tally);

// Dense matrix of a term sum on n qubits (test/oracle scale, n <= 12).
Eigen::MatrixXcd dense_matrix(const std::vector<QubitTerm>& terms,
                              int n_qubits);

// <psi| sum_k c_k P_k |psi> without mutating the state.
cplx expectation_value(const Statevector& psi,
                       const std::vector<QubitTerm>& terms);

} // namespace qimp
