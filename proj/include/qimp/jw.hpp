#pragma once

#include <vector>

#include "qimp/model.hpp"
#include "qimp/pauli.hpp"

namespace qimp {

// Jordan-Wigner mapping with qubit 0 as the least significant bit and one
// qubit per spin-orbital (mode index = qubit index):
//   c_j   = Z_0 ... Z_{j-1} (X_j + i Y_j)/2
//   c†_j  = Z_0 ... Z_{j-1} (X_j - i Y_j)/2
PauliSum jw_annihilator(int mode);
PauliSum jw_creator(int mode);

// The Hermitian unitaries measured by the interference circuit:
//   q1 = c + c† = Z...Z X,   q2 = i(c - c†) = -Z...Z Y.
// Returned as (unit coefficient, string).
std::pair<cplx, PauliString> jw_q1(int mode);
std::pair<cplx, PauliString> jw_q2(int mode);

// Qubit operator of one fermionic term / of the full Hamiltonian.
PauliSum jw_term(const FermionTerm& t);
std::vector<QubitTerm> jordan_wigner(const ImpurityModel& m);

// Trotter grouping of the mapped Hamiltonian. Diagonal (Z-only) strings
// form one mutually-commuting group; each hopping pair becomes a
// number-conserving two-string group handled by a single Givens-style
// kernel; anything else falls back to one group per Pauli string.
struct DiagTerms {
  double constant = 0.0;
  std::vector<std::pair<double, basis_t>> zs; // (coefficient, Z mask)
  int n_level_terms = 0;   // R-gate terms for tallies
  int n_density_terms = 0; // CNOT+R circuit terms for tallies
};

struct HopTerm {
  int p = 0, q = 0;        // qubit pair, p < q
  basis_t string_mask = 0; // JW Z-string strictly between p and q
  cplx h;               // <0_p 1_q| H |1_p 0_q> at even string parity
  std::vector<QubitTerm> strings;
};

struct TermGroups {
  int n_qubits = 0;
  DiagTerms diag;
  std::vector<HopTerm> hops;
  std::vector<QubitTerm> generic; // one group per string, real coefficients

  std::size_t group_count() const {
    return 1 + hops.size() + generic.size();
  }
  std::vector<QubitTerm> all_terms() const;
};

TermGroups build_term_groups(const ImpurityModel& m);

// Sum of |coefficient| over all mapped terms; sets the default time step.
double coefficient_max(const TermGroups& g);

} // namespace qimp
