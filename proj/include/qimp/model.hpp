#pragma once

#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "qimp/types.hpp"

namespace qimp {

// Anderson impurity model: interacting impurity spin-orbitals coupled to a
// non-interacting bath,
//   H = sum_{ab} t_ab c†_a c_b + sum U_{abcd} c†_a c†_b c_c c_d
//     - mu sum_a n_a + sum_i eps_i d†_i d_i
//     + sum_{ai} (V_ai c†_a d_i + h.c.) + bath-bath hoppings (chain form).
//
// Mode layout: impurity spin-orbitals first (0 .. n_so-1), bath after.
// Spin tags alternate with index parity by default (even = up).
struct ImpurityModel {
  struct Uelem {
    int a, b, c, d;
    cplx v;
  };

  int n_so = 0;
  int n_b = 0;
  Eigen::MatrixXcd t;                              // n_so x n_so, Hermitian
  std::vector<Uelem> u;                            // sparse U tensor entries
  std::vector<double> eps;                         // bath on-site energies
  Eigen::MatrixXcd v;                              // n_so x n_b couplings
  std::vector<std::tuple<int, int, cplx>> bath_hop; // (i, j, w), bath indices
  double mu = 0.0;
  std::vector<int> spin;                           // per mode, 0=up 1=down

  int n_modes() const { return n_so + n_b; }
  void set_default_spins();
  void validate() const;

  // Quadratic one-body matrix over all modes, mu folded into the impurity
  // diagonal.
  Eigen::MatrixXcd one_body() const;

  // Hybridization function Delta(z) = V (z - H_bath)^{-1} V† evaluated at a
  // complex frequency; works for star and chain geometries alike.
  Eigen::MatrixXcd hybridization(cplx z) const;

  bool bath_is_star() const { return bath_hop.empty(); }
};

// Canonical fermionic term list of the Hamiltonian (levels, hops,
// density-density and general quartic entries); its length is the term
// count the gate-cost scaling is stated in.
struct FermionTerm {
  enum class Kind { Level, Hop, DensityDensity, Quartic };
  Kind kind;
  cplx coeff;
  int p = -1, q = -1, r = -1, s = -1;
};

std::vector<FermionTerm> fermion_terms(const ImpurityModel& m);

// Closed-form count of the canonical term list for the generated model
// families below: the sparse (Hubbard-type) structure keeps only
// density-density interactions on orbital pairs (2k, 2k+1) and
// spin-conserving bath couplings; dense_u fills every allowed entry.
std::int64_t count_terms(int n_so, int n_b, bool dense_u);

// Generic model generators matching count_terms (nonzero generic values).
ImpurityModel make_test_model(int n_so, int n_b, bool dense_u,
                              std::uint64_t seed);

// Single spinful impurity orbital with Hubbard U at chemical potential mu,
// bath levels eps_i each coupled to the matching spin with amplitude v_i.
// eps/v are per spin channel; the bath holds 2*eps.size() spin-orbitals.
ImpurityModel make_single_impurity(double u, double mu,
                                   const std::vector<double>& eps,
                                   const std::vector<double>& v);

struct KrylovBreakdown : std::runtime_error {
  int iteration;
  explicit KrylovBreakdown(int it)
      : std::runtime_error("krylov breakdown at iteration " +
                           std::to_string(it)),
        iteration(it) {}
};

// Maps a star-geometry bath onto one tridiagonal chain per impurity
// channel (Lanczos with full reorthogonalization). The single-particle
// spectrum of the quadratic part is preserved.
ImpurityModel star_to_chain(const ImpurityModel& m);

// Flat text model files: records `nso`, `nb`, `t a b re im`,
// `U a b c d re im`, `eps i value`, `V a i re im`, `tb i j re im`,
// `mu value`, `spin idx s`, comments with `#`.
ImpurityModel load_model(const std::string& path);
void save_model(const ImpurityModel& m, const std::string& path);
std::string model_to_string(const ImpurityModel& m);
ImpurityModel model_from_string(const std::string& text);

} // namespace qimp
