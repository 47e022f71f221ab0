#pragma once

#include <cstdint>
#include <vector>

#include "qimp/matsubara.hpp"

namespace qimp {

// Discrete bath of one spin channel: levels eps_i with couplings v_i to the
// impurity orbital, plus the chemical potential. The full two-spin model is
// assembled by duplicating the channel.
struct BathParameters {
  std::vector<double> eps;
  std::vector<double> v;
  double mu = 0.0;

  int n_sites() const { return static_cast<int>(eps.size()); }
  // Delta(i w) = sum_i v_i^2 / (i w - eps_i)
  cplx hybridization(double omega_n) const;
  void canonicalize(); // sort by eps, gauge v >= 0
  // Project onto the particle-hole symmetric manifold: levels paired as
  // +-eps with equal weights, an odd level pinned at zero.
  void ph_symmetrize();
};

// (G0^discr)^{-1}(i w_n) = i w_n + mu - Delta(i w_n): exact evaluation of
// the discrete-bath non-interacting Green's function (scalar channel).
std::vector<cplx> g0_inverse_discrete(const BathParameters& bath,
                                      const MatsubaraGrid& grid);
std::vector<cplx> g0_discrete(const BathParameters& bath,
                              const MatsubaraGrid& grid);

// Cost: sum_n |target_inv(i w_n) - model_inv(i w_n)|^2 with uniform weights.
double bath_cost(const BathParameters& bath, const MatsubaraGrid& grid,
                 const std::vector<cplx>& target_g0_inverse);

struct BathFitResult {
  BathParameters bath;
  double residual = 0.0; // final cost value
  bool converged = true;
  int best_start = 0;
};

// Multi-start Levenberg-Marquardt on (eps_i, v_i) with analytic Jacobian;
// deterministic under the seed. `init` supplies mu and the primary start;
// extra starts are seeded perturbations plus sign/spread variants.
BathFitResult fit_bath(const std::vector<cplx>& target_g0_inverse,
                       const MatsubaraGrid& grid, int n_sites,
                       const BathParameters& init, std::uint64_t seed,
                       int n_starts = 8);

} // namespace qimp
