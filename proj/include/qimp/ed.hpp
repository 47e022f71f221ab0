#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qimp/greens.hpp"
#include "qimp/model.hpp"
#include "qimp/statevector.hpp"

namespace qimp {

// Occupation-number basis of one (N_up, N_down) block (or total-N block
// when spin is not conserved). Same bit convention as the simulator:
// mode j is bit j, c_j carries the sign (-1)^{sum_{k<j} n_k}.
struct SectorBasis {
  int n_modes = 0;
  int n_up = -1, n_down = -1; // -1 when only total N is resolved
  int n_total = 0;
  std::vector<basis_t> states; // sorted

  std::size_t dim() const { return states.size(); }
  std::ptrdiff_t index_of(basis_t b) const; // -1 if absent
};

struct EdSolution {
  double e0 = 0.0;
  Eigen::VectorXcd ground; // in the sector basis
  SectorBasis sector;
  int degeneracy = 1;                // states within 1e-10 of e0, all sectors
  std::vector<double> low_spectrum;  // few lowest energies across sectors
};

bool spin_conserved(const ImpurityModel& m);

SectorBasis make_sector(const ImpurityModel& m, int n_up, int n_down);
SectorBasis make_sector_total(const ImpurityModel& m, int n_total);

// Sparse sector Hamiltonian as row-compressed triplets.
struct SectorMatrix {
  std::size_t dim = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col;
  std::vector<cplx> val;
  void multiply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;
};
SectorMatrix sector_hamiltonian(const ImpurityModel& m, const SectorBasis& s);

// Lowest eigenpair by Lanczos with full reorthogonalization.
std::pair<double, Eigen::VectorXcd> lanczos_ground(const SectorMatrix& h,
                                                   std::uint64_t seed,
                                                   int max_iter = 250,
                                                   double tol = 1e-12);

// Ground state over all number (and S_z) sectors.
EdSolution ed_ground(const ImpurityModel& m);

// Exact real-time Green's functions from the spectral representation; all
// excited states reachable by one c/c† from the ground sector enter.
RealTimeGF ed_greens(const EdSolution& sol, const ImpurityModel& m,
                     const TimeGrid& grid);

// Ground vector embedded in the full 2^n register (for overlap checks).
Statevector ed_to_statevector(const EdSolution& sol);

} // namespace qimp
