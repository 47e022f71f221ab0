#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qimp/greens.hpp"

namespace qimp {

// Fictitious-temperature Matsubara grid, omega_n = pi(2n+1)/beta.
struct MatsubaraGrid {
  double beta = 20.0;
  int n_omega = 400;
  std::vector<double> omegas;

  static MatsubaraGrid make(double beta, int n_omega);
  void validate() const;
};

struct MatsubaraGF {
  MatsubaraGrid grid;
  int n_so = 0;
  std::vector<Eigen::MatrixXcd> values; // one matrix per frequency

  void resize();
  // causality and tail diagnostics
  bool causal_diagonal(double tol = 1e-9) const;
  double tail_deviation() const; // |i w G - 1| averaged over the last decade
};

// Quadrature weights: composite Simpson in u = log t (3/8 closure when the
// interval count is odd), mapped back with the Jacobian t.
std::vector<double> log_grid_weights(const TimeGrid& grid);

// G(i w_n) = -i * integral_e^inf dt e^{-t(eta+w_n)} [G^p(t) + conj(G^h(t))],
// discretized on the log grid; the [0, t_min) sliver enters as a rectangle.
// eta = 0 is allowed here.
struct HilbertResult {
  MatsubaraGF gf;
  double truncation_estimate = 0.0; // bound on the dropped t > T tail at w_0
  bool grid_adequate = true;        // e^{-w_0 T} below 1e-6
};
HilbertResult hilbert_to_matsubara(const RealTimeGF& gf,
                                   const MatsubaraGrid& grid, double eta);

// A(w) = -2 Im G(w) from the same time data with exp(i w t - eta t)
// kernels; eta must be positive on the real axis.
struct SpectralFunction {
  std::vector<double> omega;
  Eigen::MatrixXd a; // n_so rows, one per orbital diagonal
  double eta = 0.0;

  double value_at(int orbital, double w) const; // nearest grid point
};
SpectralFunction spectral_function(const RealTimeGF& gf,
                                   const std::vector<double>& omega_grid,
                                   double eta);

// TSV: `iw ReG ImG` per orbital block / `omega A` per orbital block.
std::string matsubara_to_tsv(const MatsubaraGF& gf);
MatsubaraGF matsubara_from_tsv(const std::string& text);
void save_matsubara(const MatsubaraGF& gf, const std::string& path);
MatsubaraGF load_matsubara(const std::string& path);
std::string spectral_to_tsv(const SpectralFunction& aw);
void save_spectral(const SpectralFunction& aw, const std::string& path);

} // namespace qimp
