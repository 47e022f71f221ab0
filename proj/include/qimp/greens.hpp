#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qimp/types.hpp"

namespace qimp {

// Logarithmic measurement grid t_i = eps * exp(log(T/eps) * i/(N-1)).
struct TimeGrid {
  double t_min = 1e-5;
  double t_max = 40.0;
  int n = 1000;
  std::vector<double> points;

  static TimeGrid logarithmic(double t_min, double t_max, int n);
  void validate() const;
};

// Sampled particle/hole Green's functions G^p_ab(t) = <c_a(t) c†_b>,
// G^h_ab(t) = <c†_a(t) c_b> on the grid, with shot-statistics metadata.
struct RealTimeGF {
  TimeGrid grid;
  int n_so = 0;
  std::vector<Eigen::MatrixXcd> gp; // one n_so x n_so matrix per grid point
  std::vector<Eigen::MatrixXcd> gh;
  int n_meas = 0;     // bits per (time, channel); 0 for the exact estimator
  bool exact = true;
  std::uint64_t total_bits = 0; // accepted ancilla measurements

  void resize();
};

// TSV: t alpha beta ReGp ImGp ReGh ImGh n_meas
std::string greens_rt_to_tsv(const RealTimeGF& gf);
RealTimeGF greens_rt_from_tsv(const std::string& text);
void save_greens_rt(const RealTimeGF& gf, const std::string& path);
RealTimeGF load_greens_rt(const std::string& path);

} // namespace qimp
