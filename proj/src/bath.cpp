#include "qimp/bath.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qimp/rng.hpp"

namespace qimp {

cplx BathParameters::hybridization(double omega_n) const {
  cplx acc{0.0, 0.0};
  for (int i = 0; i < n_sites(); ++i)
    acc += v[i] * v[i] / (cplx{0.0, omega_n} - eps[i]);
  return acc;
}

void BathParameters::canonicalize() {
  std::vector<int> idx(eps.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return eps[a] < eps[b]; });
  std::vector<double> e2(eps.size()), v2(eps.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    e2[i] = eps[idx[i]];
    v2[i] = std::abs(v[idx[i]]);
  }
  eps = std::move(e2);
  v = std::move(v2);
}

void BathParameters::ph_symmetrize() {
  canonicalize();
  const int n = n_sites();
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double e = 0.5 * (std::abs(eps[i]) + std::abs(eps[j]));
    const double w = std::sqrt(0.5 * (v[i] * v[i] + v[j] * v[j]));
    eps[i] = -e;
    eps[j] = e;
    v[i] = w;
    v[j] = w;
  }
  if (n % 2 == 1) eps[n / 2] = 0.0;
}

std::vector<cplx> g0_inverse_discrete(const BathParameters& bath,
                                      const MatsubaraGrid& grid) {
  std::vector<cplx> out(grid.omegas.size());
  for (std::size_t k = 0; k < grid.omegas.size(); ++k)
    out[k] = cplx{bath.mu, grid.omegas[k]} - bath.hybridization(grid.omegas[k]);
  return out;
}

std::vector<cplx> g0_discrete(const BathParameters& bath,
                              const MatsubaraGrid& grid) {
  auto inv = g0_inverse_discrete(bath, grid);
  for (auto& z : inv) z = 1.0 / z;
  return inv;
}

double bath_cost(const BathParameters& bath, const MatsubaraGrid& grid,
                 const std::vector<cplx>& target_g0_inverse) {
  const auto model = g0_inverse_discrete(bath, grid);
  double acc = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k)
    acc += std::norm(model[k] - target_g0_inverse[k]);
  return acc;
}

namespace {

// Residual vector (Re, Im stacked) and analytic Jacobian in (eps, v).
void residual_and_jacobian(const BathParameters& bath,
                           const MatsubaraGrid& grid,
                           const std::vector<cplx>& target,
                           Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
  const int nw = static_cast<int>(grid.omegas.size());
  const int nb = bath.n_sites();
  r.resize(2 * nw);
  if (jac) jac->resize(2 * nw, 2 * nb);
  for (int k = 0; k < nw; ++k) {
    const cplx iw{0.0, grid.omegas[k]};
    cplx delta{0.0, 0.0};
    for (int i = 0; i < nb; ++i) delta += bath.v[i] * bath.v[i] / (iw - bath.eps[i]);
    const cplx model = cplx{bath.mu, grid.omegas[k]} - delta;
    const cplx res = model - target[k];
    r[2 * k] = res.real();
    r[2 * k + 1] = res.imag();
    if (!jac) continue;
    for (int i = 0; i < nb; ++i) {
      const cplx d = iw - bath.eps[i];
      // d model / d eps_i = -v_i^2 / d^2 ; d model / d v_i = -2 v_i / d
      const cplx de = -bath.v[i] * bath.v[i] / (d * d);
      const cplx dv = -2.0 * bath.v[i] / d;
      (*jac)(2 * k, i) = de.real();
      (*jac)(2 * k + 1, i) = de.imag();
      (*jac)(2 * k, nb + i) = dv.real();
      (*jac)(2 * k + 1, nb + i) = dv.imag();
    }
  }
}

struct LmOutcome {
  BathParameters bath;
  double cost = 0.0;
  bool converged = false;
};

LmOutcome levenberg_marquardt(BathParameters bath, const MatsubaraGrid& grid,
                              const std::vector<cplx>& target,
                              int max_iter = 400) {
  const int nb = bath.n_sites();
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residual_and_jacobian(bath, grid, target, r, &jac);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  LmOutcome out;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    if (jtr.norm() < 1e-14 * (1.0 + std::sqrt(cost))) break;
    Eigen::MatrixXd damped = jtj;
    damped.diagonal().array() += lambda * (jtj.diagonal().array() + 1e-12);
    const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
    BathParameters trial = bath;
    for (int i = 0; i < nb; ++i) {
      trial.eps[i] += step[i];
      trial.v[i] += step[nb + i];
    }
    Eigen::VectorXd rt;
    residual_and_jacobian(trial, grid, target, rt, nullptr);
    const double trial_cost = rt.squaredNorm();
    if (trial_cost < cost) {
      bath = trial;
      cost = trial_cost;
      lambda = std::max(lambda * 0.3, 1e-12);
      residual_and_jacobian(bath, grid, target, r, &jac);
      if (cost < 1e-22) break;
    } else {
      lambda *= 2.5;
      if (lambda > 1e12) break;
    }
  }
  out.bath = bath;
  out.cost = cost;
  out.converged = lambda <= 1e12;
  return out;
}

} // namespace

BathFitResult fit_bath(const std::vector<cplx>& target_g0_inverse,
                       const MatsubaraGrid& grid, int n_sites,
                       const BathParameters& init, std::uint64_t seed,
                       int n_starts) {
  if (n_sites < 0) throw std::invalid_argument("fit_bath: n_sites < 0");
  BathFitResult best;
  if (n_sites == 0) {
    best.bath.mu = init.mu;
    best.residual = bath_cost(best.bath, grid, target_g0_inverse);
    return best;
  }

  std::vector<BathParameters> starts;
  // primary: the caller's bath, padded or truncated to n_sites
  {
    BathParameters s;
    s.mu = init.mu;
    s.eps = init.eps;
    s.v = init.v;
    while (s.n_sites() > n_sites) {
      s.eps.pop_back();
      s.v.pop_back();
    }
    int extra = 0;
    while (s.n_sites() < n_sites) {
      // pad with weakly coupled levels spread over the band
      s.eps.push_back(-2.0 + 4.0 * (extra + 0.5) / std::max(1, n_sites));
      s.v.push_back(1e-3);
      ++extra;
    }
    starts.push_back(s);
  }
  // uniform spread with equal weights
  {
    BathParameters s;
    s.mu = init.mu;
    for (int i = 0; i < n_sites; ++i) {
      s.eps.push_back(-1.8 + 3.6 * (i + 0.5) / n_sites);
      s.v.push_back(1.0 / std::sqrt(static_cast<double>(n_sites)));
    }
    starts.push_back(s);
  }
  // seeded perturbations of the primary start
  Rng rng(derive_seed(seed, seed_tag::bath_fit));
  while (static_cast<int>(starts.size()) < n_starts) {
    BathParameters s = starts[0];
    for (int i = 0; i < n_sites; ++i) {
      s.eps[i] += 0.5 * (rng.next_double() - 0.5) * (1.0 + std::abs(s.eps[i]));
      s.v[i] = std::abs(s.v[i] + 0.3 * (rng.next_double() - 0.5)) + 0.05;
    }
    starts.push_back(s);
  }

  bool first = true;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    LmOutcome o = levenberg_marquardt(starts[k], grid, target_g0_inverse);
    if (first || o.cost < best.residual) {
      best.bath = o.bath;
      best.residual = o.cost;
      best.converged = o.converged;
      best.best_start = static_cast<int>(k);
      first = false;
    }
  }
  best.bath.mu = init.mu;
  best.bath.canonicalize();
  // canonical gauge does not change the cost; keep the reported value
  return best;
}

} // namespace qimp
