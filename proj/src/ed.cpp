#include "qimp/ed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "qimp/rng.hpp"

namespace qimp {

namespace {

inline int fermi_sign(basis_t b, int mode) {
  const basis_t below = b & ((basis_t{1} << mode) - 1);
  return (std::popcount(below) & 1) ? -1 : 1;
}

// c_mode |b> -> (sign, b'); returns false if annihilated.
inline bool apply_c(basis_t& b, int mode, int& sign) {
  const basis_t bit = basis_t{1} << mode;
  if (!(b & bit)) return false;
  sign *= fermi_sign(b, mode);
  b ^= bit;
  return true;
}

inline bool apply_cdag(basis_t& b, int mode, int& sign) {
  const basis_t bit = basis_t{1} << mode;
  if (b & bit) return false;
  sign *= fermi_sign(b, mode);
  b ^= bit;
  return true;
}

} // namespace

std::ptrdiff_t SectorBasis::index_of(basis_t b) const {
  auto it = std::lower_bound(states.begin(), states.end(), b);
  if (it == states.end() || *it != b) return -1;
  return it - states.begin();
}

bool spin_conserved(const ImpurityModel& m) {
  auto spin_of = [&](int mode) { return m.spin[mode]; };
  for (const auto& t : fermion_terms(m)) {
    using K = FermionTerm::Kind;
    if (t.kind == K::Hop) {
      if (spin_of(t.p) != spin_of(t.q)) return false;
    } else if (t.kind == K::Quartic) {
      // spins created must match spins destroyed as multisets
      const int created = spin_of(t.p) + spin_of(t.q);
      const int destroyed = spin_of(t.r) + spin_of(t.s);
      if (created != destroyed) return false;
    }
  }
  return true;
}

SectorBasis make_sector(const ImpurityModel& m, int n_up, int n_down) {
  SectorBasis s;
  s.n_modes = m.n_modes();
  s.n_up = n_up;
  s.n_down = n_down;
  s.n_total = n_up + n_down;
  basis_t up_mask = 0;
  for (int i = 0; i < s.n_modes; ++i)
    if (m.spin[i] == 0) up_mask |= basis_t{1} << i;
  const basis_t dim = basis_t{1} << s.n_modes;
  for (basis_t b = 0; b < dim; ++b) {
    const int cu = std::popcount(b & up_mask);
    const int cd = std::popcount(b & ~up_mask & (dim - 1));
    if (cu == n_up && cd == n_down) s.states.push_back(b);
  }
  return s;
}

SectorBasis make_sector_total(const ImpurityModel& m, int n_total) {
  SectorBasis s;
  s.n_modes = m.n_modes();
  s.n_total = n_total;
  const basis_t dim = basis_t{1} << s.n_modes;
  for (basis_t b = 0; b < dim; ++b)
    if (std::popcount(b) == n_total) s.states.push_back(b);
  return s;
}

void SectorMatrix::multiply(const Eigen::VectorXcd& x,
                            Eigen::VectorXcd& y) const {
  y.setZero(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    cplx acc{0.0, 0.0};
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      acc += val[k] * x[col[k]];
    y[r] = acc;
  }
}

SectorMatrix sector_hamiltonian(const ImpurityModel& m, const SectorBasis& s) {
  const auto terms = fermion_terms(m);
  const std::size_t dim = s.dim();
  std::vector<std::map<std::size_t, cplx>> rows(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const basis_t b = s.states[j];
    for (const auto& t : terms) {
      using K = FermionTerm::Kind;
      if (t.kind == K::Level) {
        if (b & (basis_t{1} << t.p)) rows[j][j] += t.coeff;
      } else if (t.kind == K::DensityDensity) {
        if ((b & (basis_t{1} << t.p)) && (b & (basis_t{1} << t.q)))
          rows[j][j] += t.coeff;
      } else if (t.kind == K::Hop) {
        basis_t nb = b;
        int sign = 1;
        if (!apply_c(nb, t.q, sign)) continue;
        if (!apply_cdag(nb, t.p, sign)) continue;
        const auto i = s.index_of(nb);
        if (i < 0) continue;
        rows[static_cast<std::size_t>(i)][j] +=
            t.coeff * static_cast<double>(sign);
      } else {
        basis_t nb = b;
        int sign = 1;
        if (!apply_c(nb, t.s, sign)) continue;
        if (!apply_c(nb, t.r, sign)) continue;
        if (!apply_cdag(nb, t.q, sign)) continue;
        if (!apply_cdag(nb, t.p, sign)) continue;
        const auto i = s.index_of(nb);
        if (i < 0) continue;
        rows[static_cast<std::size_t>(i)][j] +=
            t.coeff * static_cast<double>(sign);
      }
    }
  }
  SectorMatrix out;
  out.dim = dim;
  out.row_ptr.assign(dim + 1, 0);
  for (std::size_t r = 0; r < dim; ++r)
    out.row_ptr[r + 1] = out.row_ptr[r] + rows[r].size();
  out.col.resize(out.row_ptr.back());
  out.val.resize(out.row_ptr.back());
  for (std::size_t r = 0; r < dim; ++r) {
    std::size_t k = out.row_ptr[r];
    for (const auto& [c, v] : rows[r]) {
      out.col[k] = c;
      out.val[k] = v;
      ++k;
    }
  }
  return out;
}

std::pair<double, Eigen::VectorXcd> lanczos_ground(const SectorMatrix& h,
                                                   std::uint64_t seed,
                                                   int max_iter, double tol) {
  const std::size_t n = h.dim;
  if (n == 0) throw std::invalid_argument("lanczos on empty sector");
  if (n == 1) {
    Eigen::VectorXcd v(1);
    v[0] = 1.0;
    Eigen::VectorXcd y;
    h.multiply(v, y);
    return {y[0].real(), v};
  }
  Rng rng(seed);
  Eigen::VectorXcd q(n);
  for (std::size_t i = 0; i < n; ++i)
    q[i] = cplx{rng.next_double() - 0.5, rng.next_double() - 0.5};
  q.normalize();
  std::vector<Eigen::VectorXcd> basis{q};
  std::vector<double> alpha, beta;
  Eigen::VectorXcd w(n);
  double prev_theta = 1e300;
  const int m_max = std::min<std::size_t>(max_iter, n);
  for (int it = 0; it < m_max; ++it) {
    h.multiply(basis[it], w);
    const double a = std::real(basis[it].dot(w));
    alpha.push_back(a);
    w -= a * basis[it];
    if (it > 0) w -= beta[it - 1] * basis[it - 1];
    for (const auto& v : basis) w -= v.dot(w) * v; // full reorthogonalization
    // tridiagonal eigenvalue via Eigen on the small matrix
    const int k = it + 1;
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const double theta = es.eigenvalues()[0];
    const double bnext = w.norm();
    // residual bound |H v - theta v| = b_k |s_k| for the Ritz pair
    const double resid = bnext * std::abs(es.eigenvectors()(k - 1, 0));
    const bool converged = resid < tol * (1.0 + std::abs(theta)) ||
                           bnext < 1e-13 || k == static_cast<int>(n);
    (void)prev_theta;
    if (converged) {
      Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(n);
      for (int i = 0; i < k; ++i)
        ground += es.eigenvectors()(i, 0) * basis[i];
      ground.normalize();
      return {theta, ground};
    }
    prev_theta = theta;
    beta.push_back(bnext);
    basis.push_back(w / bnext);
  }
  throw std::runtime_error("ed: lanczos did not converge");
}

EdSolution ed_ground(const ImpurityModel& m) {
  m.validate();
  if (m.n_modes() > 16)
    throw std::invalid_argument("ed limited to 16 spin-orbitals");
  const bool sz = spin_conserved(m);
  int up_modes = 0, dn_modes = 0;
  for (int i = 0; i < m.n_modes(); ++i)
    (m.spin[i] == 0 ? up_modes : dn_modes)++;

  struct Cand {
    double e;
    Eigen::VectorXcd v;
    SectorBasis s;
  };
  std::vector<Cand> cands;
  auto scan = [&](SectorBasis&& sec) {
    if (sec.dim() == 0) return;
    const SectorMatrix h = sector_hamiltonian(m, sec);
    auto [e, v] = lanczos_ground(h, derive_seed(12345, sec.n_up + 1,
                                                sec.n_down + 1, sec.n_total));
    cands.push_back({e, std::move(v), std::move(sec)});
  };
  if (sz) {
    for (int nu = 0; nu <= up_modes; ++nu)
      for (int nd = 0; nd <= dn_modes; ++nd) scan(make_sector(m, nu, nd));
  } else {
    for (int nt = 0; nt <= m.n_modes(); ++nt) scan(make_sector_total(m, nt));
  }
  auto best = std::min_element(
      cands.begin(), cands.end(),
      [](const Cand& a, const Cand& b) { return a.e < b.e; });

  EdSolution sol;
  sol.e0 = best->e;
  sol.ground = best->v;
  sol.sector = best->s;
  std::vector<double> all;
  for (const auto& c : cands) all.push_back(c.e);
  std::sort(all.begin(), all.end());
  sol.low_spectrum.assign(all.begin(),
                          all.begin() + std::min<std::size_t>(8, all.size()));
  sol.degeneracy = 0;
  for (double e : all)
    if (e < sol.e0 + 1e-10) ++sol.degeneracy;
  return sol;
}

RealTimeGF ed_greens(const EdSolution& sol, const ImpurityModel& m,
                     const TimeGrid& grid) {
  const bool sz = spin_conserved(m);
  RealTimeGF gf;
  gf.grid = grid;
  gf.n_so = m.n_so;
  gf.exact = true;
  gf.n_meas = 0;
  gf.resize();

  // Amplitude vectors <m|c†_a|0> and <m|c_a|0> per target sector.
  struct Target {
    SectorBasis sec;
    Eigen::VectorXd energies;
    Eigen::MatrixXcd vecs; // eigenvectors in columns
    std::vector<Eigen::VectorXcd> addc;  // per impurity orbital: c†_a |0>
    std::vector<Eigen::VectorXcd> remc;  // c_a |0>
    bool particle = false;
  };

  auto build_target = [&](int dup, int ddn, bool particle) -> Target {
    Target t;
    t.particle = particle;
    if (sz)
      t.sec = make_sector(m, sol.sector.n_up + dup, sol.sector.n_down + ddn);
    else
      t.sec = make_sector_total(m, sol.sector.n_total + dup + ddn);
    if (t.sec.dim() == 0) return t;
    const SectorMatrix h = sector_hamiltonian(m, t.sec);
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(t.sec.dim(), t.sec.dim());
    for (std::size_t r = 0; r < h.dim; ++r)
      for (std::size_t k = h.row_ptr[r]; k < h.row_ptr[r + 1]; ++k)
        dense(r, h.col[k]) = h.val[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
    t.energies = es.eigenvalues();
    t.vecs = es.eigenvectors();
    t.addc.assign(m.n_so, Eigen::VectorXcd::Zero(t.sec.dim()));
    t.remc.assign(m.n_so, Eigen::VectorXcd::Zero(t.sec.dim()));
    for (int a = 0; a < m.n_so; ++a) {
      for (std::size_t j = 0; j < sol.sector.dim(); ++j) {
        basis_t b = sol.sector.states[j];
        int sign = 1;
        basis_t nb = b;
        if (particle ? apply_cdag(nb, a, sign) : apply_c(nb, a, sign)) {
          const auto i = t.sec.index_of(nb);
          if (i >= 0)
            (particle ? t.addc : t.remc)[a][i] +=
                static_cast<double>(sign) * sol.ground[j];
        }
      }
    }
    return t;
  };

  // Collect targets per spin species (particle: +1 in that species).
  std::vector<Target> targets;
  if (sz) {
    for (int s = 0; s < 2; ++s) {
      const int dup = s == 0 ? 1 : 0, ddn = s == 0 ? 0 : 1;
      targets.push_back(build_target(dup, ddn, true));
      targets.push_back(build_target(-dup, -ddn, false));
    }
  } else {
    targets.push_back(build_target(1, 0, true));
    targets.push_back(build_target(-1, 0, false));
  }

  for (const auto& t : targets) {
    if (t.sec.dim() == 0) continue;
    // G^p_ab(t) = sum_m conj(A_a[m]) A_b[m] e^{i(E0-E_m)t}, A = <m|c†|0>
    // G^h_ab(t) = sum_m conj(B_a[m]) B_b[m] e^{i(E0-E_m)t}, B = <m|c|0>
    const auto& src = t.particle ? t.addc : t.remc;
    std::vector<Eigen::VectorXcd> amps(m.n_so);
    for (int a = 0; a < m.n_so; ++a) amps[a] = t.vecs.adjoint() * src[a];
    for (std::size_t ti = 0; ti < grid.points.size(); ++ti) {
      const double tt = grid.points[ti];
      for (int a = 0; a < m.n_so; ++a) {
        for (int b = 0; b < m.n_so; ++b) {
          if (amps[a].size() == 0) continue;
          cplx acc{0.0, 0.0};
          for (Eigen::Index mm = 0; mm < amps[a].size(); ++mm) {
            const cplx w = std::conj(amps[a][mm]) * amps[b][mm];
            if (std::norm(w) < 1e-30) continue;
            acc += w * std::polar(1.0, (sol.e0 - t.energies[mm]) * tt);
          }
          (t.particle ? gf.gp : gf.gh)[ti](a, b) += acc;
        }
      }
    }
  }
  return gf;
}

Statevector ed_to_statevector(const EdSolution& sol) {
  Statevector psi(sol.sector.n_modes);
  auto& amp = psi.amplitudes();
  std::fill(amp.begin(), amp.end(), cplx{0.0, 0.0});
  for (std::size_t j = 0; j < sol.sector.dim(); ++j)
    amp[sol.sector.states[j]] = sol.ground[j];
  return psi;
}

} // namespace qimp
