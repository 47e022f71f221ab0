#include "qimp/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qimp/rng.hpp"

namespace qimp {

void ImpurityModel::set_default_spins() {
  spin.resize(n_modes());
  for (int a = 0; a < n_so; ++a) spin[a] = a % 2;
  for (int i = 0; i < n_b; ++i) spin[n_so + i] = i % 2;
}

void ImpurityModel::validate() const {
  if (n_so < 1) throw std::invalid_argument("model: n_so must be >= 1");
  if (n_b < 0) throw std::invalid_argument("model: n_b must be >= 0");
  if (t.rows() != n_so || t.cols() != n_so)
    throw std::invalid_argument("model: t must be n_so x n_so");
  if ((t - t.adjoint()).norm() > 1e-10 * (1.0 + t.norm()))
    throw std::invalid_argument("model: t is not Hermitian");
  if (static_cast<int>(eps.size()) != n_b)
    throw std::invalid_argument("model: eps size mismatch");
  if (v.rows() != n_so || v.cols() != n_b)
    throw std::invalid_argument("model: V must be n_so x n_b");
  if (static_cast<int>(spin.size()) != n_modes())
    throw std::invalid_argument("model: spin tags missing");
  for (const auto& e : u) {
    for (int idx : {e.a, e.b, e.c, e.d})
      if (idx < 0 || idx >= n_so)
        throw std::invalid_argument("model: U index out of range");
  }
  for (const auto& [i, j, w] : bath_hop) {
    (void)w;
    if (i < 0 || j < 0 || i >= n_b || j >= n_b || i == j)
      throw std::invalid_argument("model: bath hopping index invalid");
  }
}

Eigen::MatrixXcd ImpurityModel::one_body() const {
  const int n = n_modes();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  h.topLeftCorner(n_so, n_so) = t;
  for (int a = 0; a < n_so; ++a) h(a, a) -= mu;
  for (int i = 0; i < n_b; ++i) h(n_so + i, n_so + i) = eps[i];
  h.topRightCorner(n_so, n_b) = v;
  h.bottomLeftCorner(n_b, n_so) = v.adjoint();
  for (const auto& [i, j, w] : bath_hop) {
    h(n_so + i, n_so + j) += w;
    h(n_so + j, n_so + i) += std::conj(w);
  }
  return h;
}

Eigen::MatrixXcd ImpurityModel::hybridization(cplx z) const {
  Eigen::MatrixXcd hb = Eigen::MatrixXcd::Zero(n_b, n_b);
  for (int i = 0; i < n_b; ++i) hb(i, i) = eps[i];
  for (const auto& [i, j, w] : bath_hop) {
    hb(i, j) += w;
    hb(j, i) += std::conj(w);
  }
  Eigen::MatrixXcd res =
      (z * Eigen::MatrixXcd::Identity(n_b, n_b) - hb).partialPivLu().solve(
          v.adjoint());
  return v * res;
}

std::vector<FermionTerm> fermion_terms(const ImpurityModel& m) {
  std::vector<FermionTerm> out;
  const double tol = 1e-15;
  // Impurity one-body with mu folded into the diagonal. Off-diagonal
  // entries are counted directionally, like the coupling terms.
  for (int a = 0; a < m.n_so; ++a) {
    for (int b = 0; b < m.n_so; ++b) {
      cplx w = m.t(a, b);
      if (a == b) w -= m.mu;
      if (std::abs(w) <= tol) continue;
      if (a == b)
        out.push_back({FermionTerm::Kind::Level, w, a, a});
      else
        out.push_back({FermionTerm::Kind::Hop, w, a, b});
    }
  }
  for (const auto& e : m.u) {
    if (std::abs(e.v) <= tol) continue;
    if (e.a == e.d && e.b == e.c && e.a != e.b) {
      // c†_a c†_b c_b c_a = n_a n_b
      out.push_back({FermionTerm::Kind::DensityDensity, e.v, e.a, e.b});
    } else {
      out.push_back({FermionTerm::Kind::Quartic, e.v, e.a, e.b, e.c, e.d});
    }
  }
  // Bath couplings count as two directed terms (V c†d plus conjugate).
  for (int a = 0; a < m.n_so; ++a)
    for (int i = 0; i < m.n_b; ++i)
      if (std::abs(m.v(a, i)) > tol) {
        out.push_back(
            {FermionTerm::Kind::Hop, m.v(a, i), a, m.n_so + i, -1, -1});
        out.push_back({FermionTerm::Kind::Hop, std::conj(m.v(a, i)),
                       m.n_so + i, a, -1, -1});
      }
  for (int i = 0; i < m.n_b; ++i)
    if (std::abs(m.eps[i]) > tol)
      out.push_back({FermionTerm::Kind::Level, m.eps[i], m.n_so + i,
                     m.n_so + i});
  for (const auto& [i, j, w] : m.bath_hop)
    if (std::abs(w) > tol) {
      out.push_back({FermionTerm::Kind::Hop, w, m.n_so + i, m.n_so + j});
      out.push_back(
          {FermionTerm::Kind::Hop, std::conj(w), m.n_so + j, m.n_so + i});
    }
  return out;
}

std::int64_t count_terms(int n_so, int n_b, bool dense_u) {
  if (n_so < 1 || n_b < 0) throw std::invalid_argument("count_terms: bad sizes");
  const std::int64_t nso = n_so, nb = n_b;
  if (dense_u) {
    // All one-body entries, all operator-nonvanishing U entries (a != b,
    // c != d), dense couplings counted directionally, bath levels.
    return nso * nso + (nso * (nso - 1)) * (nso * (nso - 1)) +
           2 * nso * nb + nb;
  }
  // Hubbard structure: impurity levels, one density-density term per
  // orbital pair, spin-conserving couplings (two directed terms each),
  // bath levels.
  return nso + nso / 2 + 3 * nb;
}

ImpurityModel make_test_model(int n_so, int n_b, bool dense_u,
                              std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xA11));
  auto rnd = [&rng](double lo, double hi) {
    return lo + (hi - lo) * rng.next_double();
  };
  ImpurityModel m;
  m.n_so = n_so;
  m.n_b = n_b;
  m.t = Eigen::MatrixXcd::Zero(n_so, n_so);
  m.v = Eigen::MatrixXcd::Zero(n_so, n_b);
  m.eps.resize(n_b);
  m.mu = rnd(0.5, 1.5);
  for (int i = 0; i < n_b; ++i)
    m.eps[i] = rnd(0.2, 2.0) * (i % 2 ? 1.0 : -1.0);
  if (dense_u) {
    for (int a = 0; a < n_so; ++a) {
      m.t(a, a) = rnd(-1.0, 1.0);
      for (int b = a + 1; b < n_so; ++b) {
        const cplx w{rnd(-1.0, 1.0), rnd(-1.0, 1.0)};
        m.t(a, b) = w;
        m.t(b, a) = std::conj(w);
      }
    }
    for (int a = 0; a < n_so; ++a)
      for (int b = 0; b < n_so; ++b)
        if (a != b)
          for (int c = 0; c < n_so; ++c)
            for (int d = 0; d < n_so; ++d)
              if (c != d) {
                // Hermitian tensor: pair (a,b,c,d) with (d,c,b,a).
                if (std::make_tuple(a, b, c, d) <
                    std::make_tuple(d, c, b, a)) {
                  const cplx w{rnd(-0.5, 0.5), rnd(-0.5, 0.5)};
                  m.u.push_back({a, b, c, d, w});
                  m.u.push_back({d, c, b, a, std::conj(w)});
                } else if (std::make_tuple(a, b, c, d) ==
                           std::make_tuple(d, c, b, a)) {
                  m.u.push_back({a, b, c, d, cplx{rnd(-0.5, 0.5), 0.0}});
                }
              }
    for (int a = 0; a < n_so; ++a)
      for (int i = 0; i < n_b; ++i)
        m.v(a, i) = cplx{rnd(-0.8, 0.8), rnd(-0.3, 0.3)};
  } else {
    // Hubbard family: diagonal impurity handled by mu alone, one U per
    // orbital (spin-orbital pair 2k, 2k+1), round-robin spin-conserving V.
    for (int k = 0; 2 * k + 1 < n_so; ++k)
      m.u.push_back({2 * k, 2 * k + 1, 2 * k + 1, 2 * k, cplx{rnd(1.0, 8.0), 0.0}});
    for (int i = 0; i < n_b; ++i) {
      // Bath spin-orbital i couples to one impurity spin-orbital of the
      // same spin, cycling through matching orbitals.
      int target = 0;
      if (n_so > 1) {
        std::vector<int> match;
        for (int a = 0; a < n_so; ++a)
          if (a % 2 == i % 2) match.push_back(a);
        target = match[(i / 2) % match.size()];
      }
      m.v(target, i) = rnd(0.2, 0.8);
    }
  }
  m.set_default_spins();
  m.validate();
  return m;
}

ImpurityModel make_single_impurity(double u, double mu,
                                   const std::vector<double>& eps,
                                   const std::vector<double>& v) {
  if (eps.size() != v.size())
    throw std::invalid_argument("make_single_impurity: eps/v size mismatch");
  ImpurityModel m;
  m.n_so = 2;
  m.n_b = 2 * static_cast<int>(eps.size());
  m.t = Eigen::MatrixXcd::Zero(2, 2);
  m.v = Eigen::MatrixXcd::Zero(2, m.n_b);
  m.eps.resize(m.n_b);
  m.mu = mu;
  if (u != 0.0) m.u.push_back({0, 1, 1, 0, cplx{u, 0.0}});
  for (std::size_t k = 0; k < eps.size(); ++k) {
    // Bath site k appears as spin-orbital pair (2k: up, 2k+1: down).
    m.eps[2 * k] = eps[k];
    m.eps[2 * k + 1] = eps[k];
    m.v(0, 2 * k) = v[k];
    m.v(1, 2 * k + 1) = v[k];
  }
  m.set_default_spins();
  m.validate();
  return m;
}

ImpurityModel star_to_chain(const ImpurityModel& m) {
  m.validate();
  if (!m.bath_is_star()) return m; // already chain-mapped
  // Assign every bath mode to the unique impurity channel it couples to.
  std::vector<std::vector<int>> channel_sites(m.n_so);
  for (int i = 0; i < m.n_b; ++i) {
    int owner = -1;
    for (int a = 0; a < m.n_so; ++a) {
      if (std::abs(m.v(a, i)) > 1e-14) {
        if (owner >= 0)
          throw std::runtime_error(
              "star_to_chain: bath mode couples to several channels; block "
              "tridiagonalization not supported");
        owner = a;
      }
    }
    if (owner >= 0) channel_sites[owner].push_back(i);
  }

  ImpurityModel out;
  out.n_so = m.n_so;
  out.n_b = 0;
  out.t = m.t;
  out.u = m.u;
  out.mu = m.mu;
  std::vector<int> chain_spin;
  std::vector<double> chain_eps;
  std::vector<std::tuple<int, int, cplx>> chain_hop;
  std::vector<std::pair<int, double>> first_coupling; // (channel, b0)
  std::vector<int> chain_start;

  for (int a = 0; a < m.n_so; ++a) {
    const auto& sites = channel_sites[a];
    const int nb = static_cast<int>(sites.size());
    if (nb == 0) continue;
    Eigen::VectorXcd v0(nb);
    Eigen::VectorXd e(nb);
    for (int k = 0; k < nb; ++k) {
      v0[k] = m.v(a, sites[k]);
      e[k] = m.eps[sites[k]];
    }
    const double b0 = v0.norm();
    // Lanczos on diag(e) with start V/|V|, full reorthogonalization.
    std::vector<Eigen::VectorXcd> basis;
    basis.push_back(v0 / b0);
    std::vector<double> alpha, beta;
    for (int it = 0; it < nb; ++it) {
      Eigen::VectorXcd w = e.asDiagonal() * basis[it];
      const double ak = std::real(basis[it].dot(w));
      alpha.push_back(ak);
      w -= ak * basis[it];
      if (it > 0) w -= beta[it - 1] * basis[it - 1];
      for (const auto& q : basis) w -= q.dot(w) * q;
      if (it + 1 == nb) break;
      const double bk = w.norm();
      if (bk < 1e-12) throw KrylovBreakdown(it + 1);
      beta.push_back(bk);
      basis.push_back(w / bk);
    }
    const int start = static_cast<int>(chain_eps.size());
    chain_start.push_back(start);
    first_coupling.push_back({a, b0});
    for (int k = 0; k < nb; ++k) {
      chain_eps.push_back(alpha[k]);
      chain_spin.push_back(m.spin[a]);
      if (k > 0)
        chain_hop.push_back({start + k - 1, start + k, cplx{beta[k - 1], 0.0}});
    }
  }

  out.n_b = static_cast<int>(chain_eps.size());
  out.eps = chain_eps;
  out.v = Eigen::MatrixXcd::Zero(out.n_so, out.n_b);
  for (std::size_t c = 0; c < first_coupling.size(); ++c)
    out.v(first_coupling[c].first, chain_start[c]) = first_coupling[c].second;
  out.bath_hop = chain_hop;
  out.spin.resize(out.n_modes());
  for (int a = 0; a < out.n_so; ++a) out.spin[a] = m.spin[a];
  for (int i = 0; i < out.n_b; ++i) out.spin[out.n_so + i] = chain_spin[i];
  out.validate();
  return out;
}

namespace {

std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace

std::string model_to_string(const ImpurityModel& m) {
  std::ostringstream os;
  os << "# impurity model, energies in units of the lattice hopping\n";
  os << "nso " << m.n_so << "\n";
  os << "nb " << m.n_b << "\n";
  os << "mu " << fmt_g17(m.mu) << "\n";
  for (int a = 0; a < m.n_so; ++a)
    for (int b = 0; b < m.n_so; ++b)
      if (m.t(a, b) != cplx{0.0, 0.0})
        os << "t " << a << " " << b << " " << fmt_g17(m.t(a, b).real()) << " "
           << fmt_g17(m.t(a, b).imag()) << "\n";
  for (const auto& e : m.u)
    os << "U " << e.a << " " << e.b << " " << e.c << " " << e.d << " "
       << fmt_g17(e.v.real()) << " " << fmt_g17(e.v.imag()) << "\n";
  for (int i = 0; i < m.n_b; ++i)
    os << "eps " << i << " " << fmt_g17(m.eps[i]) << "\n";
  for (int a = 0; a < m.n_so; ++a)
    for (int i = 0; i < m.n_b; ++i)
      if (m.v(a, i) != cplx{0.0, 0.0})
        os << "V " << a << " " << i << " " << fmt_g17(m.v(a, i).real()) << " "
           << fmt_g17(m.v(a, i).imag()) << "\n";
  for (const auto& [i, j, w] : m.bath_hop)
    os << "tb " << i << " " << j << " " << fmt_g17(w.real()) << " "
       << fmt_g17(w.imag()) << "\n";
  for (std::size_t k = 0; k < m.spin.size(); ++k)
    os << "spin " << k << " " << m.spin[k] << "\n";
  return os.str();
}

ImpurityModel model_from_string(const std::string& text) {
  ImpurityModel m;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool have_nso = false, have_nb = false;
  std::vector<std::pair<int, int>> spin_records;
  struct Rec {
    std::string kind;
    std::vector<double> nums;
  };
  std::vector<Rec> recs;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    Rec r{kind, {}};
    double x;
    while (ls >> x) r.nums.push_back(x);
    if (!ls.eof()) {
      throw std::runtime_error("model parse error at line " +
                               std::to_string(lineno));
    }
    recs.push_back(std::move(r));
  }
  auto need = [&](const Rec& r, std::size_t n) {
    if (r.nums.size() != n)
      throw std::runtime_error("model record '" + r.kind +
                               "' has wrong field count");
  };
  for (const auto& r : recs) {
    if (r.kind == "nso") {
      need(r, 1);
      m.n_so = static_cast<int>(r.nums[0]);
      have_nso = true;
    } else if (r.kind == "nb") {
      need(r, 1);
      m.n_b = static_cast<int>(r.nums[0]);
      have_nb = true;
    }
  }
  if (!have_nso || !have_nb)
    throw std::runtime_error("model file must declare nso and nb");
  m.t = Eigen::MatrixXcd::Zero(m.n_so, m.n_so);
  m.v = Eigen::MatrixXcd::Zero(m.n_so, m.n_b);
  m.eps.assign(m.n_b, 0.0);
  for (const auto& r : recs) {
    if (r.kind == "nso" || r.kind == "nb") continue;
    if (r.kind == "mu") {
      need(r, 1);
      m.mu = r.nums[0];
    } else if (r.kind == "t") {
      need(r, 4);
      m.t(static_cast<int>(r.nums[0]), static_cast<int>(r.nums[1])) =
          cplx{r.nums[2], r.nums[3]};
    } else if (r.kind == "U") {
      need(r, 6);
      m.u.push_back({static_cast<int>(r.nums[0]), static_cast<int>(r.nums[1]),
                     static_cast<int>(r.nums[2]), static_cast<int>(r.nums[3]),
                     cplx{r.nums[4], r.nums[5]}});
    } else if (r.kind == "eps") {
      need(r, 2);
      m.eps.at(static_cast<int>(r.nums[0])) = r.nums[1];
    } else if (r.kind == "V") {
      need(r, 4);
      m.v(static_cast<int>(r.nums[0]), static_cast<int>(r.nums[1])) =
          cplx{r.nums[2], r.nums[3]};
    } else if (r.kind == "tb") {
      need(r, 4);
      m.bath_hop.push_back({static_cast<int>(r.nums[0]),
                            static_cast<int>(r.nums[1]),
                            cplx{r.nums[2], r.nums[3]}});
    } else if (r.kind == "spin") {
      need(r, 2);
      spin_records.push_back(
          {static_cast<int>(r.nums[0]), static_cast<int>(r.nums[1])});
    } else {
      throw std::runtime_error("unknown model record '" + r.kind + "'");
    }
  }
  m.set_default_spins();
  for (const auto& [idx, s] : spin_records) m.spin.at(idx) = s;
  m.validate();
  return m;
}

ImpurityModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open model file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return model_from_string(ss.str());
}

void save_model(const ImpurityModel& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write model file: " + path);
  f << model_to_string(m);
}

} // namespace qimp
