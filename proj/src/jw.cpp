#include "qimp/jw.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qimp {

namespace {

PauliString z_string(int mode) {
  PauliString s;
  for (int k = 0; k < mode; ++k) s.ops.emplace_back(k, Pauli::Z);
  return s;
}

} // namespace

PauliSum jw_annihilator(int mode) {
  PauliSum sum;
  PauliString sx = z_string(mode);
  sx.ops.emplace_back(mode, Pauli::X);
  PauliString sy = z_string(mode);
  sy.ops.emplace_back(mode, Pauli::Y);
  sum.add(0.5, std::move(sx));
  sum.add(0.5 * I_UNIT, std::move(sy));
  return sum;
}

PauliSum jw_creator(int mode) {
  PauliSum sum;
  PauliString sx = z_string(mode);
  sx.ops.emplace_back(mode, Pauli::X);
  PauliString sy = z_string(mode);
  sy.ops.emplace_back(mode, Pauli::Y);
  sum.add(0.5, std::move(sx));
  sum.add(-0.5 * I_UNIT, std::move(sy));
  return sum;
}

std::pair<cplx, PauliString> jw_q1(int mode) {
  PauliString s = z_string(mode);
  s.ops.emplace_back(mode, Pauli::X);
  return {cplx{1.0, 0.0}, std::move(s)};
}

std::pair<cplx, PauliString> jw_q2(int mode) {
  PauliString s = z_string(mode);
  s.ops.emplace_back(mode, Pauli::Y);
  return {cplx{-1.0, 0.0}, std::move(s)};
}

PauliSum jw_term(const FermionTerm& t) {
  using K = FermionTerm::Kind;
  PauliSum out;
  switch (t.kind) {
    case K::Level: {
      // w n_p = w (1 - Z_p)/2
      PauliString zp;
      zp.ops.emplace_back(t.p, Pauli::Z);
      out.add(0.5 * t.coeff, PauliString{});
      out.add(-0.5 * t.coeff, std::move(zp));
      break;
    }
    case K::DensityDensity: {
      // w n_p n_q = w (1 - Z_p - Z_q + Z_p Z_q)/4
      PauliString zp, zq, zpq;
      zp.ops.emplace_back(t.p, Pauli::Z);
      zq.ops.emplace_back(t.q, Pauli::Z);
      zpq.ops.emplace_back(std::min(t.p, t.q), Pauli::Z);
      zpq.ops.emplace_back(std::max(t.p, t.q), Pauli::Z);
      out.add(0.25 * t.coeff, PauliString{});
      out.add(-0.25 * t.coeff, std::move(zp));
      out.add(-0.25 * t.coeff, std::move(zq));
      out.add(0.25 * t.coeff, std::move(zpq));
      break;
    }
    case K::Hop: {
      PauliSum prod = PauliSum::product(jw_creator(t.p), jw_annihilator(t.q));
      out.add(prod, t.coeff);
      break;
    }
    case K::Quartic: {
      PauliSum prod = PauliSum::product(
          PauliSum::product(jw_creator(t.p), jw_creator(t.q)),
          PauliSum::product(jw_annihilator(t.r), jw_annihilator(t.s)));
      out.add(prod, t.coeff);
      break;
    }
  }
  return out;
}

std::vector<QubitTerm> jordan_wigner(const ImpurityModel& m) {
  PauliSum sum;
  for (const auto& t : fermion_terms(m)) sum.add(jw_term(t));
  return sum.terms();
}

std::vector<QubitTerm> TermGroups::all_terms() const {
  PauliSum sum;
  sum.add(diag.constant, PauliString{});
  for (const auto& [c, mask] : diag.zs) {
    PauliString s;
    for (int q = 0; q < 64; ++q)
      if (mask & (basis_t{1} << q)) s.ops.emplace_back(q, Pauli::Z);
    sum.add(c, std::move(s));
  }
  for (const auto& h : hops)
    for (const auto& t : h.strings) sum.add(t.coeff, t.string);
  for (const auto& t : generic) sum.add(t.coeff, t.string);
  return sum.terms();
}

TermGroups build_term_groups(const ImpurityModel& m) {
  m.validate();
  TermGroups g;
  g.n_qubits = m.n_modes();

  const auto terms = fermion_terms(m);
  // Diagonal part: levels, density-density, and any diagonal strings from
  // quartic entries.
  std::map<basis_t, double> zacc;
  // Hopping pairs keyed by (min mode, max mode); directed partners merge.
  std::map<std::pair<int, int>, PauliSum> hop_acc;
  PauliSum generic_acc;

  for (const auto& t : terms) {
    using K = FermionTerm::Kind;
    if (t.kind == K::Hop) {
      hop_acc[{std::min(t.p, t.q), std::max(t.p, t.q)}].add(jw_term(t));
      continue;
    }
    PauliSum mapped = jw_term(t);
    for (const auto& qt : mapped.terms()) {
      if (qt.string.is_diagonal()) {
        if (std::abs(qt.coeff.imag()) > 1e-12)
          throw std::runtime_error("non-Hermitian diagonal term");
        zacc[qt.string.z_mask()] += qt.coeff.real();
      } else {
        generic_acc.add(qt.coeff, qt.string);
      }
    }
    if (t.kind == K::Level)
      ++g.diag.n_level_terms;
    else
      ++g.diag.n_density_terms;
  }

  for (auto& [key, sum] : hop_acc) {
    HopTerm hop;
    hop.p = key.first;
    hop.q = key.second;
    for (int k = hop.p + 1; k < hop.q; ++k)
      hop.string_mask |= basis_t{1} << k;
    hop.strings = sum.terms();
    // Reduced 2x2 block between |1_p 0_q> and |0_p 1_q> with the Z-string
    // evaluated at even parity; the group must be number conserving.
    std::vector<QubitTerm> reduced;
    for (const auto& t : hop.strings) {
      PauliString rs;
      for (const auto& [q, p] : t.string.ops) {
        if (q == hop.p)
          rs.ops.emplace_back(0, p);
        else if (q == hop.q)
          rs.ops.emplace_back(1, p);
        else if (p != Pauli::Z)
          throw std::runtime_error("hop group has off-pair X/Y support");
      }
      reduced.push_back({t.coeff, std::move(rs)});
    }
    Eigen::MatrixXcd blk = dense_matrix(reduced, 2);
    // basis order |00>,|10>,|01>,|11>; pair states are indices 1 and 2
    hop.h = blk(2, 1);
    blk(2, 1) = blk(1, 2) = 0.0;
    if (blk.norm() > 1e-12)
      throw std::runtime_error("hop group is not number conserving");
    g.hops.push_back(std::move(hop));
  }

  for (const auto& qt : generic_acc.terms()) {
    if (qt.string.is_diagonal()) {
      zacc[qt.string.z_mask()] += qt.coeff.real();
      continue;
    }
    if (std::abs(qt.coeff.imag()) > 1e-12)
      throw std::runtime_error("non-Hermitian generic term");
    g.generic.push_back(qt);
  }

  for (const auto& [mask, c] : zacc) {
    if (mask == 0)
      g.diag.constant += c;
    else if (std::abs(c) > 1e-15)
      g.diag.zs.push_back({c, mask});
  }
  return g;
}

double coefficient_max(const TermGroups& g) {
  double m = 0.0;
  for (const auto& [c, mask] : g.diag.zs) m = std::max(m, std::abs(c));
  for (const auto& h : g.hops) m = std::max(m, std::abs(h.h));
  for (const auto& t : g.generic) m = std::max(m, std::abs(t.coeff));
  return m;
}

} // namespace qimp
