#pragma once

// Dense Fock-space reference implementations for tests: ladder operators
// built by direct bit enumeration, independent of the qubit mapping and of
// the sector solver.

#include <Eigen/Dense>
#include <bit>
#include <complex>
#include <vector>

#include "qimp/model.hpp"
#include "qimp/statevector.hpp"

namespace oracle {

using qimp::basis_t;
using qimp::cplx;

inline Eigen::MatrixXcd op_annihilate(int n_modes, int mode) {
  const basis_t dim = basis_t{1} << n_modes;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const basis_t bit = basis_t{1} << mode;
  for (basis_t b = 0; b < dim; ++b) {
    if (!(b & bit)) continue;
    const int sgn = (std::popcount(b & (bit - 1)) & 1) ? -1 : 1;
    m(b ^ bit, b) = static_cast<double>(sgn);
  }
  return m;
}

inline Eigen::MatrixXcd op_create(int n_modes, int mode) {
  return op_annihilate(n_modes, mode).adjoint();
}

inline Eigen::MatrixXcd op_number(int n_modes, int mode) {
  return op_create(n_modes, mode) * op_annihilate(n_modes, mode);
}

inline Eigen::MatrixXcd dense_hamiltonian(const qimp::ImpurityModel& m) {
  const int n = m.n_modes();
  const basis_t dim = basis_t{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const Eigen::MatrixXcd hb = m.one_body();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (std::abs(hb(p, q)) > 1e-300)
        h += hb(p, q) * op_create(n, p) * op_annihilate(n, q);
  for (const auto& e : m.u)
    h += e.v * op_create(n, e.a) * op_create(n, e.b) * op_annihilate(n, e.c) *
         op_annihilate(n, e.d);
  return h;
}

// exp(-i H t) v through the eigendecomposition.
inline Eigen::VectorXcd dense_evolve(const Eigen::MatrixXcd& h,
                                     const Eigen::VectorXcd& v, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd w = es.eigenvectors().adjoint() * v;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w[i] *= std::polar(1.0, -es.eigenvalues()[i] * t);
  return es.eigenvectors() * w;
}

inline Eigen::VectorXcd to_vector(const qimp::Statevector& psi) {
  Eigen::VectorXcd v(psi.dim());
  for (std::size_t i = 0; i < psi.dim(); ++i) v[i] = psi.amplitudes()[i];
  return v;
}

inline qimp::Statevector from_vector(const Eigen::VectorXcd& v, int n_qubits) {
  qimp::Statevector psi(n_qubits);
  for (Eigen::Index i = 0; i < v.size(); ++i) psi.amplitudes()[i] = v[i];
  return psi;
}

} // namespace oracle
