#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracle.hpp"
#include "qimp/jw.hpp"
#include "qimp/model.hpp"

using namespace qimp;

namespace {

ImpurityModel bare_model(int n_so, int n_b) {
  ImpurityModel m;
  m.n_so = n_so;
  m.n_b = n_b;
  m.t = Eigen::MatrixXcd::Zero(n_so, n_so);
  m.v = Eigen::MatrixXcd::Zero(n_so, n_b);
  m.eps.assign(n_b, 0.0);
  m.set_default_spins();
  return m;
}

Eigen::MatrixXcd jw_dense(const ImpurityModel& m) {
  return dense_matrix(jordan_wigner(m), m.n_modes());
}

} // namespace

TEST_CASE("jw of a number operator is (eps/2)(1 - Z)") {
  ImpurityModel m = bare_model(1, 0);
  const double eps = 1.7;
  m.t(0, 0) = eps;
  const auto terms = jordan_wigner(m);
  REQUIRE(terms.size() == 2);
  const Eigen::MatrixXcd h = jw_dense(m);
  Eigen::MatrixXcd want(2, 2);
  want << 0.0, 0.0, 0.0, eps;
  CHECK((h - want).norm() < 1e-14);
}

TEST_CASE("jw of an adjacent hop is (t/2)(XX + YY)") {
  ImpurityModel m = bare_model(2, 0);
  const double t = 0.8;
  m.t(0, 1) = t;
  m.t(1, 0) = t;
  const Eigen::MatrixXcd h = jw_dense(m);
  const Eigen::MatrixXcd want = oracle::dense_hamiltonian(m);
  CHECK((h - want).norm() < 1e-13);
  // explicit Pauli form
  std::vector<QubitTerm> xxyy;
  PauliString xx, yy;
  xx.ops = {{0, Pauli::X}, {1, Pauli::X}};
  yy.ops = {{0, Pauli::Y}, {1, Pauli::Y}};
  xxyy.push_back({cplx{t / 2, 0.0}, xx});
  xxyy.push_back({cplx{t / 2, 0.0}, yy});
  CHECK((h - dense_matrix(xxyy, 2)).norm() < 1e-13);
}

TEST_CASE("jw of a density-density term is (U/4)(1 - Z0 - Z1 + Z0Z1)") {
  ImpurityModel m = bare_model(2, 0);
  const double u = 3.0;
  m.u.push_back({0, 1, 1, 0, cplx{u, 0.0}});
  const Eigen::MatrixXcd h = jw_dense(m);
  const Eigen::MatrixXcd want = oracle::dense_hamiltonian(m);
  CHECK((h - want).norm() < 1e-13);
  CHECK(std::abs(h(3, 3) - cplx{u, 0.0}) < 1e-13); // only |11> pays U
  CHECK(h.cwiseAbs().sum() == doctest::Approx(u));
}

TEST_CASE("jw reproduces the dense Hamiltonian for generic models") {
  for (bool dense_u : {false, true}) {
    ImpurityModel m = make_test_model(3, 3, dense_u, 42);
    const Eigen::MatrixXcd h = jw_dense(m);
    const Eigen::MatrixXcd want = oracle::dense_hamiltonian(m);
    CHECK((h - want).norm() < 1e-11 * (1.0 + want.norm()));
    CHECK((h - h.adjoint()).norm() < 1e-11);
  }
}

TEST_CASE("jw ladder operators satisfy anticommutation relations") {
  const int n = 3;
  for (int p = 0; p < n; ++p) {
    const Eigen::MatrixXcd cp = dense_matrix(jw_annihilator(p).terms(), n);
    CHECK((cp - oracle::op_annihilate(n, p)).norm() < 1e-13);
    for (int q = 0; q < n; ++q) {
      const Eigen::MatrixXcd cqd = dense_matrix(jw_creator(q).terms(), n);
      const Eigen::MatrixXcd anti = cp * cqd + cqd * cp;
      Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(8, 8);
      if (p == q) want.setIdentity();
      CHECK((anti - want).norm() < 1e-13);
    }
  }
}

TEST_CASE("count_terms reproduces the single-impurity tally by hand") {
  // 1 U + 2 impurity levels + 20 directed couplings + 10 bath levels
  CHECK(count_terms(2, 10, false) == 33);
  CHECK(count_terms(1, 0, false) == 1);
  // doubling the bath doubles the bath+mixing share exactly
  const auto bath_share = [](int nb) {
    return count_terms(2, nb, false) - count_terms(2, 0, false);
  };
  CHECK(bath_share(14) == 2 * bath_share(7));
}

TEST_CASE("count_terms matches the generated fermionic term list") {
  for (int n_so = 1; n_so <= 4; ++n_so)
    for (int n_b : {0, 1, 3, 6}) {
      for (bool dense_u : {false, true}) {
        ImpurityModel m = make_test_model(n_so, n_b, dense_u, 7);
        CHECK(static_cast<std::int64_t>(fermion_terms(m).size()) ==
              count_terms(n_so, n_b, dense_u));
      }
    }
}

TEST_CASE("star_to_chain on the two-site example gives sqrt(2), 1 chain") {
  ImpurityModel m = bare_model(1, 2);
  m.spin = {0, 0, 0};
  m.eps = {-1.0, 1.0};
  m.v(0, 0) = 1.0;
  m.v(0, 1) = 1.0;
  const ImpurityModel chain = star_to_chain(m);
  REQUIRE(chain.n_b == 2);
  CHECK(std::abs(chain.v(0, 0)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(chain.eps[0] == doctest::Approx(0.0));
  CHECK(chain.eps[1] == doctest::Approx(0.0));
  REQUIRE(chain.bath_hop.size() == 1);
  CHECK(std::abs(std::get<2>(chain.bath_hop[0])) == doctest::Approx(1.0));
}

TEST_CASE("star_to_chain preserves the single-particle spectrum") {
  ImpurityModel m = bare_model(1, 8);
  m.spin.assign(9, 0);
  Rng rng(11);
  for (int i = 0; i < 8; ++i) {
    m.eps[i] = 2.0 * rng.next_double() - 1.0 + 0.01 * i;
    m.v(0, i) = 0.2 + 0.6 * rng.next_double();
  }
  const ImpurityModel chain = star_to_chain(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a(m.one_body());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> b(chain.one_body());
  CHECK((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("star_to_chain preserves the hybridization function") {
  ImpurityModel m = make_test_model(2, 8, false, 3);
  const ImpurityModel chain = star_to_chain(m);
  for (int k = 0; k < 20; ++k) {
    const cplx z{0.0, 0.3 + 0.37 * k};
    const Eigen::MatrixXcd da = m.hybridization(z);
    const Eigen::MatrixXcd db = chain.hybridization(z);
    CHECK((da - db).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("already tridiagonal bath is a fixed point up to phases") {
  ImpurityModel m = bare_model(1, 3);
  m.spin.assign(4, 0);
  m.eps = {0.3, -0.2, 0.9};
  m.v(0, 0) = 0.7;
  m.bath_hop.push_back({0, 1, cplx{0.4, 0.0}});
  m.bath_hop.push_back({1, 2, cplx{0.25, 0.0}});
  // chain input comes back unchanged (already chain geometry)
  const ImpurityModel out = star_to_chain(m);
  CHECK(out.n_b == 3);
  CHECK(std::abs(out.v(0, 0) - m.v(0, 0)) < 1e-14);
  // and a star made from a chain maps back to the same chain parameters
  ImpurityModel star = bare_model(1, 3);
  star.spin.assign(4, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      m.one_body().bottomRightCorner(3, 3));
  for (int i = 0; i < 3; ++i) star.eps[i] = es.eigenvalues()[i];
  const Eigen::VectorXcd w = es.eigenvectors().adjoint().col(0) * m.v(0, 0);
  for (int i = 0; i < 3; ++i) star.v(0, i) = std::conj(w[i]);
  const ImpurityModel rechain = star_to_chain(star);
  CHECK(std::abs(std::abs(rechain.v(0, 0)) - 0.7) < 1e-10);
  CHECK(rechain.eps[0] == doctest::Approx(0.3));
  CHECK(std::abs(std::get<2>(rechain.bath_hop[0])) == doctest::Approx(0.4));
}

TEST_CASE("krylov breakdown reported with the iteration") {
  ImpurityModel m = bare_model(1, 2);
  m.spin = {0, 0, 0};
  m.eps = {0.5, 0.5}; // degenerate couplings: one Lanczos vector exhausts
  m.v(0, 0) = 0.6;
  m.v(0, 1) = 0.6;
  CHECK_THROWS_AS((void)star_to_chain(m), KrylovBreakdown);
  try {
    (void)star_to_chain(m);
  } catch (const KrylovBreakdown& e) {
    CHECK(e.iteration == 1);
  }
}

TEST_CASE("model file round trip is bit exact") {
  ImpurityModel m = make_test_model(2, 4, false, 9);
  m.t(0, 1) = cplx{0.125, -0.5};
  m.t(1, 0) = cplx{0.125, 0.5};
  const std::string once = model_to_string(m);
  const ImpurityModel back = model_from_string(once);
  const std::string twice = model_to_string(back);
  CHECK(once == twice);

  const auto tmp = std::filesystem::temp_directory_path() / "qimp_model.txt";
  save_model(m, tmp.string());
  const ImpurityModel loaded = load_model(tmp.string());
  CHECK(model_to_string(loaded) == once);
  std::filesystem::remove(tmp);
}

TEST_CASE("model parser rejects malformed records") {
  CHECK_THROWS((void)model_from_string("nso 1\nnb 0\nbogus 1 2\n"));
  CHECK_THROWS((void)model_from_string("nb 0\nmu 0\n")); // missing nso
  CHECK_THROWS((void)model_from_string("nso 1\nnb 0\nt 0 0 1\n"));
}

TEST_CASE("single impurity builder matches its hand-built Hamiltonian") {
  const ImpurityModel m = make_single_impurity(4.0, 2.0, {-1.0, 1.0}, {0.5, 0.5});
  CHECK(m.n_so == 2);
  CHECK(m.n_b == 4);
  CHECK(m.spin == std::vector<int>{0, 1, 0, 1, 0, 1});
  const Eigen::MatrixXcd h = jw_dense(m);
  const Eigen::MatrixXcd want = oracle::dense_hamiltonian(m);
  CHECK((h - want).norm() < 1e-11);
}
