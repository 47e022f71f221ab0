// Exercises the shared-library C interface the way an external consumer
// would: handles, error codes, file outputs. No core headers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <array>
#include <complex>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qimp.h"

namespace {

namespace fs = std::filesystem;

struct Cfg {
  qimp_config* h = nullptr;
  ~Cfg() { qimp_config_free(h); }
};

std::string sandbox() {
  static const std::string dir =
      (fs::temp_directory_path() / "qimp_capi_tests").string();
  fs::create_directories(dir);
  return dir;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// rows of (iw, ReG, ImG) from a matsubara TSV block
std::vector<std::array<double, 3>> read_iw_block(const std::string& path,
                                                 int block_a, int block_b) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::vector<std::array<double, 3>> out;
  std::string line;
  bool in_block = false;
  while (std::getline(f, line)) {
    if (line.rfind("# block", 0) == 0) {
      std::istringstream ls(line.substr(7));
      int a, b;
      ls >> a >> b;
      in_block = (a == block_a && b == block_b);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (!in_block) continue;
    std::istringstream ls(line);
    std::array<double, 3> row{};
    ls >> row[0] >> row[1] >> row[2];
    out.push_back(row);
  }
  return out;
}

const char* kAtomModel =
    "nso 2\n"
    "nb 0\n"
    "mu 2\n"
    "U 0 1 1 0 4 0\n";

} // namespace

TEST_CASE("version string") {
  CHECK(std::strlen(qimp_version()) > 0);
}

TEST_CASE("config rejects unknown keys and bad values with messages") {
  Cfg c{qimp_config_create()};
  char err[256] = {0};
  CHECK(qimp_config_set(c.h, "no_such_key", "1", err, sizeof err) ==
        QIMP_ERR_CONFIG);
  CHECK(std::string(err).find("no_such_key") != std::string::npos);
  CHECK(qimp_config_set(c.h, "beta", "banana", err, sizeof err) ==
        QIMP_ERR_CONFIG);
  CHECK(std::string(err).find("beta") != std::string::npos);
  CHECK(qimp_config_set(c.h, "beta", "25", err, sizeof err) == QIMP_OK);
}

TEST_CASE("config file loading honors comments and overrides") {
  const std::string path = sandbox() + "/cfg.txt";
  write_file(path, "# comment line\nbeta = 12\nn_omega = 64 # trailing\n");
  char err[256] = {0};
  Cfg c{qimp_config_load(path.c_str(), err, sizeof err)};
  REQUIRE(c.h != nullptr);
  CHECK(qimp_config_set(c.h, "n_omega", "32", err, sizeof err) == QIMP_OK);
  Cfg bad{qimp_config_load((path + ".missing").c_str(), err, sizeof err)};
  CHECK(bad.h == nullptr);
  CHECK(std::strlen(err) > 0);
}

TEST_CASE("missing model file exits with the config code and names the path") {
  Cfg c{qimp_config_create()};
  char err[512] = {0};
  REQUIRE(qimp_config_set(c.h, "model", "/nonexistent/model.txt", err,
                          sizeof err) == QIMP_OK);
  REQUIRE(qimp_config_set(c.h, "solver", "ed", err, sizeof err) == QIMP_OK);
  const int rc = qimp_solve_impurity(c.h, (sandbox() + "/nope").c_str(), err,
                                     sizeof err);
  CHECK(rc == QIMP_ERR_CONFIG);
  CHECK(std::string(err).find("/nonexistent/model.txt") != std::string::npos);
}

TEST_CASE("ed reference on the hubbard atom emits the two-pole function") {
  const std::string model = sandbox() + "/atom.txt";
  write_file(model, kAtomModel);
  Cfg c{qimp_config_create()};
  char err[512] = {0};
  REQUIRE(qimp_config_set(c.h, "model", model.c_str(), err, sizeof err) ==
          QIMP_OK);
  REQUIRE(qimp_config_set(c.h, "t_max", "100", err, sizeof err) == QIMP_OK);
  REQUIRE(qimp_config_set(c.h, "n_t", "2400", err, sizeof err) == QIMP_OK);
  const std::string out = sandbox() + "/atom_ed";
  fs::remove_all(out);
  REQUIRE(qimp_ed_reference(c.h, out.c_str(), err, sizeof err) == QIMP_OK);
  for (const char* f : {"greens_rt.tsv", "greens_iw.tsv", "aw.tsv",
                        "resources.json"})
    CHECK(fs::exists(out + "/" + f));
  // spin-averaged G(iw) = (1/2)[1/(iw - 2) + 1/(iw + 2)] for U = 4
  const auto b00 = read_iw_block(out + "/greens_iw.tsv", 0, 0);
  const auto b11 = read_iw_block(out + "/greens_iw.tsv", 1, 1);
  REQUIRE(b00.size() == 400);
  REQUIRE(b11.size() == 400);
  for (std::size_t k = 0; k < b00.size(); k += 37) {
    const std::complex<double> iw{0.0, b00[k][0]};
    const std::complex<double> want =
        0.5 * (1.0 / (iw - 2.0) + 1.0 / (iw + 2.0));
    const std::complex<double> got{0.5 * (b00[k][1] + b11[k][1]),
                                   0.5 * (b00[k][2] + b11[k][2])};
    CHECK(std::abs(got - want) < 5e-6);
  }
}

TEST_CASE("quantum solver reproduces the ed files on the atom") {
  const std::string model = sandbox() + "/atom.txt";
  write_file(model, kAtomModel);
  Cfg c{qimp_config_create()};
  char err[512] = {0};
  auto set = [&](const char* k, const char* v) {
    REQUIRE(qimp_config_set(c.h, k, v, err, sizeof err) == QIMP_OK);
  };
  set("model", model.c_str());
  set("t_max", "60");
  set("n_t", "400");
  set("prep_start", "atomic");
  set("n_up", "0");
  set("n_down", "1");
  set("estimator", "exact");
  set("trotter_order", "2");
  set("qpe_bits", "9");
  set("qpe_tau", "0.3");
  set("calibration_preps", "2");
  const std::string out_q = sandbox() + "/atom_q";
  const std::string out_e = sandbox() + "/atom_e";
  fs::remove_all(out_q);
  fs::remove_all(out_e);
  REQUIRE(qimp_solve_impurity(c.h, out_q.c_str(), err, sizeof err) == QIMP_OK);
  REQUIRE(qimp_ed_reference(c.h, out_e.c_str(), err, sizeof err) == QIMP_OK);
  double diff = 0.0;
  const int rc = qimp_compare_greens((out_q + "/greens_rt.tsv").c_str(),
                                     (out_e + "/greens_rt.tsv").c_str(),
                                     1e-6, &diff, err, sizeof err);
  CHECK(rc == QIMP_OK);
  CHECK(diff < 1e-6); // atomic model: no trotter error, exact preparation
}

TEST_CASE("compare flags differences beyond tolerance") {
  const std::string a = sandbox() + "/cmp_a.tsv";
  const std::string b = sandbox() + "/cmp_b.tsv";
  write_file(a, "# x\n0.5 1.0\n");
  write_file(b, "# x\n0.5 1.0002\n");
  double diff = 0.0;
  char err[256] = {0};
  CHECK(qimp_compare_greens(a.c_str(), b.c_str(), 1e-3, &diff, err,
                            sizeof err) == QIMP_OK);
  CHECK(diff == doctest::Approx(2e-4));
  CHECK(qimp_compare_greens(a.c_str(), b.c_str(), 1e-5, &diff, err,
                            sizeof err) == QIMP_ERR_NUMERIC);
}

TEST_CASE("report-resources states the stated measurement plan exactly") {
  Cfg c{qimp_config_create()};
  char err[256] = {0};
  std::string buf(1 << 16, '\0');
  REQUIRE(qimp_report_resources(c.h, nullptr, buf.data(), buf.size(), err,
                                sizeof err) == QIMP_OK);
  CHECK(buf.find("\"total_measurements\": 3200000") != std::string::npos);
  // halving the grid halves the plan
  REQUIRE(qimp_config_set(c.h, "n_t", "500", err, sizeof err) == QIMP_OK);
  REQUIRE(qimp_report_resources(c.h, nullptr, buf.data(), buf.size(), err,
                                sizeof err) == QIMP_OK);
  CHECK(buf.find("\"total_measurements\": 1600000") != std::string::npos);
}

TEST_CASE("shot-mode outputs are bit-identical under one seed") {
  const std::string model = sandbox() + "/anderson.txt";
  write_file(model,
             "nso 2\nnb 4\nmu 1.5\nU 0 1 1 0 3 0\n"
             "eps 0 -0.7\neps 1 -0.7\neps 2 0.9\neps 3 0.9\n"
             "V 0 0 0.5 0\nV 1 1 0.5 0\nV 0 2 0.4 0\nV 1 3 0.4 0\n");
  Cfg c{qimp_config_create()};
  char err[512] = {0};
  auto set = [&](const char* k, const char* v) {
    REQUIRE(qimp_config_set(c.h, k, v, err, sizeof err) == QIMP_OK);
  };
  set("model", model.c_str());
  set("estimator", "shots");
  set("n_meas", "50");
  set("n_t", "24");
  set("t_max", "10");
  set("trotter_order", "2");
  set("trotter_step", "0.005");
  set("prep_step", "0.01");
  set("t_prep", "12");
  set("prep_steps", "600");
  set("qpe_bits", "9");
  set("qpe_tau", "0.25");
  set("seed", "421");
  const std::string out1 = sandbox() + "/det_1";
  const std::string out2 = sandbox() + "/det_2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  REQUIRE(qimp_solve_impurity(c.h, out1.c_str(), err, sizeof err) == QIMP_OK);
  REQUIRE(qimp_solve_impurity(c.h, out2.c_str(), err, sizeof err) == QIMP_OK);
  for (const char* f : {"greens_rt.tsv", "greens_iw.tsv", "aw.tsv",
                        "resources.json"})
    CHECK(read_file(out1 + "/" + f) == read_file(out2 + "/" + f));
  // emitted files round-trip through the comparison at zero tolerance
  double diff = 1.0;
  CHECK(qimp_compare_greens((out1 + "/greens_rt.tsv").c_str(),
                            (out2 + "/greens_rt.tsv").c_str(), 0.0, &diff,
                            err, sizeof err) == QIMP_OK);
  CHECK(diff == 0.0);
}

TEST_CASE("tiny dmft loop through the c api produces history files") {
  Cfg c{qimp_config_create()};
  char err[512] = {0};
  auto set = [&](const char* k, const char* v) {
    REQUIRE(qimp_config_set(c.h, k, v, err, sizeof err) == QIMP_OK);
  };
  set("solver", "ed");
  set("u", "3");
  set("n_bath", "6");
  set("beta", "10");
  set("n_omega", "80");
  set("n_t", "240");
  set("t_max", "30");
  set("t_min", "1e-4");
  set("dmft_max_iter", "3");
  set("dmft_tol", "1e-4");
  const std::string out = sandbox() + "/loop";
  fs::remove_all(out);
  REQUIRE(qimp_dmft_loop(c.h, out.c_str(), err, sizeof err) == QIMP_OK);
  for (const char* f : {"bath_1.txt", "giw_1.tsv", "sigma_1.tsv",
                        "convergence.tsv", "aw.tsv", "greens_rt.tsv",
                        "resources.json"})
    CHECK(fs::exists(out + "/" + f));
}
