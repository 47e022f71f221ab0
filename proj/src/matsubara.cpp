#include "qimp/matsubara.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qimp {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
} // namespace

MatsubaraGrid MatsubaraGrid::make(double beta, int n_omega) {
  MatsubaraGrid g;
  g.beta = beta;
  g.n_omega = n_omega;
  g.validate();
  g.omegas.resize(n_omega);
  for (int n = 0; n < n_omega; ++n) g.omegas[n] = kPi * (2 * n + 1) / beta;
  return g;
}

void MatsubaraGrid::validate() const {
  if (beta <= 0.0) throw std::invalid_argument("matsubara: beta must be > 0");
  if (n_omega < 1) throw std::invalid_argument("matsubara: n_omega >= 1");
}

void MatsubaraGF::resize() {
  values.assign(grid.omegas.size(), Eigen::MatrixXcd::Zero(n_so, n_so));
}

bool MatsubaraGF::causal_diagonal(double tol) const {
  for (const auto& v : values)
    for (int a = 0; a < n_so; ++a)
      if (v(a, a).imag() > tol) return false;
  return true;
}

double MatsubaraGF::tail_deviation() const {
  const int n = static_cast<int>(values.size());
  const int start = std::max(0, n - std::max(1, n / 10));
  double acc = 0.0;
  int count = 0;
  for (int k = start; k < n; ++k) {
    for (int a = 0; a < n_so; ++a) {
      acc += std::abs(cplx{0.0, grid.omegas[k]} * values[k](a, a) - 1.0);
      ++count;
    }
  }
  return count ? acc / count : 0.0;
}

std::vector<double> log_grid_weights(const TimeGrid& grid) {
  const int n = grid.n;
  if (n < 2) throw std::invalid_argument("log grid needs >= 2 points");
  const double h = std::log(grid.t_max / grid.t_min) / (n - 1);
  std::vector<double> wu(n, 0.0);
  const int intervals = n - 1;
  if (intervals == 1) {
    wu[0] = wu[1] = h / 2;
  } else if (intervals == 2) {
    wu[0] = h / 3;
    wu[1] = 4 * h / 3;
    wu[2] = h / 3;
  } else {
    int simpson_end = intervals;        // index of last point in pair rule
    const bool odd = intervals % 2 != 0;
    if (odd) simpson_end = intervals - 3;
    for (int i = 0; i < simpson_end; i += 2) {
      wu[i] += h / 3;
      wu[i + 1] += 4 * h / 3;
      wu[i + 2] += h / 3;
    }
    if (odd) {
      const int s = simpson_end;
      wu[s] += 3.0 * h / 8;
      wu[s + 1] += 9.0 * h / 8;
      wu[s + 2] += 9.0 * h / 8;
      wu[s + 3] += 3.0 * h / 8;
    }
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = wu[i] * grid.points[i];
  return w;
}

HilbertResult hilbertCommon(const RealTimeGF& gf, double eta,
                            const MatsubaraGrid& grid) {
  HilbertResult out;
  out.gf.grid = grid;
  out.gf.n_so = gf.n_so;
  out.gf.resize();
  const auto w = log_grid_weights(gf.grid);
  const double t0 = gf.grid.points.front();
  const double t_max = gf.grid.points.back();
  for (std::size_t k = 0; k < grid.omegas.size(); ++k) {
    const double wn = grid.omegas[k];
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(gf.n_so, gf.n_so);
    for (int i = 0; i < gf.grid.n; ++i) {
      const double damp = std::exp(-gf.grid.points[i] * (eta + wn));
      acc += (w[i] * damp) * (gf.gp[i] + gf.gh[i].conjugate());
    }
    // [0, t_min) rectangle
    acc += (t0 * std::exp(-t0 * (eta + wn))) *
           (gf.gp[0] + gf.gh[0].conjugate());
    out.gf.values[k] = cplx{0.0, -1.0} * acc;
  }
  const double w0 = grid.omegas.front();
  double tail_mag = 0.0;
  for (int a = 0; a < gf.n_so; ++a)
    tail_mag = std::max(tail_mag, std::abs(gf.gp.back()(a, a)) +
                                      std::abs(gf.gh.back()(a, a)));
  out.truncation_estimate = tail_mag * std::exp(-t_max * (eta + w0)) /
                            (eta + w0);
  out.grid_adequate = std::exp(-t_max * (eta + w0)) < 1e-6;
  return out;
}

HilbertResult hilbert_to_matsubara(const RealTimeGF& gf,
                                   const MatsubaraGrid& grid, double eta) {
  grid.validate();
  if (eta < 0.0) throw std::invalid_argument("hilbert: eta must be >= 0");
  return hilbertCommon(gf, eta, grid);
}

SpectralFunction spectral_function(const RealTimeGF& gf,
                                   const std::vector<double>& omega_grid,
                                   double eta) {
  if (eta <= 0.0)
    throw std::invalid_argument(
        "spectral function requires a positive broadening eta");
  SpectralFunction out;
  out.omega = omega_grid;
  out.eta = eta;
  out.a = Eigen::MatrixXd::Zero(gf.n_so, omega_grid.size());
  const auto w = log_grid_weights(gf.grid);
  const double t0 = gf.grid.points.front();
  for (std::size_t k = 0; k < omega_grid.size(); ++k) {
    const double om = omega_grid[k];
    for (int a = 0; a < gf.n_so; ++a) {
      cplx acc{0.0, 0.0};
      for (int i = 0; i < gf.grid.n; ++i) {
        const double t = gf.grid.points[i];
        const double damp = std::exp(-eta * t);
        acc += w[i] * damp *
               (std::polar(1.0, om * t) * gf.gp[i](a, a) +
                std::polar(1.0, -om * t) * gf.gh[i](a, a));
      }
      acc += t0 * std::exp(-eta * t0) *
             (std::polar(1.0, om * t0) * gf.gp[0](a, a) +
              std::polar(1.0, -om * t0) * gf.gh[0](a, a));
      const cplx g = cplx{0.0, -1.0} * acc;
      out.a(a, k) = -2.0 * g.imag();
    }
  }
  return out;
}

double SpectralFunction::value_at(int orbital, double w) const {
  std::size_t best = 0;
  double dist = 1e300;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double d = std::abs(omega[i] - w);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return a(orbital, best);
}

std::string matsubara_to_tsv(const MatsubaraGF& gf) {
  std::ostringstream os;
  os << "# iw\tReG\tImG\n";
  os << "# beta " << g17(gf.grid.beta) << " n_omega " << gf.grid.n_omega
     << " n_so " << gf.n_so << "\n";
  for (int a = 0; a < gf.n_so; ++a) {
    for (int b = 0; b < gf.n_so; ++b) {
      if (a != b) {
        bool all_zero = true;
        for (const auto& v : gf.values)
          if (std::abs(v(a, b)) > 0.0) all_zero = false;
        if (all_zero) continue;
      }
      os << "# block " << a << " " << b << "\n";
      for (std::size_t k = 0; k < gf.grid.omegas.size(); ++k)
        os << g17(gf.grid.omegas[k]) << "\t" << g17(gf.values[k](a, b).real())
           << "\t" << g17(gf.values[k](a, b).imag()) << "\n";
    }
  }
  return os.str();
}

MatsubaraGF matsubara_from_tsv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  double beta = 0.0;
  int n_omega = 0, n_so = 0;
  int cur_a = 0, cur_b = 0;
  struct Row {
    int a, b;
    double iw, re, im;
  };
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      while (hs >> key) {
        if (key == "beta") hs >> beta;
        if (key == "n_omega") hs >> n_omega;
        if (key == "n_so") hs >> n_so;
        if (key == "block") hs >> cur_a >> cur_b;
      }
      continue;
    }
    std::istringstream ls(line);
    Row r{cur_a, cur_b, 0, 0, 0};
    if (!(ls >> r.iw >> r.re >> r.im))
      throw std::runtime_error("bad matsubara TSV row: " + line);
    rows.push_back(r);
  }
  if (beta <= 0.0 || n_omega <= 0 || n_so <= 0)
    throw std::runtime_error("matsubara TSV missing header");
  MatsubaraGF gf;
  gf.grid = MatsubaraGrid::make(beta, n_omega);
  gf.n_so = n_so;
  gf.resize();
  for (const auto& r : rows) {
    // locate the frequency index
    const double ratio = r.iw * beta / kPi;
    const int n = static_cast<int>(std::lround((ratio - 1.0) / 2.0));
    if (n < 0 || n >= n_omega)
      throw std::runtime_error("matsubara TSV frequency out of grid");
    gf.values[n](r.a, r.b) = cplx{r.re, r.im};
  }
  return gf;
}

void save_matsubara(const MatsubaraGF& gf, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << matsubara_to_tsv(gf);
}

MatsubaraGF load_matsubara(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open matsubara file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return matsubara_from_tsv(ss.str());
}

std::string spectral_to_tsv(const SpectralFunction& aw) {
  std::ostringstream os;
  os << "# omega\tA\n";
  os << "# eta " << g17(aw.eta) << " n_orbitals " << aw.a.rows() << "\n";
  for (Eigen::Index a = 0; a < aw.a.rows(); ++a) {
    os << "# block " << a << "\n";
    for (std::size_t k = 0; k < aw.omega.size(); ++k)
      os << g17(aw.omega[k]) << "\t" << g17(aw.a(a, k)) << "\n";
  }
  return os.str();
}

void save_spectral(const SpectralFunction& aw, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << spectral_to_tsv(aw);
}

} // namespace qimp
