#include "qimp/greens.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qimp {

TimeGrid TimeGrid::logarithmic(double t_min, double t_max, int n) {
  TimeGrid g;
  g.t_min = t_min;
  g.t_max = t_max;
  g.n = n;
  g.validate();
  g.points.resize(n);
  const double span = std::log(t_max / t_min);
  for (int i = 0; i < n; ++i)
    g.points[i] = t_min * std::exp(span * i / (n - 1));
  g.points.front() = t_min;
  g.points.back() = t_max;
  return g;
}

void TimeGrid::validate() const {
  if (t_min <= 0.0) throw std::invalid_argument("time grid: t_min must be > 0");
  if (t_max <= t_min)
    throw std::invalid_argument("time grid: t_max must exceed t_min");
  if (n < 2) throw std::invalid_argument("time grid: need at least 2 points");
}

void RealTimeGF::resize() {
  gp.assign(grid.points.size(), Eigen::MatrixXcd::Zero(n_so, n_so));
  gh.assign(grid.points.size(), Eigen::MatrixXcd::Zero(n_so, n_so));
}

namespace {
std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
} // namespace

std::string greens_rt_to_tsv(const RealTimeGF& gf) {
  std::ostringstream os;
  os << "# t\talpha\tbeta\tReGp\tImGp\tReGh\tImGh\tn_meas\n";
  os << "# n_so " << gf.n_so << " n_t " << gf.grid.n << " exact "
     << (gf.exact ? 1 : 0) << " total_bits " << gf.total_bits << "\n";
  for (std::size_t i = 0; i < gf.grid.points.size(); ++i) {
    for (int a = 0; a < gf.n_so; ++a)
      for (int b = 0; b < gf.n_so; ++b) {
        const cplx p = gf.gp[i](a, b), h = gf.gh[i](a, b);
        os << g17(gf.grid.points[i]) << "\t" << a << "\t" << b << "\t"
           << g17(p.real()) << "\t" << g17(p.imag()) << "\t" << g17(h.real())
           << "\t" << g17(h.imag()) << "\t" << gf.n_meas << "\n";
      }
  }
  return os.str();
}

RealTimeGF greens_rt_from_tsv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  struct Row {
    double t;
    int a, b;
    double rp, ip, rh, ih;
    long n_meas;
  };
  std::vector<Row> rows;
  bool exact = true;
  std::uint64_t total_bits = 0;
  int n_so_hdr = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      while (hs >> key) {
        if (key == "n_so") hs >> n_so_hdr;
        if (key == "exact") {
          int e;
          hs >> e;
          exact = e != 0;
        }
        if (key == "total_bits") hs >> total_bits;
      }
      continue;
    }
    std::istringstream ls(line);
    Row r;
    if (!(ls >> r.t >> r.a >> r.b >> r.rp >> r.ip >> r.rh >> r.ih >> r.n_meas))
      throw std::runtime_error("bad greens TSV row: " + line);
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("empty greens TSV");
  int n_so = n_so_hdr;
  if (n_so < 1) {
    for (const auto& r : rows) n_so = std::max({n_so, r.a + 1, r.b + 1});
  }
  std::vector<double> ts;
  for (const auto& r : rows)
    if (ts.empty() || r.t != ts.back()) ts.push_back(r.t);
  RealTimeGF gf;
  gf.n_so = n_so;
  gf.grid.t_min = ts.front();
  gf.grid.t_max = ts.back();
  gf.grid.n = static_cast<int>(ts.size());
  gf.grid.points = ts;
  gf.n_meas = static_cast<int>(rows.front().n_meas);
  gf.exact = exact;
  gf.total_bits = total_bits;
  gf.resize();
  std::size_t ti = 0;
  for (const auto& r : rows) {
    while (gf.grid.points[ti] != r.t) ++ti;
    gf.gp[ti](r.a, r.b) = cplx{r.rp, r.ip};
    gf.gh[ti](r.a, r.b) = cplx{r.rh, r.ih};
  }
  return gf;
}

void save_greens_rt(const RealTimeGF& gf, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << greens_rt_to_tsv(gf);
}

RealTimeGF load_greens_rt(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open greens file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return greens_rt_from_tsv(ss.str());
}

} // namespace qimp
