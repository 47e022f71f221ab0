// Command-line driver. Links only the C API of the shared library.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qimp.h"

namespace {

struct ConfigDeleter {
  void operator()(qimp_config* c) const { qimp_config_free(c); }
};
using ConfigPtr = std::unique_ptr<qimp_config, ConfigDeleter>;

char g_err[4096];

ConfigPtr make_config(const std::string& path,
                      const std::vector<std::string>& overrides, int& rc) {
  ConfigPtr cfg;
  if (!path.empty()) {
    cfg.reset(qimp_config_load(path.c_str(), g_err, sizeof g_err));
    if (!cfg) {
      std::fprintf(stderr, "error: %s\n", g_err);
      rc = QIMP_ERR_CONFIG;
      return cfg;
    }
  } else {
    cfg.reset(qimp_config_create());
  }
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n",
                   kv.c_str());
      rc = QIMP_ERR_CONFIG;
      cfg.reset();
      return cfg;
    }
    const int r = qimp_config_set(cfg.get(), kv.substr(0, eq).c_str(),
                                  kv.substr(eq + 1).c_str(), g_err,
                                  sizeof g_err);
    if (r != QIMP_OK) {
      std::fprintf(stderr, "error: %s\n", g_err);
      rc = r;
      cfg.reset();
      return cfg;
    }
  }
  rc = QIMP_OK;
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-emulated impurity solver and DMFT driver"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", file_a, file_b, report_path;
  std::vector<std::string> overrides;
  double tol = 1e-9;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("-c,--config", config_path,
                    "configuration file (key = value lines)");
    sub->add_option("--set", overrides,
                    "override a configuration key (key=value); repeatable");
    if (needs_out)
      sub->add_option("-o,--out", out_dir, "output directory")
          ->capture_default_str();
  };

  CLI::App* solve = app.add_subcommand(
      "solve-impurity", "solve one impurity model and emit greens/aw files");
  add_common(solve, true);
  CLI::App* loop = app.add_subcommand(
      "dmft-loop", "run the self-consistency loop with per-iteration history");
  add_common(loop, true);
  CLI::App* edref = app.add_subcommand(
      "ed-reference", "exact-diagonalization reference run, same outputs");
  add_common(edref, true);
  CLI::App* report = app.add_subcommand(
      "report-resources", "measurement and gate accounting for the plan");
  add_common(report, false);
  report->add_option("-o,--out", report_path, "also write the JSON here");

  CLI::App* compare =
      app.add_subcommand("compare", "diff two greens files numerically");
  compare->add_option("file_a", file_a, "first file")->required();
  compare->add_option("file_b", file_b, "second file")->required();
  compare->add_option("--tol", tol, "max allowed absolute difference")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  int rc = QIMP_OK;
  if (compare->parsed()) {
    double diff = 0.0;
    rc = qimp_compare_greens(file_a.c_str(), file_b.c_str(), tol, &diff,
                             g_err, sizeof g_err);
    std::printf("max_abs_diff %.6g (tol %.6g)\n", diff, tol);
    if (rc != QIMP_OK) std::fprintf(stderr, "error: %s\n", g_err);
    return rc;
  }

  ConfigPtr cfg = make_config(config_path, overrides, rc);
  if (!cfg) return rc;

  if (solve->parsed()) {
    rc = qimp_solve_impurity(cfg.get(), out_dir.c_str(), g_err, sizeof g_err);
  } else if (loop->parsed()) {
    rc = qimp_dmft_loop(cfg.get(), out_dir.c_str(), g_err, sizeof g_err);
  } else if (edref->parsed()) {
    rc = qimp_ed_reference(cfg.get(), out_dir.c_str(), g_err, sizeof g_err);
  } else if (report->parsed()) {
    std::string buf(1 << 16, '\0');
    rc = qimp_report_resources(cfg.get(),
                               report_path.empty() ? nullptr
                                                   : report_path.c_str(),
                               buf.data(), buf.size(), g_err, sizeof g_err);
    if (rc == QIMP_OK) std::fputs(buf.c_str(), stdout);
  }
  if (rc != QIMP_OK) std::fprintf(stderr, "error: %s\n", g_err);
  return rc;
}
