#include "qimp.h"

#include <cstring>
#include <fstream>
#include <string>

#include "qimp/config.hpp"
#include "qimp/run.hpp"

struct qimp_config {
  qimp::RunConfig cfg;
};

namespace {

void put_err(char* err, size_t cap, const std::string& msg) {
  if (!err || cap == 0) return;
  std::strncpy(err, msg.c_str(), cap - 1);
  err[cap - 1] = '\0';
}

// Config problems exit with 2, numerical/runtime failures with 1.
template <typename Fn>
int guarded(Fn&& fn, char* err, size_t cap) {
  try {
    fn();
    return QIMP_OK;
  } catch (const std::invalid_argument& e) {
    put_err(err, cap, e.what());
    return QIMP_ERR_CONFIG;
  } catch (const std::exception& e) {
    put_err(err, cap, e.what());
    return QIMP_ERR_NUMERIC;
  }
}

} // namespace

extern "C" {

const char* qimp_version(void) { return "0.1.0"; }

qimp_config* qimp_config_create(void) { return new qimp_config{}; }

qimp_config* qimp_config_load(const char* path, char* err, size_t err_cap) {
  try {
    auto* h = new qimp_config{};
    h->cfg = qimp::load_config(path ? path : "");
    return h;
  } catch (const std::exception& e) {
    put_err(err, err_cap, e.what());
    return nullptr;
  }
}

int qimp_config_set(qimp_config* cfg, const char* key, const char* value,
                    char* err, size_t err_cap) {
  if (!cfg || !key || !value) {
    put_err(err, err_cap, "null argument");
    return QIMP_ERR_CONFIG;
  }
  return guarded(
      [&] {
        cfg->cfg.set(key, value);
        cfg->cfg.validate();
      },
      err, err_cap);
}

void qimp_config_free(qimp_config* cfg) { delete cfg; }

int qimp_solve_impurity(const qimp_config* cfg, const char* out_dir,
                        char* err, size_t err_cap) {
  if (!cfg || !out_dir) {
    put_err(err, err_cap, "null argument");
    return QIMP_ERR_CONFIG;
  }
  return guarded([&] { qimp::run_solve_impurity(cfg->cfg, out_dir); }, err,
                 err_cap);
}

int qimp_ed_reference(const qimp_config* cfg, const char* out_dir, char* err,
                      size_t err_cap) {
  if (!cfg || !out_dir) {
    put_err(err, err_cap, "null argument");
    return QIMP_ERR_CONFIG;
  }
  return guarded([&] { qimp::run_ed_reference(cfg->cfg, out_dir); }, err,
                 err_cap);
}

int qimp_dmft_loop(const qimp_config* cfg, const char* out_dir, char* err,
                   size_t err_cap) {
  if (!cfg || !out_dir) {
    put_err(err, err_cap, "null argument");
    return QIMP_ERR_CONFIG;
  }
  return guarded([&] { qimp::run_dmft_loop(cfg->cfg, out_dir); }, err,
                 err_cap);
}

int qimp_report_resources(const qimp_config* cfg, const char* out_path,
                          char* json_buf, size_t json_cap, char* err,
                          size_t err_cap) {
  if (!cfg) {
    put_err(err, err_cap, "null argument");
    return QIMP_ERR_CONFIG;
  }
  return guarded(
      [&] {
        const std::string j = qimp::report_resources_json(cfg->cfg);
        if (json_buf && json_cap > 0) {
          std::strncpy(json_buf, j.c_str(), json_cap - 1);
          json_buf[json_cap - 1] = '\0';
        }
        if (out_path) {
          std::ofstream f(out_path);
          if (!f) throw std::runtime_error(std::string("cannot write ") + out_path);
          f << j;
        }
      },
      err, err_cap);
}

int qimp_compare_greens(const char* path_a, const char* path_b, double tol,
                        double* max_diff, char* err, size_t err_cap) {
  if (!path_a || !path_b) {
    put_err(err, err_cap, "null argument");
    return QIMP_ERR_CONFIG;
  }
  double diff = 0.0;
  const int rc = guarded(
      [&] { diff = qimp::compare_greens_files(path_a, path_b); }, err,
      err_cap);
  if (max_diff) *max_diff = diff;
  if (rc != QIMP_OK) return rc;
  if (diff > tol) {
    put_err(err, err_cap, "difference " + std::to_string(diff) +
                              " exceeds tolerance " + std::to_string(tol));
    return QIMP_ERR_NUMERIC;
  }
  return QIMP_OK;
}

} // extern "C"
