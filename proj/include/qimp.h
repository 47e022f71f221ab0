/* qimp: quantum-emulated Anderson impurity solver with a classical DMFT
 * self-consistency loop.
 *
 * C interface of the shared library. All entry points are thread-safe with
 * respect to distinct handles; a handle must not be used concurrently.
 *
 * Error handling: functions return QIMP_OK (0) on success, QIMP_ERR_NUMERIC
 * (1) on runtime/numerical failure and QIMP_ERR_CONFIG (2) on configuration
 * errors (these double as the CLI exit codes). When an `err` buffer is
 * provided, a human-readable message is written into it.
 */
#ifndef QIMP_H
#define QIMP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define QIMP_OK 0
#define QIMP_ERR_NUMERIC 1
#define QIMP_ERR_CONFIG 2

typedef struct qimp_config qimp_config;

const char* qimp_version(void);

/* Configuration handles: create empty (defaults) or load from a flat
 * key=value file; individual keys can be overridden afterwards. */
qimp_config* qimp_config_create(void);
qimp_config* qimp_config_load(const char* path, char* err, size_t err_cap);
int qimp_config_set(qimp_config* cfg, const char* key, const char* value,
                    char* err, size_t err_cap);
void qimp_config_free(qimp_config* cfg);

/* One impurity solve with the configured solver; writes greens_rt.tsv,
 * greens_iw.tsv, aw.tsv and resources.json into out_dir. */
int qimp_solve_impurity(const qimp_config* cfg, const char* out_dir,
                        char* err, size_t err_cap);

/* Exact-diagonalization reference run with the same outputs. */
int qimp_ed_reference(const qimp_config* cfg, const char* out_dir, char* err,
                      size_t err_cap);

/* Full DMFT self-consistency loop with per-iteration history files. */
int qimp_dmft_loop(const qimp_config* cfg, const char* out_dir, char* err,
                   size_t err_cap);

/* Resource accounting for the configured measurement plan. The JSON report
 * is written into `json_buf` (truncated if needed; the full untruncated
 * report is also written to out_path when non-NULL). */
int qimp_report_resources(const qimp_config* cfg, const char* out_path,
                          char* json_buf, size_t json_cap, char* err,
                          size_t err_cap);

/* Max absolute difference between the numeric contents of two greens
 * files; *max_diff receives the value. Returns QIMP_ERR_NUMERIC when the
 * difference exceeds tol. */
int qimp_compare_greens(const char* path_a, const char* path_b, double tol,
                        double* max_diff, char* err, size_t err_cap);

#ifdef __cplusplus
}
#endif

#endif /* QIMP_H */
