#pragma once

#include <string>

#include "qimp/config.hpp"

namespace qimp {

// One impurity solve with the configured solver; writes greens_rt.tsv,
// greens_iw.tsv, aw.tsv and resources.json into out_dir.
void run_solve_impurity(const RunConfig& cfg, const std::string& out_dir);

// Same outputs from the exact-diagonalization reference path.
void run_ed_reference(const RunConfig& cfg, const std::string& out_dir);

// Full self-consistency loop; per-iteration history plus final aw.tsv,
// greens_rt.tsv, greens_iw.tsv and resources.json in out_dir.
void run_dmft_loop(const RunConfig& cfg, const std::string& out_dir);

// Resource accounting for the configured measurement plan (dry run:
// arithmetic plus single-step gate tallies, nothing is simulated).
std::string report_resources_json(const RunConfig& cfg);

// Max absolute difference between the numeric columns of two greens files
// (either the real-time or the Matsubara layout).
double compare_greens_files(const std::string& a, const std::string& b);

} // namespace qimp
