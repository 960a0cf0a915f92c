// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_EXPERIMENT_HPP
#define PARATIME_EXPERIMENT_HPP

#include <vector>

#include "paratime/config.hpp"

namespace paratime {

// One (mode, p_steps, p_nodes) cell of a benchmark run.
struct CellResult {
  RunMode mode = RunMode::Pfasst;
  int p_steps = 1;
  int p_nodes = 1;
  RunStats stats;
  Field final_state;
};

struct ExperimentResult {
  RunConfig config;
  std::vector<CellResult> cells;
  bool all_converged() const;
};

// Builds the problem hierarchy from the config and runs every requested
// cell: the modes from sweep_modes (or the single configured mode) times
// the configured layout, or times all admissible layouts when sweep_grids
// is set (divisors of the window by divisors of the node count).  The
// window size is fixed by the config, so layout only affects message
// accounting, never iterates.
ExperimentResult run_experiment(const RunConfig& cfg);

// Builds the level hierarchy the experiment runs on; exposed for tests.
LevelHierarchy make_hierarchy(const RunConfig& cfg, RunMode mode);

// Summary table, one row per cell:
// mode,p_steps,p_nodes,outer_iters,linear_solves_total,gmres_iters_total,
// messages,converged
std::string to_csv(const ExperimentResult& result);

// Full record: effective config echo plus per-cell and per-step detail.
std::string to_json(const ExperimentResult& result);

// Writes out_csv / out_json if configured.
void write_outputs(const ExperimentResult& result);

}  // namespace paratime

#endif
