// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_CONTROLLER_HPP
#define PARATIME_CONTROLLER_HPP

#include <chrono>
#include <optional>
#include <vector>

#include "paratime/exec.hpp"
#include "paratime/hierarchy.hpp"
#include "paratime/sweeps.hpp"

namespace paratime {

// The five run modes.  SdcSingleLevel and Mlsdc are the serial baselines
// (window of one step); the Pfasst variants iterate a window of steps
// concurrently.  The ER variants replace the serial Newton sweeps with
// node-diagonalized Quasi-Newton sweeps of the preconditioned system
// (QDelta) or the full collocation system (Q).
enum class RunMode {
  SdcSingleLevel,
  Mlsdc,
  Pfasst,
  PfasstErQDelta,
  PfasstErQ,
};

struct ControllerOptions {
  RunMode mode = RunMode::Pfasst;
  int num_steps = 1;
  double dt = 0.1;
  int window = 1;  // step slots iterated together
  int p_steps = 1;
  int p_nodes = 1;
  double tol_outer = 1e-10;
  int max_outer = 100;
  SweepOptions sweep;
  bool freeze_converged = true;
  bool threaded = false;
  std::chrono::milliseconds recv_timeout{120000};
};

struct StepRecord {
  int global_step = 0;
  int iterations = 0;  // outer iterations this step actively swept
  bool converged = false;
  std::vector<double> residual_history;
  SweepCounters fine;
  SweepCounters coarse;
};

struct RunStats {
  std::vector<StepRecord> steps;
  MessageCounters messages;
  long outer_iterations = 0;  // summed over windows: slowest slot per window
  int windows = 0;
  bool converged = true;

  long linear_solves_total() const;
  long gmres_iters_total() const;
  long gmres_failures_total() const;
  long newton_iters_total() const;
  long qn_steps_total() const;
  // Fine plus coarse GMRES iterations attributed to each collocation node.
  std::vector<long> gmres_iters_per_node() const;
};

struct RunResult {
  Field final_state;  // last node value of the last step
  RunStats stats;
};

// Drives one step slot of a window through its outer iterations.  The
// runners own the message flow; this class owns states, sweeps, FAS,
// the coarse-grid correction and the residual bookkeeping.
class StepSlot {
public:
  StepSlot(const LevelHierarchy& levels, const ControllerOptions& opts,
           const NodeScheduler* scheduler, int global_step,
           const Field& start_value);

  // FAS restriction and one coarse sweep; returns the coarse last-node
  // value to forward.  Two-level modes only.
  Field coarse_phase(const Field& coarse_u0);

  // Applies the coarse-grid correction; returns the corrected fine
  // last-node value to forward.
  Field cgc_phase();

  // Fine sweep against the incoming initial value, then the residual
  // check.  Records one outer iteration.
  void fine_phase(const Field& fine_u0);

  double residual() const { return record_.residual_history.back(); }
  bool meets_tol() const {
    return !record_.residual_history.empty() &&
           record_.residual_history.back() <= opts_.tol_outer;
  }
  void mark_converged(bool c) { record_.converged = c; }

  const StepState& fine_state() const { return fine_; }
  Field fine_last_node() const { return fine_.u.back(); }
  Field coarse_last_node() const { return coarse_.u.back(); }
  StepRecord& record() { return record_; }

private:
  void run_sweep(StepState& state, const Level& level,
                 const EigenFactors* factors, SweepCounters& counters);

  const LevelHierarchy& levels_;
  const ControllerOptions& opts_;
  const NodeScheduler* scheduler_;
  // Eigendecomposition of the node coupling matrix for the QN sweeps;
  // both levels share the rule, so one factorization serves both.
  std::optional<EigenFactors> qn_factors_;
  StepState fine_;
  StepState coarse_;
  std::vector<Field> restricted_;  // R u^k captured before the coarse sweep
  StepRecord record_;
};

RunResult run(const LevelHierarchy& levels, const Field& u_start,
              const ControllerOptions& opts);

}  // namespace paratime

#endif
