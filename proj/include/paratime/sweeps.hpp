// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_SWEEPS_HPP
#define PARATIME_SWEEPS_HPP

#include <vector>

#include "paratime/field.hpp"
#include "paratime/linsolve.hpp"
#include "paratime/problems.hpp"
#include "paratime/quadrature.hpp"

namespace paratime {

class NodeScheduler;

// Unknowns of one time step on one level: the incoming initial value and
// the M node values of the collocation problem
//   u_m = u0 + dt * sum_j Q(m,j) f(u_j) + tau_m.
// tau is the coarse-level correction supplied by the level transfer; it
// stays empty on the finest level.  rhs_cache holds the sweep's frozen
// right-hand side c(u^k), rebuilt at the start of every sweep.
struct StepState {
  Field u0;
  std::vector<Field> u;
  std::vector<Field> tau;
  std::vector<Field> rhs_cache;
  int step_index = -1;  // global step id, used in diagnostics only

  static StepState spread(const Field& start, int num_nodes) {
    StepState s;
    s.u0 = start;
    s.u.assign(num_nodes, start);
    return s;
  }
};

struct SweepCounters {
  long newton_iters = 0;
  long qn_steps = 0;
  long linear_solves = 0;
  long gmres_iters = 0;
  long gmres_failures = 0;  // inner solves that hit max_iter
  std::vector<long> gmres_iters_per_node;

  void add_node_solve(int node, const SolveReport& rep);
  SweepCounters& operator+=(const SweepCounters& o);
};

struct SweepOptions {
  GmresOptions gmres;
  double newton_tol = 1e-11;
  int newton_max = 1;  // 1 reproduces the single-linearization sweep
  int n_qn = 1;
  bool qn_guess_spread_u0 = false;
};

// Per-node residual of the collocation problem, r_m = rhs_m - u_m with
// rhs_m = u0 + dt sum_j Q(m,j) f(u_j) + tau_m.
std::vector<Field> collocation_residual(const StepState& state,
                                        const QuadratureRule& rule, double dt,
                                        const Problem& problem);

// Max over nodes of the infinity norm of the residual above.
double collocation_residual_norm(const StepState& state,
                                 const QuadratureRule& rule, double dt,
                                 const Problem& problem);

// One sweep of preconditioned Picard iteration: solve node by node
//   u_m - dt QDelta(m,m) f(u_m) = u0 + c_m + dt sum_{n<m} QDelta(m,n) f(u_n)
// with c(u^k) = dt (Q - QDelta) f(u^k) + tau frozen at sweep start.  Each
// node equation is solved by Newton (Jacobian refreshed per iteration,
// GMRES inner solves, warm-started from the current node value).
void sdc_sweep_serial(StepState& state, const QuadratureRule& rule, double dt,
                      const Problem& problem, const SweepOptions& opts,
                      SweepCounters& counters);

// Which system one Quasi-Newton step linearizes: the preconditioned sweep
// equation (QDelta, lower triangular) or the full collocation problem (Q).
enum class QnVariant { QDelta, Q };

// n_qn Quasi-Newton steps with the Jacobian frozen at the step's initial
// value u0.  The frozen linear system is block-diagonalized over the nodes
// with the eigendecomposition of QDelta resp. Q, so the M shifted complex
// systems (I - dt lambda_m J) e_m = r_m are independent and run under the
// optional node scheduler.  `factors` must be diagonalize(rule.Q_delta) for
// the QDelta variant and diagonalize(rule.Q) for the Q variant.
void qn_sweep_diag(StepState& state, const QuadratureRule& rule, double dt,
                   const Problem& problem, QnVariant variant,
                   const EigenFactors& factors, const SweepOptions& opts,
                   SweepCounters& counters,
                   const NodeScheduler* scheduler = nullptr);

}  // namespace paratime

#endif
