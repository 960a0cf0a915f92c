// SPDX-License-Identifier: Apache-2.0
#include "paratime/controller.hpp"

#include <algorithm>
#include <climits>
#include <memory>
#include <string>

namespace paratime {

long RunStats::linear_solves_total() const {
  long t = 0;
  for (const auto& s : steps) t += s.fine.linear_solves + s.coarse.linear_solves;
  return t;
}

long RunStats::gmres_iters_total() const {
  long t = 0;
  for (const auto& s : steps) t += s.fine.gmres_iters + s.coarse.gmres_iters;
  return t;
}

long RunStats::gmres_failures_total() const {
  long t = 0;
  for (const auto& s : steps)
    t += s.fine.gmres_failures + s.coarse.gmres_failures;
  return t;
}

long RunStats::newton_iters_total() const {
  long t = 0;
  for (const auto& s : steps) t += s.fine.newton_iters + s.coarse.newton_iters;
  return t;
}

long RunStats::qn_steps_total() const {
  long t = 0;
  for (const auto& s : steps) t += s.fine.qn_steps + s.coarse.qn_steps;
  return t;
}

std::vector<long> RunStats::gmres_iters_per_node() const {
  std::vector<long> per_node;
  auto merge = [&per_node](const std::vector<long>& v) {
    if (per_node.size() < v.size()) per_node.resize(v.size(), 0);
    for (std::size_t i = 0; i < v.size(); ++i) per_node[i] += v[i];
  };
  for (const auto& s : steps) {
    merge(s.fine.gmres_iters_per_node);
    merge(s.coarse.gmres_iters_per_node);
  }
  return per_node;
}

namespace {

bool uses_qn(RunMode mode) {
  return mode == RunMode::PfasstErQDelta || mode == RunMode::PfasstErQ;
}

}  // namespace

StepSlot::StepSlot(const LevelHierarchy& levels, const ControllerOptions& opts,
                   const NodeScheduler* scheduler, int global_step,
                   const Field& start_value)
    : levels_(levels), opts_(opts), scheduler_(scheduler) {
  const int m = levels.fine().rule.num_nodes;
  if (opts.mode == RunMode::PfasstErQDelta)
    qn_factors_ = diagonalize(levels.fine().rule.Q_delta);
  else if (opts.mode == RunMode::PfasstErQ)
    qn_factors_ = diagonalize(levels.fine().rule.Q);
  fine_ = StepState::spread(start_value, m);
  fine_.step_index = global_step;
  if (levels.has_coarse()) {
    coarse_ = StepState::spread(levels.restrict_field(start_value), m);
    coarse_.step_index = global_step;
  }
  record_.global_step = global_step;
}

void StepSlot::run_sweep(StepState& state, const Level& level,
                         const EigenFactors* factors,
                         SweepCounters& counters) {
  switch (opts_.mode) {
    case RunMode::SdcSingleLevel:
    case RunMode::Mlsdc:
    case RunMode::Pfasst:
      sdc_sweep_serial(state, level.rule, opts_.dt, *level.problem,
                       opts_.sweep, counters);
      break;
    case RunMode::PfasstErQDelta:
      qn_sweep_diag(state, level.rule, opts_.dt, *level.problem,
                    QnVariant::QDelta, *factors, opts_.sweep, counters,
                    scheduler_);
      break;
    case RunMode::PfasstErQ:
      qn_sweep_diag(state, level.rule, opts_.dt, *level.problem, QnVariant::Q,
                    *factors, opts_.sweep, counters, scheduler_);
      break;
  }
}

Field StepSlot::coarse_phase(const Field& coarse_u0) {
  coarse_.u0 = coarse_u0;
  coarse_.tau = fas_correction(fine_.u, levels_, opts_.dt);
  restricted_.clear();
  restricted_.reserve(fine_.u.size());
  for (const Field& u : fine_.u)
    restricted_.push_back(levels_.restrict_field(u));
  coarse_.u = restricted_;
  run_sweep(coarse_, levels_.coarse(), qn_factors_.has_value()
                                           ? &*qn_factors_
                                           : nullptr,
            record_.coarse);
  return coarse_.u.back();
}

Field StepSlot::cgc_phase() {
  cgc_update(fine_.u, coarse_.u, restricted_, levels_);
  return fine_.u.back();
}

void StepSlot::fine_phase(const Field& fine_u0) {
  fine_.u0 = fine_u0;
  run_sweep(fine_, levels_.fine(),
            qn_factors_.has_value() ? &*qn_factors_ : nullptr, record_.fine);
  record_.residual_history.push_back(collocation_residual_norm(
      fine_, levels_.fine().rule, opts_.dt, *levels_.fine().problem));
  record_.iterations += 1;
}

namespace {

Field wrap_field(const Mesh2D& mesh, int comps, Eigen::VectorXd data) {
  return Field(mesh, comps, std::move(data));
}

struct WindowContext {
  const LevelHierarchy& levels;
  const ControllerOptions& opts;
  Field window_start;
  Field coarse_start;  // restricted window start, two-level modes only
};

// Whole-window schedule with convergence freezing: each slot runs its own
// iteration loop to completion.  Valid because every dependency points
// from slot l to slot l+1; the runner below maps slots to workers and the
// receives enforce ordering in the threaded case.
void pipelined_window(std::vector<std::unique_ptr<StepSlot>>& slots,
                      const WindowContext& ctx, const WorkerGrid& grid,
                      RunStats& stats) {
  const bool two_level = ctx.levels.has_coarse();
  const Mesh2D& fmesh = ctx.levels.fine().problem->mesh();
  const int fcomp = ctx.levels.fine().problem->components();

  auto body = [&](SlotIO& io) {
    StepSlot& slot = *slots[io.slot];
    // The window boundary behaves like a neighbor that converged before
    // iteration one and forever forwards the window start values.
    int left_frozen_at = io.from_left ? INT_MAX : 0;
    bool left_converged = io.from_left ? false : true;
    Field left_final_fine = ctx.window_start;
    Field left_final_coarse = ctx.coarse_start;

    for (int k = 1; k <= ctx.opts.max_outer; ++k) {
      if (two_level) {
        Field cu0;
        if (!io.from_left) {
          cu0 = ctx.coarse_start;
        } else if (k <= left_frozen_at) {
          Message msg = io.from_left->recv(MsgKind::CoarseForward, k);
          cu0 = wrap_field(ctx.levels.coarse().problem->mesh(),
                           ctx.levels.coarse().problem->components(),
                           std::move(msg.payload));
        } else {
          cu0 = left_final_coarse;
        }
        Field coarse_out = slot.coarse_phase(cu0);
        if (io.to_right)
          io.to_right->send(
              {MsgKind::CoarseForward, k, false, false,
               std::move(coarse_out.data), Eigen::VectorXd()});
        Field fine_fwd = slot.cgc_phase();
        if (io.to_right)
          io.to_right->send({MsgKind::FineForward, k, false, false,
                             std::move(fine_fwd.data), Eigen::VectorXd()});
      }

      Field fu0;
      if (!io.from_left) {
        fu0 = ctx.window_start;
      } else if (k <= left_frozen_at) {
        Message msg = io.from_left->recv(MsgKind::FineForward, k);
        fu0 = wrap_field(fmesh, fcomp, std::move(msg.payload));
      } else {
        fu0 = left_final_fine;
      }
      slot.fine_phase(fu0);

      if (io.from_left && left_frozen_at == INT_MAX) {
        Message st = io.from_left->recv(MsgKind::Status, k);
        if (st.terminal) {
          left_frozen_at = k;
          left_converged = st.converged;
          left_final_fine = wrap_field(fmesh, fcomp, std::move(st.payload));
          if (two_level)
            left_final_coarse =
                wrap_field(ctx.levels.coarse().problem->mesh(),
                           ctx.levels.coarse().problem->components(),
                           std::move(st.payload2));
        }
      }

      const bool can_freeze =
          ctx.opts.freeze_converged && slot.meets_tol() &&
          left_frozen_at <= k && left_converged;
      if (can_freeze || k == ctx.opts.max_outer) {
        slot.mark_converged(can_freeze);
        if (io.to_right) {
          Message st{MsgKind::Status, k, true, can_freeze,
                     slot.fine_last_node().data, Eigen::VectorXd()};
          if (two_level) st.payload2 = slot.coarse_last_node().data;
          io.to_right->send(std::move(st));
        }
        break;
      }
      if (io.to_right)
        io.to_right->send({MsgKind::Status, k, false, false,
                           Eigen::VectorXd(), Eigen::VectorXd()});
    }
  };

  execute(grid, ctx.opts.threaded, body, static_cast<int>(slots.size()),
          stats.messages, ctx.opts.recv_timeout);
}

// Freeze-off schedule: all slots advance together and a global residual
// check ends the iteration.  Runs in-process; the channels still model
// the hand-offs so message accounting matches the layout.
void lockstep_window(std::vector<std::unique_ptr<StepSlot>>& slots,
                     const WindowContext& ctx, const WorkerGrid& grid,
                     RunStats& stats) {
  const bool two_level = ctx.levels.has_coarse();
  const int w = static_cast<int>(slots.size());
  const Mesh2D& fmesh = ctx.levels.fine().problem->mesh();
  const int fcomp = ctx.levels.fine().problem->components();

  std::vector<std::unique_ptr<Channel>> channels;
  for (int l = 0; l + 1 < w; ++l)
    channels.push_back(std::make_unique<Channel>(
        grid.worker_of(l) != grid.worker_of(l + 1), false,
        ctx.opts.recv_timeout));

  bool all_converged = false;
  for (int k = 1; k <= ctx.opts.max_outer && !all_converged; ++k) {
    if (two_level) {
      for (int l = 0; l < w; ++l) {
        Field cu0;
        if (l == 0) {
          cu0 = ctx.coarse_start;
        } else {
          Message msg = channels[l - 1]->recv(MsgKind::CoarseForward, k);
          cu0 = wrap_field(ctx.levels.coarse().problem->mesh(),
                           ctx.levels.coarse().problem->components(),
                           std::move(msg.payload));
        }
        Field out = slots[l]->coarse_phase(cu0);
        if (l + 1 < w)
          channels[l]->send({MsgKind::CoarseForward, k, false, false,
                             std::move(out.data), Eigen::VectorXd()});
      }
      for (int l = 0; l < w; ++l) {
        Field fwd = slots[l]->cgc_phase();
        if (l + 1 < w)
          channels[l]->send({MsgKind::FineForward, k, false, false,
                             std::move(fwd.data), Eigen::VectorXd()});
      }
    }
    for (int l = 0; l < w; ++l) {
      Field fu0 = l == 0 ? ctx.window_start
                         : wrap_field(fmesh, fcomp,
                                      channels[l - 1]
                                          ->recv(MsgKind::FineForward, k)
                                          .payload);
      slots[l]->fine_phase(fu0);
    }
    all_converged = true;
    for (const auto& s : slots) all_converged = all_converged && s->meets_tol();
  }
  for (auto& s : slots) s->mark_converged(all_converged);

  for (const auto& ch : channels)
    if (ch->cross_worker()) stats.messages += ch->sent();
}

}  // namespace

RunResult run(const LevelHierarchy& levels, const Field& u_start,
              const ControllerOptions& opts) {
  if (opts.num_steps < 1)
    throw InvalidArgument("run: num_steps must be >= 1");
  if (!(opts.dt > 0.0)) throw InvalidArgument("run: dt must be > 0");
  if (opts.max_outer < 1)
    throw InvalidArgument("run: max_outer must be >= 1");
  const bool two_level = opts.mode != RunMode::SdcSingleLevel;
  if (two_level && !levels.has_coarse())
    throw InvalidArgument("run: this mode needs a coarse level");
  if (!two_level && levels.has_coarse())
    throw InvalidArgument(
        "run: single-level mode with a two-level hierarchy; drop the coarse "
        "level");
  if ((opts.mode == RunMode::SdcSingleLevel || opts.mode == RunMode::Mlsdc) &&
      opts.window != 1)
    throw InvalidArgument("run: serial modes use a window of one step");

  const int m = levels.fine().rule.num_nodes;
  const WorkerGrid grid =
      WorkerGrid::make(opts.p_steps, opts.p_nodes, opts.window, m);
  const NodeScheduler scheduler(m, opts.p_nodes, opts.threaded);

  RunStats stats;
  Field current = u_start;
  for (int first = 0; first < opts.num_steps; first += opts.window) {
    const int w = std::min(opts.window, opts.num_steps - first);

    WindowContext ctx{levels, opts, current,
                      two_level ? levels.restrict_field(current) : Field()};
    std::vector<std::unique_ptr<StepSlot>> slots;
    slots.reserve(w);
    for (int l = 0; l < w; ++l)
      slots.push_back(std::make_unique<StepSlot>(
          levels, opts, uses_qn(opts.mode) ? &scheduler : nullptr, first + l,
          current));

    if (opts.freeze_converged)
      pipelined_window(slots, ctx, grid, stats);
    else
      lockstep_window(slots, ctx, grid, stats);

    int window_iters = 0;
    for (auto& s : slots) {
      window_iters = std::max(window_iters, s->record().iterations);
      stats.converged = stats.converged && s->record().converged;
      stats.steps.push_back(std::move(s->record()));
    }
    stats.outer_iterations += window_iters;
    stats.windows += 1;
    current = slots.back()->fine_last_node();
  }

  // Each Quasi-Newton step gathers the node residuals into the eigenbasis
  // and the node solutions back out; with one node group both stay local.
  if (opts.p_nodes > 1) stats.messages.node_gathers = 2 * stats.qn_steps_total();

  return {std::move(current), std::move(stats)};
}

}  // namespace paratime
