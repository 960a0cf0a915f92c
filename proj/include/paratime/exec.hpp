// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_EXEC_HPP
#define PARATIME_EXEC_HPP

#include <Eigen/Dense>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <vector>

#include "paratime/errors.hpp"

namespace paratime {

// Round-robin assignment of collocation nodes to p_nodes solver groups,
// groups[m] = m % p_nodes.  The later nodes carry the stiffer shifted
// systems, so striding spreads the expensive ones across groups.
std::vector<int> map_nodes_to_groups(int num_nodes, int p_nodes);

// Runs the M independent node solves of one Quasi-Newton step, grouped
// round-robin.  Sequential mode executes groups in order; threaded mode
// gives each group its own thread.  Tasks touch disjoint per-node slots,
// so the result does not depend on the schedule.
class NodeScheduler {
public:
  NodeScheduler(int num_nodes, int p_nodes, bool threaded);

  int p_nodes() const { return p_nodes_; }
  const std::vector<int>& groups() const { return groups_; }

  void run(std::vector<std::function<void()>>& tasks) const;

private:
  int p_nodes_;
  bool threaded_;
  std::vector<int> groups_;
};

// Logical processor layout: `window` step slots multiplexed round-robin
// onto p_steps step workers, each step worker using p_nodes node groups.
struct WorkerGrid {
  int p_steps = 1;
  int p_nodes = 1;
  int window = 1;

  int worker_of(int slot) const { return slot % p_steps; }

  // Validates against the rule size; layouts never change results, only
  // which hand-offs count as messages.
  static WorkerGrid make(int p_steps, int p_nodes, int window, int num_nodes);
};

enum class MsgKind { CoarseForward, FineForward, Status };

// One hop between neighboring step slots.  CoarseForward carries the
// coarse last-node value of the sender's current iteration, FineForward
// the post-correction fine last-node value, Status the sender's
// convergence state (terminal = sender froze; payload then holds its
// final fine last-node value, payload2 the final coarse one).
struct Message {
  MsgKind kind = MsgKind::Status;
  int iteration = 0;
  bool terminal = false;
  bool converged = false;
  Eigen::VectorXd payload;
  Eigen::VectorXd payload2;
};

struct MessageCounters {
  long coarse_fwd = 0;
  long fine_fwd = 0;
  long status = 0;
  long node_gathers = 0;

  long total() const { return coarse_fwd + fine_fwd + status + node_gathers; }
  MessageCounters& operator+=(const MessageCounters& o) {
    coarse_fwd += o.coarse_fwd;
    fine_fwd += o.fine_fwd;
    status += o.status;
    node_gathers += o.node_gathers;
    return *this;
  }
};

// Single-producer single-consumer FIFO between adjacent step slots.
// Receives verify kind and iteration tag, so a scheduling bug surfaces as
// a SchedulingError instead of silently consuming a stale payload.  In
// sequential mode the producer always ran first and an empty queue is
// immediately fatal; in blocking mode an empty queue waits up to the
// timeout (deadlock detection).
class Channel {
public:
  Channel(bool cross_worker, bool blocking, std::chrono::milliseconds timeout)
      : cross_worker_(cross_worker), blocking_(blocking), timeout_(timeout) {}

  void send(Message msg);
  Message recv(MsgKind kind, int iteration);

  // Wakes any blocked receiver with an error; used to tear the pipeline
  // down when a worker fails.
  void close();

  bool cross_worker() const { return cross_worker_; }
  // Sends observed on this channel; only cross-worker channels count
  // toward the run's message totals.
  const MessageCounters& sent() const { return sent_; }

private:
  bool cross_worker_;
  bool blocking_;
  std::chrono::milliseconds timeout_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> queue_;
  MessageCounters sent_;
  bool closed_ = false;
};

// Messaging endpoints of one step slot; null channel = window boundary.
struct SlotIO {
  int slot = 0;
  Channel* from_left = nullptr;
  Channel* to_right = nullptr;
};

// Runs one window: `body(io)` is the complete per-slot program (the full
// iteration loop of that step).  Sequential mode executes slots in
// ascending order, which is a valid schedule because all dependencies
// point left to right; threaded mode runs p_steps workers that process
// their slots in ascending order and block on receives.  Cross-worker
// sends are accumulated into `counters`.
void execute(const WorkerGrid& grid, bool threaded,
             const std::function<void(SlotIO&)>& body, int num_slots,
             MessageCounters& counters,
             std::chrono::milliseconds recv_timeout);

}  // namespace paratime

#endif
