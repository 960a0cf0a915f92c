// SPDX-License-Identifier: Apache-2.0
#include "paratime/exec.hpp"

#include <exception>
#include <future>
#include <memory>
#include <string>
#include <thread>

namespace paratime {

std::vector<int> map_nodes_to_groups(int num_nodes, int p_nodes) {
  if (num_nodes < 1)
    throw InvalidArgument("map_nodes_to_groups: need at least one node");
  if (p_nodes < 1 || p_nodes > num_nodes)
    throw InvalidArgument(
        "map_nodes_to_groups: p_nodes must be in [1, num_nodes], got " +
        std::to_string(p_nodes) + " for " + std::to_string(num_nodes) +
        " nodes");
  std::vector<int> groups(num_nodes);
  for (int m = 0; m < num_nodes; ++m) groups[m] = m % p_nodes;
  return groups;
}

NodeScheduler::NodeScheduler(int num_nodes, int p_nodes, bool threaded)
    : p_nodes_(p_nodes), threaded_(threaded && p_nodes > 1),
      groups_(map_nodes_to_groups(num_nodes, p_nodes)) {}

void NodeScheduler::run(std::vector<std::function<void()>>& tasks) const {
  if (tasks.size() != groups_.size())
    throw InvalidArgument("NodeScheduler: one task per node required");
  auto run_group = [&](int g) {
    for (std::size_t m = 0; m < tasks.size(); ++m)
      if (groups_[m] == g) tasks[m]();
  };
  if (!threaded_) {
    for (int g = 0; g < p_nodes_; ++g) run_group(g);
    return;
  }
  std::vector<std::future<void>> futures;
  futures.reserve(p_nodes_);
  for (int g = 0; g < p_nodes_; ++g)
    futures.push_back(std::async(std::launch::async, run_group, g));
  std::exception_ptr first;
  for (auto& f : futures) {
    try {
      f.get();
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

WorkerGrid WorkerGrid::make(int p_steps, int p_nodes, int window,
                            int num_nodes) {
  if (window < 1) throw InvalidArgument("WorkerGrid: window must be >= 1");
  if (p_steps < 1 || p_steps > window)
    throw InvalidArgument("WorkerGrid: p_steps must be in [1, window], got " +
                          std::to_string(p_steps) + " for window " +
                          std::to_string(window));
  if (p_nodes < 1 || p_nodes > num_nodes)
    throw InvalidArgument(
        "WorkerGrid: p_nodes must be in [1, num_nodes], got " +
        std::to_string(p_nodes));
  WorkerGrid g;
  g.p_steps = p_steps;
  g.p_nodes = p_nodes;
  g.window = window;
  return g;
}

namespace {

const char* kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::CoarseForward: return "coarse-forward";
    case MsgKind::FineForward: return "fine-forward";
    case MsgKind::Status: return "status";
  }
  return "?";
}

}  // namespace

void Channel::send(Message msg) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (closed_) throw SchedulingError("Channel::send on closed channel");
    switch (msg.kind) {
      case MsgKind::CoarseForward: ++sent_.coarse_fwd; break;
      case MsgKind::FineForward: ++sent_.fine_fwd; break;
      case MsgKind::Status: ++sent_.status; break;
    }
    queue_.push_back(std::move(msg));
  }
  cv_.notify_one();
}

Message Channel::recv(MsgKind kind, int iteration) {
  std::unique_lock<std::mutex> lock(mu_);
  if (queue_.empty()) {
    if (!blocking_)
      throw SchedulingError(
          std::string("Channel::recv: expected ") + kind_name(kind) +
          " for iteration " + std::to_string(iteration) +
          " but the queue is empty; the producer never sent it");
    if (!cv_.wait_for(lock, timeout_,
                      [&] { return !queue_.empty() || closed_; }))
      throw SchedulingError(
          std::string("Channel::recv: timed out waiting for ") +
          kind_name(kind) + " of iteration " + std::to_string(iteration) +
          "; pipeline deadlocked or a worker died");
  }
  if (queue_.empty() && closed_)
    throw SchedulingError("Channel::recv: channel closed by producer");
  Message msg = std::move(queue_.front());
  queue_.pop_front();
  if (msg.kind != kind || msg.iteration != iteration)
    throw SchedulingError(
        std::string("Channel::recv: tag mismatch, expected ") +
        kind_name(kind) + "/" + std::to_string(iteration) + " but got " +
        kind_name(msg.kind) + "/" + std::to_string(msg.iteration));
  return msg;
}

void Channel::close() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

void execute(const WorkerGrid& grid, bool threaded,
             const std::function<void(SlotIO&)>& body, int num_slots,
             MessageCounters& counters,
             std::chrono::milliseconds recv_timeout) {
  if (num_slots < 1) throw InvalidArgument("execute: need at least one slot");
  const bool run_threads = threaded && grid.p_steps > 1 && num_slots > 1;

  std::vector<std::unique_ptr<Channel>> channels;  // channel l feeds slot l+1
  channels.reserve(num_slots > 1 ? num_slots - 1 : 0);
  for (int l = 0; l + 1 < num_slots; ++l)
    channels.push_back(std::make_unique<Channel>(
        grid.worker_of(l) != grid.worker_of(l + 1), run_threads,
        recv_timeout));

  auto make_io = [&](int slot) {
    SlotIO io;
    io.slot = slot;
    io.from_left = slot > 0 ? channels[slot - 1].get() : nullptr;
    io.to_right = slot + 1 < num_slots ? channels[slot].get() : nullptr;
    return io;
  };

  auto run_slot = [&](int slot) {
    SlotIO io = make_io(slot);
    try {
      body(io);
    } catch (...) {
      // Wake the right neighbor instead of letting it run into the
      // receive timeout.
      if (io.to_right) io.to_right->close();
      throw;
    }
  };

  if (!run_threads) {
    for (int slot = 0; slot < num_slots; ++slot) run_slot(slot);
  } else {
    auto run_worker = [&](int w) {
      for (int slot = w; slot < num_slots; slot += grid.p_steps)
        run_slot(slot);
    };
    std::vector<std::future<void>> futures;
    futures.reserve(grid.p_steps);
    for (int w = 0; w < grid.p_steps; ++w)
      futures.push_back(std::async(std::launch::async, run_worker, w));
    std::exception_ptr first;
    for (auto& f : futures) {
      try {
        f.get();
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
  }

  for (const auto& ch : channels)
    if (ch->cross_worker()) counters += ch->sent();
}

}  // namespace paratime
