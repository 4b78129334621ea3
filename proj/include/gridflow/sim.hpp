#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "gridflow/graph.hpp"

// Cycle-accurate simulation of the pipelined dataflow graph with almost-full
// FIFOs, used as the throughput-preservation oracle.
//
// Time is one global counter; all actors update synchronously (decide on the
// start-of-cycle state, then commit), so the result is order-independent and
// bit-for-bit deterministic. A channel is a FIFO queue fed through a forward
// delay line of lat+balance cycles. Its full signal asserts early: writes are
// refused once the queue holds storage - grace tokens, and the grace margin
// absorbs whatever is still in flight. When built from a pipelined graph the
// delay line registers also add storage, so storage = capacity + delay and
// grace = delay: the original capacity stays usable and no token is ever
// dropped.

namespace gridflow {

struct SimChannelConfig {
  count_t storage = 1;  // total queue slots
  count_t grace = 0;    // early-full margin; threshold = storage - grace
  count_t delay = 0;    // forward delay-line length in cycles
};

struct SimResult {
  count_t total_cycles = 0;
  std::map<std::string, count_t> sink_tokens;     // firings of each sink task
  std::map<std::string, count_t> max_occupancy;   // per channel queue peak
  bool deadlock = false;   // quiescent with unfinished joined actors
  bool exhausted = false;  // max_cycles hit before quiescence
};

namespace detail {

enum class Token : std::uint8_t { Data, Eot };

struct SimChannel {
  SimChannelConfig cfg;
  std::deque<Token> queue;
  std::deque<std::pair<count_t, Token>> in_flight;  // (arrival cycle, token)
  count_t peak = 0;

  bool almost_full() const {
    return static_cast<count_t>(queue.size()) >= cfg.storage - cfg.grace;
  }
  void deliver(count_t now) {
    while (!in_flight.empty() && in_flight.front().first <= now) {
      queue.push_back(in_flight.front().second);
      in_flight.pop_front();
    }
    peak = std::max<count_t>(peak, queue.size());
  }
};

}  // namespace detail

// Runs the graph until quiescence or max_cycles. Every task must carry an
// ActorSpec. Channel configurations default to storage = capacity + delay,
// grace = delay, delay = lat + balance; overrides are for stress tests.
inline SimResult simulate(
    const TaskGraph& graph, count_t max_cycles,
    const std::map<std::string, SimChannelConfig>& overrides = {}) {
  require_valid(graph);
  int n_tasks = static_cast<int>(graph.tasks.size());
  int n_channels = static_cast<int>(graph.channels.size());
  auto index = graph.task_index_map();

  for (const auto& t : graph.tasks)
    if (!t.actor)
      fail(ErrorKind::InvalidInput,
           "task '" + t.name + "' has no actor spec; cannot simulate");

  std::vector<detail::SimChannel> channels(n_channels);
  std::vector<std::vector<int>> inputs(n_tasks), outputs(n_tasks);
  for (int ci = 0; ci < n_channels; ++ci) {
    const Channel& ch = graph.channels[ci];
    auto it = overrides.find(ch.id);
    if (it != overrides.end()) {
      channels[ci].cfg = it->second;
    } else {
      count_t delay = ch.lat + ch.balance;
      channels[ci].cfg = {ch.capacity + delay, delay, delay};
    }
    outputs[index.at(ch.src)].push_back(ci);
    inputs[index.at(ch.dst)].push_back(ci);
  }

  std::vector<count_t> fired(n_tasks, 0);
  std::vector<count_t> last_fire(n_tasks, -1);
  std::vector<bool> eot_done(n_tasks, false);
  std::vector<bool> first_fire(n_tasks, true);

  SimResult result;
  count_t t = 0;
  for (; t < max_cycles; ++t) {
    // phase 1: decide on start-of-cycle state
    std::vector<int> firing, emitting;
    std::vector<int> opening;  // channel indices whose EoT head gets consumed
    bool cooldown_blocked = false;
    for (int ti = 0; ti < n_tasks; ++ti) {
      const ActorSpec& spec = *graph.tasks[ti].actor;
      bool joined = spec.kind == ActorSpec::Kind::Joined;
      bool done_firing = joined && fired[ti] >= spec.firings;

      if (done_firing || !joined) {
        // finished (or detached) actors drain EoT tokens off their inputs
        for (int ci : inputs[ti]) {
          auto& q = channels[ci].queue;
          if (!q.empty() && q.front() == detail::Token::Eot)
            opening.push_back(ci);
        }
      }
      if (done_firing) {
        if (!eot_done[ti]) {
          bool can = true;
          for (int ci : outputs[ti])
            if (channels[ci].almost_full()) can = false;
          if (can) emitting.push_back(ti);
        }
        continue;
      }
      bool ready = true;
      for (int ci : inputs[ti]) {
        auto& q = channels[ci].queue;
        if (q.empty() || q.front() != detail::Token::Data) ready = false;
      }
      for (int ci : outputs[ti])
        if (channels[ci].almost_full()) ready = false;
      if (!ready) continue;
      if (!first_fire[ti] && t - last_fire[ti] < spec.ii) {
        cooldown_blocked = true;
        continue;
      }
      firing.push_back(ti);
    }

    // phase 2: commit
    bool active = !firing.empty() || !emitting.empty() || !opening.empty();
    for (int ci : opening) channels[ci].queue.pop_front();
    for (int ti : firing) {
      const ActorSpec& spec = *graph.tasks[ti].actor;
      for (int ci : inputs[ti]) channels[ci].queue.pop_front();
      for (int ci : outputs[ti])
        channels[ci].in_flight.push_back(
            {t + spec.latency + channels[ci].cfg.delay, detail::Token::Data});
      ++fired[ti];
      last_fire[ti] = t;
      first_fire[ti] = false;
    }
    for (int ti : emitting) {
      const ActorSpec& spec = *graph.tasks[ti].actor;
      for (int ci : outputs[ti])
        channels[ci].in_flight.push_back(
            {t + spec.latency + channels[ci].cfg.delay, detail::Token::Eot});
      eot_done[ti] = true;
    }
    bool tokens_pending = false;
    for (auto& ch : channels) {
      count_t before = ch.queue.size();
      ch.deliver(t);
      if (static_cast<count_t>(ch.queue.size()) != before) active = true;
      if (!ch.in_flight.empty()) tokens_pending = true;
    }
    if (active) result.total_cycles = t + 1;
    if (!active && !tokens_pending && !cooldown_blocked) break;
  }
  result.exhausted = t >= max_cycles;

  if (!result.exhausted) {
    for (int ti = 0; ti < n_tasks; ++ti) {
      const ActorSpec& spec = *graph.tasks[ti].actor;
      if (spec.kind == ActorSpec::Kind::Joined && fired[ti] < spec.firings)
        result.deadlock = true;
    }
  }
  for (int ti = 0; ti < n_tasks; ++ti)
    if (outputs[ti].empty())
      result.sink_tokens[graph.tasks[ti].name] = fired[ti];
  for (int ci = 0; ci < n_channels; ++ci)
    result.max_occupancy[graph.channels[ci].id] = channels[ci].peak;
  return result;
}

struct ThroughputComparison {
  SimResult before;
  SimResult after;
  double ratio = 0.0;  // cycles_after / cycles_before
};

// Simulates both graphs and reports the cycle ratio. The graphs must agree
// on everything except lat and balance.
inline ThroughputComparison compare_throughput(const TaskGraph& before,
                                               const TaskGraph& after,
                                               count_t max_cycles) {
  if (before.tasks.size() != after.tasks.size() ||
      before.channels.size() != after.channels.size())
    fail(ErrorKind::InvalidInput, "throughput comparison: topology mismatch");
  for (size_t i = 0; i < before.tasks.size(); ++i)
    if (before.tasks[i].name != after.tasks[i].name)
      fail(ErrorKind::InvalidInput, "throughput comparison: task list differs");
  for (size_t i = 0; i < before.channels.size(); ++i) {
    const Channel& a = before.channels[i];
    const Channel& b = after.channels[i];
    if (a.id != b.id || a.src != b.src || a.dst != b.dst ||
        a.width != b.width || a.capacity != b.capacity)
      fail(ErrorKind::InvalidInput,
           "throughput comparison: channel '" + a.id + "' differs");
  }
  ThroughputComparison cmp;
  cmp.before = simulate(before, max_cycles);
  cmp.after = simulate(after, max_cycles);
  cmp.ratio = cmp.before.total_cycles == 0
                  ? 1.0
                  : static_cast<double>(cmp.after.total_cycles) /
                        static_cast<double>(cmp.before.total_cycles);
  return cmp;
}

}  // namespace gridflow
