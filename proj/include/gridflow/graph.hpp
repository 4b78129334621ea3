#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gridflow/resources.hpp"

namespace gridflow {

// Unit-rate actor behaviour for the dataflow simulator. Every firing consumes
// one token from each input channel and produces one token to each output.
struct ActorSpec {
  enum class Kind { Joined, Detached };

  count_t ii = 1;        // min cycles between firings
  count_t latency = 0;   // cycles from consume to handing tokens to channels
  count_t firings = 0;   // total firings before EoT (ignored for Detached)
  Kind kind = Kind::Joined;
};

struct SlotCoord {
  int row = 0;
  int col = 0;

  bool operator==(const SlotCoord& o) const {
    return row == o.row && col == o.col;
  }
  bool operator!=(const SlotCoord& o) const { return !(*this == o); }
  bool operator<(const SlotCoord& o) const {
    return row != o.row ? row < o.row : col < o.col;
  }
};

struct Task {
  std::string name;
  ResourceVector area;
  count_t hbm_required = 0;  // mirrors area.hbm_ch
  std::optional<SlotCoord> fixed_slot;
  std::optional<std::string> group;  // same-slot group id
  std::optional<ActorSpec> actor;
};

struct Channel {
  std::string id;
  std::string src;
  std::string dst;
  count_t width = 1;      // bits
  count_t capacity = 1;   // token slots
  count_t lat = 0;        // pipeline latency, set by the pipeliner
  count_t balance = 0;    // balancing latency, set by the balancer
  std::optional<count_t> per_crossing_override;
  bool async_mmap = false;
};

// Declaration order of tasks and channels is preserved: it fixes ILP variable
// order, and with it every deterministic tie-break downstream.
struct TaskGraph {
  std::vector<Task> tasks;
  std::vector<Channel> channels;

  const Task* find_task(const std::string& name) const {
    for (const auto& t : tasks)
      if (t.name == name) return &t;
    return nullptr;
  }

  int task_index(const std::string& name) const {
    for (size_t i = 0; i < tasks.size(); ++i)
      if (tasks[i].name == name) return static_cast<int>(i);
    return -1;
  }

  // name -> index map for graphs large enough that linear scans hurt
  std::unordered_map<std::string, int> task_index_map() const {
    std::unordered_map<std::string, int> m;
    m.reserve(tasks.size());
    for (size_t i = 0; i < tasks.size(); ++i)
      m.emplace(tasks[i].name, static_cast<int>(i));
    return m;
  }
};

struct Violation {
  std::string code;     // stable machine-readable tag
  std::string message;  // human-readable detail
};

// Structural validation. Violations are data, not failures: all of them are
// reported, none thrown.
inline std::vector<Violation> validate_graph(const TaskGraph& graph) {
  std::vector<Violation> out;
  std::unordered_set<std::string> names;
  for (const auto& t : graph.tasks) {
    if (!names.insert(t.name).second)
      out.push_back({"duplicate-task", "duplicate task name '" + t.name + "'"});
    if (!t.area.all_non_negative())
      out.push_back({"negative-area",
                     "task '" + t.name + "' has a negative area component"});
    if (t.hbm_required != t.area.hbm_ch)
      out.push_back({"hbm-mismatch",
                     "task '" + t.name +
                         "' hbm_required does not equal area.hbm_ch"});
    if (t.actor && t.actor->ii < 1)
      out.push_back({"bad-actor", "task '" + t.name + "' has ii < 1"});
  }
  std::unordered_set<std::string> channel_ids;
  for (const auto& c : graph.channels) {
    if (!channel_ids.insert(c.id).second)
      out.push_back({"duplicate-channel", "duplicate channel id '" + c.id + "'"});
    for (const std::string* end : {&c.src, &c.dst}) {
      if (!names.count(*end))
        out.push_back({"unknown-endpoint", "channel '" + c.id +
                                               "' names unknown task '" +
                                               *end + "'"});
    }
    if (c.src == c.dst)
      out.push_back({"self-loop",
                     "channel '" + c.id + "' connects task '" + c.src +
                         "' to itself"});
    if (c.width < 1)
      out.push_back({"zero-width", "channel '" + c.id + "' has width < 1"});
    if (c.capacity < 1)
      out.push_back(
          {"zero-capacity", "channel '" + c.id + "' has capacity < 1"});
    if (c.lat < 0 || c.balance < 0)
      out.push_back(
          {"negative-latency", "channel '" + c.id + "' has negative latency"});
  }
  return out;
}

inline void require_valid(const TaskGraph& graph) {
  auto violations = validate_graph(graph);
  if (violations.empty()) return;
  std::string msg = "task graph is invalid:";
  for (const auto& v : violations) msg += "\n  [" + v.code + "] " + v.message;
  fail(ErrorKind::InvalidInput, msg);
}

}  // namespace gridflow
