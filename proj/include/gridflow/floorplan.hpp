#pragma once

#include <cstdlib>
#include <map>
#include <string>

#include "gridflow/device.hpp"
#include "gridflow/graph.hpp"

namespace gridflow {

// A complete task -> slot assignment with its derived cost and utilization.
struct Floorplan {
  std::map<std::string, SlotCoord> assignment;
  count_t cost = 0;
  std::map<SlotCoord, ResourceVector> util;

  SlotCoord at(const std::string& task) const {
    auto it = assignment.find(task);
    if (it == assignment.end())
      fail(ErrorKind::InvalidInput,
           "incomplete floorplan: task '" + task + "' is unassigned");
    return it->second;
  }
};

inline count_t manhattan(SlotCoord a, SlotCoord b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

// Bitwidth-weighted sum of slot boundaries crossed by every channel.
inline count_t crossing_cost(const TaskGraph& graph, const Floorplan& fp) {
  count_t total = 0;
  for (const auto& c : graph.channels)
    total += c.width * manhattan(fp.at(c.src), fp.at(c.dst));
  return total;
}

// Component-wise sum of task areas per assigned slot. Slots with no tasks
// are absent from the result (their utilization is the zero vector).
inline std::map<SlotCoord, ResourceVector> slot_utilization(
    const TaskGraph& graph, const Floorplan& fp) {
  std::map<SlotCoord, ResourceVector> util;
  for (const auto& t : graph.tasks) util[fp.at(t.name)] += t.area;
  return util;
}

// Verifies the floorplan invariants against a device; used as a paranoia
// check after solving and by the fuzz suites.
inline void check_floorplan(const TaskGraph& graph, const DeviceGrid& device,
                            const Floorplan& fp) {
  for (const auto& t : graph.tasks) {
    SlotCoord c = fp.at(t.name);
    if (!device.in_bounds(c))
      fail(ErrorKind::Internal, "task '" + t.name + "' assigned out of grid");
    if (t.fixed_slot && !(c == *t.fixed_slot))
      fail(ErrorKind::Internal,
           "task '" + t.name + "' violates its fixed slot");
  }
  std::map<std::string, SlotCoord> group_slot;
  for (const auto& t : graph.tasks) {
    if (!t.group) continue;
    auto [it, fresh] = group_slot.emplace(*t.group, fp.at(t.name));
    if (!fresh && !(it->second == fp.at(t.name)))
      fail(ErrorKind::Internal,
           "same-slot group '" + *t.group + "' spans multiple slots");
  }
  for (const auto& [coord, used] : slot_utilization(graph, fp)) {
    ResourceVector budget = device.slot(coord.row, coord.col).effective_capacity();
    if (!used.fits_within(budget))
      fail(ErrorKind::Internal,
           "slot (" + std::to_string(coord.row) + "," +
               std::to_string(coord.col) + ") exceeds its utilization limit: " +
               used.to_string() + " > " + budget.to_string());
  }
}

}  // namespace gridflow
