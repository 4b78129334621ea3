#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gridflow/balance.hpp"
#include "gridflow/hbm.hpp"
#include "gridflow/options.hpp"
#include "gridflow/partition.hpp"
#include "gridflow/pipeline.hpp"

namespace gridflow {

struct CoOptimizeResult {
  Floorplan floorplan;
  TaskGraph graph;  // lat and balance set
  count_t overhead_bits = 0;
  int rounds = 0;
  std::map<std::string, int> hbm_binding;
};

// The outer loop: floorplan, pipeline every crossing, balance reconvergent
// paths. A balancing infeasibility means some dependency cycle got pipelined;
// its members become a same-slot group and the floorplan is redone. Cycles
// too large for any single slot are unresolvable.
inline CoOptimizeResult co_optimize(const TaskGraph& graph,
                                    const DeviceGrid& device,
                                    const Options& opts = {}) {
  require_valid(graph);

  PartitionOptions popts;
  popts.max_util = opts.max_util;
  popts.same_slot_groups = opts.same_slot_groups;
  if (opts.time_limit_seconds) popts.time_limit_seconds = opts.time_limit_seconds;

  auto index = graph.task_index_map();
  for (int round = 1; round <= opts.max_feedback_rounds; ++round) {
    Floorplan fp = floorplan(graph, device, popts);
    TaskGraph pipelined = apply_pipelining(graph, fp, opts.per_crossing);
    BalanceOutcome bal = balance_latency(pipelined);
    if (bal.feasible) {
      CoOptimizeResult result;
      result.floorplan = std::move(fp);
      result.graph = std::move(bal.graph);
      result.overhead_bits = bal.overhead_bits;
      result.rounds = round;
      if (device.total_hbm_channels() > 0)
        result.hbm_binding = bind_hbm_channels(
            result.floorplan, graph, device, opts.hbm_partial,
            opts.hbm_access_groups);
      else if (!opts.hbm_partial.empty())
        fail(ErrorKind::InvalidInput,
             "partial HBM bindings given for a device without HBM channels");
      return result;
    }

    // collect the witness cycle's tasks into one same-slot group
    std::set<std::string> members;
    for (const auto& cid : bal.cycle)
      for (const auto& ch : pipelined.channels)
        if (ch.id == cid) {
          members.insert(ch.src);
          members.insert(ch.dst);
        }
    ResourceVector cycle_area;
    for (const auto& name : members)
      cycle_area += graph.tasks[index.at(name)].area;
    bool fits_somewhere = false;
    DeviceGrid dev = device;
    if (opts.max_util) dev.apply_global_max_util(*opts.max_util);
    for (const auto& slot : dev.slots)
      if (cycle_area.fits_within(slot.effective_capacity())) {
        fits_somewhere = true;
        break;
      }
    if (!fits_somewhere) {
      std::string names;
      for (const auto& n : members) names += (names.empty() ? "" : ", ") + n;
      fail(ErrorKind::Infeasible,
           "unresolvable cycle: tasks {" + names +
               "} must share a slot but exceed every slot's capacity");
    }
    popts.same_slot_groups.emplace_back(members.begin(), members.end());
  }
  fail(ErrorKind::Budget,
       "feedback budget exhausted after " +
           std::to_string(opts.max_feedback_rounds) + " rounds");
}

}  // namespace gridflow
