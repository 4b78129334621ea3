#pragma once

#include "gridflow/floorplan.hpp"
#include "gridflow/graph.hpp"

namespace gridflow {

// Pipeline latency of one channel: per_crossing cycles for every slot
// boundary between its endpoints (Manhattan metric, so a diagonal hop
// counts as two crossings).
inline count_t pipeline_depth(const Channel& edge, const Floorplan& fp,
                              count_t per_crossing = 2) {
  count_t crossings = manhattan(fp.at(edge.src), fp.at(edge.dst));
  count_t per = edge.per_crossing_override.value_or(per_crossing);
  return per * crossings;
}

// Returns a copy of the graph with every channel's lat set from the
// floorplan. Overwrites rather than accumulates, so it is idempotent;
// balance is left at zero for the balancer.
inline TaskGraph apply_pipelining(const TaskGraph& graph, const Floorplan& fp,
                                  count_t per_crossing = 2) {
  require_valid(graph);
  TaskGraph out = graph;
  for (auto& ch : out.channels) {
    ch.lat = pipeline_depth(ch, fp, per_crossing);
    ch.balance = 0;
  }
  return out;
}

}  // namespace gridflow
