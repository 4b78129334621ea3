#pragma once

#include <algorithm>
#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gridflow/partition.hpp"

namespace gridflow {

struct SweepCandidate {
  double max_util = 0.0;
  Floorplan floorplan;
  count_t cost = 0;
  double max_slot_util = 0.0;  // worst used/capacity ratio over slots and types
};

struct SweepFailure {
  double max_util = 0.0;
  std::string reason;
};

struct SweepResult {
  std::vector<SweepCandidate> candidates;  // Pareto frontier, sorted by cost
  std::vector<SweepFailure> failures;
};

namespace detail {

inline double max_slot_util_of(const DeviceGrid& device, const Floorplan& fp) {
  double worst = 0.0;
  for (const auto& [coord, used] : fp.util) {
    const ResourceVector& cap = device.slot(coord.row, coord.col).capacity;
    for (int i = 0; i < ResourceVector::kNumTypes; ++i)
      if (cap[i] > 0)
        worst = std::max(worst, static_cast<double>(used[i]) /
                                    static_cast<double>(cap[i]));
  }
  return worst;
}

}  // namespace detail

// One floorplan attempt per utilization value; failures are recorded, the
// successes deduplicated, filtered to the Pareto frontier over
// (cost, max_slot_util), and sorted by cost.
inline SweepResult sweep_candidates(const TaskGraph& graph,
                                    const DeviceGrid& device,
                                    const std::vector<double>& util_range,
                                    const PartitionOptions& base_opts = {},
                                    int jobs = 1) {
  for (double u : util_range)
    if (!(u > 0.0 && u <= 1.0))
      fail(ErrorKind::InvalidInput, "sweep utilization values must lie in (0, 1]");

  struct Attempt {
    std::optional<SweepCandidate> candidate;
    std::string error;
  };
  std::vector<Attempt> attempts(util_range.size());
  auto run_one = [&](size_t i) {
    PartitionOptions opts = base_opts;
    opts.max_util = util_range[i];
    try {
      SweepCandidate cand;
      cand.max_util = util_range[i];
      cand.floorplan = floorplan(graph, device, opts);
      cand.cost = cand.floorplan.cost;
      cand.max_slot_util = detail::max_slot_util_of(device, cand.floorplan);
      attempts[i].candidate = std::move(cand);
    } catch (const Error& e) {
      attempts[i].error = e.what();
    }
  };
  if (jobs <= 1) {
    for (size_t i = 0; i < util_range.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    int workers = std::min<size_t>(jobs, util_range.size());
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < util_range.size();
             i = next.fetch_add(1))
          run_one(i);
      });
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  for (size_t i = 0; i < util_range.size(); ++i) {
    if (!attempts[i].candidate) {
      result.failures.push_back({util_range[i], attempts[i].error});
      continue;
    }
    SweepCandidate& cand = *attempts[i].candidate;
    bool duplicate = false;
    for (const auto& seen : result.candidates)
      if (seen.floorplan.assignment == cand.floorplan.assignment) {
        duplicate = true;
        break;
      }
    if (!duplicate) result.candidates.push_back(std::move(cand));
  }
  if (result.candidates.empty())
    fail(ErrorKind::Infeasible, "no feasible candidate in the sweep range");

  // Pareto filter: minimize (cost, max_slot_util)
  std::vector<SweepCandidate> front;
  for (const auto& c : result.candidates) {
    bool dominated = false;
    for (const auto& d : result.candidates) {
      if (&c == &d) continue;
      bool le = d.cost <= c.cost && d.max_slot_util <= c.max_slot_util;
      bool lt = d.cost < c.cost || d.max_slot_util < c.max_slot_util;
      if (le && lt) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(c);
  }
  std::sort(front.begin(), front.end(),
            [](const SweepCandidate& a, const SweepCandidate& b) {
              if (a.cost != b.cost) return a.cost < b.cost;
              if (a.max_slot_util != b.max_slot_util)
                return a.max_slot_util < b.max_slot_util;
              return a.max_util < b.max_util;
            });
  result.candidates = std::move(front);
  return result;
}

}  // namespace gridflow
