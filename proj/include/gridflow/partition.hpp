#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gridflow/device.hpp"
#include "gridflow/floorplan.hpp"
#include "gridflow/graph.hpp"
#include "gridflow/ilp.hpp"

// Top-down floorplanning by iterative bipartitioning.
//
// The state tracks, per task, a coordinate in the current coarsened grid:
// after each directive every region is a band along the split axis, and a
// task's coordinate is its region's band index. With symmetric 1:1 splits
// this reduces to the classic doubling update (new = old * 2 + decision);
// asymmetric splits fall out of the same band numbering.
//
// Each iteration solves one joint ILP over all regions: one binary decision
// per movable task (shared within same-slot groups), capacity constraints
// per child region and resource type, and the bitwidth-weighted Manhattan
// objective over post-split coordinates. Absolute values need an auxiliary
// binary only for intra-region channels; everything else is affine because
// distinct regions stay at band distance >= 2.

namespace gridflow {

struct PartitionRegion {
  int r0 = 0, r1 = 0, c0 = 0, c1 = 0;  // leaf rectangle, half-open
  ResourceVector capacity;             // scaled capacity of the rectangle
  std::vector<int> tasks;              // task indices
};

struct PartitionState {
  const DeviceGrid* device = nullptr;
  std::vector<PartitionRegion> regions;
  std::vector<SlotCoord> coords;  // per task, band coordinates
  int iteration = 0;
  count_t last_objective = 0;
};

struct PartitionOptions {
  std::optional<double> max_util;  // overrides every slot's scalar max_util
  std::vector<std::vector<std::string>> same_slot_groups;
  std::optional<double> time_limit_seconds = 300.0;  // per iteration
};

namespace detail {

inline ResourceVector effective_capacity_rect(const DeviceGrid& dev, int r0,
                                              int r1, int c0, int c1) {
  ResourceVector cap;
  for (int r = r0; r < r1; ++r)
    for (int c = c0; c < c1; ++c) cap += dev.slot(r, c).effective_capacity();
  return cap;
}

// Canonical same-slot group per task, merging task-declared groups with
// option-supplied and feedback-supplied name lists (union-find).
inline std::vector<int> canonical_groups(
    const TaskGraph& graph,
    const std::vector<std::vector<std::string>>& extra_groups) {
  int n = static_cast<int>(graph.tasks.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  std::map<std::string, int> by_group_id;
  for (int i = 0; i < n; ++i) {
    if (!graph.tasks[i].group) continue;
    auto [it, fresh] = by_group_id.emplace(*graph.tasks[i].group, i);
    if (!fresh) unite(i, it->second);
  }
  auto index = graph.task_index_map();
  for (const auto& members : extra_groups) {
    int first = -1;
    for (const auto& name : members) {
      auto it = index.find(name);
      if (it == index.end())
        fail(ErrorKind::InvalidInput,
             "same-slot group names unknown task '" + name + "'");
      if (first < 0) first = it->second;
      else unite(first, it->second);
    }
  }
  std::vector<int> group(n);
  for (int i = 0; i < n; ++i) group[i] = find(i);
  // singleton "groups" are plain tasks
  std::vector<int> size(n, 0);
  for (int i = 0; i < n; ++i) ++size[group[i]];
  for (int i = 0; i < n; ++i)
    if (size[group[i]] == 1) group[i] = -1;
  return group;
}

}  // namespace detail

inline PartitionState init_partition_state(const TaskGraph& graph,
                                           const DeviceGrid& device) {
  PartitionState st;
  st.device = &device;
  PartitionRegion root;
  root.r0 = 0;
  root.r1 = device.rows;
  root.c0 = 0;
  root.c1 = device.cols;
  root.capacity =
      detail::effective_capacity_rect(device, 0, device.rows, 0, device.cols);
  root.tasks.resize(graph.tasks.size());
  for (size_t i = 0; i < graph.tasks.size(); ++i)
    root.tasks[i] = static_cast<int>(i);
  st.regions.push_back(std::move(root));
  st.coords.assign(graph.tasks.size(), SlotCoord{0, 0});
  return st;
}

// Everything partition_step needs to interpret a solved iteration.
struct BipartitionIlp {
  ilp::IlpProblem problem;

  struct RegionPlan {
    bool split = false;
    // split == true
    int child_band[2] = {0, 0};
    int child_lo[2] = {0, 0};  // start of child extent along the axis
    int child_hi[2] = {0, 0};
    ResourceVector child_cap[2];
    // split == false
    int pass_band = 0;
  };
  std::vector<RegionPlan> plans;
  std::vector<int> task_var;         // -1 when the side is a constant
  std::vector<int> task_const_side;  // valid when task_var < 0
  std::vector<int> task_region;
  std::vector<std::string> constrained_tasks;  // fixed or grouped, for errors
};

// Builds the joint ILP for one directive. `group_of` maps each task to the
// canonical same-slot group representative (-1 for ungrouped); plain
// floorplanning passes the result of detail::canonical_groups.
inline BipartitionIlp build_bipartition_ilp(const PartitionState& state,
                                            const PartitionDirective& directive,
                                            const TaskGraph& graph,
                                            const std::vector<int>& group_of) {
  const DeviceGrid& dev = *state.device;
  const bool horizontal = directive.axis == Axis::Horizontal;
  BipartitionIlp out;
  int n_tasks = static_cast<int>(graph.tasks.size());
  out.task_var.assign(n_tasks, -1);
  out.task_const_side.assign(n_tasks, 0);
  out.task_region.assign(n_tasks, -1);
  out.plans.resize(state.regions.size());

  // Post-split band numbering along the split axis: one band per resulting
  // region, ranked by extent start.
  std::set<int> starts;
  std::vector<std::pair<int, int>> extents(state.regions.size());
  for (size_t ri = 0; ri < state.regions.size(); ++ri) {
    const auto& rg = state.regions[ri];
    extents[ri] = horizontal ? std::make_pair(rg.r0, rg.r1)
                             : std::make_pair(rg.c0, rg.c1);
    int len = extents[ri].second - extents[ri].first;
    auto& plan = out.plans[ri];
    if (len >= 2) {
      int total = directive.split_a + directive.split_b;
      if (len % total != 0)
        fail(ErrorKind::InvalidInput,
             "split ratio does not divide region extent at iteration " +
                 std::to_string(state.iteration));
      int lo_len = len / total * directive.split_a;
      plan.split = true;
      plan.child_lo[0] = extents[ri].first;
      plan.child_hi[0] = extents[ri].first + lo_len;
      plan.child_lo[1] = plan.child_hi[0];
      plan.child_hi[1] = extents[ri].second;
      starts.insert(plan.child_lo[0]);
      starts.insert(plan.child_lo[1]);
    } else {
      starts.insert(extents[ri].first);
    }
  }
  std::map<int, int> band_of_start;
  for (int s : starts) {
    int b = static_cast<int>(band_of_start.size());
    band_of_start[s] = b;
  }
  for (size_t ri = 0; ri < state.regions.size(); ++ri) {
    auto& plan = out.plans[ri];
    const auto& rg = state.regions[ri];
    if (plan.split) {
      plan.child_band[0] = band_of_start[plan.child_lo[0]];
      plan.child_band[1] = band_of_start[plan.child_lo[1]];
      for (int side = 0; side < 2; ++side)
        plan.child_cap[side] =
            horizontal ? detail::effective_capacity_rect(
                             dev, plan.child_lo[side], plan.child_hi[side],
                             rg.c0, rg.c1)
                       : detail::effective_capacity_rect(
                             dev, rg.r0, rg.r1, plan.child_lo[side],
                             plan.child_hi[side]);
    } else {
      plan.pass_band = band_of_start[extents[ri].first];
    }
  }

  // Decision variables in task declaration order; same-slot groups share one.
  ilp::IlpProblem& p = out.problem;
  std::map<int, int> group_var;  // group representative -> var
  std::set<std::string> constrained;
  for (size_t ri = 0; ri < state.regions.size(); ++ri) {
    const auto& plan = out.plans[ri];
    for (int ti : state.regions[ri].tasks) out.task_region[ti] = static_cast<int>(ri);
    if (!plan.split) continue;
    for (int ti : state.regions[ri].tasks) {
      const Task& task = graph.tasks[ti];
      int fixed_side = -1;
      if (task.fixed_slot) {
        int pos = horizontal ? task.fixed_slot->row : task.fixed_slot->col;
        fixed_side = pos < plan.child_hi[0] ? 0 : 1;
        constrained.insert(task.name);
      }
      int grp = group_of[ti];
      if (grp >= 0) {
        constrained.insert(task.name);
        auto it = group_var.find(grp);
        if (it == group_var.end())
          it = group_var.emplace(grp, p.add_var("g" + std::to_string(grp) +
                                                "_i" + std::to_string(ri)))
                   .first;
        out.task_var[ti] = it->second;
        if (fixed_side >= 0)
          p.add_constraint({{it->second, 1}}, ilp::Rel::Eq, fixed_side);
      } else if (fixed_side >= 0) {
        out.task_const_side[ti] = fixed_side;
      } else {
        out.task_var[ti] = p.add_var("d_" + task.name);
      }
    }
  }
  out.constrained_tasks.assign(constrained.begin(), constrained.end());

  // Capacity constraints per child region and resource type.
  for (size_t ri = 0; ri < state.regions.size(); ++ri) {
    const auto& plan = out.plans[ri];
    if (!plan.split) continue;
    for (int type = 0; type < ResourceVector::kNumTypes; ++type) {
      std::map<int, count_t> coef;  // var -> area
      count_t movable_total = 0;
      count_t fixed_side_area[2] = {0, 0};
      for (int ti : state.regions[ri].tasks) {
        count_t a = graph.tasks[ti].area[type];
        if (a == 0) continue;
        int v = out.task_var[ti];
        if (v >= 0) {
          coef[v] += a;
          movable_total += a;
        } else {
          fixed_side_area[out.task_const_side[ti]] += a;
        }
      }
      count_t cap1 = plan.child_cap[1][type] - fixed_side_area[1];
      count_t cap0 = plan.child_cap[0][type] - fixed_side_area[0];
      std::vector<ilp::Term> terms;
      terms.reserve(coef.size());
      for (const auto& [v, a] : coef) terms.push_back({v, a});
      if (fixed_side_area[1] > plan.child_cap[1][type] ||
          fixed_side_area[0] > plan.child_cap[0][type]) {
        // fixed tasks alone blow the budget; emit a trivially false row so
        // the solver reports infeasibility through the normal path
        p.add_constraint({}, ilp::Rel::Le, -1);
        continue;
      }
      if (movable_total > cap1)
        p.add_constraint(terms, ilp::Rel::Le, cap1);
      if (movable_total > cap0)
        p.add_constraint(terms, ilp::Rel::Ge, movable_total - cap0);
    }
  }

  // Objective: width-weighted Manhattan distance over post-split coordinates.
  // Along the split axis each task is band0 + band_delta * decision (or a
  // constant); the off-axis coordinate is unchanged.
  struct AxisExpr {
    count_t base = 0;
    int var = -1;
    count_t delta = 0;
  };
  auto axis_expr = [&](int ti) {
    AxisExpr e;
    const auto& plan = out.plans[out.task_region[ti]];
    if (!plan.split) {
      e.base = plan.pass_band;
      return e;
    }
    int v = out.task_var[ti];
    if (v < 0) {
      e.base = plan.child_band[out.task_const_side[ti]];
      return e;
    }
    e.base = plan.child_band[0];
    e.var = v;
    e.delta = plan.child_band[1] - plan.child_band[0];
    return e;
  };

  auto index = graph.task_index_map();
  std::vector<count_t> lin(p.num_vars(), 0);
  std::vector<std::pair<int, count_t>> aux_requests;  // channel -> weight

  for (size_t ci = 0; ci < graph.channels.size(); ++ci) {
    const Channel& ch = graph.channels[ci];
    int u = index.at(ch.src);
    int v = index.at(ch.dst);
    count_t w = ch.width;
    // off-axis contribution is constant this iteration
    count_t off = horizontal ? std::abs(state.coords[u].col - state.coords[v].col)
                             : std::abs(state.coords[u].row - state.coords[v].row);
    p.objective_offset += w * off;
    AxisExpr eu = axis_expr(u);
    AxisExpr ev = axis_expr(v);
    if (eu.var >= 0 && ev.var >= 0 && eu.var == ev.var) {
      p.objective_offset += w * std::abs(eu.base - ev.base);
      continue;
    }
    if (eu.var < 0 && ev.var < 0) {
      p.objective_offset += w * std::abs(eu.base - ev.base);
      continue;
    }
    if (eu.var >= 0 && ev.var >= 0) {
      count_t c = eu.base - ev.base;
      if (c == 0) {
        // same region: needs one auxiliary |du - dv| variable
        if (eu.delta != ev.delta)
          fail(ErrorKind::Internal, "band delta mismatch within a region");
        aux_requests.push_back({static_cast<int>(ci), w * eu.delta});
        continue;
      }
      // distinct regions never overlap, so the sign of c is fixed
      if (std::abs(c) < 2)
        fail(ErrorKind::Internal, "cross-region band distance below 2");
      count_t sign = c > 0 ? 1 : -1;
      p.objective_offset += w * sign * c;
      lin[eu.var] += w * sign * eu.delta;
      lin[ev.var] -= w * sign * ev.delta;
      continue;
    }
    // exactly one endpoint is variable
    const AxisExpr& var_e = eu.var >= 0 ? eu : ev;
    const AxisExpr& const_e = eu.var >= 0 ? ev : eu;
    count_t val0 = std::abs(var_e.base - const_e.base);
    count_t val1 = std::abs(var_e.base + var_e.delta - const_e.base);
    p.objective_offset += w * val0;
    lin[var_e.var] += w * (val1 - val0);
  }
  for (int v = 0; v < static_cast<int>(lin.size()); ++v)
    p.add_objective_term(v, lin[v]);
  for (const auto& [ci, weight] : aux_requests) {
    const Channel& ch = graph.channels[ci];
    int u = index.at(ch.src);
    int v = index.at(ch.dst);
    int t = p.add_var("t_" + ch.id);
    p.add_constraint({{out.task_var[u], 1}, {out.task_var[v], -1}, {t, -1}},
                     ilp::Rel::Le, 0);
    p.add_constraint({{out.task_var[v], 1}, {out.task_var[u], -1}, {t, -1}},
                     ilp::Rel::Le, 0);
    p.add_objective_term(t, weight);
  }
  return out;
}

namespace detail {

// Applies a solved bipartition outcome to produce the next state.
inline PartitionState apply_bipartition(const PartitionState& state,
                                        const PartitionDirective& directive,
                                        const BipartitionIlp& build,
                                        const ilp::IlpOutcome& outcome) {
  const bool horizontal = directive.axis == Axis::Horizontal;
  PartitionState next;
  next.device = state.device;
  next.iteration = state.iteration + 1;
  next.last_objective = outcome.objective_value;
  next.coords = state.coords;

  auto side_of = [&](int ti) {
    int v = build.task_var[ti];
    return v >= 0 ? static_cast<int>(outcome.assignment[v])
                  : build.task_const_side[ti];
  };
  for (size_t ri = 0; ri < state.regions.size(); ++ri) {
    const auto& plan = build.plans[ri];
    const auto& rg = state.regions[ri];
    if (!plan.split) {
      PartitionRegion pass = rg;
      for (int ti : pass.tasks) {
        if (horizontal) next.coords[ti].row = plan.pass_band;
        else next.coords[ti].col = plan.pass_band;
      }
      next.regions.push_back(std::move(pass));
      continue;
    }
    for (int side = 0; side < 2; ++side) {
      PartitionRegion child;
      if (horizontal) {
        child.r0 = plan.child_lo[side];
        child.r1 = plan.child_hi[side];
        child.c0 = rg.c0;
        child.c1 = rg.c1;
      } else {
        child.r0 = rg.r0;
        child.r1 = rg.r1;
        child.c0 = plan.child_lo[side];
        child.c1 = plan.child_hi[side];
      }
      child.capacity = plan.child_cap[side];
      for (int ti : rg.tasks)
        if (side_of(ti) == side) {
          child.tasks.push_back(ti);
          if (horizontal) next.coords[ti].row = plan.child_band[side];
          else next.coords[ti].col = plan.child_band[side];
        }
      next.regions.push_back(std::move(child));
    }
  }
  return next;
}

// Decision variables of one built iteration, in variable order.
inline std::vector<int> decision_vars(const BipartitionIlp& build) {
  std::set<int> vars;
  for (int v : build.task_var)
    if (v >= 0) vars.insert(v);
  return std::vector<int>(vars.begin(), vars.end());
}

}  // namespace detail

// Solves one directive and advances the state.
inline PartitionState partition_step(const PartitionState& state,
                                     const PartitionDirective& directive,
                                     const TaskGraph& graph,
                                     const std::vector<int>& group_of,
                                     std::optional<double> time_limit = 300.0) {
  BipartitionIlp build = build_bipartition_ilp(state, directive, graph, group_of);
  build.problem.time_limit_seconds = time_limit;
  ilp::IlpOutcome outcome = ilp::solve(build.problem);
  if (outcome.status == ilp::Status::TimedOut)
    fail(ErrorKind::Budget,
         "ILP time limit exceeded at iteration " +
             std::to_string(state.iteration) +
             "; raise the time limit or coarsen the schedule");
  if (outcome.status == ilp::Status::Infeasible) {
    std::string msg = "bipartition infeasible at iteration " +
                      std::to_string(state.iteration);
    if (!build.constrained_tasks.empty()) {
      msg += "; constrained tasks:";
      for (const auto& t : build.constrained_tasks) msg += " " + t;
    } else {
      msg += " (capacity)";
    }
    fail(ErrorKind::Infeasible, msg);
  }
  return detail::apply_bipartition(state, directive, build, outcome);
}

// Full schedule: validates, checks early feasibility, runs every directive,
// and returns the completed floorplan.
//
// Aggregate child capacities cannot see every packing obstacle, so a
// cost-optimal early cut can strand a later iteration. When that happens
// the offending parent split is excluded with a no-good cut and re-solved,
// depth-first over the split tree. Infeasibility is therefore only reported
// once the tree is exhausted; running out of backtracking budget instead is
// a budget error, never an infeasibility claim.
inline Floorplan floorplan(const TaskGraph& graph, const DeviceGrid& device,
                           const PartitionOptions& opts = {}) {
  require_valid(graph);
  DeviceGrid dev = device;
  if (opts.max_util) {
    if (!(*opts.max_util > 0.0 && *opts.max_util <= 1.0))
      fail(ErrorKind::InvalidInput, "max_util must lie in (0, 1]");
    dev.apply_global_max_util(*opts.max_util);
  }
  require_valid(dev);
  for (const auto& t : graph.tasks)
    if (t.fixed_slot && !dev.in_bounds(*t.fixed_slot))
      fail(ErrorKind::InvalidInput,
           "task '" + t.name + "' is fixed outside the grid");

  std::vector<int> group_of = detail::canonical_groups(graph, opts.same_slot_groups);
  // group members with contradictory fixed slots can never co-locate
  std::map<int, SlotCoord> group_fix;
  for (size_t i = 0; i < graph.tasks.size(); ++i) {
    if (group_of[i] < 0 || !graph.tasks[i].fixed_slot) continue;
    auto [it, fresh] = group_fix.emplace(group_of[i], *graph.tasks[i].fixed_slot);
    if (!fresh && !(it->second == *graph.tasks[i].fixed_slot))
      fail(ErrorKind::Infeasible,
           "same-slot group containing '" + graph.tasks[i].name +
               "' has conflicting fixed slots");
  }

  ResourceVector total;
  for (const auto& t : graph.tasks) total += t.area;
  if (!total.fits_within(dev.total_effective_capacity()))
    fail(ErrorKind::Infeasible,
         "design too large at this max_util: needs " + total.to_string() +
             ", device offers " + dev.total_effective_capacity().to_string());
  for (const auto& t : graph.tasks) {
    bool fits = false;
    for (const auto& s : dev.slots)
      if (t.area.fits_within(s.effective_capacity())) fits = true;
    if (!fits)
      fail(ErrorKind::Infeasible,
           "task '" + t.name + "' exceeds every slot's capacity at this max_util");
  }

  size_t depth = dev.schedule.size();
  std::vector<PartitionState> states;
  states.reserve(depth + 1);
  states.push_back(init_partition_state(graph, dev));
  // per level: solved decision vectors already ruled out, and the last choice
  std::vector<std::vector<std::vector<std::uint8_t>>> banned(depth);
  std::vector<std::vector<std::uint8_t>> chosen(depth);
  int backtracks = 0;
  constexpr int kMaxBacktracks = 64;

  size_t k = 0;
  std::string last_infeasible;
  while (k < depth) {
    const PartitionDirective& directive = dev.schedule[k];
    BipartitionIlp build =
        build_bipartition_ilp(states[k], directive, graph, group_of);
    std::vector<int> decisions = detail::decision_vars(build);
    for (const auto& bad : banned[k]) {
      std::vector<ilp::Term> terms;
      count_t ones = 0;
      for (size_t i = 0; i < decisions.size(); ++i) {
        if (bad[i]) {
          terms.push_back({decisions[i], -1});
          ++ones;
        } else {
          terms.push_back({decisions[i], 1});
        }
      }
      build.problem.add_constraint(std::move(terms), ilp::Rel::Ge, 1 - ones);
    }
    build.problem.time_limit_seconds = opts.time_limit_seconds;
    ilp::IlpOutcome outcome = ilp::solve(build.problem);
    if (outcome.status == ilp::Status::TimedOut)
      fail(ErrorKind::Budget,
           "ILP time limit exceeded at iteration " + std::to_string(k) +
               "; raise the time limit or coarsen the schedule");
    if (outcome.status == ilp::Status::Optimal) {
      chosen[k].assign(decisions.size(), 0);
      for (size_t i = 0; i < decisions.size(); ++i)
        chosen[k][i] = outcome.assignment[decisions[i]];
      states.resize(k + 1);
      states.push_back(
          detail::apply_bipartition(states[k], directive, build, outcome));
      ++k;
      continue;
    }
    // infeasible at this level
    last_infeasible = "bipartition infeasible at iteration " + std::to_string(k);
    if (!build.constrained_tasks.empty()) {
      last_infeasible += "; constrained tasks:";
      for (const auto& t : build.constrained_tasks)
        last_infeasible += " " + t;
    } else {
      last_infeasible += " (capacity)";
    }
    if (k == 0 && banned[0].empty()) fail(ErrorKind::Infeasible, last_infeasible);
    if (k == 0)
      fail(ErrorKind::Infeasible,
           "no feasible floorplan: every first-level split fails downstream");
    if (++backtracks > kMaxBacktracks)
      fail(ErrorKind::Budget,
           "floorplan backtracking budget exhausted; feasibility undecided (" +
               last_infeasible + ")");
    for (size_t j = k; j < depth; ++j) banned[j].clear();
    banned[k - 1].push_back(chosen[k - 1]);
    --k;
  }

  const PartitionState& st = states[depth];
  for (const auto& rg : st.regions)
    if (rg.r1 - rg.r0 != 1 || rg.c1 - rg.c0 != 1)
      fail(ErrorKind::Internal, "schedule left a non-unit region");

  Floorplan fp;
  for (size_t i = 0; i < graph.tasks.size(); ++i)
    fp.assignment[graph.tasks[i].name] = st.coords[i];
  fp.cost = crossing_cost(graph, fp);
  fp.util = slot_utilization(graph, fp);
  check_floorplan(graph, dev, fp);
  return fp;
}

}  // namespace gridflow
