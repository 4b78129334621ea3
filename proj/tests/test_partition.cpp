#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "gridflow/hbm.hpp"
#include "gridflow/partition.hpp"
#include "gridflow/sweep.hpp"
#include "oracles.hpp"

using namespace gridflow;

namespace {

std::vector<int> no_groups(const TaskGraph& g) {
  return detail::canonical_groups(g, {});
}

}  // namespace

TEST_CASE("coordinate trace across the three partition iterations") {
  TaskGraph g = fixtures::trace_graph();
  DeviceGrid dev = fixtures::trace_device();
  require_valid(dev);
  auto groups = no_groups(g);
  PartitionState st = init_partition_state(g, dev);
  auto row = [&](const PartitionState& s, const char* name) {
    return s.coords[g.task_index(name)].row;
  };
  auto col = [&](const PartitionState& s, const char* name) {
    return s.coords[g.task_index(name)].col;
  };

  // iteration 1: first horizontal halving
  st = partition_step(st, dev.schedule[0], g, groups);
  CHECK(row(st, "v1") == 1);  // 0 * 2 + 1
  CHECK(row(st, "v2") == 1);
  CHECK(row(st, "v4") == 0);  // 0 * 2 + 0
  CHECK(row(st, "v5") == 0);
  CHECK(st.last_objective == 128);

  // iteration 2: second horizontal halving
  st = partition_step(st, dev.schedule[1], g, groups);
  CHECK(row(st, "v2") == 3);  // 1 * 2 + 1
  CHECK(row(st, "v1") == 2);  // 1 * 2 + 0
  CHECK(row(st, "v4") == 1);  // 0 * 2 + 1
  CHECK(row(st, "v5") == 0);  // 0 * 2 + 0
  CHECK(st.last_objective == 1152);

  // iteration 3: vertical halving
  st = partition_step(st, dev.schedule[2], g, groups);
  CHECK(col(st, "v2") == 0);  // 0 * 2 + 0
  CHECK(col(st, "v1") == 1);  // 0 * 2 + 1
  CHECK(col(st, "v4") == 1);
  CHECK(col(st, "v5") == 1);
  CHECK(st.last_objective == 2864);

  // monotone schedule: distinct occupied regions bounded by the split product
  CHECK(st.regions.size() <= 8);
  std::set<SlotCoord> occupied(st.coords.begin(), st.coords.end());
  CHECK(occupied.size() <= 8);
}

TEST_CASE("trace instance end-to-end floorplan") {
  TaskGraph g = fixtures::trace_graph();
  DeviceGrid dev = fixtures::trace_device();
  Floorplan fp = floorplan(g, dev);
  CHECK(fp.at("v8") == SlotCoord{0, 0});
  CHECK(fp.at("v5") == SlotCoord{0, 1});
  CHECK(fp.at("v7") == SlotCoord{1, 0});
  CHECK(fp.at("v4") == SlotCoord{1, 1});
  CHECK(fp.at("v6") == SlotCoord{2, 0});
  CHECK(fp.at("v1") == SlotCoord{2, 1});
  CHECK(fp.at("v2") == SlotCoord{3, 0});
  CHECK(fp.at("v3") == SlotCoord{3, 1});
  CHECK(fp.cost == 2864);
  // every channel spans exactly one slot boundary here
  for (const auto& c : g.channels)
    CHECK(manhattan(fp.at(c.src), fp.at(c.dst)) == 1);
}

TEST_CASE("degenerate partitions") {
  DeviceGrid dev = fixtures::trace_device();

  SECTION("single task lands deterministically with zero cost") {
    TaskGraph g;
    g.tasks.push_back(fixtures::make_task("only", 50, 50));
    Floorplan fp = floorplan(g, dev);
    CHECK(fp.cost == 0);
    Floorplan fp2 = floorplan(g, dev);
    CHECK(fp.assignment == fp2.assignment);
  }

  SECTION("two connected tasks that fit together stay together") {
    TaskGraph g;
    g.tasks.push_back(fixtures::make_task("a", 50, 50));
    g.tasks.push_back(fixtures::make_task("b", 50, 50));
    g.channels.push_back(fixtures::make_channel("e", "a", "b", 512));
    Floorplan fp = floorplan(g, dev);
    CHECK(fp.at("a") == fp.at("b"));
    CHECK(fp.cost == 0);
  }

  SECTION("graph fitting one slot co-locates everything") {
    TaskGraph g;
    for (int i = 0; i < 4; ++i)
      g.tasks.push_back(fixtures::make_task("t" + std::to_string(i), 20, 20));
    for (int i = 0; i < 3; ++i)
      g.channels.push_back(fixtures::make_channel(
          "e" + std::to_string(i), "t" + std::to_string(i),
          "t" + std::to_string(i + 1), 64));
    Floorplan fp = floorplan(g, dev);
    CHECK(fp.cost == 0);
  }
}

TEST_CASE("fixed slots and same-slot groups are honored") {
  DeviceGrid dev = fixtures::trace_device();
  TaskGraph g;
  g.tasks.push_back(fixtures::make_task("a", 50, 50));
  g.tasks.push_back(fixtures::make_task("b", 50, 50));
  g.tasks.push_back(fixtures::make_task("c", 50, 50));
  g.tasks[0].fixed_slot = SlotCoord{3, 1};
  g.channels.push_back(fixtures::make_channel("e1", "a", "b", 8));
  g.channels.push_back(fixtures::make_channel("e2", "b", "c", 8));

  PartitionOptions opts;
  opts.same_slot_groups = {{"b", "c"}};
  Floorplan fp = floorplan(g, dev, opts);
  CHECK(fp.at("a") == SlotCoord{3, 1});
  CHECK(fp.at("b") == fp.at("c"));

  SECTION("conflicting fixed slots inside a group") {
    TaskGraph bad = g;
    bad.tasks[1].fixed_slot = SlotCoord{0, 0};
    bad.tasks[2].fixed_slot = SlotCoord{1, 0};
    PartitionOptions o2;
    o2.same_slot_groups = {{"b", "c"}};
    CHECK_THROWS_AS(floorplan(bad, dev, o2), Error);
  }
}

TEST_CASE("early infeasibility for oversized designs") {
  DeviceGrid dev = fixtures::trace_device();
  TaskGraph g;
  g.tasks.push_back(fixtures::make_task("huge", 5000, 50));
  try {
    floorplan(g, dev);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
    CHECK(std::string(e.what()).find("too large") != std::string::npos);
  }
}

TEST_CASE("per-iteration ILP objective equals exhaustive enumeration") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> ntasks(2, 10), nedges(1, 14);
  std::uniform_int_distribution<count_t> width(1, 300), area(10, 90);
  int checked = 0;
  for (int round = 0; round < 40; ++round) {
    TaskGraph g;
    int n = ntasks(rng);
    for (int i = 0; i < n; ++i) {
      Task t = fixtures::make_task("t" + std::to_string(i), area(rng), 0);
      if (rng() % 7 == 0)
        t.fixed_slot = SlotCoord{static_cast<int>(rng() % 2),
                                 static_cast<int>(rng() % 2)};
      g.tasks.push_back(std::move(t));
    }
    int m = nedges(rng);
    for (int e = 0; e < m; ++e) {
      int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
      if (a == b) continue;
      g.channels.push_back(fixtures::make_channel(
          "e" + std::to_string(e), g.tasks[a].name, g.tasks[b].name,
          width(rng)));
    }
    ResourceVector cap;
    cap.lut = 60 * n;  // loose enough to be feasible, tight enough to bind
    DeviceGrid dev = gridflow::detail::make_uniform_grid(
        2, 2, cap, {{Axis::Horizontal, 1, 1}, {Axis::Vertical, 1, 1}});
    auto groups = no_groups(g);

    PartitionState st = init_partition_state(g, dev);
    for (const auto& directive : dev.schedule) {
      auto brute = oracles::brute_force_bipartition(st, directive, g, groups);
      BipartitionIlp build = build_bipartition_ilp(st, directive, g, groups);
      auto outcome = ilp::solve(build.problem);
      if (!brute) {
        CHECK(outcome.status == ilp::Status::Infeasible);
        break;
      }
      REQUIRE(outcome.status == ilp::Status::Optimal);
      CHECK(outcome.objective_value == brute->cost);
      ++checked;
      st = partition_step(st, directive, g, groups);
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("floorplan determinism on a mid-size graph") {
  TaskGraph g;
  std::mt19937 rng(77);
  for (int i = 0; i < 24; ++i)
    g.tasks.push_back(
        fixtures::make_task("n" + std::to_string(i), 30 + rng() % 40, 10));
  for (int e = 0; e < 40; ++e) {
    int a = static_cast<int>(rng() % 24), b = static_cast<int>(rng() % 24);
    if (a == b) continue;
    g.channels.push_back(fixtures::make_channel(
        "e" + std::to_string(e), g.tasks[a].name, g.tasks[b].name,
        1 + rng() % 128));
  }
  ResourceVector cap;
  cap.lut = 400;
  cap.ff = 10000;
  DeviceGrid dev = gridflow::detail::make_uniform_grid(
      4, 2, cap,
      {{Axis::Horizontal, 1, 1},
       {Axis::Horizontal, 1, 1},
       {Axis::Vertical, 1, 1}});
  Floorplan a = floorplan(g, dev);
  Floorplan b = floorplan(g, dev);
  CHECK(a.assignment == b.assignment);
  CHECK(a.cost == b.cost);
}

TEST_CASE("asymmetric 2:1 schedule covers three-row devices") {
  DeviceGrid dev = device_u280();
  TaskGraph g;
  // six tasks too big to share a slot
  for (int i = 0; i < 6; ++i)
    g.tasks.push_back(fixtures::make_task("t" + std::to_string(i), 45000, 10));
  for (int i = 0; i < 5; ++i)
    g.channels.push_back(fixtures::make_channel(
        "e" + std::to_string(i), "t" + std::to_string(i),
        "t" + std::to_string(i + 1), 32));
  Floorplan fp = floorplan(g, dev);
  std::set<SlotCoord> slots;
  for (const auto& [name, c] : fp.assignment) slots.insert(c);
  CHECK(slots.size() == 6);  // 45000 lut > half a slot's 0.7 * 72333 budget
  check_floorplan(g, dev, fp);
}

TEST_CASE("hbm demand steers tasks to channel-bearing slots") {
  DeviceGrid dev = device_u280();
  TaskGraph g;
  for (int i = 0; i < 3; ++i) {
    Task t = fixtures::make_task("mem" + std::to_string(i), 100, 100);
    t.area.hbm_ch = 1;
    t.hbm_required = 1;
    g.tasks.push_back(std::move(t));
  }
  g.tasks.push_back(fixtures::make_task("compute", 100, 100));
  g.channels.push_back(fixtures::make_channel("c0", "mem0", "compute", 64));
  Floorplan fp = floorplan(g, dev);
  for (int i = 0; i < 3; ++i) {
    SlotCoord c = fp.at("mem" + std::to_string(i));
    CHECK(dev.slot(c.row, c.col).capacity.hbm_ch > 0);
  }

  SECTION("binding: lowest free id, partial pins, floorplan conflicts") {
    auto binding = bind_hbm_channels(fp, g, dev, {});
    std::set<int> ids;
    for (const auto& [name, id] : binding) {
      CHECK(ids.insert(id).second);  // injective
      const auto pool = dev.hbm_channel_ids(fp.at(name).row, fp.at(name).col);
      CHECK(std::find(pool.begin(), pool.end(), id) != pool.end());
    }
    CHECK(binding.size() == 3);

    auto pinned = bind_hbm_channels(fp, g, dev, {{"mem1", 7}});
    CHECK(pinned.at("mem1") == 7);

    // a pin outside the task's slot pool conflicts with the floorplan
    SlotCoord c0 = fp.at("mem0");
    SlotCoord other{c0.row, 1 - c0.col};
    auto foreign = dev.hbm_channel_ids(other.row, other.col);
    REQUIRE_FALSE(foreign.empty());
    CHECK_THROWS_AS(bind_hbm_channels(fp, g, dev, {{"mem0", foreign.front()}}),
                    Error);
  }
}

TEST_CASE("hbm access groups pack into single hardware groups") {
  DeviceGrid dev = device_u280();
  TaskGraph g;
  for (int i = 0; i < 8; ++i) {
    Task t = fixtures::make_task("m" + std::to_string(i), 10, 10);
    t.area.hbm_ch = 1;
    t.hbm_required = 1;
    t.fixed_slot = SlotCoord{0, 0};  // all in the bottom-left slot
    g.tasks.push_back(std::move(t));
  }
  Floorplan fp = floorplan(g, dev);
  std::vector<std::vector<std::string>> groups = {
      {"m0", "m1", "m2", "m3"}, {"m4", "m5", "m6", "m7"}};
  auto binding = bind_hbm_channels(fp, g, dev, {}, groups);
  auto hw_group_of = [&](int id) {
    for (size_t gi = 0; gi < dev.hbm_groups.size(); ++gi)
      for (int x : dev.hbm_groups[gi])
        if (x == id) return static_cast<int>(gi);
    return -1;
  };
  for (const auto& members : groups) {
    std::set<int> hw;
    for (const auto& m : members) hw.insert(hw_group_of(binding.at(m)));
    CHECK(hw.size() == 1);  // each declared group inside one hardware group
  }

  SECTION("unsatisfiable when no hardware group can host the group") {
    std::vector<std::vector<std::string>> bad = {
        {"m0", "m1", "m2", "m3", "m4"}};  // five into four-channel crossbars
    CHECK_THROWS_AS(bind_hbm_channels(fp, g, dev, {}, bad), Error);
  }
}

TEST_CASE("hbm capacity shortfalls fail in the floorplanner") {
  DeviceGrid dev = device_u280();
  for (int c = 0; c < 2; ++c) dev.slot(0, c).capacity.hbm_ch = 1;
  dev.hbm_groups = {{0}, {1}};
  TaskGraph g;
  for (int i = 0; i < 2; ++i) {
    Task t = fixtures::make_task("m" + std::to_string(i), 10, 10);
    t.area.hbm_ch = 1;
    t.hbm_required = 1;
    t.fixed_slot = SlotCoord{0, 0};
    g.tasks.push_back(std::move(t));
  }
  CHECK_THROWS_AS(floorplan(g, dev), Error);  // two channels, one available
}

TEST_CASE("sweep: dedup, pareto filter, sorting") {
  TaskGraph g = fixtures::trace_graph();
  DeviceGrid dev = fixtures::trace_device();

  SECTION("singleton sweep equals plain floorplan") {
    auto sweep = sweep_candidates(g, dev, {0.7});
    REQUIRE(sweep.candidates.size() == 1);
    PartitionOptions opts;
    opts.max_util = 0.7;
    Floorplan fp = floorplan(g, dev, opts);
    CHECK(sweep.candidates[0].floorplan.assignment == fp.assignment);
  }

  SECTION("identical assignments deduplicate") {
    auto sweep = sweep_candidates(g, dev, {0.7, 0.71});
    CHECK(sweep.candidates.size() == 1);
  }

  SECTION("pareto frontier matches an independent filter") {
    std::vector<double> range = {0.55, 0.6, 0.7, 0.85, 1.0};
    auto sweep = sweep_candidates(g, dev, range, {}, 2);
    // raw results, recomputed point by point
    std::vector<SweepCandidate> raw;
    for (double u : range) {
      PartitionOptions opts;
      opts.max_util = u;
      try {
        SweepCandidate c;
        c.max_util = u;
        c.floorplan = floorplan(g, dev, opts);
        c.cost = c.floorplan.cost;
        c.max_slot_util = 0;
        for (const auto& [coord, used] : c.floorplan.util)
          for (int i = 0; i < ResourceVector::kNumTypes; ++i) {
            const auto& cap = dev.slot(coord.row, coord.col).capacity;
            if (cap[i] > 0)
              c.max_slot_util = std::max(
                  c.max_slot_util,
                  static_cast<double>(used[i]) / static_cast<double>(cap[i]));
          }
        bool dup = false;
        for (auto& r : raw)
          if (r.floorplan.assignment == c.floorplan.assignment) dup = true;
        if (!dup) raw.push_back(std::move(c));
      } catch (const Error&) {
      }
    }
    std::vector<SweepCandidate> expect;
    for (const auto& c : raw) {
      bool dominated = false;
      for (const auto& d : raw)
        if ((d.cost < c.cost && d.max_slot_util <= c.max_slot_util) ||
            (d.cost <= c.cost && d.max_slot_util < c.max_slot_util))
          dominated = true;
      if (!dominated) expect.push_back(c);
    }
    REQUIRE(sweep.candidates.size() == expect.size());
    for (size_t i = 0; i + 1 < sweep.candidates.size(); ++i)
      CHECK(sweep.candidates[i].cost <= sweep.candidates[i + 1].cost);
    for (const auto& c : sweep.candidates) {
      bool found = false;
      for (const auto& e : expect)
        if (e.floorplan.assignment == c.floorplan.assignment) found = true;
      CHECK(found);
    }
  }

  SECTION("all-infeasible range errors out") {
    TaskGraph big;
    big.tasks.push_back(fixtures::make_task("x", 1500, 10));
    CHECK_THROWS_AS(sweep_candidates(big, dev, {0.5, 0.6}), Error);
  }
}
