#pragma once

// Shared test fixtures: the worked micro-instances the golden tests pin down
// and the synthetic stress-scale generator.

#include <cstdio>
#include <string>
#include <vector>

#include "gridflow/device.hpp"
#include "gridflow/graph.hpp"

namespace fixtures {

using namespace gridflow;

inline Task make_task(const std::string& name, count_t lut, count_t ff,
                      count_t bram = 0, count_t dsp = 0) {
  Task t;
  t.name = name;
  t.area.lut = lut;
  t.area.ff = ff;
  t.area.bram18k = bram;
  t.area.dsp = dsp;
  return t;
}

inline Channel make_channel(const std::string& id, const std::string& src,
                            const std::string& dst, count_t width,
                            count_t lat = 0, count_t capacity = 2) {
  Channel c;
  c.id = id;
  c.src = src;
  c.dst = dst;
  c.width = width;
  c.capacity = capacity;
  c.lat = lat;
  return c;
}

// ---------------------------------------------------------------------------
// Coordinate-trace instance: eight tasks chained v8-v5-v4-v7-v6-v1-v3-v2 with
// descending-then-ascending widths and v8 anchored bottom-left. On the
// 2-column x 4-row schedule (H, H, V) every iteration has a unique optimum,
// giving the reference trace:
//   iter-1: v1,v2 -> row 1;  v4,v5 -> row 0
//   iter-2: v2 -> row 3, v1 -> row 2, v4 -> row 1, v5 -> row 0
//   iter-3: v2 -> col 0;  v1,v4,v5 -> col 1
// Final slots: v8(0,0) v5(0,1) v7(1,0) v4(1,1) v6(2,0) v1(2,1) v2(3,0)
// v3(3,1); total crossing cost 2864.

inline TaskGraph trace_graph() {
  TaskGraph g;
  for (const char* name : {"v1", "v2", "v3", "v4", "v5", "v6", "v7", "v8"})
    g.tasks.push_back(make_task(name, 100, 200, 4, 2));
  g.tasks[7].fixed_slot = SlotCoord{0, 0};  // v8: IO module pinned bottom-left
  g.channels = {
      make_channel("e1", "v8", "v5", 600), make_channel("e2", "v5", "v4", 512),
      make_channel("e3", "v4", "v7", 256), make_channel("e4", "v7", "v6", 128),
      make_channel("e5", "v6", "v1", 256), make_channel("e6", "v1", "v3", 512),
      make_channel("e7", "v3", "v2", 600),
  };
  return g;
}

inline DeviceGrid trace_device() {
  ResourceVector cap;
  cap.lut = 200;
  cap.ff = 400;
  cap.bram18k = 8;
  cap.dsp = 4;
  return gridflow::detail::make_uniform_grid(
      4, 2, cap,
      {{Axis::Horizontal, 1, 1},
       {Axis::Horizontal, 1, 1},
       {Axis::Vertical, 1, 1}});
}

// ---------------------------------------------------------------------------
// Latency-balancing instance: seven vertices, reconvergent fan-in at v7.
// Edges e13, e27, e37 carry one unit of inserted latency; e14 is two bits
// wide, all other edges one. The unique overhead-optimal solution adds one
// unit on e12 and two units on each of e47, e57, e67: overhead 7.

inline TaskGraph balance_graph() {
  TaskGraph g;
  for (const char* name : {"v1", "v2", "v3", "v4", "v5", "v6", "v7"})
    g.tasks.push_back(make_task(name, 10, 10));
  g.channels = {
      make_channel("e12", "v1", "v2", 1, 0),
      make_channel("e13", "v1", "v3", 1, 1),
      make_channel("e14", "v1", "v4", 2, 0),
      make_channel("e15", "v1", "v5", 1, 0),
      make_channel("e16", "v1", "v6", 1, 0),
      make_channel("e23", "v2", "v3", 1, 0),
      make_channel("e27", "v2", "v7", 1, 1),
      make_channel("e37", "v3", "v7", 1, 1),
      make_channel("e45", "v4", "v5", 1, 0),
      make_channel("e46", "v4", "v6", 1, 0),
      make_channel("e47", "v4", "v7", 1, 0),
      make_channel("e57", "v5", "v7", 1, 0),
      make_channel("e67", "v6", "v7", 1, 0),
  };
  return g;
}

// ---------------------------------------------------------------------------
// Synthetic stress graph: a 29x17 process grid (493 tasks) with wide
// horizontal streams and narrower vertical links, 925 channels after
// trimming fifteen last-row links. Areas make the design use most of the
// effective device, so every partition has to balance.

inline TaskGraph stress_grid_graph() {
  constexpr int kRows = 29, kCols = 17;
  TaskGraph g;
  auto name = [](int r, int c) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "pe_r%02d_c%02d", r, c);
    return std::string(buf);
  };
  for (int r = 0; r < kRows; ++r)
    for (int c = 0; c < kCols; ++c) {
      int idx = r * kCols + c;
      count_t lut = 1700 + 40 * ((idx * 31 + 7) % 13);
      g.tasks.push_back(make_task(name(r, c), lut, 2 * lut, 4 + idx % 3,
                                  2 + idx % 2));
    }
  int dropped = 0;
  for (int r = 0; r < kRows; ++r)
    for (int c = 0; c < kCols; ++c) {
      if (c + 1 < kCols) {
        if (r == kRows - 1 && c < 15) {
          ++dropped;  // trim to the target channel count
        } else {
          g.channels.push_back(make_channel(
              "h_r" + std::to_string(r) + "_c" + std::to_string(c), name(r, c),
              name(r, c + 1), 256));
        }
      }
      if (r + 1 < kRows)
        g.channels.push_back(make_channel(
            "v_r" + std::to_string(r) + "_c" + std::to_string(c), name(r, c),
            name(r + 1, c), 60 + (r * 13 + c * 7) % 9));
    }
  (void)dropped;
  return g;
}

}  // namespace fixtures
