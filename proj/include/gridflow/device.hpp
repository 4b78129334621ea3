#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridflow/graph.hpp"
#include "gridflow/resources.hpp"

namespace gridflow {

// One sub-region of the fabric bounded by die boundaries and large IP
// columns. Row 0 is the bottom of the device.
struct Slot {
  int row = 0;
  int col = 0;
  ResourceVector capacity;
  double max_util = 0.70;
  // Per-type overrides; NaN means "use the scalar". Hard resources such as
  // HBM channels typically override to 1.0.
  std::array<double, ResourceVector::kNumTypes> max_util_override = {
      nan_(), nan_(), nan_(), nan_(), nan_(), nan_()};

  static constexpr double nan_() {
    return std::numeric_limits<double>::quiet_NaN();
  }

  double util_limit(int type) const {
    double o = max_util_override[type];
    return std::isnan(o) ? max_util : o;
  }

  // Integer usable budget per type: floor(limit * capacity). Conservative,
  // so every downstream check stays in exact integer arithmetic.
  ResourceVector effective_capacity() const {
    ResourceVector r;
    for (int i = 0; i < ResourceVector::kNumTypes; ++i)
      r[i] = static_cast<count_t>(std::floor(util_limit(i) * static_cast<double>(capacity[i]) + 1e-9));
    return r;
  }
};

enum class Axis { Horizontal, Vertical };

// One halving step of the partition schedule. The split ratio gives the
// child extents (rows for Horizontal, columns for Vertical); child `a` is
// the low-index side, which decision value 0 selects.
struct PartitionDirective {
  Axis axis = Axis::Horizontal;
  int split_a = 1;
  int split_b = 1;
};

struct DeviceGrid {
  int rows = 0;
  int cols = 0;
  std::vector<Slot> slots;  // row-major, rows*cols entries
  std::vector<PartitionDirective> schedule;
  // HBM hardware groups: channel ids joined by one crossbar each.
  std::vector<std::vector<int>> hbm_groups;

  const Slot& slot(int row, int col) const {
    return slots[static_cast<size_t>(row) * cols + col];
  }
  Slot& slot(int row, int col) {
    return slots[static_cast<size_t>(row) * cols + col];
  }

  bool in_bounds(SlotCoord c) const {
    return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
  }

  ResourceVector total_effective_capacity() const {
    ResourceVector r;
    for (const auto& s : slots) r += s.effective_capacity();
    return r;
  }

  count_t total_hbm_channels() const {
    count_t n = 0;
    for (const auto& s : slots) n += s.capacity.hbm_ch;
    return n;
  }

  // Channel ids attributed to a slot: HBM-adjacent slots take consecutive id
  // blocks in (row, col) order, sized by their hbm_ch capacity.
  std::vector<int> hbm_channel_ids(int row, int col) const {
    int next = 0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        int n = static_cast<int>(slot(r, c).capacity.hbm_ch);
        if (r == row && c == col) {
          std::vector<int> ids(n);
          for (int i = 0; i < n; ++i) ids[i] = next + i;
          return ids;
        }
        next += n;
      }
    }
    return {};
  }

  void apply_global_max_util(double max_util) {
    for (auto& s : slots) s.max_util = max_util;
  }
};

namespace detail {

inline DeviceGrid make_uniform_grid(int rows, int cols, ResourceVector cap,
                                    std::vector<PartitionDirective> schedule) {
  DeviceGrid g;
  g.rows = rows;
  g.cols = cols;
  g.schedule = std::move(schedule);
  g.slots.resize(static_cast<size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      Slot& s = g.slot(r, c);
      s.row = r;
      s.col = c;
      s.capacity = cap;
    }
  return g;
}

}  // namespace detail

// Alveo U250 preset: a 2-column x 4-row grid. Per-slot capacities are the
// chip totals (5376 BRAM18K, 12288 DSP, 3456K FF, 1728K LUT, 1280 URAM)
// divided by the eight slots.
inline DeviceGrid device_u250() {
  ResourceVector cap;
  cap.lut = 216000;
  cap.ff = 432000;
  cap.bram18k = 672;
  cap.dsp = 1536;
  cap.uram = 160;
  cap.hbm_ch = 0;
  return detail::make_uniform_grid(
      4, 2, cap,
      {{Axis::Horizontal, 1, 1}, {Axis::Horizontal, 1, 1}, {Axis::Vertical, 1, 1}});
}

// Alveo U280 preset: a 2-column x 3-row grid with 32 HBM channels split
// between the two bottom slots. Capacities are the chip totals (4032
// BRAM18K, 9024 DSP, 2607K FF, 434K LUT, 960 URAM) divided by six slots;
// this even split is an approximation. The non-power-of-two row count uses
// an asymmetric 2:1 first cut, then a 1:1 cut of the two-row child.
inline DeviceGrid device_u280() {
  ResourceVector cap;
  cap.lut = 434000 / 6;
  cap.ff = 2607000 / 6;
  cap.bram18k = 4032 / 6;
  cap.dsp = 9024 / 6;
  cap.uram = 960 / 6;
  cap.hbm_ch = 0;
  DeviceGrid g = detail::make_uniform_grid(
      3, 2, cap,
      {{Axis::Horizontal, 2, 1}, {Axis::Horizontal, 1, 1}, {Axis::Vertical, 1, 1}});
  for (int c = 0; c < 2; ++c) {
    Slot& s = g.slot(0, c);
    s.capacity.hbm_ch = 16;
    // Channels are hard ports, not congestion-prone fabric.
    s.max_util_override[5] = 1.0;
  }
  for (int grp = 0; grp < 8; ++grp)
    g.hbm_groups.push_back({grp * 4, grp * 4 + 1, grp * 4 + 2, grp * 4 + 3});
  return g;
}

inline std::optional<DeviceGrid> device_preset(const std::string& name) {
  if (name == "u250") return device_u250();
  if (name == "u280") return device_u280();
  return std::nullopt;
}

// Checks that the schedule splits the grid into exactly rows x cols unit
// regions. Returns an error message, or empty when fine.
inline std::string check_schedule(const DeviceGrid& g) {
  struct Rect {
    int r0, r1, c0, c1;
  };
  std::vector<Rect> regions = {{0, g.rows, 0, g.cols}};
  for (size_t k = 0; k < g.schedule.size(); ++k) {
    const auto& d = g.schedule[k];
    if (d.split_a < 1 || d.split_b < 1)
      return "directive " + std::to_string(k) + " has a non-positive split";
    std::vector<Rect> next;
    for (const Rect& r : regions) {
      int extent = d.axis == Axis::Horizontal ? r.r1 - r.r0 : r.c1 - r.c0;
      if (extent < 2) {
        next.push_back(r);
        continue;
      }
      int total = d.split_a + d.split_b;
      if (extent % total != 0)
        return "directive " + std::to_string(k) + " ratio " +
               std::to_string(d.split_a) + ":" + std::to_string(d.split_b) +
               " does not divide extent " + std::to_string(extent);
      int lo = extent / total * d.split_a;
      if (d.axis == Axis::Horizontal) {
        next.push_back({r.r0, r.r0 + lo, r.c0, r.c1});
        next.push_back({r.r0 + lo, r.r1, r.c0, r.c1});
      } else {
        next.push_back({r.r0, r.r1, r.c0, r.c0 + lo});
        next.push_back({r.r0, r.r1, r.c0 + lo, r.c1});
      }
    }
    regions = std::move(next);
  }
  if (regions.size() != static_cast<size_t>(g.rows) * g.cols)
    return "schedule yields " + std::to_string(regions.size()) +
           " regions for a " + std::to_string(g.rows) + "x" +
           std::to_string(g.cols) + " grid";
  for (const Rect& r : regions)
    if (r.r1 - r.r0 != 1 || r.c1 - r.c0 != 1)
      return "schedule leaves a non-unit region";
  return {};
}

inline void require_valid(const DeviceGrid& g) {
  if (g.rows < 1 || g.cols < 1)
    fail(ErrorKind::InvalidInput, "device grid must have positive dimensions");
  if (g.slots.size() != static_cast<size_t>(g.rows) * g.cols)
    fail(ErrorKind::InvalidInput, "device grid slot array is incomplete");
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c) {
      const Slot& s = g.slot(r, c);
      if (s.row != r || s.col != c)
        fail(ErrorKind::InvalidInput, "device grid slot array is misordered");
      if (!s.capacity.all_non_negative())
        fail(ErrorKind::InvalidInput, "slot capacity has a negative component");
      for (int i = 0; i < ResourceVector::kNumTypes; ++i) {
        double u = s.util_limit(i);
        if (!(u > 0.0 && u <= 1.0))
          fail(ErrorKind::InvalidInput,
               "slot max_util must lie in (0, 1]");
      }
    }
  std::string err = check_schedule(g);
  if (!err.empty()) fail(ErrorKind::InvalidInput, "bad schedule: " + err);
  std::set<int> seen_ids;
  for (const auto& grp : g.hbm_groups)
    for (int id : grp) {
      if (id < 0)
        fail(ErrorKind::InvalidInput, "negative HBM channel id in a group");
      if (!seen_ids.insert(id).second)
        fail(ErrorKind::InvalidInput,
             "HBM channel " + std::to_string(id) + " appears in two groups");
    }
}

}  // namespace gridflow
