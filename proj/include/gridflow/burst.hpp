#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gridflow/resources.hpp"

// Runtime burst detection: merges streams of consecutive addresses into one
// long transaction. A non-sequential input closes the open burst and starts
// the next one in the same cycle; an idle stretch reaching the timeout
// threshold flushes the open burst.

namespace gridflow {

struct Burst {
  count_t addr = 0;
  count_t len = 0;
};

struct BurstDetector {
  count_t timeout_threshold = 16;

  bool open = false;
  count_t base_addr = 0;
  count_t last_addr = 0;
  count_t length_counter = 0;
  count_t idle_cycles = 0;

  // One cycle: either an input address or nothing. Returns the burst issued
  // this cycle, if any.
  std::optional<Burst> step(std::optional<count_t> input) {
    if (input) {
      idle_cycles = 0;
      if (!open) {
        open = true;
        base_addr = *input;
        last_addr = *input;
        length_counter = 1;
        return std::nullopt;
      }
      if (*input == last_addr + 1) {
        ++length_counter;
        last_addr = *input;
        return std::nullopt;
      }
      Burst out{base_addr, length_counter};
      base_addr = *input;
      last_addr = *input;
      length_counter = 1;
      return out;
    }
    if (!open) return std::nullopt;
    ++idle_cycles;
    if (idle_cycles >= timeout_threshold) return flush();
    return std::nullopt;
  }

  // Closes the open burst, if any.
  std::optional<Burst> flush() {
    if (!open) return std::nullopt;
    open = false;
    idle_cycles = 0;
    return Burst{base_addr, length_counter};
  }
};

struct BurstEmission {
  count_t cycle = 0;
  count_t addr = 0;
  count_t len = 0;
};

// Folds the detector over a (cycle, addr) trace. Cycles must be strictly
// increasing; gaps are idle cycles. Whatever is still open at end of trace
// is flushed one cycle past the last input.
inline std::vector<BurstEmission> burst_run(
    const std::vector<std::pair<count_t, count_t>>& trace,
    count_t timeout_threshold = 16) {
  std::vector<BurstEmission> out;
  if (trace.empty()) return out;
  BurstDetector det;
  det.timeout_threshold = timeout_threshold;
  count_t cycle = trace.front().first;
  size_t i = 0;
  count_t last_cycle = trace.back().first;
  for (; cycle <= last_cycle; ++cycle) {
    std::optional<count_t> input;
    if (i < trace.size() && trace[i].first == cycle) {
      input = trace[i].second;
      ++i;
    } else if (i < trace.size() && trace[i].first < cycle) {
      fail(ErrorKind::InvalidInput,
           "burst trace cycles must be strictly increasing");
    }
    if (auto b = det.step(input)) out.push_back({cycle, b->addr, b->len});
  }
  if (i < trace.size())
    fail(ErrorKind::InvalidInput,
         "burst trace cycles must be strictly increasing");
  if (auto b = det.flush()) out.push_back({last_cycle + 1, b->addr, b->len});
  return out;
}

}  // namespace gridflow
