#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gridflow {

// Tool-level knobs shared by the CLI and the drivers. Defaults follow the
// project file schema; command-line flags override file values.
struct Options {
  // Global utilization cap. Unset keeps the device's per-slot values
  // (0.70 unless the device says otherwise); setting it overrides them all.
  std::optional<double> max_util;
  std::int64_t per_crossing = 2;
  std::vector<double> sweep_range;
  std::int64_t timeout_threshold = 16;  // burst detector idle flush
  std::map<std::string, int> hbm_partial;
  std::vector<std::vector<std::string>> same_slot_groups;
  std::vector<std::vector<std::string>> hbm_access_groups;
  std::optional<double> time_limit_seconds;  // per ILP iteration
  int max_feedback_rounds = 10;
  std::optional<std::uint64_t> seed;  // reserved for future randomized modes
  int jobs = 1;
};

}  // namespace gridflow
