#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "gridflow/error.hpp"

namespace gridflow {

using count_t = std::int64_t;

// Per-type resource quantities (instance counts, never fractions).
// Comparison is component-wise and therefore only a partial order.
struct ResourceVector {
  count_t lut = 0;
  count_t ff = 0;
  count_t bram18k = 0;
  count_t dsp = 0;
  count_t uram = 0;
  count_t hbm_ch = 0;

  static constexpr int kNumTypes = 6;
  static constexpr std::array<const char*, kNumTypes> kTypeNames = {
      "lut", "ff", "bram18k", "dsp", "uram", "hbm_ch"};

  count_t& operator[](int i) {
    switch (i) {
      case 0: return lut;
      case 1: return ff;
      case 2: return bram18k;
      case 3: return dsp;
      case 4: return uram;
      case 5: return hbm_ch;
    }
    fail(ErrorKind::Internal, "resource type index out of range");
  }
  count_t operator[](int i) const {
    return const_cast<ResourceVector&>(*this)[i];
  }

  ResourceVector& operator+=(const ResourceVector& o) {
    for (int i = 0; i < kNumTypes; ++i) (*this)[i] += o[i];
    return *this;
  }
  friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) {
    return a += b;
  }

  // Saturating subtraction: components clamp at zero.
  ResourceVector minus_clamped(const ResourceVector& o) const {
    ResourceVector r = *this;
    for (int i = 0; i < kNumTypes; ++i) {
      r[i] -= o[i];
      if (r[i] < 0) r[i] = 0;
    }
    return r;
  }

  // True iff every component of *this is <= the corresponding one of o.
  bool fits_within(const ResourceVector& o) const {
    for (int i = 0; i < kNumTypes; ++i)
      if ((*this)[i] > o[i]) return false;
    return true;
  }

  bool operator==(const ResourceVector& o) const {
    for (int i = 0; i < kNumTypes; ++i)
      if ((*this)[i] != o[i]) return false;
    return true;
  }
  bool operator!=(const ResourceVector& o) const { return !(*this == o); }

  bool all_non_negative() const {
    for (int i = 0; i < kNumTypes; ++i)
      if ((*this)[i] < 0) return false;
    return true;
  }

  bool is_zero() const { return *this == ResourceVector{}; }

  std::string to_string() const {
    std::string s = "{";
    for (int i = 0; i < kNumTypes; ++i) {
      if ((*this)[i] == 0) continue;
      if (s.size() > 1) s += ", ";
      s += kTypeNames[i];
      s += ":";
      s += std::to_string((*this)[i]);
    }
    s += "}";
    return s;
  }
};

}  // namespace gridflow
