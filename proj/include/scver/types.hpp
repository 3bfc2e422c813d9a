#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scver/diag.hpp"

namespace scver {

// Runtime values are plain integers; the declared ScalarType gives them meaning.
// bool: 0/1. bounded int: the value itself. enum: label index.
using Value = std::int64_t;

// Range width per type is capped to keep every value space finite.
inline constexpr std::int64_t kMaxRangeWidth = 1 << 16;

struct ScalarType {
  enum class Kind { Bool, Int, Enum };

  Kind kind = Kind::Bool;
  std::int64_t lo = 0, hi = 0;      // Int only
  std::vector<std::string> labels;  // Enum only

  static ScalarType boolean() { return {}; }
  static ScalarType bounded(std::int64_t lo, std::int64_t hi) {
    ScalarType t;
    t.kind = Kind::Int;
    t.lo = lo;
    t.hi = hi;
    return t;
  }
  static ScalarType enumeration(std::vector<std::string> labels) {
    ScalarType t;
    t.kind = Kind::Enum;
    t.labels = std::move(labels);
    return t;
  }

  std::int64_t cardinality() const {
    switch (kind) {
      case Kind::Bool: return 2;
      case Kind::Int: return hi - lo + 1;
      case Kind::Enum: return static_cast<std::int64_t>(labels.size());
    }
    return 0;
  }

  Value default_value() const { return kind == Kind::Int ? lo : 0; }

  bool contains(Value v) const {
    switch (kind) {
      case Kind::Bool: return v == 0 || v == 1;
      case Kind::Int: return v >= lo && v <= hi;
      case Kind::Enum: return v >= 0 && v < static_cast<std::int64_t>(labels.size());
    }
    return false;
  }

  // Stores into int-typed slots wrap modulo the range width; bool and enum
  // stores must already be in range.
  Value wrap(Value v) const {
    if (kind != Kind::Int) return v;
    std::int64_t w = hi - lo + 1;
    std::int64_t r = (v - lo) % w;
    if (r < 0) r += w;
    return r + lo;
  }

  bool operator==(const ScalarType& o) const {
    return kind == o.kind && lo == o.lo && hi == o.hi && labels == o.labels;
  }

  std::string str() const;                   // source syntax, e.g. "int[0..3]"
  std::string render(Value v) const;         // value as source literal text
};

}  // namespace scver
