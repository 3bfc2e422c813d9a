#pragma once

#include <cstdint>
#include <vector>

#include "scver/types.hpp"

namespace scver {

// Projection of a kernel state onto what properties and interfaces can see:
// current signal values, open-input values, simulation time, and a phase tag.
enum class Phase : std::uint8_t { TimeBoundary = 0, DeltaBoundary = 1, Terminal = 2 };

const char* phase_name(Phase p);

struct Observation {
  std::vector<Value> signals;
  std::vector<Value> inputs;
  std::uint32_t time = 0;
  Phase phase = Phase::TimeBoundary;

  bool operator==(const Observation& o) const = default;
};

}  // namespace scver
