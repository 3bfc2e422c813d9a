#pragma once

#include <string>

#include "scver/explorer.hpp"

namespace scver {

// Bounds and policies shared by every subcommand; echoed into every report.
struct RunConfig {
  std::uint32_t max_time = 100;
  std::uint32_t max_delta = 64;
  std::uint64_t state_cap = 5'000'000;
  EnvPolicy env = EnvPolicy::MostGeneral;
  std::string format = "json";  // json | plain
  std::string spin_path;        // --spin or SCVER_SPIN
  bool check_deadlock = true;
  std::uint32_t stub_depth_k = 8;
  std::uint32_t stub_history_h = 2;

  Limits limits() const {
    Limits l;
    l.max_time = max_time;
    l.max_delta = max_delta;
    return l;
  }

  CheckOptions check_options() const {
    CheckOptions o;
    o.env = env;
    o.limits = limits();
    o.state_cap = state_cap;
    o.check_deadlock = check_deadlock;
    return o;
  }
};

}  // namespace scver
