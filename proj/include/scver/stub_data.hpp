#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scver/types.hpp"

namespace scver {

// One interface letter: values of a component's ports in declaration order.
struct StubLetter {
  std::vector<Value> port_values;

  bool operator==(const StubLetter& o) const = default;
  bool operator<(const StubLetter& o) const { return port_values < o.port_values; }
};

// Learned over-approximating automaton over a component's interface
// alphabet. States are identified by the last `history` letters seen.
// Deterministic in (state, letter); entering an initial state consumes the
// first letter of a trace.
struct StubAutomaton {
  static constexpr int kFormatVersion = 1;

  // metadata
  std::string component_instance;
  std::string module_name;
  std::uint32_t depth_k = 0;
  std::uint32_t history_h = 0;
  std::string toolchain_version;
  std::string alphabet_fingerprint;

  // alphabet
  std::vector<std::string> port_names;  // module declaration order
  std::vector<bool> port_is_in;
  std::vector<ScalarType> port_types;

  std::vector<StubLetter> letters;                     // letter id = index
  std::vector<std::vector<std::uint32_t>> state_grams; // state id -> letter ids (<= h)
  std::map<std::uint32_t, std::uint32_t> initial;      // first letter -> state
  std::vector<std::map<std::uint32_t, std::uint32_t>> transitions;  // per state: letter -> state

  std::size_t transition_count() const {
    std::size_t n = 0;
    for (const auto& m : transitions) n += m.size();
    return n;
  }
};

// Hash of a component's port shape. A stub learned against one shape is
// stale once the shape changes; loaders and elaboration both compare this.
std::string alphabet_fingerprint(const std::string& module_name,
                                 const std::vector<std::string>& names,
                                 const std::vector<bool>& is_in,
                                 const std::vector<ScalarType>& types);

}  // namespace scver
