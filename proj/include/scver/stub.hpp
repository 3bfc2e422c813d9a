#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scver/config.hpp"
#include "scver/design.hpp"
#include "scver/explorer.hpp"

namespace scver {

// Renders a letter as "(port=value, ...)" using the stub's port list.
std::string letter_text(const StubAutomaton& stub, const StubLetter& letter);

// Closes the component with the most-general environment on its in-ports,
// walks every interface-letter sequence of length <= k (letters sampled at
// the initial state and after each delta/time boundary; terminal states
// repeat their letter), and folds the sequences into an h-history automaton.
// Accepts every observed trace by construction.
StubAutomaton learn_stub(const ast::DesignAst& ast, const std::string& instance,
                         std::uint32_t depth_k, std::uint32_t history_h,
                         const CheckOptions& options);

struct ConsistencyReport {
  bool pass = true;
  std::vector<StubLetter> witness;  // shortest rejected trace when failing
  std::string message;
  std::uint64_t states_checked = 0;
};

// Enumerates the component's interface traces up to length k and checks
// each is accepted by the stub. Fails fast with the shortest rejection.
// Raises Error(Semantic) when the stub's alphabet fingerprint is stale.
ConsistencyReport check_consistency(const ast::DesignAst& ast, const std::string& instance,
                                    const StubAutomaton& stub, std::uint32_t depth_k,
                                    const CheckOptions& options);

// Every trace of `sub` up to length k replays in `super` (letters matched
// by value). Used for the history-depth monotonicity property.
bool bounded_language_included(const StubAutomaton& sub, const StubAutomaton& super,
                               std::uint32_t depth_k,
                               std::vector<StubLetter>* witness = nullptr);

}  // namespace scver
