#pragma once

#include <map>
#include <optional>
#include <string>

#include "scver/config.hpp"
#include "scver/explorer.hpp"
#include "scver/stub.hpp"

namespace scver {

// Builds the composed design (chosen instances replaced by their stubs) and
// checks the named property on it. Invariants run without the deadlock
// check: a stub without a matching move truncates the path, which is not a
// deadlock of the modeled system. Because stubs over-approximate, a Pass on
// a safety property transfers to the unstubbed system within the horizon;
// liveness verdicts on stubbed compositions are advisory.
Verdict compose_and_verify(const ast::DesignAst& ast,
                           const std::map<std::string, StubAutomaton>& substitutions,
                           const std::string& property_name, const RunConfig& config);

enum class ReplayOutcome { Confirmed, Spurious };

struct ReplayResult {
  ReplayOutcome outcome = ReplayOutcome::Spurious;
  std::optional<Trace> concrete;        // Confirmed: a real counterexample
  std::uint32_t matched_boundaries = 0; // Spurious: longest matched interface prefix
  std::string message;
};

// Projects a composed-trace violation onto the stub interfaces and the
// open-input stimulus, then searches the unstubbed system for a matching
// run. Confirmed returns a concrete replayable trace; Spurious reports how
// far the interface letters could be matched before every run diverged.
ReplayResult replay_on_concrete(const ast::DesignAst& ast,
                                const std::map<std::string, StubAutomaton>& substitutions,
                                const std::string& property_name, const Trace& composed_trace,
                                const RunConfig& config);

}  // namespace scver
