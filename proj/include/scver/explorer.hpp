#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scver/buchi.hpp"
#include "scver/kernel.hpp"

namespace scver {

enum class VerdictStatus {
  Pass,
  InvariantViolation,
  AssertionViolation,
  Deadlock,
  LtlViolation,
  DeltaOverflow,
  TimeBound,
};

const char* verdict_status_name(VerdictStatus s);

struct TraceStep {
  SchedChoice choice;
  std::uint32_t time = 0;
  std::uint32_t delta = 0;
  Observation obs;  // of the state reached by the choice
};

// Replayable counterexample. The observation word is
// [initial observation, steps[0].obs, steps[1].obs, ...]; for a lasso the
// positions from loop_start repeat forever (the final state equals the
// state at loop_start).
struct Trace {
  std::string initial_state;  // canonical bytes
  Observation initial_obs;
  std::vector<TraceStep> steps;
  std::optional<std::uint32_t> loop_start;
};

struct VerdictStats {
  std::uint64_t states_stored = 0;
  std::uint64_t transitions = 0;
  std::uint64_t max_depth = 0;
  std::uint64_t steps = 0;  // expansion count, not wall time

  bool operator==(const VerdictStats&) const = default;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Pass;
  std::string property;  // property name, or empty for bare safety
  std::string message;
  VerdictStats stats;
  std::optional<Trace> counterexample;
};

struct CheckOptions {
  EnvPolicy env = EnvPolicy::MostGeneral;
  Limits limits;
  std::uint64_t state_cap = 5'000'000;
  bool check_deadlock = true;
  // Polled between state expansions; return true to abort with a resource error.
  std::function<bool()> cancel;
};

// Exhaustive DFS in canonical order. Reports the first violation
// encountered: failed inline assertion, violated invariant, or terminal
// state with unfinished processes (when the deadlock check is on). Horizon
// crossings become DeltaOverflow/TimeBound verdicts, never silent truncation.
Verdict check_safety(const ElaboratedDesign& design, const CheckOptions& options,
                     const std::vector<ResolvedProperty>& invariants);

// Composes the automaton for the negated formula with the kernel transition
// system on observations (terminal states stutter) and runs a two-color
// nested DFS for an accepting cycle.
Verdict check_ltl(const ElaboratedDesign& design, const CheckOptions& options,
                  const prop::Formula& formula, const std::string& property_name);

struct SpaceSummary {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::vector<KernelState> terminals;  // discovery (BFS) order
};

// Brute-force BFS with no property logic. Independent oracle for the
// checkers and the shortest-path reference for test generation.
SpaceSummary enumerate_state_space(const ElaboratedDesign& design, const CheckOptions& options);

// Replays a trace through the kernel, verifying each recorded observation.
// Returns the visited states (initial first). Throws Error(Usage) when the
// trace does not replay.
std::vector<KernelState> replay_trace(const ElaboratedDesign& design, const CheckOptions& options,
                                      const Trace& trace);

}  // namespace scver
