#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scver/design.hpp"
#include "scver/observation.hpp"

namespace scver {

// How open inputs are driven: pinned to each type's minimum, or branched
// over every valuation at each time boundary.
enum class EnvPolicy : std::uint8_t { ClosedDefault, MostGeneral };

struct Limits {
  std::uint32_t max_time = 100;
  std::uint32_t max_delta = 64;
  std::uint64_t run_step_cap = 100000;
};

// Raised when a path crosses the exploration horizon. Distinct from both
// verdict-carrying violations and infrastructure failures.
class HorizonError : public Error {
 public:
  enum class Which { DeltaOverflow, TimeBound };
  HorizonError(Which which, std::string msg)
      : Error(ErrorKind::Bound, std::move(msg)), which_(which) {}
  Which which() const { return which_; }

 private:
  Which which_;
};

enum class ProcStatus : std::uint8_t {
  Runnable = 0,
  WaitingTime = 1,
  WaitingChange = 2,       // on a signal
  WaitingChangeInput = 3,  // on an open in-port
  WaitingEvent = 4,
  Terminated = 5,
};

struct ProcState {
  ProcStatus status = ProcStatus::Runnable;
  std::uint32_t loc = 0;
  std::uint32_t wake_time = 0;  // WaitingTime only; zero otherwise
  std::uint32_t wait_slot = 0;  // WaitingChange*/WaitingEvent only; zero otherwise

  bool operator==(const ProcState&) const = default;
};

// One global scheduler state. Value type; canonical serialization below is
// the identity for hashing, golden traces and replay.
struct KernelState {
  std::uint32_t time = 0;
  std::uint32_t delta = 0;
  // Set once any process ran in the current delta round; the round is then
  // closed by a DeltaStep even when no writes or notifications are pending.
  bool ran_since_boundary = false;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> assert_fail;  // (process, location)

  std::vector<ProcState> procs;
  std::vector<Value> vars;
  std::vector<Value> sig_cur;
  std::vector<std::optional<Value>> sig_next;
  std::vector<std::uint32_t> pending_delta;                        // sorted, unique
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pending_timed;  // sorted (wake, event)
  std::vector<Value> inputs;
  std::vector<std::uint32_t> stub_state;  // per stub attachment

  bool operator==(const KernelState&) const = default;

  // Field order: time, delta, ran flag, assert flag(+payload), processes
  // (status, loc, wake, wait slot), vars, signal currents, signal nexts,
  // pending delta, pending timed, inputs, stub states. Little-endian.
  std::string serialize() const;
  static KernelState deserialize(const ElaboratedDesign& design, std::string_view bytes);
};

struct SchedChoice {
  enum class Kind : std::uint8_t { Run = 0, DeltaStep = 1, TimeStep = 2, Stutter = 3 };
  Kind kind = Kind::Run;
  std::uint32_t process = 0;               // Run
  std::vector<Value> inputs;               // TimeStep: the full valuation chosen
  std::vector<std::uint32_t> stub_letters; // Delta/TimeStep with stubs: letter per attachment

  bool operator==(const SchedChoice&) const = default;
  std::string label(const ElaboratedDesign& design) const;
};

// One state per initial open-input valuation allowed by the policy (times
// any matching initial stub letters). All processes runnable at location 0.
std::vector<KernelState> initial_states(const ElaboratedDesign& design, EnvPolicy env,
                                        const Limits& limits);

// The phase machine. Canonical successor order: runnable processes by
// elaboration index; otherwise a delta step; otherwise a time step branching
// over input valuations (lexicographic) and stub letters (ascending ids).
// Terminal states return an empty list. Throws HorizonError on bound crossings.
std::vector<std::pair<SchedChoice, KernelState>> successors(const ElaboratedDesign& design,
                                                            const KernelState& state,
                                                            EnvPolicy env, const Limits& limits);

Observation observe(const ElaboratedDesign& design, const KernelState& state);

// Terminal without successors. Clean means every process finished.
bool is_terminal(const ElaboratedDesign& design, const KernelState& state);
bool is_clean_termination(const KernelState& state);

// Values of one instance's ports (declaration order) in this state.
StubLetter project_letter(const ElaboratedDesign& design, std::uint32_t instance,
                          const KernelState& state);

// Control locations the process passes through when run from this state,
// in execution order, including the location it suspends or stops at.
// The process must be runnable. Used for statement coverage.
std::vector<std::uint32_t> run_trail(const ElaboratedDesign& design, const KernelState& state,
                                     std::uint32_t process, const Limits& limits);

Value eval_rexpr(const RExpr& e, const KernelState& st);

}  // namespace scver
