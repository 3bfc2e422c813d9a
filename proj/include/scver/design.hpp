#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scver/ast.hpp"
#include "scver/prop.hpp"
#include "scver/stub_data.hpp"
#include "scver/types.hpp"

namespace scver {

// Expression with all names resolved to global slots; evaluated by the kernel.
struct RExpr {
  enum class Kind { Const, Var, Signal, Input, Unary, Binary };
  Kind kind = Kind::Const;
  Value cval = 0;
  std::uint32_t index = 0;
  ast::UnOp un{};
  ast::BinOp bin{};
  std::vector<RExpr> kids;
};

inline constexpr std::uint32_t kEndLoc = 0xFFFFFFFFu;

// One control location per statement; `if`/`while` get one location for the
// condition; a wait is a location whose outgoing edge fires on wake-up.
struct CfgNode {
  enum class Kind {
    Entry, Assign, NextWrite, Branch, WaitTime, WaitChange, WaitEvent,
    NotifyNow, NotifyDelta, NotifyTime, Assert, Skip,
  };
  Kind kind = Kind::Entry;
  std::uint32_t next = kEndLoc;  // fallthrough; Branch: taken when true
  std::uint32_t alt = kEndLoc;   // Branch only: taken when false
  std::uint32_t target = 0;      // var / signal / input / event slot
  bool target_is_input = false;  // WaitChange on an open in-port
  std::int64_t amount = 0;       // WaitTime / NotifyTime
  RExpr expr;
  SourceLoc loc;
};

struct ProcessInfo {
  std::string name;  // "instance.process"
  std::uint32_t instance = 0;
  std::vector<CfgNode> cfg;  // location 0 is entry; numbering dense
};

struct SignalInfo {
  std::string name;  // "instance.signal"; port signals use the writer-side name
  ScalarType type;
  Value init = 0;
  bool from_port = false;
  std::uint32_t instance = 0;
};

struct InputInfo {
  std::string name;  // "instance.port" of an unbound in-port
  ScalarType type;
  std::uint32_t instance = 0;
};

struct EventInfo {
  std::string name;  // "instance.event"
  std::uint32_t instance = 0;
};

struct VarInfo {
  std::string name;  // "instance.var"; shared by all processes of the instance
  ScalarType type;
  Value init = 0;
  std::uint32_t instance = 0;
};

// How one module port is wired after elaboration.
struct PortRef {
  std::string port_name;
  bool is_in = true;
  bool is_open_input = false;  // unbound in-port
  std::uint32_t index = 0;     // signal slot, or input slot when open
  ScalarType type;
};

struct InstanceInfo {
  std::string name;
  std::string module_name;
  std::vector<PortRef> ports;  // module port declaration order
  bool stubbed = false;
  std::uint32_t stub_index = 0;  // into ElaboratedDesign::stubs when stubbed
};

struct ResolvedProperty {
  std::string name;
  bool is_ltl = false;
  prop::Formula formula;
};

// A stub standing in for an instance. Precomputed wiring maps alphabet
// positions onto kernel slots.
struct StubAttachment {
  std::uint32_t instance = 0;
  StubAutomaton automaton;
  // positions into the letter vector, with their kernel slots
  struct InWire { std::uint32_t letter_pos; bool is_input; std::uint32_t slot; };
  struct OutWire { std::uint32_t letter_pos; std::uint32_t signal; };
  std::vector<InWire> in_wires;
  std::vector<OutWire> out_wires;
};

struct ElaboratedDesign {
  std::vector<InstanceInfo> instances;
  std::vector<ProcessInfo> processes;  // instance order, then module decl order
  std::vector<VarInfo> vars;
  std::vector<SignalInfo> signals;
  std::vector<InputInfo> inputs;
  std::vector<EventInfo> events;
  std::vector<ResolvedProperty> properties;
  std::vector<StubAttachment> stubs;
  prop::SymbolTable symbols;
  long double value_space_bound = 1.0L;
  std::vector<std::string> warnings;

  const ResolvedProperty* find_property(const std::string& name) const {
    for (const auto& p : properties) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }
};

struct ElabOptions {
  // Elaborate only this instance: binds dropped, its in-ports become open
  // inputs, properties dropped. Used for standalone component analysis.
  std::optional<std::string> restrict_to_instance;
  // Instances whose internals are replaced by interface stubs.
  std::map<std::string, StubAutomaton> stub_substitutions;
  long double value_space_cap = 1e12L;
};

ElaboratedDesign elaborate(const ast::DesignAst& ast, const ElabOptions& options = {});

// Canonical serialization of the elaborated design, for determinism checks.
std::string design_fingerprint(const ElaboratedDesign& d);

}  // namespace scver
