#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "scver/design.hpp"
#include "scver/util.hpp"

namespace scver {

using namespace ast;

namespace {

// What an unqualified name means inside one instance's processes.
struct Slot {
  enum class Kind { Var, Signal, Input, Event, EnumLabel };
  Kind kind;
  std::uint32_t index = 0;  // global slot (Var/Signal/Input/Event)
  Value label_value = 0;    // EnumLabel
  ScalarType type;
};

using Scope = std::map<std::string, Slot>;

struct TypedExpr {
  RExpr expr;
  ScalarType type;
};

constexpr std::int64_t kRangeSat = 1ll << 62;

std::int64_t sat(std::int64_t v) { return std::clamp(v, -kRangeSat, kRangeSat); }

Value eval_const_literal(const Expr& e, const ScalarType& type, const std::string& what) {
  switch (e.kind) {
    case Expr::Kind::BoolLit:
      if (type.kind != ScalarType::Kind::Bool) {
        fail_semantic("boolean literal initializing non-bool " + what, e.loc);
      }
      return e.bval ? 1 : 0;
    case Expr::Kind::IntLit:
      if (type.kind != ScalarType::Kind::Int) {
        fail_semantic("integer literal initializing non-integer " + what, e.loc);
      }
      if (!type.contains(e.ival)) {
        fail_semantic("initial value " + std::to_string(e.ival) + " outside " + type.str() +
                          " for " + what,
                      e.loc);
      }
      return e.ival;
    case Expr::Kind::Name: {
      if (type.kind != ScalarType::Kind::Enum) {
        fail_semantic("label literal initializing non-enum " + what, e.loc);
      }
      auto it = std::find(type.labels.begin(), type.labels.end(), e.name);
      if (it == type.labels.end()) {
        fail_semantic("'" + e.name + "' is not a label of " + type.str(), e.loc);
      }
      return it - type.labels.begin();
    }
    case Expr::Kind::Unary:
      if (e.un == UnOp::Neg && e.lhs->kind == Expr::Kind::IntLit) {
        auto neg = make_int(-e.lhs->ival, e.loc);
        return eval_const_literal(*neg, type, what);
      }
      [[fallthrough]];
    default:
      fail_semantic("initializer must be a literal for " + what, e.loc);
  }
}

class Elaborator {
 public:
  Elaborator(const DesignAst& ast, const ElabOptions& opt) : ast_(ast), opt_(opt) {}

  ElaboratedDesign run() {
    index_modules();
    collect_instances();
    build_tables();
    attach_stubs();
    lower_processes();
    resolve_properties();
    compute_bound();
    return std::move(out_);
  }

 private:
  void index_modules() {
    for (std::size_t m = 0; m < ast_.modules.size(); ++m) {
      const ModuleDecl& mod = ast_.modules[m];
      if (!module_index_.emplace(mod.name, m).second) {
        fail_semantic("duplicate module name '" + mod.name + "'", mod.loc);
      }
      validate_module(mod);
    }
  }

  void validate_module(const ModuleDecl& mod) {
    std::unordered_set<std::string> names;
    auto claim = [&](const std::string& n, SourceLoc loc) {
      if (!names.insert(n).second) {
        fail_semantic("duplicate member name '" + n + "' in module '" + mod.name + "'", loc);
      }
    };
    auto check_type = [&](const ScalarType& t, SourceLoc loc) {
      if (t.kind == ScalarType::Kind::Int && t.cardinality() > kMaxRangeWidth) {
        fail_semantic("integer range wider than " + std::to_string(kMaxRangeWidth) +
                          " values in module '" + mod.name + "'",
                      loc);
      }
      if (t.kind == ScalarType::Kind::Enum) {
        std::unordered_set<std::string> ls;
        for (const auto& l : t.labels) {
          if (!ls.insert(l).second) fail_semantic("duplicate enum label '" + l + "'", loc);
        }
      }
      register_labels(mod.name, t, loc);
    };
    for (const auto& p : mod.ports) { claim(p.name, p.loc); check_type(p.type, p.loc); }
    for (const auto& s : mod.signals) { claim(s.name, s.loc); check_type(s.type, s.loc); }
    for (const auto& v : mod.vars) { claim(v.name, v.loc); check_type(v.type, v.loc); }
    for (const auto& e : mod.events) claim(e.name, e.loc);
    for (const auto& p : mod.processes) claim(p.name, p.loc);
  }

  void register_labels(const std::string& mod_name, const ScalarType& t, SourceLoc loc) {
    if (t.kind != ScalarType::Kind::Enum) return;
    auto& table = labels_[mod_name];
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
      auto [it, inserted] = table.emplace(t.labels[i], std::pair{t, static_cast<Value>(i)});
      if (!inserted && !(it->second.first == t)) {
        fail_semantic("enum label '" + t.labels[i] + "' reused by a different enum type in module '" +
                          mod_name + "'",
                      loc);
      }
    }
  }

  void collect_instances() {
    std::unordered_set<std::string> seen;
    for (const auto& inst : ast_.instances) {
      if (opt_.restrict_to_instance && inst.name != *opt_.restrict_to_instance) continue;
      if (!seen.insert(inst.name).second) {
        fail_semantic("duplicate instance name '" + inst.name + "'", inst.loc);
      }
      auto it = module_index_.find(inst.module_name);
      if (it == module_index_.end()) {
        fail_semantic("unknown module '" + inst.module_name + "' in instance '" + inst.name + "'",
                      inst.loc);
      }
      InstanceInfo info;
      info.name = inst.name;
      info.module_name = inst.module_name;
      info.stubbed = opt_.stub_substitutions.count(inst.name) > 0;
      inst_module_.push_back(it->second);
      out_.instances.push_back(std::move(info));
    }
    if (opt_.restrict_to_instance && out_.instances.empty()) {
      fail_semantic("instance '" + *opt_.restrict_to_instance + "' not found");
    }
    if (out_.instances.empty()) {
      fail_semantic("design instantiates no components");
    }
    for (const auto& [name, stub] : opt_.stub_substitutions) {
      if (!seen.count(name)) fail_semantic("stub substitution for unknown instance '" + name + "'");
    }
  }

  const ModuleDecl& module_of(std::uint32_t inst) const {
    return ast_.modules[inst_module_[inst]];
  }

  std::uint32_t instance_id(const std::string& name, SourceLoc loc) const {
    for (std::uint32_t i = 0; i < out_.instances.size(); ++i) {
      if (out_.instances[i].name == name) return i;
    }
    fail_semantic("unknown instance '" + name + "'", loc);
  }

  void build_tables() {
    // Local state first, per instance. Stubbed instances contribute ports only.
    for (std::uint32_t i = 0; i < out_.instances.size(); ++i) {
      const ModuleDecl& mod = module_of(i);
      const std::string& iname = out_.instances[i].name;
      Scope& scope = scopes_.emplace_back();
      for (const auto& [label, tv] : labels_[mod.name]) {
        Slot s;
        s.kind = Slot::Kind::EnumLabel;
        s.label_value = tv.second;
        s.type = tv.first;
        scope.emplace(label, std::move(s));
      }
      if (out_.instances[i].stubbed) continue;
      for (const auto& v : mod.vars) {
        Slot s;
        s.kind = Slot::Kind::Var;
        s.index = static_cast<std::uint32_t>(out_.vars.size());
        s.type = v.type;
        scope.insert_or_assign(v.name, s);
        out_.vars.push_back({iname + "." + v.name, v.type,
                             eval_const_literal(*v.init, v.type, "var '" + v.name + "'"), i});
      }
      for (const auto& sg : mod.signals) {
        Slot s;
        s.kind = Slot::Kind::Signal;
        s.index = static_cast<std::uint32_t>(out_.signals.size());
        s.type = sg.type;
        scope.insert_or_assign(sg.name, s);
        out_.signals.push_back({iname + "." + sg.name, sg.type,
                                eval_const_literal(*sg.init, sg.type, "signal '" + sg.name + "'"),
                                false, i});
      }
      for (const auto& ev : mod.events) {
        Slot s;
        s.kind = Slot::Kind::Event;
        s.index = static_cast<std::uint32_t>(out_.events.size());
        scope.insert_or_assign(ev.name, s);
        out_.events.push_back({iname + "." + ev.name, i});
      }
    }

    // Every out-port owns a fresh top-level signal; binds alias reader-side
    // in-ports onto the writer's signal.
    std::map<std::pair<std::uint32_t, std::string>, std::uint32_t> out_port_signal;
    for (std::uint32_t i = 0; i < out_.instances.size(); ++i) {
      const ModuleDecl& mod = module_of(i);
      for (const auto& p : mod.ports) {
        if (p.is_in) continue;
        std::uint32_t sig = static_cast<std::uint32_t>(out_.signals.size());
        out_.signals.push_back(
            {out_.instances[i].name + "." + p.name, p.type, p.type.default_value(), true, i});
        out_port_signal[{i, p.name}] = sig;
        Slot s;
        s.kind = Slot::Kind::Signal;
        s.index = sig;
        s.type = p.type;
        scopes_[i].insert_or_assign(p.name, s);
      }
    }

    struct BindTo { std::uint32_t signal; SourceLoc loc; };
    std::map<std::pair<std::uint32_t, std::string>, BindTo> bound_in;
    if (!opt_.restrict_to_instance) {
      for (const auto& b : ast_.binds) {
        std::uint32_t fi = instance_id(b.from_instance, b.loc);
        std::uint32_t ti = instance_id(b.to_instance, b.loc);
        const PortDecl* fp = find_port(fi, b.from_port, b.loc);
        const PortDecl* tp = find_port(ti, b.to_port, b.loc);
        if (fp->is_in) {
          fail_semantic("bind source '" + b.from_instance + "." + b.from_port +
                            "' must be an out port",
                        b.loc);
        }
        if (!tp->is_in) {
          fail_semantic("bind target '" + b.to_instance + "." + b.to_port +
                            "' must be an in port",
                        b.loc);
        }
        if (!(fp->type == tp->type)) {
          fail_semantic("type mismatch on bind: '" + b.from_instance + "." + b.from_port +
                            "' is " + fp->type.str() + " but '" + b.to_instance + "." + b.to_port +
                            "' is " + tp->type.str(),
                        b.loc);
        }
        auto key = std::pair{ti, b.to_port};
        if (bound_in.count(key)) {
          fail_semantic("in port '" + b.to_instance + "." + b.to_port + "' bound more than once",
                        b.loc);
        }
        bound_in[key] = {out_port_signal.at({fi, b.from_port}), b.loc};
      }
    }

    // Unbound in-ports become open inputs, in instance then declaration order.
    for (std::uint32_t i = 0; i < out_.instances.size(); ++i) {
      const ModuleDecl& mod = module_of(i);
      for (const auto& p : mod.ports) {
        PortRef ref;
        ref.port_name = p.name;
        ref.is_in = p.is_in;
        ref.type = p.type;
        if (!p.is_in) {
          ref.index = out_port_signal.at({i, p.name});
        } else if (auto it = bound_in.find({i, p.name}); it != bound_in.end()) {
          ref.index = it->second.signal;
        } else {
          ref.is_open_input = true;
          ref.index = static_cast<std::uint32_t>(out_.inputs.size());
          out_.inputs.push_back({out_.instances[i].name + "." + p.name, p.type, i});
        }
        out_.instances[i].ports.push_back(ref);
        if (p.is_in) {
          Slot s;
          s.kind = ref.is_open_input ? Slot::Kind::Input : Slot::Kind::Signal;
          s.index = ref.index;
          s.type = p.type;
          scopes_[i].insert_or_assign(p.name, s);
        }
      }
    }

    build_symbols();
  }

  const PortDecl* find_port(std::uint32_t inst, const std::string& port, SourceLoc loc) const {
    const ModuleDecl& mod = module_of(inst);
    for (const auto& p : mod.ports) {
      if (p.name == port) return &p;
    }
    fail_semantic("module '" + mod.name + "' has no port '" + port + "'", loc);
  }

  void build_symbols() {
    auto& sym = out_.symbols;
    for (std::uint32_t s = 0; s < out_.signals.size(); ++s) {
      sym.visible[out_.signals[s].name] = {false, s, out_.signals[s].type};
    }
    for (std::uint32_t s = 0; s < out_.inputs.size(); ++s) {
      sym.visible[out_.inputs[s].name] = {true, s, out_.inputs[s].type};
    }
    // Reader-side aliases for bound in-ports.
    for (const auto& inst : out_.instances) {
      for (const auto& p : inst.ports) {
        if (!p.is_in || p.is_open_input) continue;
        sym.visible[inst.name + "." + p.port_name] = {false, p.index, p.type};
      }
    }
    for (const auto& v : out_.vars) {
      sym.hidden[v.name] = "it is a variable; only signals and open inputs are observable";
    }
    for (const auto& e : out_.events) {
      sym.hidden[e.name] = "it is an event; only signals and open inputs are observable";
    }
    for (const auto& inst : out_.instances) {
      if (!inst.stubbed) continue;
      const ModuleDecl& mod = ast_.modules[module_index_.at(inst.module_name)];
      for (const auto& sg : mod.signals) {
        sym.hidden[inst.name + "." + sg.name] =
            "it is internal to stubbed component '" + inst.name + "'";
      }
      for (const auto& v : mod.vars) {
        sym.hidden[inst.name + "." + v.name] =
            "it is internal to stubbed component '" + inst.name + "'";
      }
    }
  }

  void attach_stubs() {
    for (std::uint32_t i = 0; i < out_.instances.size(); ++i) {
      if (!out_.instances[i].stubbed) continue;
      const StubAutomaton& stub = opt_.stub_substitutions.at(out_.instances[i].name);
      const ModuleDecl& mod = module_of(i);
      std::vector<std::string> names;
      std::vector<bool> is_in;
      std::vector<ScalarType> types;
      for (const auto& p : mod.ports) {
        names.push_back(p.name);
        is_in.push_back(p.is_in);
        types.push_back(p.type);
      }
      std::string expect = alphabet_fingerprint(mod.name, names, is_in, types);
      if (stub.alphabet_fingerprint != expect) {
        throw Error(ErrorKind::Semantic,
                    "stale stub for instance '" + out_.instances[i].name +
                        "': interface fingerprint mismatch (component ports changed since "
                        "the stub was learned)");
      }
      StubAttachment att;
      att.instance = i;
      att.automaton = stub;
      for (std::uint32_t p = 0; p < out_.instances[i].ports.size(); ++p) {
        const PortRef& ref = out_.instances[i].ports[p];
        if (ref.is_in) {
          att.in_wires.push_back({p, ref.is_open_input, ref.index});
        } else {
          att.out_wires.push_back({p, ref.index});
        }
      }
      out_.instances[i].stub_index = static_cast<std::uint32_t>(out_.stubs.size());
      out_.stubs.push_back(std::move(att));
    }
  }

  // ---- expression resolution ----

  TypedExpr resolve_expr(const Expr& e, std::uint32_t inst) {
    switch (e.kind) {
      case Expr::Kind::BoolLit: {
        TypedExpr t;
        t.expr.kind = RExpr::Kind::Const;
        t.expr.cval = e.bval ? 1 : 0;
        t.type = ScalarType::boolean();
        return t;
      }
      case Expr::Kind::IntLit: {
        TypedExpr t;
        t.expr.kind = RExpr::Kind::Const;
        t.expr.cval = e.ival;
        t.type = ScalarType::bounded(e.ival, e.ival);
        return t;
      }
      case Expr::Kind::Name: {
        const Scope& scope = scopes_[inst];
        auto it = scope.find(e.name);
        if (it == scope.end()) {
          fail_semantic("unknown name '" + e.name + "'", e.loc);
        }
        const Slot& s = it->second;
        TypedExpr t;
        t.type = s.type;
        switch (s.kind) {
          case Slot::Kind::Var: t.expr.kind = RExpr::Kind::Var; t.expr.index = s.index; break;
          case Slot::Kind::Signal: t.expr.kind = RExpr::Kind::Signal; t.expr.index = s.index; break;
          case Slot::Kind::Input: t.expr.kind = RExpr::Kind::Input; t.expr.index = s.index; break;
          case Slot::Kind::EnumLabel:
            t.expr.kind = RExpr::Kind::Const;
            t.expr.cval = s.label_value;
            break;
          case Slot::Kind::Event:
            fail_semantic("event '" + e.name + "' used as a value", e.loc);
        }
        return t;
      }
      case Expr::Kind::Unary: {
        TypedExpr a = resolve_expr(*e.lhs, inst);
        TypedExpr t;
        t.expr.kind = RExpr::Kind::Unary;
        t.expr.un = e.un;
        if (e.un == UnOp::Not) {
          require_bool(a, e.loc, "operand of '!'");
          t.type = ScalarType::boolean();
        } else {
          require_int(a, e.loc, "operand of unary '-'");
          t.type = ScalarType::bounded(sat(-a.type.hi), sat(-a.type.lo));
        }
        t.expr.kids.push_back(std::move(a.expr));
        return t;
      }
      case Expr::Kind::Binary: {
        TypedExpr a = resolve_expr(*e.lhs, inst);
        TypedExpr b = resolve_expr(*e.rhs, inst);
        TypedExpr t;
        t.expr.kind = RExpr::Kind::Binary;
        t.expr.bin = e.bin;
        switch (e.bin) {
          case BinOp::And:
          case BinOp::Or:
            require_bool(a, e.loc, "operand of a boolean connective");
            require_bool(b, e.loc, "operand of a boolean connective");
            t.type = ScalarType::boolean();
            break;
          case BinOp::Eq:
          case BinOp::Ne:
            require_compatible(a, b, e.loc);
            t.type = ScalarType::boolean();
            break;
          case BinOp::Lt:
          case BinOp::Le:
          case BinOp::Gt:
          case BinOp::Ge:
            require_compatible(a, b, e.loc);
            if (a.type.kind == ScalarType::Kind::Bool) {
              fail_semantic("ordering comparison on booleans", e.loc);
            }
            t.type = ScalarType::boolean();
            break;
          case BinOp::Add:
            require_int(a, e.loc, "operand of '+'");
            require_int(b, e.loc, "operand of '+'");
            t.type = ScalarType::bounded(sat(a.type.lo + b.type.lo), sat(a.type.hi + b.type.hi));
            break;
          case BinOp::Sub:
            require_int(a, e.loc, "operand of '-'");
            require_int(b, e.loc, "operand of '-'");
            t.type = ScalarType::bounded(sat(a.type.lo - b.type.hi), sat(a.type.hi - b.type.lo));
            break;
          case BinOp::Mul: {
            require_int(a, e.loc, "operand of '*'");
            require_int(b, e.loc, "operand of '*'");
            std::int64_t c[4] = {sat(a.type.lo * b.type.lo), sat(a.type.lo * b.type.hi),
                                 sat(a.type.hi * b.type.lo), sat(a.type.hi * b.type.hi)};
            t.type = ScalarType::bounded(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
            break;
          }
        }
        t.expr.kids.push_back(std::move(a.expr));
        t.expr.kids.push_back(std::move(b.expr));
        return t;
      }
    }
    fail_semantic("malformed expression", e.loc);
  }

  static void require_bool(const TypedExpr& t, SourceLoc loc, const char* what) {
    if (t.type.kind != ScalarType::Kind::Bool) {
      fail_semantic(std::string(what) + " must be bool, got " + t.type.str(), loc);
    }
  }
  static void require_int(const TypedExpr& t, SourceLoc loc, const char* what) {
    if (t.type.kind != ScalarType::Kind::Int) {
      fail_semantic(std::string(what) + " must be an integer, got " + t.type.str(), loc);
    }
  }
  static void require_compatible(const TypedExpr& a, const TypedExpr& b, SourceLoc loc) {
    if (a.type.kind != b.type.kind) {
      fail_semantic("type mismatch: " + a.type.str() + " vs " + b.type.str(), loc);
    }
    if (a.type.kind == ScalarType::Kind::Enum && !(a.type == b.type)) {
      fail_semantic("comparison of distinct enum types " + a.type.str() + " and " + b.type.str(),
                    loc);
    }
  }

  // ---- statement lowering ----

  struct Patch {
    std::uint32_t node;
    bool alt;
  };

  void apply(std::vector<CfgNode>& cfg, const std::vector<Patch>& ps, std::uint32_t target) {
    for (const Patch& p : ps) {
      if (p.alt) {
        cfg[p.node].alt = target;
      } else {
        cfg[p.node].next = target;
      }
    }
  }

  std::pair<std::optional<std::uint32_t>, std::vector<Patch>> lower_block(
      std::vector<CfgNode>& cfg, const Block& b, std::uint32_t inst, std::uint32_t proc) {
    std::optional<std::uint32_t> entry;
    std::vector<Patch> pending;
    for (const Stmt& s : b) {
      auto [loc, exits] = lower_stmt(cfg, s, inst, proc);
      if (!entry) entry = loc;
      apply(cfg, pending, loc);
      pending = std::move(exits);
    }
    return {entry, std::move(pending)};
  }

  std::pair<std::uint32_t, std::vector<Patch>> lower_stmt(std::vector<CfgNode>& cfg, const Stmt& s,
                                                          std::uint32_t inst, std::uint32_t proc) {
    std::uint32_t idx = static_cast<std::uint32_t>(cfg.size());
    cfg.emplace_back();
    cfg[idx].loc = s.loc;
    const Scope& scope = scopes_[inst];
    auto lookup = [&](const std::string& n) -> const Slot& {
      auto it = scope.find(n);
      if (it == scope.end()) fail_semantic("unknown name '" + n + "'", s.loc);
      return it->second;
    };
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        const Slot& slot = lookup(s.target);
        if (slot.kind != Slot::Kind::Var) {
          fail_semantic("'=' may only assign variables; '" + s.target + "' is not a variable " +
                            "(use '<=' for signals)",
                        s.loc);
        }
        TypedExpr rhs = resolve_expr(*s.expr, inst);
        check_store(slot.type, rhs, s.loc, s.target);
        cfg[idx].kind = CfgNode::Kind::Assign;
        cfg[idx].target = slot.index;
        cfg[idx].expr = std::move(rhs.expr);
        break;
      }
      case Stmt::Kind::NextWrite: {
        const Slot& slot = lookup(s.target);
        if (slot.kind != Slot::Kind::Signal) {
          fail_semantic("'<=' may only write signals or out ports; '" + s.target +
                            "' is neither (use '=' for variables)",
                        s.loc);
        }
        if (reads_own_in_port(inst, s.target)) {
          fail_semantic("cannot write in port '" + s.target + "'", s.loc);
        }
        TypedExpr rhs = resolve_expr(*s.expr, inst);
        check_store(slot.type, rhs, s.loc, s.target);
        cfg[idx].kind = CfgNode::Kind::NextWrite;
        cfg[idx].target = slot.index;
        cfg[idx].expr = std::move(rhs.expr);
        note_writer(slot.index, proc, s.loc);
        break;
      }
      case Stmt::Kind::If: {
        TypedExpr cond = resolve_expr(*s.expr, inst);
        require_bool(cond, s.loc, "if condition");
        cfg[idx].kind = CfgNode::Kind::Branch;
        cfg[idx].expr = std::move(cond.expr);
        auto [then_entry, then_exits] = lower_block(cfg, s.body, inst, proc);
        std::vector<Patch> exits = std::move(then_exits);
        if (then_entry) {
          cfg[idx].next = *then_entry;
        } else {
          exits.push_back({idx, false});
        }
        if (s.has_else) {
          auto [else_entry, else_exits] = lower_block(cfg, s.else_body, inst, proc);
          for (auto& p : else_exits) exits.push_back(p);
          if (else_entry) {
            cfg[idx].alt = *else_entry;
          } else {
            exits.push_back({idx, true});
          }
        } else {
          exits.push_back({idx, true});
        }
        return {idx, std::move(exits)};
      }
      case Stmt::Kind::While: {
        TypedExpr cond = resolve_expr(*s.expr, inst);
        require_bool(cond, s.loc, "while condition");
        cfg[idx].kind = CfgNode::Kind::Branch;
        cfg[idx].expr = std::move(cond.expr);
        auto [body_entry, body_exits] = lower_block(cfg, s.body, inst, proc);
        cfg[idx].next = body_entry ? *body_entry : idx;
        apply(cfg, body_exits, idx);
        return {idx, {{idx, true}}};
      }
      case Stmt::Kind::WaitTime:
        cfg[idx].kind = CfgNode::Kind::WaitTime;
        cfg[idx].amount = s.amount;
        break;
      case Stmt::Kind::WaitChange: {
        const Slot& slot = lookup(s.target);
        if (slot.kind == Slot::Kind::Signal) {
          cfg[idx].target = slot.index;
        } else if (slot.kind == Slot::Kind::Input) {
          cfg[idx].target = slot.index;
          cfg[idx].target_is_input = true;
        } else {
          fail_semantic("wait(change ...) needs a signal or port, '" + s.target + "' is neither",
                        s.loc);
        }
        cfg[idx].kind = CfgNode::Kind::WaitChange;
        break;
      }
      case Stmt::Kind::WaitEvent: {
        const Slot& slot = lookup(s.target);
        if (slot.kind != Slot::Kind::Event) {
          fail_semantic("wait(event ...) needs an event, '" + s.target + "' is not one", s.loc);
        }
        cfg[idx].kind = CfgNode::Kind::WaitEvent;
        cfg[idx].target = slot.index;
        break;
      }
      case Stmt::Kind::NotifyNow:
      case Stmt::Kind::NotifyDelta:
      case Stmt::Kind::NotifyTime: {
        const Slot& slot = lookup(s.target);
        if (slot.kind != Slot::Kind::Event) {
          fail_semantic("notify needs an event, '" + s.target + "' is not one", s.loc);
        }
        cfg[idx].kind = s.kind == Stmt::Kind::NotifyNow     ? CfgNode::Kind::NotifyNow
                        : s.kind == Stmt::Kind::NotifyDelta ? CfgNode::Kind::NotifyDelta
                                                            : CfgNode::Kind::NotifyTime;
        cfg[idx].target = slot.index;
        cfg[idx].amount = s.amount;
        break;
      }
      case Stmt::Kind::Assert: {
        TypedExpr cond = resolve_expr(*s.expr, inst);
        require_bool(cond, s.loc, "assert condition");
        cfg[idx].kind = CfgNode::Kind::Assert;
        cfg[idx].expr = std::move(cond.expr);
        break;
      }
      case Stmt::Kind::Skip:
        cfg[idx].kind = CfgNode::Kind::Skip;
        break;
    }
    return {idx, {{idx, false}}};
  }

  void check_store(const ScalarType& target, const TypedExpr& rhs, SourceLoc loc,
                   const std::string& name) {
    if (target.kind != rhs.type.kind) {
      fail_semantic("cannot store " + rhs.type.str() + " into '" + name + "' of type " +
                        target.str(),
                    loc);
    }
    if (target.kind == ScalarType::Kind::Enum && !(target == rhs.type)) {
      fail_semantic("cannot store " + rhs.type.str() + " into '" + name + "' of type " +
                        target.str(),
                    loc);
    }
  }

  bool reads_own_in_port(std::uint32_t inst, const std::string& name) const {
    for (const auto& p : out_.instances[inst].ports) {
      if (p.port_name == name && p.is_in) return true;
    }
    return false;
  }

  void note_writer(std::uint32_t signal, std::uint32_t proc, SourceLoc loc) {
    auto [it, inserted] = writer_.emplace(signal, proc);
    if (!inserted && it->second != proc) {
      fail_semantic("signal '" + out_.signals[signal].name + "' written by more than one process ('" +
                        out_.processes[it->second].name + "' and '" + out_.processes[proc].name +
                        "')",
                    loc);
    }
  }

  void lower_processes() {
    // Allocate global process slots first so writer diagnostics can name them.
    for (std::uint32_t i = 0; i < out_.instances.size(); ++i) {
      if (out_.instances[i].stubbed) continue;
      const ModuleDecl& mod = module_of(i);
      for (const auto& p : mod.processes) {
        ProcessInfo info;
        info.name = out_.instances[i].name + "." + p.name;
        info.instance = i;
        out_.processes.push_back(std::move(info));
      }
    }
    std::uint32_t proc = 0;
    for (std::uint32_t i = 0; i < out_.instances.size(); ++i) {
      if (out_.instances[i].stubbed) continue;
      const ModuleDecl& mod = module_of(i);
      for (const auto& p : mod.processes) {
        auto& cfg = out_.processes[proc].cfg;
        cfg.emplace_back();  // location 0: entry
        cfg[0].kind = CfgNode::Kind::Entry;
        cfg[0].loc = p.loc;
        auto [entry, exits] = lower_block(cfg, p.body, i, proc);
        cfg[0].next = entry.value_or(kEndLoc);
        apply(cfg, exits, kEndLoc);
        check_reachability(out_.processes[proc]);
        ++proc;
      }
    }
  }

  void check_reachability(const ProcessInfo& p) {
    std::vector<bool> seen(p.cfg.size(), false);
    std::deque<std::uint32_t> work{0};
    seen[0] = true;
    while (!work.empty()) {
      std::uint32_t n = work.front();
      work.pop_front();
      std::uint32_t next = p.cfg[n].next;
      std::uint32_t alt = p.cfg[n].alt;
      // constant branch conditions kill one edge
      if (p.cfg[n].kind == CfgNode::Kind::Branch && p.cfg[n].expr.kind == RExpr::Kind::Const) {
        (p.cfg[n].expr.cval ? alt : next) = kEndLoc;
      }
      for (std::uint32_t t : {next, alt}) {
        if (t != kEndLoc && !seen[t]) {
          seen[t] = true;
          work.push_back(t);
        }
      }
    }
    for (std::uint32_t n = 0; n < p.cfg.size(); ++n) {
      if (!seen[n]) {
        out_.warnings.push_back("dead code: process '" + p.name + "' location " +
                                std::to_string(n) + " (line " + std::to_string(p.cfg[n].loc.line) +
                                ") is unreachable");
      }
    }
  }

  void resolve_properties() {
    if (opt_.restrict_to_instance) return;
    std::unordered_set<std::string> names;
    for (const auto& p : ast_.properties) {
      if (!names.insert(p.name).second) {
        fail_semantic("duplicate property name '" + p.name + "'", p.loc);
      }
      ResolvedProperty rp;
      rp.name = p.name;
      rp.is_ltl = p.is_ltl;
      rp.formula = prop::resolve(*p.formula, out_.symbols);
      out_.properties.push_back(std::move(rp));
    }
  }

  void compute_bound() {
    long double bound = 1.0L;
    for (const auto& v : out_.vars) bound *= static_cast<long double>(v.type.cardinality());
    for (const auto& s : out_.signals) bound *= static_cast<long double>(s.type.cardinality());
    for (const auto& i : out_.inputs) bound *= static_cast<long double>(i.type.cardinality());
    out_.value_space_bound = bound;
    if (bound > opt_.value_space_cap) {
      std::ostringstream os;
      os << "value space of " << bound << " combinations exceeds the configured cap of "
         << opt_.value_space_cap;
      throw Error(ErrorKind::Resource, os.str());
    }
  }

  const DesignAst& ast_;
  const ElabOptions& opt_;
  ElaboratedDesign out_;
  std::unordered_map<std::string, std::size_t> module_index_;
  std::vector<std::size_t> inst_module_;
  std::vector<Scope> scopes_;
  // enum label -> (type, index), per module
  std::unordered_map<std::string, std::map<std::string, std::pair<ScalarType, Value>>> labels_;
  std::map<std::uint32_t, std::uint32_t> writer_;
};

void dump_rexpr(std::ostream& os, const RExpr& e) {
  switch (e.kind) {
    case RExpr::Kind::Const: os << "c" << e.cval; break;
    case RExpr::Kind::Var: os << "v" << e.index; break;
    case RExpr::Kind::Signal: os << "s" << e.index; break;
    case RExpr::Kind::Input: os << "i" << e.index; break;
    case RExpr::Kind::Unary:
      os << (e.un == UnOp::Not ? "!" : "~") << "(";
      dump_rexpr(os, e.kids[0]);
      os << ")";
      break;
    case RExpr::Kind::Binary:
      os << "(";
      dump_rexpr(os, e.kids[0]);
      os << bin_op_text(e.bin);
      dump_rexpr(os, e.kids[1]);
      os << ")";
      break;
  }
}

}  // namespace

ElaboratedDesign elaborate(const DesignAst& ast, const ElabOptions& options) {
  return Elaborator(ast, options).run();
}

std::string design_fingerprint(const ElaboratedDesign& d) {
  std::ostringstream os;
  for (const auto& i : d.instances) {
    os << "inst " << i.name << ":" << i.module_name << (i.stubbed ? " stubbed" : "") << "\n";
    for (const auto& p : i.ports) {
      os << "  port " << (p.is_in ? "in " : "out ") << p.port_name << " -> "
         << (p.is_open_input ? "input" : "signal") << p.index << "\n";
    }
  }
  for (const auto& v : d.vars) os << "var " << v.name << ":" << v.type.str() << "=" << v.init << "\n";
  for (const auto& s : d.signals) {
    os << "sig " << s.name << ":" << s.type.str() << "=" << s.init << (s.from_port ? " port" : "")
       << "\n";
  }
  for (const auto& i : d.inputs) os << "input " << i.name << ":" << i.type.str() << "\n";
  for (const auto& e : d.events) os << "event " << e.name << "\n";
  for (const auto& p : d.processes) {
    os << "process " << p.name << "\n";
    for (std::size_t n = 0; n < p.cfg.size(); ++n) {
      const CfgNode& c = p.cfg[n];
      os << "  " << n << ": k" << static_cast<int>(c.kind) << " next=";
      if (c.next == kEndLoc) os << "end"; else os << c.next;
      os << " alt=";
      if (c.alt == kEndLoc) os << "end"; else os << c.alt;
      os << " tgt=" << c.target << (c.target_is_input ? "i" : "") << " amt=" << c.amount << " e=";
      dump_rexpr(os, c.expr);
      os << "\n";
    }
  }
  for (const auto& p : d.properties) {
    os << (p.is_ltl ? "ltl " : "inv ") << p.name << " " << prop::to_string(p.formula) << "\n";
  }
  return sha256_hex(os.str());
}

}  // namespace scver
