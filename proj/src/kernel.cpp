#include "scver/kernel.hpp"

#include <algorithm>

#include "scver/util.hpp"

namespace scver {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::TimeBoundary: return "time-boundary";
    case Phase::DeltaBoundary: return "delta-boundary";
    case Phase::Terminal: return "terminal";
  }
  return "?";
}

Value eval_rexpr(const RExpr& e, const KernelState& st) {
  switch (e.kind) {
    case RExpr::Kind::Const: return e.cval;
    case RExpr::Kind::Var: return st.vars[e.index];
    case RExpr::Kind::Signal: return st.sig_cur[e.index];
    case RExpr::Kind::Input: return st.inputs[e.index];
    case RExpr::Kind::Unary: {
      Value v = eval_rexpr(e.kids[0], st);
      return e.un == ast::UnOp::Not ? (v ? 0 : 1) : -v;
    }
    case RExpr::Kind::Binary: {
      Value a = eval_rexpr(e.kids[0], st);
      switch (e.bin) {
        case ast::BinOp::And: return a ? eval_rexpr(e.kids[1], st) != 0 : 0;
        case ast::BinOp::Or: return a ? 1 : eval_rexpr(e.kids[1], st) != 0;
        default: break;
      }
      Value b = eval_rexpr(e.kids[1], st);
      switch (e.bin) {
        case ast::BinOp::Eq: return a == b;
        case ast::BinOp::Ne: return a != b;
        case ast::BinOp::Lt: return a < b;
        case ast::BinOp::Le: return a <= b;
        case ast::BinOp::Gt: return a > b;
        case ast::BinOp::Ge: return a >= b;
        case ast::BinOp::Add: return a + b;
        case ast::BinOp::Sub: return a - b;
        case ast::BinOp::Mul: return a * b;
        default: return 0;
      }
    }
  }
  return 0;
}

namespace {

void wake(const ElaboratedDesign& design, KernelState& st, std::uint32_t p) {
  ProcState& ps = st.procs[p];
  ps.status = ProcStatus::Runnable;
  ps.loc = design.processes[p].cfg[ps.loc].next;
  ps.wake_time = 0;
  ps.wait_slot = 0;
}

// Runs process p until it suspends, terminates, or fails an assertion.
// Immediate notifications wake current waiters instantly.
void run_process(const ElaboratedDesign& design, KernelState& st, std::uint32_t p,
                 const Limits& limits, std::vector<std::uint32_t>* trail = nullptr) {
  st.ran_since_boundary = true;
  ProcState& ps = st.procs[p];
  const auto& cfg = design.processes[p].cfg;
  std::uint64_t steps = 0;
  for (;;) {
    if (ps.loc == kEndLoc) {
      ps.status = ProcStatus::Terminated;
      ps.wake_time = 0;
      ps.wait_slot = 0;
      return;
    }
    if (++steps > limits.run_step_cap) {
      throw Error(ErrorKind::Resource,
                  "process '" + design.processes[p].name + "' exceeded " +
                      std::to_string(limits.run_step_cap) +
                      " statements without suspending (loop without wait?)");
    }
    if (trail) trail->push_back(ps.loc);
    const CfgNode& node = cfg[ps.loc];
    switch (node.kind) {
      case CfgNode::Kind::Entry:
      case CfgNode::Kind::Skip:
        ps.loc = node.next;
        break;
      case CfgNode::Kind::Assign:
        st.vars[node.target] = design.vars[node.target].type.wrap(eval_rexpr(node.expr, st));
        ps.loc = node.next;
        break;
      case CfgNode::Kind::NextWrite:
        st.sig_next[node.target] =
            design.signals[node.target].type.wrap(eval_rexpr(node.expr, st));
        ps.loc = node.next;
        break;
      case CfgNode::Kind::Branch:
        ps.loc = eval_rexpr(node.expr, st) ? node.next : node.alt;
        break;
      case CfgNode::Kind::WaitTime:
        ps.status = ProcStatus::WaitingTime;
        ps.wake_time = st.time + static_cast<std::uint32_t>(node.amount);
        return;
      case CfgNode::Kind::WaitChange:
        ps.status = node.target_is_input ? ProcStatus::WaitingChangeInput
                                         : ProcStatus::WaitingChange;
        ps.wait_slot = node.target;
        return;
      case CfgNode::Kind::WaitEvent:
        ps.status = ProcStatus::WaitingEvent;
        ps.wait_slot = node.target;
        return;
      case CfgNode::Kind::NotifyNow:
        for (std::uint32_t q = 0; q < st.procs.size(); ++q) {
          if (st.procs[q].status == ProcStatus::WaitingEvent &&
              st.procs[q].wait_slot == node.target) {
            wake(design, st, q);
          }
        }
        ps.loc = node.next;
        break;
      case CfgNode::Kind::NotifyDelta: {
        auto it = std::lower_bound(st.pending_delta.begin(), st.pending_delta.end(), node.target);
        if (it == st.pending_delta.end() || *it != node.target) st.pending_delta.insert(it, node.target);
        ps.loc = node.next;
        break;
      }
      case CfgNode::Kind::NotifyTime: {
        std::pair<std::uint32_t, std::uint32_t> entry{
            st.time + static_cast<std::uint32_t>(node.amount), node.target};
        st.pending_timed.insert(
            std::lower_bound(st.pending_timed.begin(), st.pending_timed.end(), entry), entry);
        ps.loc = node.next;
        break;
      }
      case CfgNode::Kind::Assert:
        if (!eval_rexpr(node.expr, st)) {
          st.assert_fail = {{p, ps.loc}};
          return;
        }
        ps.loc = node.next;
        break;
    }
  }
}

// Lexicographic enumeration over the open-input value space.
std::vector<std::vector<Value>> input_valuations(const ElaboratedDesign& design, EnvPolicy env,
                                                 const std::vector<Value>& current) {
  if (env == EnvPolicy::ClosedDefault || design.inputs.empty()) return {current};
  std::vector<std::vector<Value>> out;
  std::vector<Value> v(design.inputs.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = design.inputs[i].type.kind == ScalarType::Kind::Int ? design.inputs[i].type.lo : 0;
  }
  for (;;) {
    out.push_back(v);
    std::size_t i = v.size();
    while (i-- > 0) {
      const ScalarType& t = design.inputs[i].type;
      Value max = t.kind == ScalarType::Kind::Int ? t.hi : t.cardinality() - 1;
      if (v[i] < max) {
        ++v[i];
        for (std::size_t j = i + 1; j < v.size(); ++j) {
          const ScalarType& tj = design.inputs[j].type;
          v[j] = tj.kind == ScalarType::Kind::Int ? tj.lo : 0;
        }
        break;
      }
      if (i == 0) return out;
    }
  }
}

bool letter_matches_inputs(const StubAttachment& att, const StubLetter& letter,
                           const std::vector<Value>& sig, const std::vector<Value>& inputs) {
  for (const auto& w : att.in_wires) {
    Value actual = w.is_input ? inputs[w.slot] : sig[w.slot];
    if (letter.port_values[w.letter_pos] != actual) return false;
  }
  return true;
}

// Enumerates, per stub, the transitions enabled by the given pre-write
// values, and emits every combination in ascending letter-id order.
struct StubCombo {
  std::vector<std::uint32_t> letters;  // per attachment
  std::vector<std::uint32_t> targets;  // resulting stub states
};

void enumerate_stub_combos(const ElaboratedDesign& design, const KernelState& st,
                           const std::vector<Value>& sig, const std::vector<Value>& inputs,
                           std::vector<StubCombo>& out) {
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> options;  // (letter, target)
  for (std::size_t k = 0; k < design.stubs.size(); ++k) {
    const StubAttachment& att = design.stubs[k];
    std::vector<std::pair<std::uint32_t, std::uint32_t>> opts;
    for (const auto& [letter, target] : att.automaton.transitions[st.stub_state[k]]) {
      if (letter_matches_inputs(att, att.automaton.letters[letter], sig, inputs)) {
        opts.emplace_back(letter, target);
      }
    }
    if (opts.empty()) return;  // stub has no matching move: the boundary is blocked
    options.push_back(std::move(opts));
  }
  StubCombo combo;
  combo.letters.resize(design.stubs.size());
  combo.targets.resize(design.stubs.size());
  std::vector<std::size_t> idx(design.stubs.size(), 0);
  for (;;) {
    for (std::size_t k = 0; k < options.size(); ++k) {
      combo.letters[k] = options[k][idx[k]].first;
      combo.targets[k] = options[k][idx[k]].second;
    }
    out.push_back(combo);
    std::size_t k = options.size();
    while (k-- > 0) {
      if (++idx[k] < options[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (options.empty()) return;
  }
}

void apply_stub_outputs(const ElaboratedDesign& design, KernelState& st, const StubCombo& combo) {
  for (std::size_t k = 0; k < design.stubs.size(); ++k) {
    const StubAttachment& att = design.stubs[k];
    const StubLetter& letter = att.automaton.letters[combo.letters[k]];
    for (const auto& w : att.out_wires) {
      st.sig_cur[w.signal] = letter.port_values[w.letter_pos];
    }
    st.stub_state[k] = combo.targets[k];
  }
}

void wake_on_changes(const ElaboratedDesign& design, KernelState& st,
                     const std::vector<Value>& old_sig, const std::vector<Value>& old_inputs) {
  for (std::uint32_t p = 0; p < st.procs.size(); ++p) {
    const ProcState& ps = st.procs[p];
    if (ps.status == ProcStatus::WaitingChange) {
      if (st.sig_cur[ps.wait_slot] != old_sig[ps.wait_slot]) wake(design, st, p);
    } else if (ps.status == ProcStatus::WaitingChangeInput) {
      if (st.inputs[ps.wait_slot] != old_inputs[ps.wait_slot]) wake(design, st, p);
    }
  }
}

void deliver_events(const ElaboratedDesign& design, KernelState& st,
                    const std::vector<std::uint32_t>& events) {
  for (std::uint32_t ev : events) {
    for (std::uint32_t p = 0; p < st.procs.size(); ++p) {
      if (st.procs[p].status == ProcStatus::WaitingEvent && st.procs[p].wait_slot == ev) {
        wake(design, st, p);
      }
    }
  }
}

bool has_pending_update(const KernelState& st) {
  if (!st.pending_delta.empty() || st.ran_since_boundary) return true;
  for (const auto& nv : st.sig_next) {
    if (nv.has_value()) return true;
  }
  return false;
}

bool has_timed_activity(const KernelState& st) {
  if (!st.pending_timed.empty()) return true;
  for (const auto& ps : st.procs) {
    if (ps.status == ProcStatus::WaitingTime) return true;
  }
  return false;
}

}  // namespace

std::vector<KernelState> initial_states(const ElaboratedDesign& design, EnvPolicy env,
                                        const Limits&) {
  KernelState base;
  base.procs.resize(design.processes.size());
  base.vars.reserve(design.vars.size());
  for (const auto& v : design.vars) base.vars.push_back(v.init);
  base.sig_cur.reserve(design.signals.size());
  for (const auto& s : design.signals) base.sig_cur.push_back(s.init);
  base.sig_next.assign(design.signals.size(), std::nullopt);
  base.inputs.reserve(design.inputs.size());
  for (const auto& i : design.inputs) base.inputs.push_back(i.type.default_value());
  base.stub_state.assign(design.stubs.size(), 0);

  std::vector<KernelState> out;
  for (const auto& valuation : input_valuations(design, env, base.inputs)) {
    KernelState st = base;
    st.inputs = valuation;
    if (design.stubs.empty()) {
      out.push_back(std::move(st));
      continue;
    }
    // Stubs enter on an initial letter matching the initial port values and
    // drive their out-ports from it.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> options;
    bool blocked = false;
    for (const auto& att : design.stubs) {
      std::vector<std::pair<std::uint32_t, std::uint32_t>> opts;
      for (const auto& [letter, target] : att.automaton.initial) {
        if (letter_matches_inputs(att, att.automaton.letters[letter], st.sig_cur, st.inputs)) {
          opts.emplace_back(letter, target);
        }
      }
      if (opts.empty()) {
        blocked = true;
        break;
      }
      options.push_back(std::move(opts));
    }
    if (blocked) continue;
    std::vector<std::size_t> idx(options.size(), 0);
    for (;;) {
      KernelState s2 = st;
      StubCombo combo;
      combo.letters.resize(options.size());
      combo.targets.resize(options.size());
      for (std::size_t k = 0; k < options.size(); ++k) {
        combo.letters[k] = options[k][idx[k]].first;
        combo.targets[k] = options[k][idx[k]].second;
      }
      apply_stub_outputs(design, s2, combo);
      out.push_back(std::move(s2));
      std::size_t k = options.size();
      bool done = true;
      while (k-- > 0) {
        if (++idx[k] < options[k].size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
  }
  return out;
}

std::vector<std::pair<SchedChoice, KernelState>> successors(const ElaboratedDesign& design,
                                                            const KernelState& state,
                                                            EnvPolicy env, const Limits& limits) {
  std::vector<std::pair<SchedChoice, KernelState>> out;
  if (state.assert_fail) return out;

  // (a) evaluation phase: one successor per runnable process
  bool any_runnable = false;
  for (std::uint32_t p = 0; p < state.procs.size(); ++p) {
    if (state.procs[p].status != ProcStatus::Runnable) continue;
    any_runnable = true;
    KernelState st = state;
    run_process(design, st, p, limits);
    SchedChoice c;
    c.kind = SchedChoice::Kind::Run;
    c.process = p;
    out.emplace_back(std::move(c), std::move(st));
  }
  if (any_runnable) return out;

  // (b) delta step: apply buffered writes, deliver delta notifications,
  // close the evaluation round
  if (has_pending_update(state)) {
    KernelState st = state;
    std::vector<Value> old_sig = st.sig_cur;
    for (std::uint32_t s = 0; s < st.sig_next.size(); ++s) {
      if (st.sig_next[s]) {
        st.sig_cur[s] = *st.sig_next[s];
        st.sig_next[s] = std::nullopt;
      }
    }
    std::vector<std::uint32_t> due = std::move(st.pending_delta);
    st.pending_delta.clear();
    st.ran_since_boundary = false;
    st.delta += 1;
    if (st.delta > limits.max_delta) {
      throw HorizonError(HorizonError::Which::DeltaOverflow,
                         "delta counter exceeded max_delta=" + std::to_string(limits.max_delta) +
                             " at time " + std::to_string(st.time) +
                             " (delta loop / combinational cycle?)");
    }
    wake_on_changes(design, st, old_sig, st.inputs);
    deliver_events(design, st, due);
    SchedChoice c;
    c.kind = SchedChoice::Kind::DeltaStep;
    out.emplace_back(std::move(c), std::move(st));
    return out;
  }

  // (c) time step: advance to the earliest wake-up, deliver due timed
  // notifications, branch over the environment's new input valuations
  if (has_timed_activity(state)) {
    std::uint32_t next_time = UINT32_MAX;
    for (const auto& [wk, ev] : state.pending_timed) next_time = std::min(next_time, wk);
    for (const auto& ps : state.procs) {
      if (ps.status == ProcStatus::WaitingTime) next_time = std::min(next_time, ps.wake_time);
    }
    if (next_time > limits.max_time) {
      throw HorizonError(HorizonError::Which::TimeBound,
                         "time advance to " + std::to_string(next_time) +
                             " exceeds max_time=" + std::to_string(limits.max_time));
    }
    KernelState base = state;
    base.time = next_time;
    base.delta = 0;
    base.ran_since_boundary = false;
    std::vector<std::uint32_t> due;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> rest;
    for (const auto& e : base.pending_timed) {
      if (e.first == next_time) {
        due.push_back(e.second);
      } else {
        rest.push_back(e);
      }
    }
    base.pending_timed = std::move(rest);
    for (std::uint32_t p = 0; p < base.procs.size(); ++p) {
      if (base.procs[p].status == ProcStatus::WaitingTime &&
          base.procs[p].wake_time == next_time) {
        wake(design, base, p);
      }
    }
    deliver_events(design, base, due);

    std::vector<Value> old_sig = state.sig_cur;
    for (const auto& valuation : input_valuations(design, env, base.inputs)) {
      KernelState st = base;
      st.inputs = valuation;
      if (design.stubs.empty()) {
        wake_on_changes(design, st, old_sig, state.inputs);
        SchedChoice c;
        c.kind = SchedChoice::Kind::TimeStep;
        c.inputs = valuation;
        out.emplace_back(std::move(c), std::move(st));
      } else {
        std::vector<StubCombo> combos;
        enumerate_stub_combos(design, st, st.sig_cur, st.inputs, combos);
        for (const auto& combo : combos) {
          KernelState s2 = st;
          apply_stub_outputs(design, s2, combo);
          wake_on_changes(design, s2, old_sig, state.inputs);
          SchedChoice c;
          c.kind = SchedChoice::Kind::TimeStep;
          c.inputs = valuation;
          c.stub_letters = combo.letters;
          out.emplace_back(std::move(c), std::move(s2));
        }
      }
    }
    return out;
  }

  // (d) terminal
  return out;
}

Observation observe(const ElaboratedDesign& design, const KernelState& state) {
  Observation obs;
  obs.signals = state.sig_cur;
  obs.inputs = state.inputs;
  obs.time = state.time;
  if (state.assert_fail) {
    obs.phase = Phase::Terminal;
    return obs;
  }
  bool runnable = false;
  for (const auto& ps : state.procs) runnable |= ps.status == ProcStatus::Runnable;
  if (!runnable && !has_pending_update(state) && !has_timed_activity(state)) {
    obs.phase = Phase::Terminal;
  } else {
    obs.phase = state.delta == 0 ? Phase::TimeBoundary : Phase::DeltaBoundary;
  }
  (void)design;
  return obs;
}

bool is_terminal(const ElaboratedDesign& design, const KernelState& state) {
  return observe(design, state).phase == Phase::Terminal;
}

bool is_clean_termination(const KernelState& state) {
  if (state.assert_fail) return false;
  for (const auto& ps : state.procs) {
    if (ps.status != ProcStatus::Terminated) return false;
  }
  return true;
}

StubLetter project_letter(const ElaboratedDesign& design, std::uint32_t instance,
                          const KernelState& state) {
  StubLetter letter;
  for (const auto& p : design.instances[instance].ports) {
    letter.port_values.push_back(p.is_open_input ? state.inputs[p.index]
                                                 : state.sig_cur[p.index]);
  }
  return letter;
}

std::string KernelState::serialize() const {
  ByteWriter w;
  w.u32(time);
  w.u32(delta);
  w.u8(ran_since_boundary ? 1 : 0);
  w.u8(assert_fail ? 1 : 0);
  if (assert_fail) {
    w.u32(assert_fail->first);
    w.u32(assert_fail->second);
  }
  w.u32(static_cast<std::uint32_t>(procs.size()));
  for (const auto& p : procs) {
    w.u8(static_cast<std::uint8_t>(p.status));
    w.u32(p.loc);
    w.u32(p.wake_time);
    w.u32(p.wait_slot);
  }
  w.u32(static_cast<std::uint32_t>(vars.size()));
  for (Value v : vars) w.i64(v);
  w.u32(static_cast<std::uint32_t>(sig_cur.size()));
  for (Value v : sig_cur) w.i64(v);
  for (const auto& nv : sig_next) {
    w.u8(nv ? 1 : 0);
    if (nv) w.i64(*nv);
  }
  w.u32(static_cast<std::uint32_t>(pending_delta.size()));
  for (std::uint32_t e : pending_delta) w.u32(e);
  w.u32(static_cast<std::uint32_t>(pending_timed.size()));
  for (const auto& [wk, ev] : pending_timed) {
    w.u32(wk);
    w.u32(ev);
  }
  w.u32(static_cast<std::uint32_t>(inputs.size()));
  for (Value v : inputs) w.i64(v);
  w.u32(static_cast<std::uint32_t>(stub_state.size()));
  for (std::uint32_t s : stub_state) w.u32(s);
  return w.take();
}

KernelState KernelState::deserialize(const ElaboratedDesign& design, std::string_view bytes) {
  ByteReader r(bytes);
  KernelState st;
  st.time = r.u32();
  st.delta = r.u32();
  st.ran_since_boundary = r.u8() != 0;
  if (r.u8()) {
    std::uint32_t p = r.u32();
    std::uint32_t l = r.u32();
    st.assert_fail = {{p, l}};
  }
  auto expect = [](std::uint32_t got, std::size_t want, const char* what) {
    if (got != want) {
      throw Error(ErrorKind::Usage, std::string("state does not fit the design: ") + what);
    }
  };
  std::uint32_t n = r.u32();
  expect(n, design.processes.size(), "process count");
  st.procs.resize(n);
  for (auto& p : st.procs) {
    p.status = static_cast<ProcStatus>(r.u8());
    p.loc = r.u32();
    p.wake_time = r.u32();
    p.wait_slot = r.u32();
  }
  n = r.u32();
  expect(n, design.vars.size(), "var count");
  st.vars.resize(n);
  for (auto& v : st.vars) v = r.i64();
  n = r.u32();
  expect(n, design.signals.size(), "signal count");
  st.sig_cur.resize(n);
  for (auto& v : st.sig_cur) v = r.i64();
  st.sig_next.resize(n);
  for (auto& nv : st.sig_next) {
    if (r.u8()) {
      nv = r.i64();
    } else {
      nv = std::nullopt;
    }
  }
  n = r.u32();
  st.pending_delta.resize(n);
  for (auto& e : st.pending_delta) e = r.u32();
  n = r.u32();
  st.pending_timed.resize(n);
  for (auto& e : st.pending_timed) {
    e.first = r.u32();
    e.second = r.u32();
  }
  n = r.u32();
  expect(n, design.inputs.size(), "input count");
  st.inputs.resize(n);
  for (auto& v : st.inputs) v = r.i64();
  n = r.u32();
  expect(n, design.stubs.size(), "stub count");
  st.stub_state.resize(n);
  for (auto& s : st.stub_state) s = r.u32();
  if (!r.done()) throw Error(ErrorKind::Usage, "trailing bytes in serialized state");
  return st;
}

std::vector<std::uint32_t> run_trail(const ElaboratedDesign& design, const KernelState& state,
                                     std::uint32_t process, const Limits& limits) {
  std::vector<std::uint32_t> trail;
  KernelState st = state;
  run_process(design, st, process, limits, &trail);
  return trail;
}

std::string SchedChoice::label(const ElaboratedDesign& design) const {
  switch (kind) {
    case Kind::Run: return "run " + design.processes[process].name;
    case Kind::DeltaStep: return "delta";
    case Kind::TimeStep: return "time";
    case Kind::Stutter: return "stutter";
  }
  return "?";
}

}  // namespace scver
