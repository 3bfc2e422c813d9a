#include "scver/compose.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "scver/kernel.hpp"

namespace scver {

Verdict compose_and_verify(const ast::DesignAst& ast,
                           const std::map<std::string, StubAutomaton>& substitutions,
                           const std::string& property_name, const RunConfig& config) {
  ElabOptions eopt;
  eopt.stub_substitutions = substitutions;
  ElaboratedDesign composed = elaborate(ast, eopt);
  const ResolvedProperty* property = composed.find_property(property_name);
  if (!property) fail_semantic("unknown property '" + property_name + "'");
  CheckOptions opts = config.check_options();
  if (!substitutions.empty()) opts.check_deadlock = false;
  Verdict v;
  if (property->is_ltl) {
    v = check_ltl(composed, opts, property->formula, property_name);
    if (!substitutions.empty() && v.status != VerdictStatus::Pass) {
      v.message += (v.message.empty() ? "" : "; ");
      v.message += "advisory: liveness verdict on a stubbed composition, replay before trusting";
    }
  } else {
    v = check_safety(composed, opts, {*property});
  }
  return v;
}

namespace {

// One interface tuple: the letters of every stubbed instance at one phase
// boundary, in substitution order.
using Tuple = std::vector<StubLetter>;

Tuple project_tuple(const ElaboratedDesign& design, const std::vector<std::uint32_t>& instances,
                    const KernelState& state) {
  Tuple t;
  t.reserve(instances.size());
  for (std::uint32_t i : instances) t.push_back(project_letter(design, i, state));
  return t;
}

std::uint32_t find_instance(const ElaboratedDesign& d, const std::string& name) {
  for (std::uint32_t i = 0; i < d.instances.size(); ++i) {
    if (d.instances[i].name == name) return i;
  }
  fail_semantic("unknown instance '" + name + "'");
}

struct Cursor {
  // index into the collapsed prefix sequence, then wrapping over the loop
  bool in_loop = false;
  std::uint32_t index = 0;
  std::uint32_t consumed = 0;  // total distinct tuples matched, for divergence reports

  bool operator==(const Cursor&) const = default;
};

struct CursorHash {
  std::size_t operator()(const std::pair<std::uint32_t, Cursor>& p) const {
    return (static_cast<std::size_t>(p.first) << 24) ^ (p.second.in_loop ? 0x800000 : 0) ^
           (static_cast<std::size_t>(p.second.index) << 1);
  }
};

}  // namespace

ReplayResult replay_on_concrete(const ast::DesignAst& ast,
                                const std::map<std::string, StubAutomaton>& substitutions,
                                const std::string& property_name, const Trace& composed_trace,
                                const RunConfig& config) {
  ReplayResult result;
  if (substitutions.empty()) {
    result.outcome = ReplayOutcome::Confirmed;
    result.concrete = composed_trace;
    result.message = "no stubs substituted: the trace is already concrete";
    return result;
  }

  ElabOptions ce;
  ce.stub_substitutions = substitutions;
  ElaboratedDesign composed = elaborate(ast, ce);
  ElaboratedDesign concrete = elaborate(ast, {});
  const ResolvedProperty* property = concrete.find_property(property_name);
  if (!property) fail_semantic("unknown property '" + property_name + "'");
  if (composed.inputs.size() != concrete.inputs.size()) {
    fail_semantic("composed and concrete designs disagree on open inputs");
  }

  CheckOptions opts = config.check_options();
  std::vector<KernelState> cstates = replay_trace(composed, opts, composed_trace);

  std::vector<std::uint32_t> comp_insts, conc_insts;
  for (const auto& [name, stub] : substitutions) {
    comp_insts.push_back(find_instance(composed, name));
    conc_insts.push_back(find_instance(concrete, name));
  }

  // boundary-sampled tuples along the composed trace, with the state index
  // each was observed at
  std::vector<Tuple> raw;
  std::vector<std::uint32_t> raw_state;
  raw.push_back(project_tuple(composed, comp_insts, cstates[0]));
  raw_state.push_back(0);
  std::map<std::uint32_t, std::vector<Value>> stimulus;  // time -> input valuation
  stimulus[cstates[0].time] = cstates[0].inputs;
  for (std::size_t i = 0; i < composed_trace.steps.size(); ++i) {
    const SchedChoice& ch = composed_trace.steps[i].choice;
    if (ch.kind == SchedChoice::Kind::Run) continue;
    if (ch.kind == SchedChoice::Kind::TimeStep) {
      stimulus[cstates[i + 1].time] = ch.inputs;
    }
    raw.push_back(project_tuple(composed, comp_insts, cstates[i + 1]));
    raw_state.push_back(static_cast<std::uint32_t>(i + 1));
  }

  // collapse consecutive duplicates; split at the lasso point
  std::vector<Tuple> prefix_seq, loop_seq;
  std::uint32_t loop_state = composed_trace.loop_start ? *composed_trace.loop_start : UINT32_MAX;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool in_loop = composed_trace.loop_start && raw_state[i] > loop_state &&
                   raw_state[i] < cstates.size();
    auto& seq = in_loop ? loop_seq : prefix_seq;
    if (seq.empty() || !(seq.back() == raw[i])) {
      // a tuple equal to the prefix tail opening the loop is a stutter too
      if (in_loop && seq.empty() && !prefix_seq.empty() && prefix_seq.back() == raw[i]) continue;
      seq.push_back(raw[i]);
    }
  }
  bool is_lasso = composed_trace.loop_start.has_value();
  if (is_lasso && loop_seq.empty()) {
    // the loop changes no interface letters: it repeats the prefix tail
    if (prefix_seq.empty()) fail_semantic("composed trace has no interface letters");
    loop_seq.push_back(prefix_seq.back());
  }

  auto expected = [&](const Cursor& c) -> const Tuple& {
    return c.in_loop ? loop_seq[c.index] : prefix_seq[c.index];
  };
  auto advance = [&](Cursor c) -> Cursor {
    c.consumed += 1;
    if (!c.in_loop) {
      if (c.index + 1 < prefix_seq.size()) {
        c.index += 1;
        return c;
      }
      if (is_lasso) {
        c.in_loop = true;
        c.index = 0;
        return c;
      }
      c.index += 1;  // one past the end marks "fully matched" for safety
      return c;
    }
    c.index = static_cast<std::uint32_t>((c.index + 1) % loop_seq.size());
    return c;
  };
  auto next_matches = [&](const Cursor& c, const Tuple& t) {
    if (!c.in_loop) {
      if (c.index + 1 < prefix_seq.size()) return t == prefix_seq[c.index + 1];
      if (is_lasso) return !loop_seq.empty() && t == loop_seq[0];
      return false;
    }
    return t == loop_seq[(c.index + 1) % loop_seq.size()];
  };
  bool safety = !is_lasso;
  auto fully_matched = [&](const Cursor& c) {
    return safety && !c.in_loop && c.index + 1 >= prefix_seq.size();
  };

  // product search over (concrete state, cursor)
  struct NodeKey {
    std::string state_bytes;
    bool in_loop;
    std::uint32_t index;
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
      return std::hash<std::string>()(k.state_bytes) ^ (k.in_loop ? 0x1000000 : 0) ^ k.index;
    }
  };

  struct Frame {
    KernelState state;
    Cursor cursor;
    SchedChoice in_choice;
    std::vector<std::pair<SchedChoice, KernelState>> succs;
    std::size_t next = 0;
  };

  std::uint32_t best_consumed = 0;
  std::unordered_set<NodeKey, NodeKeyHash> visited;
  std::vector<Frame> stack;

  auto key_of = [](const KernelState& st, const Cursor& c) {
    return NodeKey{st.serialize(), c.in_loop, c.index};
  };

  auto build_trace = [&](std::optional<std::uint32_t> loop_start) {
    Trace tr;
    tr.initial_state = stack.front().state.serialize();
    tr.initial_obs = observe(concrete, stack.front().state);
    for (std::size_t i = 1; i < stack.size(); ++i) {
      TraceStep step;
      step.choice = stack[i].in_choice;
      step.time = stack[i].state.time;
      step.delta = stack[i].state.delta;
      step.obs = observe(concrete, stack[i].state);
      tr.steps.push_back(std::move(step));
    }
    tr.loop_start = loop_start;
    return tr;
  };

  // cursor move for one concrete successor; nullopt = pruned
  auto step_cursor = [&](const Cursor& cur, const SchedChoice& choice,
                         const KernelState& succ) -> std::optional<Cursor> {
    if (choice.kind == SchedChoice::Kind::Run) return cur;
    if (choice.kind == SchedChoice::Kind::TimeStep && !concrete.inputs.empty()) {
      // constrain open inputs to the composed stimulus; past the recorded
      // horizon the last valuation holds
      auto it = stimulus.find(succ.time);
      if (it != stimulus.end()) {
        if (!(it->second == succ.inputs)) return std::nullopt;
      } else if (!(stimulus.rbegin()->second == succ.inputs)) {
        return std::nullopt;
      }
    }
    Tuple t = project_tuple(concrete, conc_insts, succ);
    if (t == expected(cur)) return cur;          // interface unchanged: stutter
    if (next_matches(cur, t)) return advance(cur);
    return std::nullopt;
  };

  auto violated_here = [&](const KernelState& st) {
    return !property->is_ltl && !prop::eval_prop(property->formula, observe(concrete, st));
  };

  for (KernelState& init : initial_states(concrete, opts.env, opts.limits)) {
    auto stim0 = stimulus.find(init.time);
    if (stim0 == stimulus.end() || !(stim0->second == init.inputs)) continue;
    Cursor c0;
    c0.consumed = 1;
    if (!(project_tuple(concrete, conc_insts, init) == prefix_seq[0])) continue;
    NodeKey k0 = key_of(init, c0);
    if (visited.count(k0)) continue;
    visited.insert(k0);
    stack.clear();
    Frame f;
    f.state = std::move(init);
    f.cursor = c0;
    f.succs = successors(concrete, f.state, opts.env, opts.limits);
    stack.push_back(std::move(f));
    best_consumed = std::max(best_consumed, c0.consumed);
    if (fully_matched(c0) && violated_here(stack.back().state)) {
      result.outcome = ReplayOutcome::Confirmed;
      result.concrete = build_trace(std::nullopt);
      result.message = "violation reproduced on the unstubbed system";
      return result;
    }
    while (!stack.empty()) {
      Frame& top = stack.back();
      const KernelState& st = top.state;
      // terminal stutter: consume looping letters in place
      if (top.next == 0 && top.succs.empty() && is_lasso) {
        Tuple t = project_tuple(concrete, conc_insts, st);
        Cursor c = top.cursor;
        bool moved = false;
        if (t == expected(c)) {
          // absorb: check whether looping here closes the lasso
          Cursor cl = c;
          if (!cl.in_loop && cl.index + 1 >= prefix_seq.size() && t == loop_seq[0]) {
            cl.in_loop = true;
            cl.index = 0;
            moved = true;
          } else if (cl.in_loop) {
            moved = true;
          }
          if (moved && loop_seq.size() == 1 && t == loop_seq[0]) {
            // stutter lasso candidate: word = path observations + this state forever
            std::vector<Observation> pre, loop;
            pre.push_back(observe(concrete, stack.front().state));
            for (std::size_t i = 1; i < stack.size(); ++i) {
              pre.push_back(observe(concrete, stack[i].state));
            }
            loop.push_back(pre.back());
            pre.pop_back();
            if (!prop::eval_lasso(property->formula, pre, loop)) {
              SchedChoice stutter;
              stutter.kind = SchedChoice::Kind::Stutter;
              Trace tr = build_trace(static_cast<std::uint32_t>(stack.size() - 1));
              TraceStep step;
              step.choice = stutter;
              step.time = st.time;
              step.delta = st.delta;
              step.obs = observe(concrete, st);
              tr.steps.push_back(std::move(step));
              result.outcome = ReplayOutcome::Confirmed;
              result.concrete = std::move(tr);
              result.message = "violation reproduced on the unstubbed system (stutter lasso)";
              return result;
            }
          }
        }
      }
      if (top.next >= top.succs.size()) {
        stack.pop_back();
        continue;
      }
      auto& [choice, succ] = top.succs[top.next++];
      std::optional<Cursor> nc = step_cursor(top.cursor, choice, succ);
      if (!nc) continue;
      NodeKey k = key_of(succ, *nc);
      if (visited.count(k)) {
        // revisits inside the loop region close a concrete cycle; validate it
        if (nc->in_loop) {
          for (std::size_t i = 0; i < stack.size(); ++i) {
            if (stack[i].cursor == *nc && stack[i].state == succ) {
              std::vector<Observation> pre, loop;
              pre.push_back(observe(concrete, stack.front().state));
              for (std::size_t j = 1; j < stack.size(); ++j) {
                pre.push_back(observe(concrete, stack[j].state));
              }
              for (std::size_t j = i; j < pre.size(); ++j) loop.push_back(pre[j]);
              pre.resize(i);
              if (!prop::eval_lasso(property->formula, pre, loop)) {
                Trace tr = build_trace(static_cast<std::uint32_t>(i));
                TraceStep step;
                step.choice = choice;
                step.time = succ.time;
                step.delta = succ.delta;
                step.obs = observe(concrete, succ);
                tr.steps.push_back(std::move(step));
                result.outcome = ReplayOutcome::Confirmed;
                result.concrete = std::move(tr);
                result.message = "violation reproduced on the unstubbed system";
                return result;
              }
            }
          }
        }
        continue;
      }
      visited.insert(k);
      best_consumed = std::max(best_consumed, nc->consumed);
      Frame nf;
      nf.state = succ;
      nf.cursor = *nc;
      nf.in_choice = choice;
      nf.succs = successors(concrete, nf.state, opts.env, opts.limits);
      stack.push_back(std::move(nf));
      if (fully_matched(*nc) && violated_here(stack.back().state)) {
        result.outcome = ReplayOutcome::Confirmed;
        result.concrete = build_trace(std::nullopt);
        result.message = "violation reproduced on the unstubbed system";
        return result;
      }
    }
  }

  result.outcome = ReplayOutcome::Spurious;
  result.matched_boundaries = best_consumed;
  std::ostringstream os;
  os << "spurious: no unstubbed run matches the composed counterexample; matched "
     << best_consumed << " of " << (prefix_seq.size() + loop_seq.size())
     << " distinct interface letters before diverging";
  result.message = os.str();
  return result;
}

}  // namespace scver
