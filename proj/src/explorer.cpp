#include "scver/explorer.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace scver {

const char* verdict_status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::InvariantViolation: return "invariant-violation";
    case VerdictStatus::AssertionViolation: return "assertion-violation";
    case VerdictStatus::Deadlock: return "deadlock";
    case VerdictStatus::LtlViolation: return "ltl-violation";
    case VerdictStatus::DeltaOverflow: return "delta-overflow";
    case VerdictStatus::TimeBound: return "time-bound";
  }
  return "?";
}

namespace {

void poll_cancel(const CheckOptions& opt) {
  if (opt.cancel && opt.cancel()) {
    throw Error(ErrorKind::Resource, "check cancelled by caller");
  }
}

void enforce_cap(const CheckOptions& opt, std::size_t stored) {
  if (stored > opt.state_cap) {
    throw Error(ErrorKind::Resource,
                "state cap of " + std::to_string(opt.state_cap) + " states exceeded");
  }
}

TraceStep make_step(const ElaboratedDesign& design, const SchedChoice& choice,
                    const KernelState& state) {
  TraceStep step;
  step.choice = choice;
  step.time = state.time;
  step.delta = state.delta;
  step.obs = observe(design, state);
  return step;
}

}  // namespace

Verdict check_safety(const ElaboratedDesign& design, const CheckOptions& opt,
                     const std::vector<ResolvedProperty>& invariants) {
  for (const auto& inv : invariants) {
    if (inv.is_ltl || !prop::is_propositional(inv.formula)) {
      fail_semantic("'" + inv.name + "' is not an invariant");
    }
  }

  Verdict verdict;
  if (invariants.size() == 1) verdict.property = invariants[0].name;

  struct Frame {
    KernelState state;
    SchedChoice in_choice;  // how we got here (unused at depth 0)
    std::vector<std::pair<SchedChoice, KernelState>> succs;
    std::size_t next = 0;
  };

  std::unordered_set<std::string> visited;
  std::vector<Frame> stack;

  auto build_trace = [&]() {
    Trace tr;
    tr.initial_state = stack.front().state.serialize();
    tr.initial_obs = observe(design, stack.front().state);
    for (std::size_t i = 1; i < stack.size(); ++i) {
      tr.steps.push_back(make_step(design, stack[i].in_choice, stack[i].state));
    }
    return tr;
  };

  // Returns true when the state violates something; fills verdict.
  auto inspect = [&](const KernelState& st, const std::vector<std::pair<SchedChoice, KernelState>>& succs) {
    if (st.assert_fail) {
      auto [p, loc] = *st.assert_fail;
      verdict.status = VerdictStatus::AssertionViolation;
      verdict.message = "assertion failed in process '" + design.processes[p].name + "' at line " +
                        std::to_string(design.processes[p].cfg[loc].loc.line);
      return true;
    }
    Observation obs = observe(design, st);
    for (const auto& inv : invariants) {
      if (!prop::eval_prop(inv.formula, obs)) {
        verdict.status = VerdictStatus::InvariantViolation;
        verdict.property = inv.name;
        verdict.message = "invariant '" + inv.name + "' violated";
        return true;
      }
    }
    if (succs.empty() && opt.check_deadlock && obs.phase == Phase::Terminal &&
        !is_clean_termination(st)) {
      std::string waiting;
      for (std::size_t p = 0; p < st.procs.size(); ++p) {
        if (st.procs[p].status != ProcStatus::Terminated) {
          if (!waiting.empty()) waiting += ", ";
          waiting += design.processes[p].name;
        }
      }
      verdict.status = VerdictStatus::Deadlock;
      verdict.message = "terminal state with waiting processes: " + waiting;
      return true;
    }
    return false;
  };

  try {
    std::vector<KernelState> inits = initial_states(design, opt.env, opt.limits);
    for (auto& init : inits) {
      std::string bytes = init.serialize();
      if (!visited.insert(bytes).second) continue;
      enforce_cap(opt, visited.size());
      verdict.stats.states_stored = visited.size();
      Frame f;
      f.state = std::move(init);
      f.succs = successors(design, f.state, opt.env, opt.limits);
      verdict.stats.transitions += f.succs.size();
      verdict.stats.steps += 1;
      stack.clear();
      stack.push_back(std::move(f));
      if (inspect(stack.back().state, stack.back().succs)) {
        verdict.counterexample = build_trace();
        return verdict;
      }
      while (!stack.empty()) {
        poll_cancel(opt);
        Frame& top = stack.back();
        if (top.next >= top.succs.size()) {
          stack.pop_back();
          continue;
        }
        auto& [choice, succ] = top.succs[top.next++];
        std::string sbytes = succ.serialize();
        if (!visited.insert(sbytes).second) continue;
        enforce_cap(opt, visited.size());
        verdict.stats.states_stored = visited.size();
        Frame nf;
        nf.state = succ;
        nf.in_choice = choice;
        nf.succs = successors(design, nf.state, opt.env, opt.limits);
        verdict.stats.transitions += nf.succs.size();
        verdict.stats.steps += 1;
        stack.push_back(std::move(nf));
        verdict.stats.max_depth = std::max<std::uint64_t>(verdict.stats.max_depth, stack.size());
        if (inspect(stack.back().state, stack.back().succs)) {
          verdict.counterexample = build_trace();
          return verdict;
        }
      }
    }
  } catch (const HorizonError& e) {
    verdict.status = e.which() == HorizonError::Which::DeltaOverflow
                         ? VerdictStatus::DeltaOverflow
                         : VerdictStatus::TimeBound;
    verdict.message = e.what();
    return verdict;
  }
  verdict.status = VerdictStatus::Pass;
  return verdict;
}

namespace {

// Product exploration state shared by the two nested-DFS colors.
class LtlSearch {
 public:
  LtlSearch(const ElaboratedDesign& design, const CheckOptions& opt, const BuchiAutomaton& ba)
      : design_(design), opt_(opt), ba_(ba) {}

  struct Node {
    std::uint32_t state_id;
    std::uint32_t ba_state;
    bool operator==(const Node&) const = default;
  };
  struct NodeHash {
    std::size_t operator()(const Node& n) const {
      return (static_cast<std::size_t>(n.state_id) << 20) ^ n.ba_state;
    }
  };

  struct ProdSucc {
    SchedChoice choice;
    Node node;
  };

  std::uint32_t intern(const KernelState& st) {
    std::string bytes = st.serialize();
    auto it = state_ids_.find(bytes);
    if (it != state_ids_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(states_.size());
    state_ids_.emplace(std::move(bytes), id);
    states_.push_back(st);
    enforce_cap(opt_, states_.size());
    return id;
  }

  const KernelState& state(std::uint32_t id) const { return states_[id]; }

  std::vector<ProdSucc> prod_successors(const Node& n) {
    poll_cancel(opt_);
    ++stats_.steps;
    const KernelState& st = states_[n.state_id];
    Observation obs = observe(design_, st);
    std::vector<std::pair<SchedChoice, KernelState>> ks = successors(design_, st, opt_.env, opt_.limits);
    std::vector<ProdSucc> out;
    if (ks.empty()) {
      // Stutter extension: a quiescent terminal state repeats its
      // observation forever. A blocked stub boundary also has no
      // successors but is a truncated path, not quiescence: no extension.
      if (obs.phase != Phase::Terminal) return out;
      SchedChoice stutter;
      stutter.kind = SchedChoice::Kind::Stutter;
      for (const auto& t : ba_.out[n.ba_state]) {
        if (label_satisfied(t.label, obs)) {
          out.push_back({stutter, Node{n.state_id, t.dst}});
        }
      }
    } else {
      for (auto& [choice, succ] : ks) {
        std::uint32_t sid = intern(succ);
        for (const auto& t : ba_.out[n.ba_state]) {
          if (label_satisfied(t.label, obs)) {
            out.push_back({choice, Node{sid, t.dst}});
          }
        }
      }
    }
    stats_.transitions += out.size();
    return out;
  }

  // Two-color nested DFS. Returns true when an accepting cycle exists;
  // prefix_/cycle_ then hold the lasso.
  bool search() {
    std::vector<KernelState> inits = initial_states(design_, opt_.env, opt_.limits);
    for (const auto& init : inits) {
      std::uint32_t sid = intern(init);
      for (std::uint32_t q : ba_.initial) {
        Node root{sid, q};
        if (color_.count(root)) continue;
        if (dfs_blue(root)) return true;
      }
    }
    return false;
  }

  // Lasso shape: prefix of choices from the initial node, then the cycle.
  std::vector<std::pair<SchedChoice, Node>> prefix_, cycle_;
  Node root_node_{};
  VerdictStats stats_;

 private:
  enum class Color : std::uint8_t { Cyan, Blue };

  struct BlueFrame {
    Node node;
    SchedChoice in_choice;
    std::vector<ProdSucc> succs;
    std::size_t next = 0;
  };

  bool accepting(const Node& n) const { return ba_.accepting[n.ba_state]; }

  bool dfs_blue(const Node& root) {
    std::vector<BlueFrame> stack;
    color_[root] = Color::Cyan;
    stack.push_back({root, {}, prod_successors(root), 0});
    stats_.states_stored = std::max<std::uint64_t>(stats_.states_stored, color_.size());
    root_node_ = root;
    while (!stack.empty()) {
      stats_.max_depth = std::max<std::uint64_t>(stats_.max_depth, stack.size());
      BlueFrame& top = stack.back();
      if (top.next < top.succs.size()) {
        const ProdSucc& s = top.succs[top.next++];
        auto it = color_.find(s.node);
        if (it != color_.end() && it->second == Color::Cyan &&
            (accepting(top.node) || accepting(s.node))) {
          // cycle through the blue stack closes at s.node
          build_lasso(stack, s.node, {{s.choice, s.node}});
          return true;
        }
        if (it == color_.end()) {
          color_[s.node] = Color::Cyan;
          stats_.states_stored = std::max<std::uint64_t>(stats_.states_stored, color_.size());
          stack.push_back({s.node, s.choice, prod_successors(s.node), 0});
        }
        continue;
      }
      // post-order: red search from accepting nodes
      if (accepting(top.node)) {
        std::vector<std::pair<SchedChoice, Node>> red_path;
        if (dfs_red(top.node, red_path)) {
          build_lasso(stack, red_path.back().second, red_path);
          return true;
        }
      }
      color_[top.node] = Color::Blue;
      stack.pop_back();
    }
    return false;
  }

  bool dfs_red(const Node& seed, std::vector<std::pair<SchedChoice, Node>>& path) {
    struct RedFrame {
      Node node;
      std::vector<ProdSucc> succs;
      std::size_t next = 0;
    };
    std::vector<RedFrame> stack;
    stack.push_back({seed, prod_successors(seed), 0});
    while (!stack.empty()) {
      RedFrame& top = stack.back();
      if (top.next < top.succs.size()) {
        const ProdSucc& s = top.succs[top.next++];
        auto it = color_.find(s.node);
        if (it != color_.end() && it->second == Color::Cyan) {
          // cyan nodes sit on the blue stack and reach the seed
          for (std::size_t i = 0; i + 1 < stack.size(); ++i) {
            path.push_back({stack[i].succs[stack[i].next - 1].choice, stack[i + 1].node});
          }
          path.push_back({s.choice, s.node});
          return true;
        }
        if (!red_.count(s.node)) {
          red_.insert(s.node);
          stack.push_back({s.node, prod_successors(s.node), 0});
        }
        continue;
      }
      stack.pop_back();
    }
    return false;
  }

  // Assembles prefix_ and cycle_ from the blue stack plus the closing path.
  // closing ends at `close` which lies on the blue stack (cyan).
  void build_lasso(const std::vector<BlueFrame>& stack, const Node& close,
                   std::vector<std::pair<SchedChoice, Node>> closing) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < stack.size(); ++i) {
      if (stack[i].node == close) {
        pos = i;
        break;
      }
    }
    prefix_.clear();
    cycle_.clear();
    for (std::size_t i = 1; i <= pos; ++i) prefix_.push_back({stack[i].in_choice, stack[i].node});
    for (std::size_t i = pos + 1; i < stack.size(); ++i) {
      cycle_.push_back({stack[i].in_choice, stack[i].node});
    }
    for (auto& step : closing) cycle_.push_back(std::move(step));
  }

  const ElaboratedDesign& design_;
  const CheckOptions& opt_;
  const BuchiAutomaton& ba_;
  std::unordered_map<std::string, std::uint32_t> state_ids_;
  std::vector<KernelState> states_;
  std::unordered_map<Node, Color, NodeHash> color_;
  std::unordered_set<Node, NodeHash> red_;
};

}  // namespace

Verdict check_ltl(const ElaboratedDesign& design, const CheckOptions& opt,
                  const prop::Formula& formula, const std::string& property_name) {
  Verdict verdict;
  verdict.property = property_name;
  BuchiAutomaton ba = to_buchi(prop::nnf(prop::mk_not(formula)));
  LtlSearch search(design, opt, ba);
  try {
    if (search.search()) {
      verdict.status = VerdictStatus::LtlViolation;
      verdict.message = "accepting cycle found for the negated property";
      Trace tr;
      const KernelState& init = search.state(search.root_node_.state_id);
      tr.initial_state = init.serialize();
      tr.initial_obs = observe(design, init);
      for (const auto& [choice, node] : search.prefix_) {
        tr.steps.push_back(make_step(design, choice, search.state(node.state_id)));
      }
      tr.loop_start = static_cast<std::uint32_t>(search.prefix_.size());
      for (const auto& [choice, node] : search.cycle_) {
        tr.steps.push_back(make_step(design, choice, search.state(node.state_id)));
      }
      verdict.counterexample = std::move(tr);
    } else {
      verdict.status = VerdictStatus::Pass;
    }
  } catch (const HorizonError& e) {
    verdict.status = e.which() == HorizonError::Which::DeltaOverflow
                         ? VerdictStatus::DeltaOverflow
                         : VerdictStatus::TimeBound;
    verdict.message = e.what();
  }
  verdict.stats = search.stats_;
  return verdict;
}

SpaceSummary enumerate_state_space(const ElaboratedDesign& design, const CheckOptions& opt) {
  SpaceSummary sum;
  std::unordered_set<std::string> visited;
  std::deque<KernelState> work;
  for (auto& init : initial_states(design, opt.env, opt.limits)) {
    if (visited.insert(init.serialize()).second) work.push_back(std::move(init));
  }
  while (!work.empty()) {
    poll_cancel(opt);
    enforce_cap(opt, visited.size());
    KernelState st = std::move(work.front());
    work.pop_front();
    auto succs = successors(design, st, opt.env, opt.limits);
    sum.transitions += succs.size();
    if (succs.empty()) sum.terminals.push_back(st);
    for (auto& [choice, succ] : succs) {
      if (visited.insert(succ.serialize()).second) work.push_back(std::move(succ));
    }
  }
  sum.states = visited.size();
  return sum;
}

std::vector<KernelState> replay_trace(const ElaboratedDesign& design, const CheckOptions& opt,
                                      const Trace& trace) {
  std::vector<KernelState> visited;
  KernelState st = KernelState::deserialize(design, trace.initial_state);
  if (!(observe(design, st) == trace.initial_obs)) {
    throw Error(ErrorKind::Usage, "trace replay: initial observation mismatch");
  }
  visited.push_back(st);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& step = trace.steps[i];
    if (step.choice.kind == SchedChoice::Kind::Stutter) {
      if (!is_terminal(design, st)) {
        throw Error(ErrorKind::Usage,
                    "trace replay: stutter step " + std::to_string(i) + " on a non-terminal state");
      }
      // state unchanged
    } else {
      auto succs = successors(design, st, opt.env, opt.limits);
      bool found = false;
      for (auto& [choice, succ] : succs) {
        if (choice == step.choice) {
          st = std::move(succ);
          found = true;
          break;
        }
      }
      if (!found) {
        throw Error(ErrorKind::Usage,
                    "trace replay: step " + std::to_string(i) + " (" +
                        step.choice.label(design) + ") is not a successor");
      }
    }
    Observation obs = observe(design, st);
    if (!(obs == step.obs)) {
      throw Error(ErrorKind::Usage,
                  "trace replay: observation mismatch at step " + std::to_string(i));
    }
    if (step.time != st.time || step.delta != st.delta) {
      throw Error(ErrorKind::Usage,
                  "trace replay: time/delta mismatch at step " + std::to_string(i));
    }
    visited.push_back(st);
  }
  if (trace.loop_start) {
    if (*trace.loop_start >= visited.size() - 1) {
      throw Error(ErrorKind::Usage, "trace replay: loop start beyond trace length");
    }
    if (!(visited.back() == visited[*trace.loop_start])) {
      throw Error(ErrorKind::Usage, "trace replay: lasso does not close");
    }
  }
  return visited;
}

}  // namespace scver
