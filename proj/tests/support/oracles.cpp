#include "support/oracles.hpp"

#include <deque>
#include <functional>
#include <unordered_map>

#include "scver/json_io.hpp"

namespace scver::testing {

Graph build_graph(const ElaboratedDesign& design, const CheckOptions& options) {
  Graph g;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::deque<std::uint32_t> work;
  auto intern = [&](const KernelState& st) {
    std::string bytes = st.serialize();
    auto it = ids.find(bytes);
    if (it != ids.end()) return std::pair{it->second, false};
    std::uint32_t id = static_cast<std::uint32_t>(g.states.size());
    ids.emplace(std::move(bytes), id);
    g.states.push_back(st);
    g.obs.push_back(observe(design, st));
    g.succ.emplace_back();
    return std::pair{id, true};
  };
  for (const auto& init : initial_states(design, options.env, options.limits)) {
    auto [id, fresh] = intern(init);
    g.initial.push_back(id);
    if (fresh) work.push_back(id);
  }
  while (!work.empty()) {
    std::uint32_t cur = work.front();
    work.pop_front();
    auto succs = successors(design, g.states[cur], options.env, options.limits);
    if (succs.empty()) g.terminals.push_back(cur);
    for (const auto& [choice, succ] : succs) {
      auto [id, fresh] = intern(succ);
      g.succ[cur].push_back(id);
      if (fresh) work.push_back(id);
    }
    if (g.states.size() > options.state_cap) {
      throw Error(ErrorKind::Resource, "oracle graph exceeded the state cap");
    }
  }
  return g;
}

VerdictStatus oracle_safety(const ElaboratedDesign& design, const Graph& graph,
                            const std::vector<ResolvedProperty>& invariants,
                            bool check_deadlock) {
  for (std::uint32_t s = 0; s < graph.states.size(); ++s) {
    if (graph.states[s].assert_fail) return VerdictStatus::AssertionViolation;
  }
  for (std::uint32_t s = 0; s < graph.states.size(); ++s) {
    for (const auto& inv : invariants) {
      if (!prop::eval_prop(inv.formula, graph.obs[s])) return VerdictStatus::InvariantViolation;
    }
  }
  if (check_deadlock) {
    for (std::uint32_t t : graph.terminals) {
      if (!is_clean_termination(graph.states[t])) return VerdictStatus::Deadlock;
    }
  }
  (void)design;
  return VerdictStatus::Pass;
}

namespace {

// every simple cycle through `start`, via DFS with an on-path set
void cycles_from(const Graph& g, std::uint32_t start,
                 const std::function<void(const std::vector<std::uint32_t>&)>& emit) {
  std::vector<std::uint32_t> path{start};
  std::vector<bool> on_path(g.states.size(), false);
  on_path[start] = true;
  std::function<void()> go = [&]() {
    for (std::uint32_t next : g.succ[path.back()]) {
      if (next == start) {
        emit(path);
        continue;
      }
      if (next < start || on_path[next]) continue;  // canonical: cycles rooted at their min id
      on_path[next] = true;
      path.push_back(next);
      go();
      path.pop_back();
      on_path[next] = false;
    }
  };
  go();
}

}  // namespace

bool oracle_ltl_violated(const ElaboratedDesign& design, const Graph& graph,
                         const prop::Formula& formula) {
  (void)design;
  // reachability of every node from the initials along simple paths is
  // implied by graph construction; prefixes below are shortest paths
  std::vector<std::int64_t> parent(graph.states.size(), -2);
  std::deque<std::uint32_t> work;
  for (std::uint32_t i : graph.initial) {
    if (parent[i] == -2) {
      parent[i] = -1;
      work.push_back(i);
    }
  }
  while (!work.empty()) {
    std::uint32_t cur = work.front();
    work.pop_front();
    for (std::uint32_t next : graph.succ[cur]) {
      if (parent[next] == -2) {
        parent[next] = cur;
        work.push_back(next);
      }
    }
  }
  auto prefix_to = [&](std::uint32_t node) {
    std::vector<std::uint32_t> rev;
    for (std::int64_t n = node; n >= 0; n = parent[n]) rev.push_back(static_cast<std::uint32_t>(n));
    return std::vector<std::uint32_t>(rev.rbegin(), rev.rend());
  };
  auto word = [&](const std::vector<std::uint32_t>& nodes) {
    std::vector<Observation> w;
    for (std::uint32_t n : nodes) w.push_back(graph.obs[n]);
    return w;
  };

  // terminal stutter lassos
  for (std::uint32_t t : graph.terminals) {
    std::vector<std::uint32_t> pre = prefix_to(t);
    std::vector<Observation> prefix = word(pre);
    std::vector<Observation> loop{prefix.back()};
    prefix.pop_back();
    if (!prop::eval_lasso(formula, prefix, loop)) return true;
  }
  // simple cycles, entered at their first node via a shortest prefix
  bool violated = false;
  for (std::uint32_t s = 0; s < graph.states.size() && !violated; ++s) {
    if (parent[s] == -2) continue;
    cycles_from(graph, s, [&](const std::vector<std::uint32_t>& cycle) {
      if (violated) return;
      std::vector<std::uint32_t> pre = prefix_to(s);
      pre.pop_back();  // the cycle supplies s itself
      if (!prop::eval_lasso(formula, word(pre), word(cycle))) violated = true;
    });
  }
  return violated;
}

std::string corpus_path(const std::string& name) {
  return std::string(SCVER_CORPUS_DIR) + "/" + name;
}

std::string read_corpus(const std::string& name) { return read_file(corpus_path(name)); }

}  // namespace scver::testing

namespace scver::testing::twoatom {

prop::SymbolTable symbols() {
  prop::SymbolTable t;
  t.visible["a.p"] = {false, 0, ScalarType::boolean()};
  t.visible["a.q"] = {false, 1, ScalarType::boolean()};
  return t;
}

std::vector<Observation> letters() {
  std::vector<Observation> out;
  for (int v = 0; v < 4; ++v) {
    Observation o;
    o.signals = {v & 1, (v >> 1) & 1};
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<prop::Formula> formula_corpus(std::size_t count) {
  using prop::Formula;
  struct Entry {
    Formula f;
    int temporal;
  };
  prop::SymbolTable table = symbols();
  std::vector<Entry> pool;
  std::set<std::string> seen;
  auto push = [&](Formula f, int temporal) {
    if (temporal > 3) return;
    if (seen.insert(f->key).second) pool.push_back({std::move(f), temporal});
  };
  for (const char* text : {"a.p", "a.q", "!a.p", "!a.q"}) {
    push(prop::parse_ltl(text, table), 0);
  }
  // breadth-first derivation; scanning the growing pool keeps order stable
  for (std::size_t i = 0; i < pool.size() && pool.size() < 4 * count; ++i) {
    Entry e = pool[i];
    push(prop::mk_next(e.f), e.temporal + 1);
    push(prop::mk_eventually(e.f), e.temporal + 1);
    push(prop::mk_always(e.f), e.temporal + 1);
    for (std::size_t j = 0; j <= i && j < pool.size(); ++j) {
      Entry o = pool[j];
      push(prop::mk_until(e.f, o.f), e.temporal + o.temporal + 1);
      push(prop::mk_until(o.f, e.f), e.temporal + o.temporal + 1);
      push(prop::mk_release(e.f, o.f), e.temporal + o.temporal + 1);
      push(prop::mk_and(e.f, o.f), e.temporal + o.temporal);
      push(prop::mk_or(e.f, o.f), e.temporal + o.temporal);
      if (pool.size() >= 4 * count) break;
    }
  }
  std::vector<Formula> out;
  for (const auto& e : pool) {
    out.push_back(e.f);
    if (out.size() == count) break;
  }
  return out;
}

void for_each_lasso(std::size_t max_len,
                    const std::function<bool(std::span<const Observation>,
                                             std::span<const Observation>)>& fn) {
  std::vector<Observation> alphabet = letters();
  std::vector<Observation> word;
  for (std::size_t n = 1; n <= max_len; ++n) {
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
      word.clear();
      for (std::size_t i = 0; i < n; ++i) word.push_back(alphabet[idx[i]]);
      for (std::size_t split = 0; split < n; ++split) {
        std::span<const Observation> all(word);
        if (!fn(all.subspan(0, split), all.subspan(split))) return;
      }
      std::size_t k = n;
      bool done = true;
      while (k-- > 0) {
        if (++idx[k] < alphabet.size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
  }
}

}  // namespace scver::testing::twoatom
