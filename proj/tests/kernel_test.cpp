#include "doctest.h"
#include "scver/kernel.hpp"
#include "scver/parser.hpp"
#include "support/oracles.hpp"

using namespace scver;

namespace {

ElaboratedDesign make(const std::string& src) { return elaborate(parse(src)); }

Limits limits() { return {}; }

// drives the single canonical run (first successor everywhere)
KernelState run_to_end(const ElaboratedDesign& d, KernelState st, EnvPolicy env) {
  for (;;) {
    auto succs = successors(d, st, env, limits());
    if (succs.empty()) return st;
    st = succs[0].second;
  }
}

}  // namespace

TEST_CASE("initial states: closed vs most-general input products") {
  auto d = make("module M { in x: bool; process P { skip; } } instance m: M;");
  CHECK(initial_states(d, EnvPolicy::ClosedDefault, limits()).size() == 1);
  CHECK(initial_states(d, EnvPolicy::MostGeneral, limits()).size() == 2);

  auto d2 = make("module M { in x: int[0..3]; process P { skip; } } instance m: M;");
  auto closed = initial_states(d2, EnvPolicy::ClosedDefault, limits());
  REQUIRE(closed.size() == 1);
  CHECK(closed[0].inputs[0] == 0);  // type minimum
  CHECK(initial_states(d2, EnvPolicy::MostGeneral, limits()).size() == 4);

  auto d3 = make("module M { process P { skip; } } instance m: M;");
  CHECK(initial_states(d3, EnvPolicy::MostGeneral, limits()).size() == 1);
}

TEST_CASE("next-write buffering: the write is invisible until the update phase") {
  auto d = make(R"(
    module M { signal s: bool = false; process W { s <= true; wait(time 1); } }
    instance m: M;
  )");
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  auto succs = successors(d, inits[0], EnvPolicy::ClosedDefault, limits());
  REQUIRE(succs.size() == 1);
  CHECK(succs[0].first.kind == SchedChoice::Kind::Run);
  const KernelState& after = succs[0].second;
  CHECK(after.sig_cur[0] == 0);
  REQUIRE(after.sig_next[0].has_value());
  CHECK(*after.sig_next[0] == 1);
  // and the delta step makes it visible
  auto after_delta = successors(d, after, EnvPolicy::ClosedDefault, limits());
  REQUIRE(after_delta.size() == 1);
  CHECK(after_delta[0].first.kind == SchedChoice::Kind::DeltaStep);
  CHECK(after_delta[0].second.sig_cur[0] == 1);
}

TEST_CASE("writer/reader: both schedules converge to the same terminal observation") {
  auto src = testing::read_corpus("writer_reader.scl");
  auto d = elaborate(parse(src));
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  REQUIRE(inits.size() == 1);
  auto first = successors(d, inits[0], EnvPolicy::ClosedDefault, limits());
  REQUIRE(first.size() == 2);  // run W or run R

  std::vector<Observation> terminals;
  std::size_t maximal_runs = 0;
  // count maximal runs by DFS over all choices
  std::function<void(const KernelState&)> walk = [&](const KernelState& st) {
    auto succs = successors(d, st, EnvPolicy::ClosedDefault, limits());
    if (succs.empty()) {
      ++maximal_runs;
      terminals.push_back(observe(d, st));
      return;
    }
    for (auto& [c, s] : succs) walk(s);
  };
  walk(inits[0]);
  CHECK(maximal_runs == 2);
  REQUIRE(terminals.size() == 2);
  CHECK(terminals[0] == terminals[1]);
  // seen latched true
  REQUIRE(d.symbols.visible.count("r.seen"));
  CHECK(terminals[0].signals[d.symbols.visible.at("r.seen").slot] == 1);
}

TEST_CASE("starved waiter: no runnable, nothing pending, one waiting process") {
  auto d = make(R"(
    module M { event e; process W { wait(event e); } }
    instance m: M;
  )");
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  KernelState st = run_to_end(d, inits[0], EnvPolicy::ClosedDefault);
  CHECK(successors(d, st, EnvPolicy::ClosedDefault, limits()).empty());
  CHECK(is_terminal(d, st));
  CHECK(!is_clean_termination(st));
  CHECK(observe(d, st).phase == Phase::Terminal);
}

TEST_CASE("observation: locals are projected out; phase tags follow the machine") {
  auto d = make(R"(
    module M { var v: int[0..7] = 0; signal s: bool = false;
      process P { v = 3; s <= true; wait(time 1); v = 5; } }
    instance m: M;
  )");
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  CHECK(observe(d, inits[0]).phase == Phase::TimeBoundary);
  auto s1 = successors(d, inits[0], EnvPolicy::ClosedDefault, limits())[0].second;  // run
  // locals differ from initial, observation fields other than phase match
  CHECK(s1.vars[0] == 3);
  CHECK(observe(d, s1).signals == observe(d, inits[0]).signals);
  auto s2 = successors(d, s1, EnvPolicy::ClosedDefault, limits())[0].second;  // delta
  CHECK(observe(d, s2).phase == Phase::DeltaBoundary);
  auto s3 = successors(d, s2, EnvPolicy::ClosedDefault, limits())[0].second;  // time
  CHECK(s3.time == 1);
  CHECK(observe(d, s3).phase == Phase::TimeBoundary);
}

TEST_CASE("change-wake soundness: writing the same value wakes nobody") {
  auto d = make(R"(
    module M {
      signal s: bool = false;
      process W { s <= false; wait(time 1); s <= true; }
      process R { wait(change s); }
    }
    instance m: M;
  )");
  // canonical path: W writes false (no change), R waits, delta wakes nobody
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  KernelState st = inits[0];
  // run W, run R
  st = successors(d, st, EnvPolicy::ClosedDefault, limits())[0].second;
  st = successors(d, st, EnvPolicy::ClosedDefault, limits())[0].second;
  auto delta = successors(d, st, EnvPolicy::ClosedDefault, limits());
  REQUIRE(delta.size() == 1);
  CHECK(delta[0].second.procs[1].status == ProcStatus::WaitingChange);  // R still asleep
  // later the true write does wake R
  KernelState fin = run_to_end(d, delta[0].second, EnvPolicy::ClosedDefault);
  CHECK(is_clean_termination(fin));
}

TEST_CASE("immediate notify wakes only processes already waiting (lost wakeup)") {
  auto src = testing::read_corpus("lost_wakeup.scl");
  auto d = elaborate(parse(src));
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  auto succs = successors(d, inits[0], EnvPolicy::ClosedDefault, limits());
  REQUIRE(succs.size() == 2);
  // order N first: notification lost, W starves
  KernelState lost = run_to_end(d, succs[0].second, EnvPolicy::ClosedDefault);
  CHECK(!is_clean_termination(lost));
  // order W first: W waits, N's notify wakes it
  KernelState ok = run_to_end(d, succs[1].second, EnvPolicy::ClosedDefault);
  CHECK(is_clean_termination(ok));
}

TEST_CASE("delta and timed notifications deliver at their boundaries") {
  auto d = make(R"(
    module M {
      event e;
      signal hit: bool = false;
      process N { notify(e, delta); notify(e, time 2); }
      process W { wait(event e); wait(event e); hit <= true; }
    }
    instance m: M;
  )");
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  KernelState fin = run_to_end(d, inits[0], EnvPolicy::ClosedDefault);
  CHECK(is_clean_termination(fin));
  CHECK(fin.time == 2);
  CHECK(fin.sig_cur[0] == 1);
}

TEST_CASE("time monotonicity and delta reset across boundaries") {
  auto src = testing::read_corpus("mutex_flawed.scl");
  auto d = elaborate(parse(src));
  CheckOptions opts;
  opts.env = EnvPolicy::ClosedDefault;
  auto g = testing::build_graph(d, opts);
  for (std::uint32_t s = 0; s < g.states.size(); ++s) {
    for (std::uint32_t t : g.succ[s]) {
      CHECK(g.states[t].time >= g.states[s].time);
      if (g.states[t].time == g.states[s].time && g.states[t].delta != 0) {
        CHECK(g.states[t].delta >= g.states[s].delta);
      }
    }
  }
}

TEST_CASE("run-to-completion: a run changes only its own process-local data") {
  auto src = testing::read_corpus("mutex_flawed.scl");
  auto d = elaborate(parse(src));
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  auto succs = successors(d, inits[0], EnvPolicy::ClosedDefault, limits());
  for (auto& [choice, succ] : succs) {
    REQUIRE(choice.kind == SchedChoice::Kind::Run);
    CHECK(succ.sig_cur == inits[0].sig_cur);  // current values untouched mid-evaluation
    for (std::uint32_t p = 0; p < succ.procs.size(); ++p) {
      if (p != choice.process) {
        CHECK(succ.procs[p] == inits[0].procs[p]);
      }
    }
  }
}

TEST_CASE("successor determinism: identical lists on repeated calls") {
  auto src = testing::read_corpus("ecu_system.scl");
  auto d = elaborate(parse(src));
  auto inits = initial_states(d, EnvPolicy::MostGeneral, limits());
  auto a = successors(d, inits[0], EnvPolicy::MostGeneral, limits());
  auto b = successors(d, inits[0], EnvPolicy::MostGeneral, limits());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(a[i].second == b[i].second);
  }
}

TEST_CASE("canonical serialization round-trips") {
  auto src = testing::read_corpus("ecu_system.scl");
  auto d = elaborate(parse(src));
  CheckOptions opts;
  opts.env = EnvPolicy::ClosedDefault;
  auto g = testing::build_graph(d, opts);
  for (const auto& st : g.states) {
    KernelState back = KernelState::deserialize(d, st.serialize());
    CHECK(back == st);
    CHECK(back.serialize() == st.serialize());
  }
}

TEST_CASE("horizon: delta overflow and time bound raise distinct errors") {
  auto osc = elaborate(parse(testing::read_corpus("delta_loop.scl")));
  auto inits = initial_states(osc, EnvPolicy::ClosedDefault, limits());
  KernelState st = inits[0];
  CHECK_THROWS_AS(run_to_end(osc, st, EnvPolicy::ClosedDefault), HorizonError);

  auto clock = elaborate(parse(testing::read_corpus("clock.scl")));
  auto cinits = initial_states(clock, EnvPolicy::ClosedDefault, limits());
  try {
    run_to_end(clock, cinits[0], EnvPolicy::ClosedDefault);
    FAIL("expected a horizon error");
  } catch (const HorizonError& e) {
    CHECK(e.which() == HorizonError::Which::TimeBound);
  }
}

TEST_CASE("zero-duration waits resolve at a zero-advance time boundary") {
  auto d = make(R"(
    module M { signal s: bool = false; process P { wait(time 0); s <= true; } }
    instance m: M;
  )");
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  KernelState fin = run_to_end(d, inits[0], EnvPolicy::ClosedDefault);
  CHECK(fin.time == 0);
  CHECK(is_clean_termination(fin));
  CHECK(fin.sig_cur[0] == 1);
}

TEST_CASE("run step cap guards against wait-free loops") {
  auto d = make(R"(
    module M { var x: int[0..1] = 0; process P { while true { x = 1 - x; } } }
    instance m: M;
  )");
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  try {
    successors(d, inits[0], EnvPolicy::ClosedDefault, limits());
    FAIL("expected a resource error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Resource);
  }
}

TEST_CASE("int stores wrap into the declared range") {
  auto d = make(R"(
    module M { var x: int[0..3] = 3; signal s: int[0..3] = 0;
      process P { x = x + 1; s <= x - 1; } }
    instance m: M;
  )");
  auto inits = initial_states(d, EnvPolicy::ClosedDefault, limits());
  auto after = successors(d, inits[0], EnvPolicy::ClosedDefault, limits())[0].second;
  CHECK(after.vars[0] == 0);                 // 4 wraps to 0
  CHECK(*after.sig_next[0] == 3);            // -1 wraps to 3
}
