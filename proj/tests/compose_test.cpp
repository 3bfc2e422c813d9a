#include "doctest.h"
#include "scver/compose.hpp"
#include "scver/json_io.hpp"
#include "scver/parser.hpp"
#include "support/oracles.hpp"

using namespace scver;

namespace {

RunConfig config() { return {}; }

StubAutomaton learn(const std::string& file, const std::string& instance, std::uint32_t h) {
  auto astd = parse(testing::read_corpus(file));
  CheckOptions opts;
  return learn_stub(astd, instance, 8, h, opts);
}

}  // namespace

TEST_CASE("substituting a stub for a zero-port component preserves the verdict") {
  const char* with_idle = R"(
    module Idle { signal x: bool = false; process P { x <= true; wait(time 1); x <= false; } }
    module Main { signal go: bool = false; process Q { go <= true; } }
    instance idle: Idle;
    instance main: Main;
    invariant go_ok { !(main.go && main.go) || true }
  )";
  const char* without_idle = R"(
    module Main { signal go: bool = false; process Q { go <= true; } }
    instance main: Main;
    invariant go_ok { !(main.go && main.go) || true }
  )";
  auto ast_with = parse(with_idle);
  CheckOptions opts;
  StubAutomaton idle_stub = learn_stub(ast_with, "idle", 8, 2, opts);
  Verdict stubbed = compose_and_verify(ast_with, {{"idle", idle_stub}}, "go_ok", config());
  auto removed_design = elaborate(parse(without_idle));
  Verdict removed = check_safety(removed_design, opts, {removed_design.properties[0]});
  CHECK(stubbed.status == removed.status);
}

TEST_CASE("composition with no substitutions equals the plain check") {
  auto astd = parse(testing::read_corpus("ecu_system.scl"));
  Verdict composed = compose_and_verify(astd, {}, "hw_excl", config());
  auto design = elaborate(astd);
  CheckOptions opts;
  Verdict plain = check_safety(design, opts, {*design.find_property("hw_excl")});
  CHECK(composed.status == plain.status);
  CHECK(composed.stats.states_stored == plain.stats.states_stored);
}

TEST_CASE("a property naming a stubbed internal is rejected with the hidden symbol") {
  const char* src = R"(
    module C { out o: bool; signal hidden_state: bool = false;
               process P { hidden_state <= true; o <= true; } }
    instance c: C;
    invariant peek { c.hidden_state }
  )";
  auto astd = parse(src);
  CheckOptions opts;
  StubAutomaton stub = learn_stub(astd, "c", 4, 1, opts);
  try {
    compose_and_verify(astd, {{"c", stub}}, "peek", config());
    FAIL("expected a hidden-symbol error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("c.hidden_state") != std::string::npos);
    CHECK(msg.find("stubbed") != std::string::npos);
  }
}

TEST_CASE("sw component passes its liveness against the ideal-memory stub") {
  auto astd = parse(testing::read_corpus("ecu_sw_ideal.scl"));
  StubAutomaton mem = learn("ecu_sw_ideal.scl", "mem", 3);
  Verdict v = compose_and_verify(astd, {{"mem", mem}}, "sw_live", config());
  CHECK(v.status == VerdictStatus::Pass);
  CHECK(v.stats.states_stored > 2);  // not a vacuous truncation
}

TEST_CASE("stubbed-pass implies unstubbed-pass for corpus safety properties") {
  for (const char* file : {"ecu_system.scl", "ecu_system_fixed.scl"}) {
    auto astd = parse(testing::read_corpus(file));
    auto design = elaborate(astd);
    CheckOptions opts;
    for (const char* inst : {"sw", "fw"}) {
      StubAutomaton stub = learn(file, inst, 2);
      Verdict stubbed = compose_and_verify(astd, {{inst, stub}}, "hw_excl", config());
      CAPTURE(file);
      CAPTURE(inst);
      if (stubbed.status == VerdictStatus::Pass) {
        Verdict full = check_safety(design, opts, {*design.find_property("hw_excl")});
        CHECK(full.status == VerdictStatus::Pass);
      }
    }
  }
}

TEST_CASE("liveness verdicts on stubbed compositions carry the advisory note") {
  StubAutomaton hw = learn("ecu_system.scl", "hw", 2);
  auto astd = parse(testing::read_corpus("ecu_system.scl"));
  Verdict v = compose_and_verify(astd, {{"hw", hw}}, "sw_live", config());
  REQUIRE(v.status == VerdictStatus::LtlViolation);
  CHECK(v.message.find("advisory") != std::string::npos);
}

TEST_CASE("replay: a violation with no stubs substituted is trivially confirmed") {
  auto astd = parse(testing::read_corpus("ecu_system.scl"));
  Verdict v = compose_and_verify(astd, {}, "sw_live", config());
  REQUIRE(v.status == VerdictStatus::LtlViolation);
  ReplayResult r = replay_on_concrete(astd, {}, "sw_live", *v.counterexample, config());
  CHECK(r.outcome == ReplayOutcome::Confirmed);
}

TEST_CASE("replay confirms the ecu conflict found through the arbiter stub") {
  auto astd = parse(testing::read_corpus("ecu_system.scl"));
  StubAutomaton hw = learn("ecu_system.scl", "hw", 4);
  Verdict v = compose_and_verify(astd, {{"hw", hw}}, "sw_live", config());
  REQUIRE(v.status == VerdictStatus::LtlViolation);
  ReplayResult r = replay_on_concrete(astd, {{"hw", hw}}, "sw_live", *v.counterexample, config());
  REQUIRE(r.outcome == ReplayOutcome::Confirmed);
  REQUIRE(r.concrete.has_value());
  // the concrete lasso replays on the unstubbed system and falsifies sw_live
  auto design = elaborate(astd);
  CheckOptions opts;
  auto states = replay_trace(design, opts, *r.concrete);
  REQUIRE(r.concrete->loop_start.has_value());
  std::vector<Observation> word;
  word.push_back(r.concrete->initial_obs);
  for (const auto& s : r.concrete->steps) word.push_back(s.obs);
  word.pop_back();
  std::span<const Observation> all(word);
  std::uint32_t ls = *r.concrete->loop_start;
  CHECK(!prop::eval_lasso(design.find_property("sw_live")->formula, all.subspan(0, ls),
                          all.subspan(ls)));
}

TEST_CASE("replay flags the over-relaxed stub's violation as spurious") {
  auto astd = parse(testing::read_corpus("ecu_sw_ideal.scl"));
  StubAutomaton relaxed =
      stub_from_json(parse_json_file(testing::corpus_path("fixtures/mem_stub_relaxed.json")));
  Verdict v = compose_and_verify(astd, {{"mem", relaxed}}, "sw_live", config());
  REQUIRE(v.status == VerdictStatus::LtlViolation);
  ReplayResult r = replay_on_concrete(astd, {{"mem", relaxed}}, "sw_live", *v.counterexample,
                                      config());
  CHECK(r.outcome == ReplayOutcome::Spurious);
  CHECK(r.matched_boundaries >= 1);
  CHECK(r.message.find("diverging") != std::string::npos);
}

TEST_CASE("stale stubs are rejected at composition time") {
  auto astd = parse(testing::read_corpus("ecu_sw_ideal.scl"));
  StubAutomaton stale =
      stub_from_json(parse_json_file(testing::corpus_path("fixtures/mem_stub_stale.json")));
  CHECK_THROWS_AS(compose_and_verify(astd, {{"mem", stale}}, "sw_live", config()), Error);
}
