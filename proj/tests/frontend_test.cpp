#include <filesystem>

#include "doctest.h"
#include "scver/design.hpp"
#include "scver/parser.hpp"
#include "scver/pretty.hpp"
#include "support/oracles.hpp"

using namespace scver;

TEST_CASE("parse: minimal module") {
  auto d = parse("module M { signal s: bool = false; process P { s <= true; } }");
  REQUIRE(d.modules.size() == 1);
  CHECK(d.modules[0].name == "M");
  REQUIRE(d.modules[0].signals.size() == 1);
  REQUIRE(d.modules[0].processes.size() == 1);
  REQUIRE(d.modules[0].processes[0].body.size() == 1);
  CHECK(d.modules[0].processes[0].body[0].kind == ast::Stmt::Kind::NextWrite);
}

TEST_CASE("parse: empty input yields an empty design") {
  auto d = parse("");
  CHECK(d.modules.empty());
  CHECK(d.instances.empty());
  CHECK_THROWS_AS(elaborate(d), Error);  // no instances
}

TEST_CASE("parse accepts out-of-range initials; elaboration rejects them") {
  auto d = parse("module M { signal s: int[0..3] = 7; } instance m: M;");
  REQUIRE(d.modules[0].signals.size() == 1);
  try {
    elaborate(d);
    FAIL("expected a range error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Semantic);
    CHECK(std::string(e.what()).find("outside") != std::string::npos);
  }
}

TEST_CASE("parse: syntax error carries position and expectations") {
  try {
    parse("module M { signal s bool = false; }");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("expected ':'") != std::string::npos);
    CHECK(e.loc().line == 1);
  }
}

TEST_CASE("parse: lexical error on illegal character") {
  CHECK_THROWS_AS(parse("module M { # }"), Error);
}

TEST_CASE("elaborate: one bind yields exactly one fresh top-level signal") {
  auto d = parse(R"(
    module A { out o: bool; process P { o <= true; } }
    module B { in i: bool; process Q { wait(change i); } }
    instance a: A;
    instance b: B;
    bind a.o -> b.i;
  )");
  auto e = elaborate(d);
  REQUIRE(e.signals.size() == 1);
  CHECK(e.signals[0].name == "a.o");
  CHECK(e.signals[0].from_port);
  CHECK(e.inputs.empty());
  // the reader alias resolves to the same slot
  REQUIRE(e.symbols.visible.count("b.i"));
  CHECK(e.symbols.visible.at("b.i").slot == 0);
}

TEST_CASE("elaborate: unbound in-port becomes an open input") {
  auto d = parse("module B { in i: bool; process Q { wait(change i); } } instance b: B;");
  auto e = elaborate(d);
  REQUIRE(e.inputs.size() == 1);
  CHECK(e.inputs[0].name == "b.i");
}

TEST_CASE("elaborate: while lowering has entry/cond/write/wait and a loop edge") {
  auto d = parse(R"(
    module M {
      signal s: bool = false;
      process P {
        while b { s <= true; wait(time 1); }
      }
      var b: bool = true;
    }
    instance m: M;
  )");
  auto e = elaborate(d);
  REQUIRE(e.processes.size() == 1);
  const auto& cfg = e.processes[0].cfg;
  REQUIRE(cfg.size() == 4);  // entry, condition, write, wait
  CHECK(cfg[0].kind == CfgNode::Kind::Entry);
  CHECK(cfg[0].next == 1);
  CHECK(cfg[1].kind == CfgNode::Kind::Branch);
  CHECK(cfg[1].next == 2);
  CHECK(cfg[1].alt == kEndLoc);
  CHECK(cfg[2].kind == CfgNode::Kind::NextWrite);
  CHECK(cfg[2].next == 3);
  CHECK(cfg[3].kind == CfgNode::Kind::WaitTime);
  CHECK(cfg[3].next == 1);  // wake-up resumes at the condition
}

TEST_CASE("elaborate: duplicate writer processes on one signal are rejected") {
  auto d = parse(R"(
    module M {
      signal s: bool = false;
      process P { s <= true; }
      process Q { s <= false; }
    }
    instance m: M;
  )");
  try {
    elaborate(d);
    FAIL("expected duplicate-writer rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("more than one process") != std::string::npos);
  }
}

TEST_CASE("elaborate: bind type mismatch and unknown module are rejected") {
  CHECK_THROWS_AS(elaborate(parse(R"(
    module A { out o: bool; }
    module B { in i: int[0..1]; }
    instance a: A; instance b: B;
    bind a.o -> b.i;
  )")),
                  Error);
  CHECK_THROWS_AS(elaborate(parse("instance x: Nope;")), Error);
}

TEST_CASE("elaborate: assignment operator discipline") {
  // '=' on a signal
  CHECK_THROWS_AS(elaborate(parse(
      "module M { signal s: bool = false; process P { s = true; } } instance m: M;")), Error);
  // '<=' on a var
  CHECK_THROWS_AS(elaborate(parse(
      "module M { var v: bool = false; process P { v <= true; } } instance m: M;")), Error);
  // '<=' on an in port
  CHECK_THROWS_AS(elaborate(parse(
      "module M { in i: bool; process P { i <= true; } } instance m: M;")), Error);
}

TEST_CASE("elaborate: property referencing an undeclared name is rejected") {
  CHECK_THROWS_AS(elaborate(parse(R"(
    module M { signal s: bool = false; process P { s <= true; } }
    instance m: M;
    invariant bad { m.nope }
  )")),
                  Error);
}

TEST_CASE("elaborate: dead code warning names the unreachable location") {
  auto d = parse(R"(
    module M {
      signal s: bool = false;
      process P {
        while true { wait(time 1); }
        s <= true;
      }
    }
    instance m: M;
  )");
  auto e = elaborate(d);
  REQUIRE(!e.warnings.empty());
  CHECK(e.warnings[0].find("dead code") != std::string::npos);
  CHECK(e.warnings[0].find("m.P") != std::string::npos);
}

TEST_CASE("elaborate: value-space bound is the cardinality product") {
  auto d = parse(R"(
    module M { signal s: int[0..3] = 0; var v: bool = false; process P { s <= 1; } }
    instance m: M;
  )");
  auto e = elaborate(d);
  CHECK(e.value_space_bound == 8.0L);  // 4 * 2
  ElabOptions tight;
  tight.value_space_cap = 7.0L;
  CHECK_THROWS_AS(elaborate(d, tight), Error);
}

TEST_CASE("elaborate: enum labels resolve in expressions and initials") {
  auto d = parse(R"(
    module M {
      var st: enum {IDLE, BUSY} = IDLE;
      signal out_busy: bool = false;
      process P {
        st = BUSY;
        if st == BUSY { out_busy <= true; }
      }
    }
    instance m: M;
  )");
  auto e = elaborate(d);
  CHECK(e.vars[0].init == 0);
}

TEST_CASE("round-trip: every corpus file reparses to an identical AST") {
  for (const auto& entry : std::filesystem::directory_iterator(SCVER_CORPUS_DIR)) {
    if (entry.path().extension() != ".scl") continue;
    auto src = testing::read_corpus(entry.path().filename().string());
    auto first = parse(src);
    auto second = parse(pretty_print(first));
    CAPTURE(entry.path().filename().string());
    CHECK(ast::design_equal(first, second));
  }
}

TEST_CASE("determinism: elaboration fingerprint is stable") {
  for (const char* name : {"writer_reader.scl", "ecu_system.scl"}) {
    auto src = testing::read_corpus(name);
    auto a = design_fingerprint(elaborate(parse(src)));
    auto b = design_fingerprint(elaborate(parse(src)));
    CHECK(a == b);
  }
}

TEST_CASE("every corpus model elaborates without dead code") {
  for (const auto& entry : std::filesystem::directory_iterator(SCVER_CORPUS_DIR)) {
    if (entry.path().extension() != ".scl") continue;
    auto e = elaborate(parse(testing::read_corpus(entry.path().filename().string())));
    CAPTURE(entry.path().filename().string());
    CHECK(e.warnings.empty());
  }
}
