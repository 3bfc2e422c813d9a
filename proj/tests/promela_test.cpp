#include <cstdlib>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "scver/json_io.hpp"
#include "scver/parser.hpp"
#include "scver/promela.hpp"
#include "scver/spin.hpp"
#include "scver/util.hpp"
#include "support/oracles.hpp"

using namespace scver;

TEST_CASE("mangling: underscore escaping keeps distinct paths distinct") {
  CHECK(mangle_path("a_b.c") != mangle_path("a.b_c"));
  CHECK(mangle_path("a.b") == "a__b");
  CHECK(mangle_path("a_b.c") == "a_0b__c");
  CHECK(mangle_path("a.b_c") == "a__b_0c");
  CHECK(mangle_path("x__y.z") != mangle_path("x.__y_z"));
}

TEST_CASE("mangling: injective over all corpus names plus adversarial pairs") {
  std::vector<std::string> names = {"a_b.c", "a.b_c", "a_.bc", "a.bc_", "a__.c", "a.__c"};
  for (const auto& entry : std::filesystem::directory_iterator(SCVER_CORPUS_DIR)) {
    if (entry.path().extension() != ".scl") continue;
    auto d = elaborate(parse(testing::read_corpus(entry.path().filename().string())));
    for (const auto& s : d.signals) names.push_back(s.name);
    for (const auto& v : d.vars) names.push_back(v.name);
    for (const auto& i : d.inputs) names.push_back(i.name);
    for (const auto& e : d.events) names.push_back(e.name);
    for (const auto& p : d.processes) names.push_back(p.name);
  }
  std::set<std::string> sources(names.begin(), names.end());
  std::set<std::string> mangled;
  for (const auto& n : sources) mangled.insert(mangle_path(n));
  CHECK(mangled.size() == sources.size());
}

TEST_CASE("fixed mapping: a bool signal emits current/next/written globals") {
  auto d = elaborate(parse(
      "module M { signal s: bool = false; process P { s <= true; } } instance a: M;"));
  std::string pml = emit_promela(d, Limits{}, EnvPolicy::MostGeneral, "x");
  CHECK(pml.find("bool cur__a__s = false;") != std::string::npos);
  CHECK(pml.find("bool nxt__a__s = false;") != std::string::npos);
  CHECK(pml.find("bool wr__a__s = false;") != std::string::npos);
}

TEST_CASE("invariants emit as always-wrapped ltl blocks over mangled names") {
  auto d = elaborate(parse(testing::read_corpus("mutex_flawed.scl")));
  std::string pml = emit_promela(d, Limits{}, EnvPolicy::MostGeneral, "x");
  CHECK(pml.find("ltl mutex { [] (!(((cur__a__in_0cs == true) && (cur__b__in_0cs == true)))) }") !=
        std::string::npos);
}

TEST_CASE("emission is deterministic and matches the golden files") {
  bool regen = std::getenv("SCVER_REGEN") != nullptr;
  for (const auto& entry : std::filesystem::directory_iterator(SCVER_CORPUS_DIR)) {
    if (entry.path().extension() != ".scl") continue;
    std::string name = entry.path().stem().string();
    std::string src = testing::read_corpus(entry.path().filename().string());
    auto d = elaborate(parse(src));
    std::string a = emit_promela(d, Limits{}, EnvPolicy::MostGeneral, sha256_hex(src));
    std::string b = emit_promela(d, Limits{}, EnvPolicy::MostGeneral, sha256_hex(src));
    CHECK(a == b);
    std::string golden_path = std::string(SCVER_GOLDEN_DIR) + "/promela/" + name + ".pml";
    if (regen) {
      write_file(golden_path, a);
    } else {
      CAPTURE(name);
      CHECK(a == read_file(golden_path));
    }
  }
}

TEST_CASE("horizon bounds are compiled into the model") {
  auto d = elaborate(parse(testing::read_corpus("clock.scl")));
  Limits lim;
  lim.max_time = 17;
  lim.max_delta = 5;
  std::string pml = emit_promela(d, lim, EnvPolicy::MostGeneral, "x");
  CHECK(pml.find("#define T_MAX 17") != std::string::npos);
  CHECK(pml.find("#define D_MAX 5") != std::string::npos);
}

TEST_CASE("integer ranges beyond the widest Promela type are rejected") {
  auto d = elaborate(parse("module M { signal s: int[2147483640..2147483650] = 2147483640; "
                           "process P { s <= 2147483641; } } instance m: M;"));
  CHECK_THROWS_AS(emit_promela(d, Limits{}, EnvPolicy::MostGeneral, "x"), Error);
}

TEST_CASE("int stores emit the same wrap arithmetic the kernel uses") {
  auto d = elaborate(parse("module M { var x: int[0..3] = 3; process P { x = x + 1; } } "
                           "instance m: M;"));
  std::string pml = emit_promela(d, Limits{}, EnvPolicy::MostGeneral, "x");
  bool wraps = pml.find("% 4 + 4) % 4") != std::string::npos;
  CHECK(wraps);
}

TEST_CASE("spin crosscheck: a missing toolchain is an infrastructure error") {
  auto src = testing::read_corpus("mutex_flawed.scl");
  auto astd = parse(src);
  auto d = elaborate(astd);
  RunConfig config;
  config.spin_path = "/nonexistent/spin-binary";
  try {
    spin_crosscheck(astd, d, src, config, "mutex", "/tmp/scver-xcheck-test");
    FAIL("expected an infrastructure error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infra);
  }
  // unset path with no SCVER_SPIN is the same class of failure
  if (!std::getenv("SCVER_SPIN")) {
    RunConfig empty;
    try {
      spin_crosscheck(astd, d, src, empty, "mutex", "/tmp/scver-xcheck-test");
      FAIL("expected an infrastructure error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Infra);
    }
  }
}

TEST_CASE("stub-composed designs refuse Promela emission explicitly") {
  auto src = testing::read_corpus("writer_reader.scl");
  auto astd = parse(src);
  ElaboratedDesign d = elaborate(astd);
  // fabricate a design with a stub attachment marker
  d.stubs.emplace_back();
  CHECK_THROWS_AS(emit_promela(d, Limits{}, EnvPolicy::MostGeneral, "x"), Error);
}
