#include <cstdlib>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "doctest.h"
#include "scver/parser.hpp"
#include "scver/testgen.hpp"
#include "support/oracles.hpp"

using namespace scver;

namespace {

struct Model {
  ast::DesignAst ast;
  ElaboratedDesign design;
};

Model load(const std::string& name) {
  Model m;
  m.ast = parse(testing::read_corpus(name));
  m.design = elaborate(m.ast);
  return m;
}

// Independent shortest-witness oracle: BFS depth at which each goal's
// covering edge first appears.
std::unordered_map<std::string, std::size_t> bfs_depths(const ElaboratedDesign& design,
                                                        const std::vector<CoverageGoal>& goals,
                                                        const CheckOptions& opts) {
  std::unordered_map<std::string, std::size_t> depth_of;
  std::unordered_map<std::string, std::size_t> goal_index;
  for (std::size_t g = 0; g < goals.size(); ++g) goal_index.emplace(goals[g].id, g);
  struct Node {
    KernelState st;
    std::size_t depth;
  };
  std::unordered_set<std::string> seen;
  std::deque<Node> work;
  for (auto& init : initial_states(design, opts.env, opts.limits)) {
    if (seen.insert(init.serialize()).second) work.push_back({init, 0});
  }
  while (!work.empty()) {
    Node cur = std::move(work.front());
    work.pop_front();
    std::vector<std::pair<SchedChoice, KernelState>> succs;
    try {
      succs = successors(design, cur.st, opts.env, opts.limits);
    } catch (const HorizonError&) {
      continue;
    }
    for (auto& [choice, succ] : succs) {
      if (choice.kind == SchedChoice::Kind::Run) {
        for (std::uint32_t loc : run_trail(design, cur.st, choice.process, opts.limits)) {
          std::string id =
              "stmt:" + design.processes[choice.process].name + ":" + std::to_string(loc);
          if (goal_index.count(id) && !depth_of.count(id)) depth_of[id] = cur.depth + 1;
        }
      } else if (choice.kind == SchedChoice::Kind::DeltaStep) {
        for (std::uint32_t s = 0; s < design.signals.size(); ++s) {
          if (cur.st.sig_cur[s] != succ.sig_cur[s]) {
            const ScalarType& t = design.signals[s].type;
            std::string id = "toggle:" + design.signals[s].name + ":" +
                             t.render(cur.st.sig_cur[s]) + "->" + t.render(succ.sig_cur[s]);
            if (goal_index.count(id) && !depth_of.count(id)) depth_of[id] = cur.depth + 1;
          }
        }
      }
      if (seen.insert(succ.serialize()).second) work.push_back({succ, cur.depth + 1});
    }
  }
  return depth_of;
}

}  // namespace

TEST_CASE("goal enumeration: one per location, ordered value pairs per signal") {
  auto m = load("writer_reader.scl");
  CoverageCriteria only_stmt{true, false};
  auto stmt_goals = enumerate_goals(m.design, only_stmt);
  std::size_t locations = 0;
  for (const auto& p : m.design.processes) locations += p.cfg.size();
  CHECK(stmt_goals.size() == locations);

  CoverageCriteria only_toggles{false, true};
  auto toggle_goals = enumerate_goals(m.design, only_toggles);
  CHECK(toggle_goals.size() == 2 * m.design.signals.size());  // bool signals: 2 ordered pairs

  CHECK(enumerate_goals(m.design, {false, false}).empty());

  // deterministic order and unique ids
  auto again = enumerate_goals(m.design, {true, true});
  auto again2 = enumerate_goals(m.design, {true, true});
  REQUIRE(again.size() == again2.size());
  std::set<std::string> ids;
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].id == again2[i].id);
    ids.insert(again[i].id);
  }
  CHECK(ids.size() == again.size());
}

TEST_CASE("entry locations are covered by the first run choice") {
  auto m = load("writer_reader.scl");
  CheckOptions opts;
  auto goals = enumerate_goals(m.design, {true, false});
  TestSuite suite = generate_tests(m.design, goals, opts);
  for (const auto& t : suite.tests) {
    if (t.goal_id.find(":0") != std::string::npos &&
        t.goal_id.rfind("stmt:", 0) == 0) {
      CHECK(t.schedule.size() == 1);  // one run covers the entry
    }
  }
}

TEST_CASE("generated witnesses cover their goals and replay with expectations") {
  for (const char* name : {"writer_reader.scl", "mutex_flawed.scl", "lost_wakeup.scl",
                           "ecu_sw_ideal.scl"}) {
    auto m = load(name);
    CheckOptions opts;
    auto goals = enumerate_goals(m.design, {true, true});
    TestSuite suite = generate_tests(m.design, goals, opts);
    CAPTURE(name);
    for (const auto& t : suite.tests) {
      CAPTURE(t.goal_id);
      CHECK_NOTHROW(replay_test(m.design, goals, t, opts));
    }
  }
}

TEST_CASE("witness lengths equal the BFS oracle's first-coverage depth") {
  for (const char* name : {"writer_reader.scl", "mutex_flawed.scl", "ecu_sw_ideal.scl"}) {
    auto m = load(name);
    CheckOptions opts;
    auto goals = enumerate_goals(m.design, {true, true});
    TestSuite suite = generate_tests(m.design, goals, opts);
    auto oracle = bfs_depths(m.design, goals, opts);
    CAPTURE(name);
    for (const auto& t : suite.tests) {
      REQUIRE(oracle.count(t.goal_id));
      CAPTURE(t.goal_id);
      CHECK(t.schedule.size() == oracle.at(t.goal_id));
    }
  }
}

TEST_CASE("statically dead code is reported unreachable") {
  auto m = Model{};
  m.ast = parse(R"(
    module M {
      signal s: bool = false;
      process P {
        if false { s <= true; }
        wait(time 1);
      }
    }
    instance m: M;
  )");
  m.design = elaborate(m.ast);
  CheckOptions opts;
  auto goals = enumerate_goals(m.design, {true, true});
  TestSuite suite = generate_tests(m.design, goals, opts);
  bool found = false;
  for (const auto& u : suite.uncovered) {
    if (u.goal_id.rfind("stmt:", 0) == 0 && u.reason == "unreachable") found = true;
  }
  CHECK(found);
}

TEST_CASE("a bound hit annotates uncovered goals instead of aborting") {
  auto m = load("clock.scl");
  CheckOptions opts;
  opts.limits.max_time = 5;
  auto goals = enumerate_goals(m.design, {true, true});
  TestSuite suite = generate_tests(m.design, goals, opts);
  // the toggles are covered quickly; anything uncovered names the bound
  for (const auto& u : suite.uncovered) {
    CHECK(u.reason == "time-bound");
  }
  CHECK(!suite.tests.empty());
}

TEST_CASE("concretize: direct mapping, time scaling, and csv shape") {
  auto m = load("writer_reader.scl");
  CheckOptions opts;
  auto goals = enumerate_goals(m.design, {true, true});
  TestSuite suite = generate_tests(m.design, goals, opts);
  ConcretizationMap map = concretization_map_from_json(
      parse_json_file(testing::corpus_path("maps/writer_reader.map.json")));
  ConcreteScripts scripts = concretize(m.design, suite, map);
  // expectations reference the mapped channel names
  CHECK(scripts.expectations_csv.find("CH_W_S,") != std::string::npos);
  for (char c : scripts.expectations_csv) CHECK(c != '\r');
  // closed design: no stimulus rows
  CHECK(scripts.stimulus_csv.empty());

  // a witness that crosses a time boundary emits scaled expectation times
  auto sw = load("ecu_sw_ideal.scl");
  auto sw_goals = enumerate_goals(sw.design, {true, true});
  TestSuite sw_suite = generate_tests(sw.design, sw_goals, opts);
  ConcretizationMap sw_map = concretization_map_from_json(
      parse_json_file(testing::corpus_path("maps/ecu_sw_ideal.map.json")));
  ConcreteScripts sw_scripts = concretize(sw.design, sw_suite, sw_map);
  CHECK(sw_scripts.expectations_csv.find("1000,") != std::string::npos);  // t=1 scaled
}

TEST_CASE("concretize: open inputs produce stimulus rows") {
  auto m = load("input_branch.scl");
  CheckOptions opts;
  auto goals = enumerate_goals(m.design, {true, true});
  TestSuite suite = generate_tests(m.design, goals, opts);
  ConcretizationMap map = concretization_map_from_json(
      parse_json_file(testing::corpus_path("maps/input_branch.map.json")));
  ConcreteScripts scripts = concretize(m.design, suite, map);
  CHECK(scripts.stimulus_csv.find("0,CH_M_X,") != std::string::npos);
}

TEST_CASE("concretize: every unmapped name is listed, and nothing is emitted") {
  auto m = load("mutex_flawed.scl");
  CheckOptions opts;
  auto goals = enumerate_goals(m.design, {false, true});
  TestSuite suite = generate_tests(m.design, goals, opts);
  ConcretizationMap map;  // empty
  map.time_scale_ns = 1;
  try {
    concretize(m.design, suite, map);
    FAIL("expected a mapping error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(e.kind() == ErrorKind::Usage);
    for (const char* name : {"a.mine", "a.in_cs", "b.mine", "b.in_cs"}) {
      CHECK(msg.find(name) != std::string::npos);
    }
  }
}

TEST_CASE("concretize: value-table gaps are reported by name and value") {
  auto m = load("writer_reader.scl");
  CheckOptions opts;
  auto goals = enumerate_goals(m.design, {false, true});
  TestSuite suite = generate_tests(m.design, goals, opts);
  ConcretizationMap map;
  map.time_scale_ns = 1;
  map.channels["w.s"] = {"CH1", {{"false", "0"}}};  // true missing
  map.channels["r.seen"] = {"CH2", {{"false", "0"}, {"true", "1"}}};
  try {
    concretize(m.design, suite, map);
    FAIL("expected a gap error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("w.s=true") != std::string::npos);
  }
}

TEST_CASE("suite JSON round-trips") {
  auto m = load("ecu_sw_ideal.scl");
  CheckOptions opts;
  auto goals = enumerate_goals(m.design, {true, true});
  TestSuite suite = generate_tests(m.design, goals, opts);
  RunConfig config;
  Json j = suite_to_json(m.design, suite, config);
  TestSuite back = suite_from_json(m.design, j);
  CHECK(suite_to_json(m.design, back, config).dump() == j.dump());
}

TEST_CASE("reuse gap: system-level tests are not reusable on components") {
  // the system witness samples arbiter signals that no single component
  // model declares, so its expectations cannot even be resolved there
  auto sys = load("ecu_system.scl");
  CheckOptions opts;
  auto goals = enumerate_goals(sys.design, {true, true});
  TestSuite suite = generate_tests(sys.design, goals, opts);
  const AbstractTestCase* sw_goal_test = nullptr;
  for (const auto& t : suite.tests) {
    if (t.goal_id.rfind("stmt:sw.Main", 0) == 0) sw_goal_test = &t;
  }
  REQUIRE(sw_goal_test != nullptr);
  ElabOptions restrict_sw;
  restrict_sw.restrict_to_instance = "sw";
  ElaboratedDesign sw_alone = elaborate(sys.ast, restrict_sw);
  std::set<std::string> component_signals;
  for (const auto& s : sw_alone.signals) component_signals.insert(s.name);
  bool references_foreign = false;
  for (const auto& e : sw_goal_test->expectations) {
    if (!component_signals.count(sys.design.signals[e.signal].name)) references_foreign = true;
  }
  CHECK(references_foreign);
  // and the component-level witness for the same local goal needs input
  // stimulus the closed system never supplies
  auto sw_goals = enumerate_goals(sw_alone, {true, false});
  TestSuite sw_suite = generate_tests(sw_alone, sw_goals, opts);
  bool some_nonempty_stimulus = false;
  for (const auto& t : sw_suite.tests) {
    for (const auto& [time, values] : t.stimulus) {
      if (!values.empty()) some_nonempty_stimulus = true;
    }
  }
  CHECK(some_nonempty_stimulus);
  CHECK(sys.design.inputs.empty());  // the system itself is closed
}
