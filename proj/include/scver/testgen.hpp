#pragma once

#include <map>
#include <string>
#include <vector>

#include "scver/config.hpp"
#include "scver/explorer.hpp"
#include "scver/json_io.hpp"

namespace scver {

struct CoverageGoal {
  enum class Kind { Statement, Toggle };
  Kind kind = Kind::Statement;
  std::uint32_t process = 0;  // Statement
  std::uint32_t location = 0;
  std::uint32_t signal = 0;  // Toggle
  Value from = 0, to = 0;
  std::string id;  // stable key, e.g. "stmt:a.P:3" or "toggle:a.s:false->true"
};

struct CoverageCriteria {
  bool statements = true;
  bool toggles = true;
};

// Deterministic goal order: processes by elaboration index with locations
// ascending, then signals by table order with value pairs lexicographic.
std::vector<CoverageGoal> enumerate_goals(const ElaboratedDesign& design,
                                          const CoverageCriteria& criteria);

struct AbstractTestCase {
  std::string goal_id;
  // (time, full open-input valuation); first entry is time 0
  std::vector<std::pair<std::uint32_t, std::vector<Value>>> stimulus;
  struct Expectation {
    std::uint32_t time;
    std::uint32_t signal;
    Value value;
  };
  // every signal sampled at every time boundary along the witness
  std::vector<Expectation> expectations;
  std::vector<SchedChoice> schedule;
};

struct UncoveredGoal {
  std::string goal_id;
  std::string reason;  // "unreachable" | "time-bound" | "delta-overflow" | "state-cap"
};

struct TestSuite {
  std::vector<AbstractTestCase> tests;
  std::vector<UncoveredGoal> uncovered;
};

// Shortest witness per goal by BFS over the most-general environment; ties
// broken by canonical successor order. Bound crossings annotate the goals
// they starved instead of aborting the batch.
TestSuite generate_tests(const ElaboratedDesign& design, const std::vector<CoverageGoal>& goals,
                         const CheckOptions& options);

// Replays one test from its stimulus and schedule; checks the goal is
// covered and every expectation holds. Throws Error(Usage) on mismatch.
void replay_test(const ElaboratedDesign& design, const std::vector<CoverageGoal>& goals,
                 const AbstractTestCase& test, const CheckOptions& options);

struct ConcretizationMap {
  struct Channel {
    std::string channel;
    std::map<std::string, std::string> values;  // abstract literal -> rig value
  };
  std::map<std::string, Channel> channels;  // abstract name -> wiring
  std::int64_t time_scale_ns = 1;
  std::vector<std::pair<std::string, std::string>> header;  // rig metadata
};

ConcretizationMap concretization_map_from_json(const Json& j);
Json concretization_map_to_json(const ConcretizationMap& map);

struct ConcreteScripts {
  std::string stimulus_csv;      // time_ns,channel,value
  std::string expectations_csv;  // time_ns,channel,expected
};

// Translates a suite through the map. Fails if any used name or any value
// of a used type is unmapped, listing every gap at once.
ConcreteScripts concretize(const ElaboratedDesign& design, const TestSuite& suite,
                           const ConcretizationMap& map);

Json suite_to_json(const ElaboratedDesign& design, const TestSuite& suite,
                   const RunConfig& config);
TestSuite suite_from_json(const ElaboratedDesign& design, const Json& j);

}  // namespace scver
