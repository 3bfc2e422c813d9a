#include "scver/testgen.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

#include "scver/kernel.hpp"

namespace scver {

std::vector<CoverageGoal> enumerate_goals(const ElaboratedDesign& design,
                                          const CoverageCriteria& criteria) {
  std::vector<CoverageGoal> goals;
  if (criteria.statements) {
    for (std::uint32_t p = 0; p < design.processes.size(); ++p) {
      for (std::uint32_t l = 0; l < design.processes[p].cfg.size(); ++l) {
        CoverageGoal g;
        g.kind = CoverageGoal::Kind::Statement;
        g.process = p;
        g.location = l;
        g.id = "stmt:" + design.processes[p].name + ":" + std::to_string(l);
        goals.push_back(std::move(g));
      }
    }
  }
  if (criteria.toggles) {
    for (std::uint32_t s = 0; s < design.signals.size(); ++s) {
      const ScalarType& t = design.signals[s].type;
      std::int64_t lo = t.kind == ScalarType::Kind::Int ? t.lo : 0;
      std::int64_t n = t.cardinality();
      for (std::int64_t a = 0; a < n; ++a) {
        for (std::int64_t b = 0; b < n; ++b) {
          if (a == b) continue;
          CoverageGoal g;
          g.kind = CoverageGoal::Kind::Toggle;
          g.signal = s;
          g.from = lo + a;
          g.to = lo + b;
          g.id = "toggle:" + design.signals[s].name + ":" + t.render(g.from) + "->" +
                 t.render(g.to);
          goals.push_back(std::move(g));
        }
      }
    }
  }
  return goals;
}

namespace {

// Goals covered by one edge: statement goals from the run trail, toggle
// goals from signal changes across a delta step.
void edge_events(const ElaboratedDesign& design, const KernelState& from,
                 const SchedChoice& choice, const KernelState& to, const Limits& limits,
                 const std::vector<CoverageGoal>& goals,
                 const std::unordered_map<std::string, std::size_t>& goal_index,
                 std::vector<std::size_t>& out) {
  out.clear();
  if (choice.kind == SchedChoice::Kind::Run) {
    for (std::uint32_t loc : run_trail(design, from, choice.process, limits)) {
      auto it = goal_index.find("stmt:" + design.processes[choice.process].name + ":" +
                                std::to_string(loc));
      if (it != goal_index.end()) out.push_back(it->second);
    }
  } else if (choice.kind == SchedChoice::Kind::DeltaStep) {
    for (std::uint32_t s = 0; s < design.signals.size(); ++s) {
      if (from.sig_cur[s] != to.sig_cur[s]) {
        const ScalarType& t = design.signals[s].type;
        auto it = goal_index.find("toggle:" + design.signals[s].name + ":" +
                                  t.render(from.sig_cur[s]) + "->" + t.render(to.sig_cur[s]));
        if (it != goal_index.end()) out.push_back(it->second);
      }
    }
  }
  (void)goals;
}

}  // namespace

TestSuite generate_tests(const ElaboratedDesign& design, const std::vector<CoverageGoal>& goals,
                         const CheckOptions& options) {
  if (!design.stubs.empty()) {
    fail_semantic("test generation runs on unstubbed designs");
  }
  TestSuite suite;
  std::unordered_map<std::string, std::size_t> goal_index;
  for (std::size_t g = 0; g < goals.size(); ++g) goal_index.emplace(goals[g].id, g);
  std::vector<bool> covered(goals.size(), false);
  std::size_t covered_count = 0;

  struct NodeRec {
    KernelState state;
    std::int64_t parent;  // -1 for roots
    SchedChoice in_choice;
  };
  std::vector<NodeRec> nodes;
  std::unordered_map<std::string, std::size_t> seen;
  std::deque<std::size_t> work;
  std::set<std::string> bounds_hit;

  auto witness_for = [&](std::size_t node, const SchedChoice& final_choice,
                         const KernelState& final_state, std::size_t goal) {
    std::vector<std::size_t> chain;
    for (std::int64_t n = static_cast<std::int64_t>(node); n >= 0; n = nodes[n].parent) {
      chain.push_back(static_cast<std::size_t>(n));
    }
    std::reverse(chain.begin(), chain.end());

    AbstractTestCase test;
    test.goal_id = goals[goal].id;
    const KernelState& init = nodes[chain.front()].state;
    test.stimulus.emplace_back(init.time, init.inputs);
    auto sample = [&](std::uint32_t time, const KernelState& st) {
      for (std::uint32_t s = 0; s < design.signals.size(); ++s) {
        test.expectations.push_back({time, s, st.sig_cur[s]});
      }
    };
    sample(init.time, init);
    for (std::size_t i = 1; i < chain.size(); ++i) {
      const SchedChoice& c = nodes[chain[i]].in_choice;
      test.schedule.push_back(c);
      if (c.kind == SchedChoice::Kind::TimeStep) {
        test.stimulus.emplace_back(nodes[chain[i]].state.time, c.inputs);
        sample(nodes[chain[i]].state.time, nodes[chain[i]].state);
      }
    }
    test.schedule.push_back(final_choice);
    if (final_choice.kind == SchedChoice::Kind::TimeStep) {
      test.stimulus.emplace_back(final_state.time, final_choice.inputs);
      sample(final_state.time, final_state);
    }
    suite.tests.push_back(std::move(test));
  };

  std::vector<std::size_t> events;
  auto process_edge = [&](std::size_t from_node, const SchedChoice& choice,
                          const KernelState& to) {
    edge_events(design, nodes[from_node].state, choice, to, options.limits, goals, goal_index,
                events);
    for (std::size_t g : events) {
      if (!covered[g]) {
        covered[g] = true;
        ++covered_count;
        witness_for(from_node, choice, to, g);
      }
    }
  };

  for (auto& init : initial_states(design, options.env, options.limits)) {
    std::string bytes = init.serialize();
    if (seen.count(bytes)) continue;
    seen.emplace(std::move(bytes), nodes.size());
    nodes.push_back({std::move(init), -1, {}});
    work.push_back(nodes.size() - 1);
  }
  while (!work.empty() && covered_count < goals.size()) {
    if (options.cancel && options.cancel()) {
      throw Error(ErrorKind::Resource, "test generation cancelled by caller");
    }
    std::size_t cur = work.front();
    work.pop_front();
    std::vector<std::pair<SchedChoice, KernelState>> succs;
    try {
      succs = successors(design, nodes[cur].state, options.env, options.limits);
    } catch (const HorizonError& e) {
      bounds_hit.insert(e.which() == HorizonError::Which::DeltaOverflow ? "delta-overflow"
                                                                        : "time-bound");
      continue;
    }
    for (auto& [choice, succ] : succs) {
      process_edge(cur, choice, succ);
      if (covered_count == goals.size()) break;
      std::string bytes = succ.serialize();
      if (seen.count(bytes)) continue;
      if (nodes.size() >= options.state_cap) {
        bounds_hit.insert("state-cap");
        continue;
      }
      seen.emplace(std::move(bytes), nodes.size());
      nodes.push_back({std::move(succ), static_cast<std::int64_t>(cur), choice});
      work.push_back(nodes.size() - 1);
    }
  }

  std::string reason = "unreachable";
  if (!bounds_hit.empty()) {
    reason.clear();
    for (const auto& b : bounds_hit) {
      if (!reason.empty()) reason += "+";
      reason += b;
    }
  }
  for (std::size_t g = 0; g < goals.size(); ++g) {
    if (!covered[g]) suite.uncovered.push_back({goals[g].id, reason});
  }
  // deterministic order: by goal id
  std::sort(suite.tests.begin(), suite.tests.end(),
            [](const AbstractTestCase& a, const AbstractTestCase& b) {
              return a.goal_id < b.goal_id;
            });
  return suite;
}

void replay_test(const ElaboratedDesign& design, const std::vector<CoverageGoal>& goals,
                 const AbstractTestCase& test, const CheckOptions& options) {
  const CoverageGoal* goal = nullptr;
  for (const auto& g : goals) {
    if (g.id == test.goal_id) goal = &g;
  }
  if (!goal) throw Error(ErrorKind::Usage, "unknown goal '" + test.goal_id + "'");
  if (test.stimulus.empty()) throw Error(ErrorKind::Usage, "test has no initial stimulus");

  std::unordered_map<std::string, std::size_t> goal_index{{goal->id, 0}};
  std::vector<CoverageGoal> just_goal{*goal};

  // initial state: defaults overridden by the t=0 stimulus entry
  std::vector<KernelState> inits = initial_states(design, EnvPolicy::ClosedDefault, options.limits);
  if (inits.size() != 1) throw Error(ErrorKind::Usage, "ambiguous initial state");
  KernelState st = std::move(inits[0]);
  if (test.stimulus[0].first != 0 || test.stimulus[0].second.size() != design.inputs.size()) {
    throw Error(ErrorKind::Usage, "malformed t=0 stimulus entry");
  }
  st.inputs = test.stimulus[0].second;

  std::map<std::pair<std::uint32_t, std::uint32_t>, Value> boundary_values;  // (time, signal)
  auto sample = [&](const KernelState& s) {
    for (std::uint32_t sig = 0; sig < design.signals.size(); ++sig) {
      boundary_values[{s.time, sig}] = s.sig_cur[sig];
    }
  };
  sample(st);

  bool goal_covered = false;
  std::vector<std::size_t> events;
  for (std::size_t i = 0; i < test.schedule.size(); ++i) {
    auto succs = successors(design, st, EnvPolicy::MostGeneral, options.limits);
    const std::pair<SchedChoice, KernelState>* hit = nullptr;
    for (const auto& cand : succs) {
      if (cand.first == test.schedule[i]) {
        hit = &cand;
        break;
      }
    }
    if (!hit) {
      throw Error(ErrorKind::Usage,
                  "schedule step " + std::to_string(i) + " is not a legal successor");
    }
    edge_events(design, st, hit->first, hit->second, options.limits, just_goal, goal_index,
                events);
    if (!events.empty()) goal_covered = true;
    st = hit->second;
    if (hit->first.kind == SchedChoice::Kind::TimeStep) sample(st);
  }
  if (!goal_covered) {
    throw Error(ErrorKind::Usage, "replay did not cover goal '" + test.goal_id + "'");
  }
  for (const auto& e : test.expectations) {
    auto it = boundary_values.find({e.time, e.signal});
    if (it == boundary_values.end()) {
      throw Error(ErrorKind::Usage, "expectation at t=" + std::to_string(e.time) +
                                        " has no matching boundary in the replay");
    }
    if (it->second != e.value) {
      throw Error(ErrorKind::Usage,
                  "expectation mismatch at t=" + std::to_string(e.time) + " on '" +
                      design.signals[e.signal].name + "'");
    }
  }
}

ConcretizationMap concretization_map_from_json(const Json& j) {
  ConcretizationMap map;
  if (j.contains("time_scale_ns")) map.time_scale_ns = j["time_scale_ns"].get<std::int64_t>();
  if (map.time_scale_ns <= 0) throw Error(ErrorKind::Usage, "time_scale_ns must be positive");
  if (j.contains("header")) {
    for (const auto& [k, v] : j["header"].items()) {
      map.header.emplace_back(k, v.get<std::string>());
    }
  }
  if (!j.contains("channels") || !j["channels"].is_object()) {
    throw Error(ErrorKind::Usage, "concretization map needs a 'channels' object");
  }
  for (const auto& [name, spec] : j["channels"].items()) {
    ConcretizationMap::Channel ch;
    ch.channel = spec.at("channel").get<std::string>();
    for (const auto& [av, cv] : spec.at("values").items()) {
      ch.values.emplace(av, cv.get<std::string>());
    }
    map.channels.emplace(name, std::move(ch));
  }
  return map;
}

Json concretization_map_to_json(const ConcretizationMap& map) {
  Json j;
  j["format_version"] = 1;
  Json header = Json::object();
  for (const auto& [k, v] : map.header) header[k] = v;
  j["header"] = std::move(header);
  j["time_scale_ns"] = map.time_scale_ns;
  Json channels = Json::object();
  for (const auto& [name, ch] : map.channels) {
    Json c;
    c["channel"] = ch.channel;
    Json values = Json::object();
    for (const auto& [av, cv] : ch.values) values[av] = cv;
    c["values"] = std::move(values);
    channels[name] = std::move(c);
  }
  j["channels"] = std::move(channels);
  return j;
}

ConcreteScripts concretize(const ElaboratedDesign& design, const TestSuite& suite,
                           const ConcretizationMap& map) {
  // names used by the suite: all inputs (stimulus rows are total valuations)
  // when any stimulus exists, all signals referenced by expectations
  std::set<std::string> used;
  std::set<std::uint32_t> used_signals;
  bool any_stimulus_inputs = false;
  for (const auto& t : suite.tests) {
    if (!t.stimulus.empty() && !design.inputs.empty()) any_stimulus_inputs = true;
    for (const auto& e : t.expectations) used_signals.insert(e.signal);
  }
  if (any_stimulus_inputs) {
    for (const auto& i : design.inputs) used.insert(i.name);
  }
  for (std::uint32_t s : used_signals) used.insert(design.signals[s].name);

  std::vector<std::string> missing;
  std::vector<std::string> gaps;
  auto type_of = [&](const std::string& name) -> const ScalarType& {
    for (const auto& i : design.inputs) {
      if (i.name == name) return i.type;
    }
    for (const auto& s : design.signals) {
      if (s.name == name) return s.type;
    }
    fail_semantic("no such observable '" + name + "'");
  };
  for (const auto& name : used) {
    auto it = map.channels.find(name);
    if (it == map.channels.end()) {
      missing.push_back(name);
      continue;
    }
    const ScalarType& t = type_of(name);
    std::int64_t lo = t.kind == ScalarType::Kind::Int ? t.lo : 0;
    for (std::int64_t v = 0; v < t.cardinality(); ++v) {
      std::string lit = t.render(lo + v);
      if (!it->second.values.count(lit)) gaps.push_back(name + "=" + lit);
    }
  }
  if (!missing.empty() || !gaps.empty()) {
    std::ostringstream os;
    os << "concretization map incomplete;";
    if (!missing.empty()) {
      os << " unmapped names: {";
      for (std::size_t i = 0; i < missing.size(); ++i) os << (i ? ", " : "") << missing[i];
      os << "}";
    }
    if (!gaps.empty()) {
      os << " missing value translations: {";
      for (std::size_t i = 0; i < gaps.size(); ++i) os << (i ? ", " : "") << gaps[i];
      os << "}";
    }
    throw Error(ErrorKind::Usage, os.str());
  }

  ConcreteScripts out;
  for (const auto& t : suite.tests) {
    for (const auto& [time, valuation] : t.stimulus) {
      for (std::size_t i = 0; i < design.inputs.size(); ++i) {
        const auto& ch = map.channels.at(design.inputs[i].name);
        out.stimulus_csv += std::to_string(static_cast<std::int64_t>(time) * map.time_scale_ns) +
                            "," + ch.channel + "," +
                            ch.values.at(design.inputs[i].type.render(valuation[i])) + "\n";
      }
    }
    for (const auto& e : t.expectations) {
      const auto& ch = map.channels.at(design.signals[e.signal].name);
      out.expectations_csv += std::to_string(static_cast<std::int64_t>(e.time) * map.time_scale_ns) +
                              "," + ch.channel + "," +
                              ch.values.at(design.signals[e.signal].type.render(e.value)) + "\n";
    }
  }
  return out;
}

Json suite_to_json(const ElaboratedDesign& design, const TestSuite& suite,
                   const RunConfig& config) {
  Json j;
  j["format_version"] = 1;
  j["config"] = config_to_json(config);
  Json tests = Json::array();
  for (const auto& t : suite.tests) {
    Json tj;
    tj["goal"] = t.goal_id;
    Json stim = Json::array();
    for (const auto& [time, valuation] : t.stimulus) {
      Json entry;
      entry["time"] = time;
      Json inputs = Json::object();
      for (std::size_t i = 0; i < design.inputs.size(); ++i) {
        inputs[design.inputs[i].name] = value_to_json(design.inputs[i].type, valuation[i]);
      }
      entry["inputs"] = std::move(inputs);
      stim.push_back(std::move(entry));
    }
    tj["stimulus"] = std::move(stim);
    Json exps = Json::array();
    for (const auto& e : t.expectations) {
      Json ej;
      ej["time"] = e.time;
      ej["signal"] = design.signals[e.signal].name;
      ej["value"] = value_to_json(design.signals[e.signal].type, e.value);
      exps.push_back(std::move(ej));
    }
    tj["expectations"] = std::move(exps);
    Json sched = Json::array();
    for (const auto& c : t.schedule) sched.push_back(choice_to_json(design, c));
    tj["schedule"] = std::move(sched);
    tests.push_back(std::move(tj));
  }
  j["tests"] = std::move(tests);
  Json uncovered = Json::array();
  for (const auto& u : suite.uncovered) {
    Json uj;
    uj["goal"] = u.goal_id;
    uj["reason"] = u.reason;
    uncovered.push_back(std::move(uj));
  }
  j["uncovered"] = std::move(uncovered);
  return j;
}

TestSuite suite_from_json(const ElaboratedDesign& design, const Json& j) {
  TestSuite suite;
  for (const Json& tj : j.at("tests")) {
    AbstractTestCase t;
    t.goal_id = tj.at("goal").get<std::string>();
    for (const Json& sj : tj.at("stimulus")) {
      std::vector<Value> valuation(design.inputs.size());
      for (std::size_t i = 0; i < design.inputs.size(); ++i) {
        valuation[i] = value_from_json(design.inputs[i].type,
                                       sj.at("inputs").at(design.inputs[i].name),
                                       design.inputs[i].name);
      }
      t.stimulus.emplace_back(sj.at("time").get<std::uint32_t>(), std::move(valuation));
    }
    for (const Json& ej : tj.at("expectations")) {
      AbstractTestCase::Expectation e;
      e.time = ej.at("time").get<std::uint32_t>();
      const std::string name = ej.at("signal").get<std::string>();
      bool found = false;
      for (std::uint32_t s = 0; s < design.signals.size(); ++s) {
        if (design.signals[s].name == name) {
          e.signal = s;
          found = true;
          break;
        }
      }
      if (!found) throw Error(ErrorKind::Usage, "unknown signal '" + name + "' in tests file");
      e.value = value_from_json(design.signals[e.signal].type, ej.at("value"), name);
      t.expectations.push_back(e);
    }
    for (const Json& cj : tj.at("schedule")) t.schedule.push_back(choice_from_json(design, cj));
    suite.tests.push_back(std::move(t));
  }
  if (j.contains("uncovered")) {
    for (const Json& uj : j.at("uncovered")) {
      suite.uncovered.push_back(
          {uj.at("goal").get<std::string>(), uj.at("reason").get<std::string>()});
    }
  }
  return suite;
}

}  // namespace scver
