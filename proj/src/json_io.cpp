#include "scver/json_io.hpp"

#include <fstream>
#include <sstream>

#include "scver/util.hpp"

namespace scver {

Json value_to_json(const ScalarType& type, Value v) {
  switch (type.kind) {
    case ScalarType::Kind::Bool: return v != 0;
    case ScalarType::Kind::Int: return v;
    case ScalarType::Kind::Enum: return type.render(v);
  }
  return nullptr;
}

Value value_from_json(const ScalarType& type, const Json& j, const std::string& what) {
  switch (type.kind) {
    case ScalarType::Kind::Bool:
      if (!j.is_boolean()) throw Error(ErrorKind::Usage, what + ": expected a boolean");
      return j.get<bool>() ? 1 : 0;
    case ScalarType::Kind::Int: {
      if (!j.is_number_integer()) throw Error(ErrorKind::Usage, what + ": expected an integer");
      Value v = j.get<std::int64_t>();
      if (!type.contains(v)) {
        throw Error(ErrorKind::Usage,
                    what + ": value " + std::to_string(v) + " outside " + type.str());
      }
      return v;
    }
    case ScalarType::Kind::Enum: {
      if (!j.is_string()) throw Error(ErrorKind::Usage, what + ": expected an enum label");
      const std::string label = j.get<std::string>();
      for (std::size_t i = 0; i < type.labels.size(); ++i) {
        if (type.labels[i] == label) return static_cast<Value>(i);
      }
      throw Error(ErrorKind::Usage, what + ": '" + label + "' is not a label of " + type.str());
    }
  }
  throw Error(ErrorKind::Usage, what + ": bad value");
}

Json config_to_json(const RunConfig& config) {
  Json j;
  j["max_time"] = config.max_time;
  j["max_delta"] = config.max_delta;
  j["state_cap"] = config.state_cap;
  j["env"] = config.env == EnvPolicy::MostGeneral ? "most-general" : "closed-default";
  j["check_deadlock"] = config.check_deadlock;
  return j;
}

Json observation_to_json(const ElaboratedDesign& design, const Observation& obs) {
  Json j = Json::object();
  for (std::size_t s = 0; s < design.signals.size(); ++s) {
    j[design.signals[s].name] = value_to_json(design.signals[s].type, obs.signals[s]);
  }
  for (std::size_t i = 0; i < design.inputs.size(); ++i) {
    j[design.inputs[i].name] = value_to_json(design.inputs[i].type, obs.inputs[i]);
  }
  return j;
}

Json choice_to_json(const ElaboratedDesign& design, const SchedChoice& choice) {
  Json j;
  switch (choice.kind) {
    case SchedChoice::Kind::Run:
      j["kind"] = "run";
      j["process"] = design.processes[choice.process].name;
      break;
    case SchedChoice::Kind::DeltaStep:
      j["kind"] = "delta";
      break;
    case SchedChoice::Kind::TimeStep: {
      j["kind"] = "time";
      Json inputs = Json::object();
      for (std::size_t i = 0; i < design.inputs.size(); ++i) {
        inputs[design.inputs[i].name] = value_to_json(design.inputs[i].type, choice.inputs[i]);
      }
      j["inputs"] = std::move(inputs);
      break;
    }
    case SchedChoice::Kind::Stutter:
      j["kind"] = "stutter";
      break;
  }
  if (!choice.stub_letters.empty()) j["stub_letters"] = choice.stub_letters;
  return j;
}

SchedChoice choice_from_json(const ElaboratedDesign& design, const Json& j) {
  SchedChoice c;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "run") {
    c.kind = SchedChoice::Kind::Run;
    const std::string name = j.at("process").get<std::string>();
    bool found = false;
    for (std::uint32_t p = 0; p < design.processes.size(); ++p) {
      if (design.processes[p].name == name) {
        c.process = p;
        found = true;
        break;
      }
    }
    if (!found) throw Error(ErrorKind::Usage, "unknown process '" + name + "' in trace");
  } else if (kind == "delta") {
    c.kind = SchedChoice::Kind::DeltaStep;
  } else if (kind == "time") {
    c.kind = SchedChoice::Kind::TimeStep;
    c.inputs.resize(design.inputs.size());
    const Json& inputs = j.at("inputs");
    for (std::size_t i = 0; i < design.inputs.size(); ++i) {
      c.inputs[i] = value_from_json(design.inputs[i].type, inputs.at(design.inputs[i].name),
                                    design.inputs[i].name);
    }
  } else if (kind == "stutter") {
    c.kind = SchedChoice::Kind::Stutter;
  } else {
    throw Error(ErrorKind::Usage, "unknown choice kind '" + kind + "' in trace");
  }
  if (j.contains("stub_letters")) {
    c.stub_letters = j.at("stub_letters").get<std::vector<std::uint32_t>>();
  }
  return c;
}

Json trace_to_json(const ElaboratedDesign& design, const Trace& trace) {
  Json j;
  j["initial_state"] = to_hex(trace.initial_state);
  Json init;
  init["time"] = trace.initial_obs.time;
  init["delta"] = 0;
  init["phase"] = phase_name(trace.initial_obs.phase);
  init["observations"] = observation_to_json(design, trace.initial_obs);
  j["initial"] = std::move(init);
  Json steps = Json::array();
  for (const auto& s : trace.steps) {
    Json step;
    step["choice"] = choice_to_json(design, s.choice);
    step["time"] = s.time;
    step["delta"] = s.delta;
    step["phase"] = phase_name(s.obs.phase);
    step["observations"] = observation_to_json(design, s.obs);
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  if (trace.loop_start) j["loop_start"] = *trace.loop_start;
  return j;
}

namespace {

Observation observation_from_json(const ElaboratedDesign& design, const Json& obs_j,
                                  std::uint32_t time, const std::string& phase) {
  Observation obs;
  obs.time = time;
  if (phase == "time-boundary") {
    obs.phase = Phase::TimeBoundary;
  } else if (phase == "delta-boundary") {
    obs.phase = Phase::DeltaBoundary;
  } else if (phase == "terminal") {
    obs.phase = Phase::Terminal;
  } else {
    throw Error(ErrorKind::Usage, "unknown phase tag '" + phase + "'");
  }
  obs.signals.resize(design.signals.size());
  for (std::size_t s = 0; s < design.signals.size(); ++s) {
    obs.signals[s] = value_from_json(design.signals[s].type, obs_j.at(design.signals[s].name),
                                     design.signals[s].name);
  }
  obs.inputs.resize(design.inputs.size());
  for (std::size_t i = 0; i < design.inputs.size(); ++i) {
    obs.inputs[i] = value_from_json(design.inputs[i].type, obs_j.at(design.inputs[i].name),
                                    design.inputs[i].name);
  }
  return obs;
}

}  // namespace

Trace trace_from_json(const ElaboratedDesign& design, const Json& j) {
  Trace t;
  t.initial_state = from_hex(j.at("initial_state").get<std::string>());
  const Json& init = j.at("initial");
  t.initial_obs = observation_from_json(design, init.at("observations"),
                                        init.at("time").get<std::uint32_t>(),
                                        init.at("phase").get<std::string>());
  for (const Json& step : j.at("steps")) {
    TraceStep s;
    s.choice = choice_from_json(design, step.at("choice"));
    s.time = step.at("time").get<std::uint32_t>();
    s.delta = step.at("delta").get<std::uint32_t>();
    s.obs = observation_from_json(design, step.at("observations"), s.time,
                                  step.at("phase").get<std::string>());
    t.steps.push_back(std::move(s));
  }
  if (j.contains("loop_start")) t.loop_start = j.at("loop_start").get<std::uint32_t>();
  return t;
}

Json verdict_to_json(const ElaboratedDesign& design, const Verdict& verdict,
                     const RunConfig& config) {
  Json j;
  j["tool"] = "scver";
  j["version"] = kToolVersion;
  j["status"] = verdict_status_name(verdict.status);
  j["property"] = verdict.property;
  j["message"] = verdict.message;
  Json stats;
  stats["states_stored"] = verdict.stats.states_stored;
  stats["transitions"] = verdict.stats.transitions;
  stats["max_depth"] = verdict.stats.max_depth;
  stats["steps"] = verdict.stats.steps;
  j["stats"] = std::move(stats);
  j["config"] = config_to_json(config);
  if (verdict.counterexample) {
    j["counterexample"] = trace_to_json(design, *verdict.counterexample);
  }
  return j;
}

namespace {

Json type_to_json(const ScalarType& t) {
  switch (t.kind) {
    case ScalarType::Kind::Bool: return "bool";
    case ScalarType::Kind::Int: {
      Json j;
      j["int"] = Json::array({t.lo, t.hi});
      return j;
    }
    case ScalarType::Kind::Enum: {
      Json j;
      j["enum"] = t.labels;
      return j;
    }
  }
  return nullptr;
}

ScalarType type_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "bool") return ScalarType::boolean();
  if (j.is_object() && j.contains("int")) {
    return ScalarType::bounded(j["int"].at(0).get<std::int64_t>(),
                               j["int"].at(1).get<std::int64_t>());
  }
  if (j.is_object() && j.contains("enum")) {
    return ScalarType::enumeration(j["enum"].get<std::vector<std::string>>());
  }
  throw Error(ErrorKind::Usage, "bad type in stub file");
}

}  // namespace

Json stub_to_json(const StubAutomaton& stub) {
  Json j;
  j["format_version"] = StubAutomaton::kFormatVersion;
  Json meta;
  meta["component"] = stub.component_instance;
  meta["module"] = stub.module_name;
  meta["depth_k"] = stub.depth_k;
  meta["history_h"] = stub.history_h;
  meta["toolchain_version"] = stub.toolchain_version;
  meta["alphabet_fingerprint"] = stub.alphabet_fingerprint;
  j["metadata"] = std::move(meta);
  Json ports = Json::array();
  for (std::size_t p = 0; p < stub.port_names.size(); ++p) {
    Json port;
    port["name"] = stub.port_names[p];
    port["dir"] = stub.port_is_in[p] ? "in" : "out";
    port["type"] = type_to_json(stub.port_types[p]);
    ports.push_back(std::move(port));
  }
  Json alphabet;
  alphabet["ports"] = std::move(ports);
  Json letters = Json::array();
  for (const auto& letter : stub.letters) {
    Json l = Json::array();
    for (std::size_t p = 0; p < letter.port_values.size(); ++p) {
      l.push_back(value_to_json(stub.port_types[p], letter.port_values[p]));
    }
    letters.push_back(std::move(l));
  }
  alphabet["letters"] = std::move(letters);
  j["alphabet"] = std::move(alphabet);
  Json states = Json::array();
  for (std::size_t s = 0; s < stub.state_grams.size(); ++s) {
    Json st;
    st["id"] = s;
    st["history"] = stub.state_grams[s];
    states.push_back(std::move(st));
  }
  j["states"] = std::move(states);
  Json initial = Json::array();
  for (const auto& [letter, state] : stub.initial) {
    Json e;
    e["letter"] = letter;
    e["state"] = state;
    initial.push_back(std::move(e));
  }
  j["initial"] = std::move(initial);
  Json trans = Json::array();
  for (std::size_t s = 0; s < stub.transitions.size(); ++s) {
    for (const auto& [letter, target] : stub.transitions[s]) {
      Json e;
      e["from"] = s;
      e["letter"] = letter;
      e["to"] = target;
      trans.push_back(std::move(e));
    }
  }
  j["transitions"] = std::move(trans);
  return j;
}

StubAutomaton stub_from_json(const Json& j) {
  if (!j.contains("format_version") || j["format_version"].get<int>() != StubAutomaton::kFormatVersion) {
    throw Error(ErrorKind::Usage, "unsupported stub format_version");
  }
  StubAutomaton stub;
  const Json& meta = j.at("metadata");
  stub.component_instance = meta.at("component").get<std::string>();
  stub.module_name = meta.at("module").get<std::string>();
  stub.depth_k = meta.at("depth_k").get<std::uint32_t>();
  stub.history_h = meta.at("history_h").get<std::uint32_t>();
  stub.toolchain_version = meta.at("toolchain_version").get<std::string>();
  stub.alphabet_fingerprint = meta.at("alphabet_fingerprint").get<std::string>();
  for (const Json& port : j.at("alphabet").at("ports")) {
    stub.port_names.push_back(port.at("name").get<std::string>());
    stub.port_is_in.push_back(port.at("dir").get<std::string>() == "in");
    stub.port_types.push_back(type_from_json(port.at("type")));
  }
  for (const Json& l : j.at("alphabet").at("letters")) {
    if (l.size() != stub.port_names.size()) {
      throw Error(ErrorKind::Usage, "stub letter width does not match the alphabet");
    }
    StubLetter letter;
    for (std::size_t p = 0; p < stub.port_types.size(); ++p) {
      letter.port_values.push_back(
          value_from_json(stub.port_types[p], l.at(p), "letter value for " + stub.port_names[p]));
    }
    stub.letters.push_back(std::move(letter));
  }
  stub.state_grams.resize(j.at("states").size());
  for (const Json& st : j.at("states")) {
    std::size_t id = st.at("id").get<std::size_t>();
    if (id >= stub.state_grams.size()) throw Error(ErrorKind::Usage, "bad stub state id");
    stub.state_grams[id] = st.at("history").get<std::vector<std::uint32_t>>();
  }
  stub.transitions.resize(stub.state_grams.size());
  auto check_letter = [&](std::uint32_t l) {
    if (l >= stub.letters.size()) throw Error(ErrorKind::Usage, "bad letter id in stub");
  };
  auto check_state = [&](std::uint32_t s) {
    if (s >= stub.state_grams.size()) throw Error(ErrorKind::Usage, "bad state id in stub");
  };
  for (const Json& e : j.at("initial")) {
    std::uint32_t letter = e.at("letter").get<std::uint32_t>();
    std::uint32_t state = e.at("state").get<std::uint32_t>();
    check_letter(letter);
    check_state(state);
    stub.initial[letter] = state;
  }
  for (const Json& e : j.at("transitions")) {
    std::uint32_t from = e.at("from").get<std::uint32_t>();
    std::uint32_t letter = e.at("letter").get<std::uint32_t>();
    std::uint32_t to = e.at("to").get<std::uint32_t>();
    check_state(from);
    check_letter(letter);
    check_state(to);
    stub.transitions[from][letter] = to;
  }
  return stub;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Infra, "cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Infra, "I/O error reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Infra, "cannot write file '" + path + "'");
  out << content;
  out.close();
  if (out.bad()) throw Error(ErrorKind::Infra, "I/O error writing '" + path + "'");
}

Json parse_json_file(const std::string& path) {
  std::string text = read_file(path);
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorKind::Usage, "malformed JSON in '" + path + "'");
  }
  return j;
}

}  // namespace scver
