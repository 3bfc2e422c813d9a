#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scver/compose.hpp"
#include "scver/config.hpp"
#include "scver/json_io.hpp"
#include "scver/kernel.hpp"
#include "scver/parser.hpp"
#include "scver/promela.hpp"
#include "scver/spin.hpp"
#include "scver/stub.hpp"
#include "scver/testgen.hpp"
#include "scver/util.hpp"

namespace {

using namespace scver;

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitBound = 2;
constexpr int kExitUsage = 3;
constexpr int kExitInfra = 4;

struct Loaded {
  std::string source;
  ast::DesignAst ast;
  ElaboratedDesign design;
};

Loaded load_design(const std::string& path, const ElabOptions& opts = {}) {
  Loaded l;
  l.source = read_file(path);
  l.ast = parse(l.source);
  l.design = elaborate(l.ast, opts);
  for (const auto& w : l.design.warnings) std::cerr << "warning: " << w << "\n";
  return l;
}

void add_common(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--max-time", config.max_time, "simulation-time horizon");
  cmd->add_option("--max-delta", config.max_delta, "delta-cycle horizon per time point");
  cmd->add_option("--cap", config.state_cap, "stored-state cap");
  cmd->add_option("--env", [&config](const std::vector<std::string>& vals) {
        if (vals[0] == "general") {
          config.env = EnvPolicy::MostGeneral;
        } else if (vals[0] == "closed") {
          config.env = EnvPolicy::ClosedDefault;
        } else {
          return false;
        }
        return true;
      },
      "open-input policy: general | closed");
  cmd->add_option("--format", config.format, "output format: json | plain")
      ->check(CLI::IsMember({"json", "plain"}));
}

void emit_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

int exit_code_for(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass: return kExitPass;
    case VerdictStatus::DeltaOverflow:
    case VerdictStatus::TimeBound: return kExitBound;
    default: return kExitViolation;
  }
}

void print_verdict_plain(const ElaboratedDesign& design, const Verdict& v) {
  std::cout << "status: " << verdict_status_name(v.status) << "\n";
  if (!v.property.empty()) std::cout << "property: " << v.property << "\n";
  if (!v.message.empty()) std::cout << "message: " << v.message << "\n";
  std::cout << "states: " << v.stats.states_stored << "  transitions: " << v.stats.transitions
            << "  max-depth: " << v.stats.max_depth << "  steps: " << v.stats.steps << "\n";
  if (v.counterexample) {
    std::cout << "counterexample (" << v.counterexample->steps.size() << " steps";
    if (v.counterexample->loop_start) {
      std::cout << ", lasso from step " << *v.counterexample->loop_start;
    }
    std::cout << "):\n";
    const Trace& tr = *v.counterexample;
    std::cout << "  [0] t=" << tr.initial_obs.time << " " << phase_name(tr.initial_obs.phase)
              << "\n";
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
      std::cout << "  [" << (i + 1) << "] " << tr.steps[i].choice.label(design)
                << " -> t=" << tr.steps[i].time << " d=" << tr.steps[i].delta << " "
                << phase_name(tr.steps[i].obs.phase) << "\n";
    }
  }
}

int cmd_check(const std::string& file, const std::string& prop, const RunConfig& config) {
  Loaded l = load_design(file);
  CheckOptions opts = config.check_options();
  std::vector<Verdict> verdicts;
  if (!prop.empty()) {
    const ResolvedProperty* p = l.design.find_property(prop);
    if (!p) fail_semantic("unknown property '" + prop + "'");
    verdicts.push_back(p->is_ltl ? check_ltl(l.design, opts, p->formula, p->name)
                                 : check_safety(l.design, opts, {*p}));
  } else {
    std::vector<ResolvedProperty> invariants;
    for (const auto& p : l.design.properties) {
      if (!p.is_ltl) invariants.push_back(p);
    }
    verdicts.push_back(check_safety(l.design, opts, invariants));
    for (const auto& p : l.design.properties) {
      if (p.is_ltl) verdicts.push_back(check_ltl(l.design, opts, p.formula, p.name));
    }
  }
  int code = kExitPass;
  for (const auto& v : verdicts) code = std::max(code, exit_code_for(v.status));
  if (config.format == "plain") {
    for (const auto& v : verdicts) print_verdict_plain(l.design, v);
  } else if (verdicts.size() == 1) {
    emit_json(verdict_to_json(l.design, verdicts[0], config));
  } else {
    Json j;
    j["tool"] = "scver";
    j["version"] = kToolVersion;
    Json results = Json::array();
    for (const auto& v : verdicts) results.push_back(verdict_to_json(l.design, v, config));
    j["results"] = std::move(results);
    emit_json(j);
  }
  return code;
}

int cmd_simulate(const std::string& file, const RunConfig& config) {
  Loaded l = load_design(file);
  RunConfig cfg = config;
  cfg.env = EnvPolicy::ClosedDefault;
  CheckOptions opts = cfg.check_options();
  std::vector<KernelState> inits = initial_states(l.design, opts.env, opts.limits);
  KernelState st = inits.at(0);
  Json steps = Json::array();
  auto record = [&](const SchedChoice* choice, const KernelState& s) {
    Observation obs = observe(l.design, s);
    if (cfg.format == "plain") {
      std::cout << (choice ? choice->label(l.design) : std::string("init")) << " -> t=" << s.time
                << " d=" << s.delta << " " << phase_name(obs.phase);
      for (std::size_t i = 0; i < l.design.signals.size(); ++i) {
        std::cout << " " << l.design.signals[i].name << "="
                  << l.design.signals[i].type.render(obs.signals[i]);
      }
      std::cout << "\n";
    } else {
      Json j;
      j["choice"] = choice ? choice_to_json(l.design, *choice) : Json("init");
      j["time"] = s.time;
      j["delta"] = s.delta;
      j["phase"] = phase_name(obs.phase);
      j["observations"] = observation_to_json(l.design, obs);
      steps.push_back(std::move(j));
    }
  };
  record(nullptr, st);
  for (;;) {
    auto succs = successors(l.design, st, opts.env, opts.limits);
    if (succs.empty()) break;
    record(&succs[0].first, succs[0].second);
    st = succs[0].second;
  }
  if (cfg.format != "plain") {
    Json j;
    j["tool"] = "scver";
    j["version"] = kToolVersion;
    j["config"] = config_to_json(cfg);
    j["run"] = std::move(steps);
    j["clean_termination"] = is_clean_termination(st);
    emit_json(j);
  } else {
    std::cout << (is_clean_termination(st) ? "terminated cleanly" : "terminal with waiting processes")
              << "\n";
  }
  return kExitPass;
}

int cmd_emit_promela(const std::string& file, const std::string& out, const RunConfig& config) {
  Loaded l = load_design(file);
  std::string pml = emit_promela(l.design, config.limits(), config.env, sha256_hex(l.source));
  if (out.empty()) {
    std::cout << pml;
  } else {
    write_file(out, pml);
  }
  return kExitPass;
}

int cmd_crosscheck(const std::string& file, const std::string& prop, const std::string& scratch,
                   const RunConfig& config) {
  Loaded l = load_design(file);
  std::string dir = scratch;
  if (dir.empty()) {
    dir = (std::filesystem::temp_directory_path() /
           ("scver-xcheck-" + std::to_string(::getpid())))
              .string();
  }
  CrosscheckReport rep = spin_crosscheck(l.ast, l.design, l.source, config, prop, dir);
  Json j;
  j["tool"] = "scver";
  j["version"] = kToolVersion;
  j["property"] = rep.property;
  j["internal_status"] = verdict_status_name(rep.internal_status);
  j["spin_verdict"] = rep.spin_verdict;
  j["comparable"] = rep.comparable;
  j["agree"] = rep.agree;
  j["config"] = config_to_json(config);
  j["spin_output"] = rep.spin_output;
  if (config.format == "plain") {
    std::cout << "property: " << rep.property << "\n"
              << "internal: " << verdict_status_name(rep.internal_status) << "\n"
              << "spin:     " << rep.spin_verdict << "\n"
              << (rep.comparable ? (rep.agree ? "AGREE" : "DISAGREE") : "NOT COMPARABLE") << "\n";
  } else {
    emit_json(j);
  }
  if (!rep.comparable) return kExitBound;
  return rep.agree ? kExitPass : kExitViolation;
}

int cmd_stub(const std::string& file, const std::string& instance, const std::string& out,
             const RunConfig& config) {
  Loaded l = load_design(file);
  CheckOptions opts = config.check_options();
  StubAutomaton stub = learn_stub(l.ast, instance, config.stub_depth_k, config.stub_history_h, opts);
  Json j = stub_to_json(stub);
  if (out.empty()) {
    emit_json(j);
  } else {
    write_file(out, j.dump(2) + "\n");
  }
  return kExitPass;
}

int cmd_consistency(const std::string& file, const std::string& instance,
                    const std::string& stub_file, const RunConfig& config) {
  Loaded l = load_design(file);
  StubAutomaton stub = stub_from_json(parse_json_file(stub_file));
  CheckOptions opts = config.check_options();
  ConsistencyReport rep = check_consistency(l.ast, instance, stub, config.stub_depth_k, opts);
  Json j;
  j["tool"] = "scver";
  j["version"] = kToolVersion;
  j["instance"] = instance;
  j["depth_k"] = config.stub_depth_k;
  j["pass"] = rep.pass;
  j["message"] = rep.message;
  j["states_checked"] = rep.states_checked;
  if (!rep.pass) {
    Json w = Json::array();
    for (const auto& letter : rep.witness) w.push_back(letter_text(stub, letter));
    j["witness"] = std::move(w);
  }
  j["config"] = config_to_json(config);
  if (config.format == "plain") {
    std::cout << (rep.pass ? "consistent" : "INCONSISTENT") << ": " << rep.message << "\n";
  } else {
    emit_json(j);
  }
  return rep.pass ? kExitPass : kExitViolation;
}

std::map<std::string, StubAutomaton> load_substitutions(const std::vector<std::string>& subs) {
  std::map<std::string, StubAutomaton> out;
  for (const auto& s : subs) {
    auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Usage, "--substitute expects instance=stub.json, got '" + s + "'");
    }
    out.emplace(s.substr(0, eq), stub_from_json(parse_json_file(s.substr(eq + 1))));
  }
  return out;
}

int cmd_compose(const std::string& file, const std::vector<std::string>& subs,
                const std::string& prop, bool replay, const RunConfig& config) {
  Loaded l = load_design(file);  // also validates the unstubbed design
  auto substitutions = load_substitutions(subs);
  Verdict v = compose_and_verify(l.ast, substitutions, prop, config);
  ElabOptions ce;
  ce.stub_substitutions = substitutions;
  ElaboratedDesign composed = elaborate(l.ast, ce);
  Json j = verdict_to_json(composed, v, config);
  int code = exit_code_for(v.status);
  if (replay && v.counterexample) {
    ReplayResult rr = replay_on_concrete(l.ast, substitutions, prop, *v.counterexample, config);
    Json rj;
    rj["outcome"] = rr.outcome == ReplayOutcome::Confirmed ? "confirmed" : "spurious";
    rj["message"] = rr.message;
    if (rr.outcome == ReplayOutcome::Spurious) {
      rj["matched_boundaries"] = rr.matched_boundaries;
      code = kExitPass;  // the violation did not survive replay
    } else {
      if (rr.concrete) rj["concrete_trace"] = trace_to_json(l.design, *rr.concrete);
      code = kExitViolation;
    }
    j["replay"] = std::move(rj);
  }
  if (config.format == "plain") {
    print_verdict_plain(composed, v);
    if (j.contains("replay")) {
      std::cout << "replay: " << j["replay"]["outcome"].get<std::string>() << " — "
                << j["replay"]["message"].get<std::string>() << "\n";
    }
  } else {
    emit_json(j);
  }
  return code;
}

int cmd_testgen(const std::string& file, const std::string& criteria_arg, const std::string& out,
                const RunConfig& config) {
  Loaded l = load_design(file);
  CoverageCriteria criteria;
  criteria.statements = criteria_arg.find("statements") != std::string::npos;
  criteria.toggles = criteria_arg.find("toggles") != std::string::npos;
  if (criteria_arg == "none") criteria = {false, false};
  std::vector<CoverageGoal> goals = enumerate_goals(l.design, criteria);
  CheckOptions opts = config.check_options();
  TestSuite suite = generate_tests(l.design, goals, opts);
  Json j = suite_to_json(l.design, suite, config);
  if (out.empty()) {
    emit_json(j);
  } else {
    write_file(out, j.dump(2) + "\n");
  }
  std::cerr << "covered " << suite.tests.size() << "/" << goals.size() << " goals";
  if (!suite.uncovered.empty()) std::cerr << " (" << suite.uncovered.size() << " uncovered)";
  std::cerr << "\n";
  return kExitPass;
}

int cmd_concretize(const std::string& tests_file, const std::string& design_file,
                   const std::string& map_file, const std::string& out_stim,
                   const std::string& out_exp) {
  Loaded l = load_design(design_file);
  TestSuite suite = suite_from_json(l.design, parse_json_file(tests_file));
  ConcretizationMap map = concretization_map_from_json(parse_json_file(map_file));
  ConcreteScripts scripts = concretize(l.design, suite, map);
  write_file(out_stim, scripts.stimulus_csv);
  write_file(out_exp, scripts.expectations_csv);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scver — model verification toolchain for SCL component designs"};
  app.require_subcommand(1);
  RunConfig config;
  if (const char* spin = std::getenv("SCVER_SPIN")) config.spin_path = spin;

  std::string file, prop, out, instance, stub_file, scratch, criteria = "statements,toggles";
  std::string tests_file, design_file, map_file, out_stim, out_exp;
  std::vector<std::string> subs;
  bool replay = false;

  auto* check = app.add_subcommand("check", "verify properties by exhaustive exploration");
  check->add_option("file", file, "SCL design file")->required();
  check->add_option("--prop", prop, "property name (default: all)");
  check->add_flag_callback("--no-deadlock", [&] { config.check_deadlock = false; },
                           "do not report terminal states with waiting processes");
  add_common(check, config);

  auto* simulate = app.add_subcommand("simulate", "one closed-default maximal run");
  simulate->add_option("file", file, "SCL design file")->required();
  add_common(simulate, config);

  auto* emitp = app.add_subcommand("emit-promela", "translate the design to Promela");
  emitp->add_option("file", file, "SCL design file")->required();
  emitp->add_option("-o,--output", out, "output .pml path (default: stdout)");
  add_common(emitp, config);

  auto* cross = app.add_subcommand("crosscheck", "compare the internal verdict against SPIN");
  cross->add_option("file", file, "SCL design file")->required();
  cross->add_option("--prop", prop, "property name")->required();
  cross->add_option("--spin", config.spin_path, "path to the spin executable");
  cross->add_option("--scratch", scratch, "scratch directory for generated artifacts");
  add_common(cross, config);

  auto* stub = app.add_subcommand("stub", "learn an interface stub for a component instance");
  stub->add_option("file", file, "SCL design file")->required();
  stub->add_option("--instance", instance, "component instance to abstract")->required();
  stub->add_option("-k,--depth", config.stub_depth_k, "learning depth (letters)");
  stub->add_option("--history", config.stub_history_h, "history window h");
  stub->add_option("-o,--output", out, "output stub JSON path (default: stdout)");
  add_common(stub, config);

  auto* consistency = app.add_subcommand("consistency", "check a stub against its component");
  consistency->add_option("file", file, "SCL design file")->required();
  consistency->add_option("--instance", instance, "component instance")->required();
  consistency->add_option("--stub", stub_file, "stub JSON file")->required();
  consistency->add_option("-k,--depth", config.stub_depth_k, "trace depth to check");
  add_common(consistency, config);

  auto* compose = app.add_subcommand("compose", "verify a system with stubs substituted");
  compose->add_option("file", file, "SCL design file")->required();
  compose->add_option("--substitute", subs, "instance=stub.json (repeatable)");
  compose->add_option("--prop", prop, "property name")->required();
  compose->add_flag("--replay", replay, "replay a violation on the unstubbed system");
  add_common(compose, config);

  auto* testgen = app.add_subcommand("testgen", "generate coverage-goal test cases");
  testgen->add_option("file", file, "SCL design file")->required();
  testgen->add_option("--criteria", criteria, "comma list of: statements,toggles (or 'none')");
  testgen->add_option("-o,--output", out, "output tests JSON path (default: stdout)");
  add_common(testgen, config);

  auto* concretize = app.add_subcommand("concretize", "translate abstract tests for a test rig");
  concretize->add_option("tests", tests_file, "abstract tests JSON")->required();
  concretize->add_option("--design", design_file, "SCL design the tests were generated from")
      ->required();
  concretize->add_option("--map", map_file, "concretization map JSON")->required();
  concretize->add_option("--stimulus", out_stim, "output stimulus CSV")->required();
  concretize->add_option("--expected", out_exp, "output expectations CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(file, prop, config);
    if (simulate->parsed()) return cmd_simulate(file, config);
    if (emitp->parsed()) return cmd_emit_promela(file, out, config);
    if (cross->parsed()) return cmd_crosscheck(file, prop, scratch, config);
    if (stub->parsed()) return cmd_stub(file, instance, out, config);
    if (consistency->parsed()) return cmd_consistency(file, instance, stub_file, config);
    if (compose->parsed()) return cmd_compose(file, subs, prop, replay, config);
    if (testgen->parsed()) return cmd_testgen(file, criteria, out, config);
    if (concretize->parsed()) {
      return cmd_concretize(tests_file, design_file, map_file, out_stim, out_exp);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Parse:
      case ErrorKind::Semantic:
      case ErrorKind::Usage: return kExitUsage;
      case ErrorKind::Bound:
      case ErrorKind::Resource: return kExitBound;
      case ErrorKind::Infra: return kExitInfra;
    }
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInfra;
  }
  return kExitUsage;
}
