#include "scver/stub.hpp"

#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "scver/kernel.hpp"
#include "scver/parser.hpp"
#include "scver/util.hpp"

namespace scver {

std::string letter_text(const StubAutomaton& stub, const StubLetter& letter) {
  std::ostringstream os;
  os << "(";
  for (std::size_t p = 0; p < stub.port_names.size(); ++p) {
    if (p) os << ", ";
    os << stub.port_names[p] << "=" << stub.port_types[p].render(letter.port_values[p]);
  }
  os << ")";
  return os.str();
}

namespace {

struct Component {
  ElaboratedDesign design;
  std::uint32_t instance = 0;  // index within the restricted design
};

Component close_component(const ast::DesignAst& ast, const std::string& instance) {
  ElabOptions opt;
  opt.restrict_to_instance = instance;
  Component c;
  c.design = elaborate(ast, opt);
  return c;
}

// All states reachable from `from` through evaluation and delta activity,
// stopping at the next time boundary. Interface letters are sampled per
// time boundary: delta cycles are internal, matching both the stub
// execution rule and what a test rig can observe. A terminal state is its
// own boundary successor (the letter repeats, stutter-fashion).
std::vector<KernelState> boundary_successors(const ElaboratedDesign& design,
                                             const KernelState& from, EnvPolicy env,
                                             const Limits& limits) {
  std::vector<KernelState> out;
  std::unordered_set<std::string> seen;
  std::deque<KernelState> work{from};
  seen.insert(from.serialize());
  while (!work.empty()) {
    KernelState st = std::move(work.front());
    work.pop_front();
    auto succs = successors(design, st, env, limits);
    if (succs.empty()) {
      out.push_back(st);  // terminal: stutter
      continue;
    }
    for (auto& [choice, succ] : succs) {
      if (choice.kind == SchedChoice::Kind::TimeStep) {
        out.push_back(std::move(succ));
      } else {
        if (seen.insert(succ.serialize()).second) work.push_back(std::move(succ));
      }
    }
  }
  return out;
}

class LetterRegistry {
 public:
  std::uint32_t intern(const StubLetter& letter, StubAutomaton& stub) {
    auto it = ids_.find(letter);
    if (it != ids_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(stub.letters.size());
    stub.letters.push_back(letter);
    ids_.emplace(letter, id);
    return id;
  }
  std::optional<std::uint32_t> find(const StubLetter& letter) const {
    auto it = ids_.find(letter);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<StubLetter, std::uint32_t> ids_;
};

std::vector<std::uint32_t> gram_push(const std::vector<std::uint32_t>& gram, std::uint32_t letter,
                                     std::uint32_t h) {
  std::vector<std::uint32_t> next = gram;
  next.push_back(letter);
  if (next.size() > h) next.erase(next.begin(), next.begin() + (next.size() - h));
  return next;
}

}  // namespace

StubAutomaton learn_stub(const ast::DesignAst& ast, const std::string& instance,
                         std::uint32_t depth_k, std::uint32_t history_h,
                         const CheckOptions& options) {
  if (depth_k < 1 || history_h < 1) {
    fail_semantic("stub learning requires depth k >= 1 and history h >= 1");
  }
  Component comp = close_component(ast, instance);
  const ElaboratedDesign& design = comp.design;
  const InstanceInfo& inst = design.instances[comp.instance];

  StubAutomaton stub;
  stub.component_instance = instance;
  stub.module_name = inst.module_name;
  stub.depth_k = depth_k;
  stub.history_h = history_h;
  stub.toolchain_version = kToolVersion;
  for (const auto& p : inst.ports) {
    stub.port_names.push_back(p.port_name);
    stub.port_is_in.push_back(p.is_in);
    stub.port_types.push_back(p.type);
  }
  stub.alphabet_fingerprint =
      alphabet_fingerprint(stub.module_name, stub.port_names, stub.port_is_in, stub.port_types);

  LetterRegistry letters;
  std::map<std::vector<std::uint32_t>, std::uint32_t> gram_ids;
  auto intern_gram = [&](const std::vector<std::uint32_t>& gram) {
    auto it = gram_ids.find(gram);
    if (it != gram_ids.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(stub.state_grams.size());
    stub.state_grams.push_back(gram);
    stub.transitions.emplace_back();
    gram_ids.emplace(gram, id);
    return id;
  };

  struct Item {
    KernelState state;
    std::uint32_t gram;
    std::uint32_t depth;  // letters consumed so far
  };
  std::deque<Item> work;
  std::set<std::pair<std::string, std::uint32_t>> seen;  // (state bytes, gram)

  CheckOptions opts = options;
  opts.env = EnvPolicy::MostGeneral;  // learning always closes most-generally
  for (auto& init : initial_states(design, opts.env, opts.limits)) {
    StubLetter l0 = project_letter(design, comp.instance, init);
    std::uint32_t lid = letters.intern(l0, stub);
    std::uint32_t gram = intern_gram({lid});
    stub.initial.emplace(lid, gram);
    if (seen.emplace(init.serialize(), gram).second && depth_k > 1) {
      work.push_back({std::move(init), gram, 1});
    }
  }
  while (!work.empty()) {
    if (options.cancel && options.cancel()) {
      throw Error(ErrorKind::Resource, "stub learning cancelled by caller");
    }
    Item item = std::move(work.front());
    work.pop_front();
    for (KernelState& next : boundary_successors(design, item.state, opts.env, opts.limits)) {
      StubLetter l = project_letter(design, comp.instance, next);
      std::uint32_t lid = letters.intern(l, stub);
      std::uint32_t target = intern_gram(gram_push(stub.state_grams[item.gram], lid, history_h));
      stub.transitions[item.gram][lid] = target;
      if (item.depth + 1 < depth_k &&
          seen.emplace(next.serialize(), target).second) {
        work.push_back({std::move(next), target, item.depth + 1});
      }
      if (seen.size() > options.state_cap) {
        throw Error(ErrorKind::Resource, "stub learning exceeded the state cap");
      }
    }
  }
  return stub;
}

ConsistencyReport check_consistency(const ast::DesignAst& ast, const std::string& instance,
                                    const StubAutomaton& stub, std::uint32_t depth_k,
                                    const CheckOptions& options) {
  Component comp = close_component(ast, instance);
  const ElaboratedDesign& design = comp.design;
  const InstanceInfo& inst = design.instances[comp.instance];

  std::vector<std::string> names;
  std::vector<bool> is_in;
  std::vector<ScalarType> types;
  for (const auto& p : inst.ports) {
    names.push_back(p.port_name);
    is_in.push_back(p.is_in);
    types.push_back(p.type);
  }
  std::string expect = alphabet_fingerprint(inst.module_name, names, is_in, types);
  if (expect != stub.alphabet_fingerprint) {
    throw Error(ErrorKind::Semantic,
                "stale stub for instance '" + instance +
                    "': interface fingerprint mismatch (component ports changed since the stub "
                    "was learned)");
  }

  // map letter value -> stub letter id
  std::map<StubLetter, std::uint32_t> stub_letter_ids;
  for (std::uint32_t i = 0; i < stub.letters.size(); ++i) stub_letter_ids.emplace(stub.letters[i], i);

  ConsistencyReport report;

  struct Item {
    KernelState state;
    std::uint32_t stub_state;
    std::uint32_t depth;
    std::vector<std::uint32_t> path;  // component letter ids (into comp_letters)
  };
  std::vector<StubLetter> comp_letters;
  auto comp_intern = [&](const StubLetter& l) {
    for (std::uint32_t i = 0; i < comp_letters.size(); ++i) {
      if (comp_letters[i] == l) return i;
    }
    comp_letters.push_back(l);
    return static_cast<std::uint32_t>(comp_letters.size() - 1);
  };
  auto fail_with = [&](const std::vector<std::uint32_t>& path, const StubLetter& rejected,
                       const std::string& why) {
    report.pass = false;
    for (std::uint32_t id : path) report.witness.push_back(comp_letters[id]);
    report.witness.push_back(rejected);
    std::ostringstream os;
    os << "trace of length " << report.witness.size() << " rejected: " << why << " at letter "
       << letter_text(stub, rejected);
    report.message = os.str();
  };

  CheckOptions opts = options;
  opts.env = EnvPolicy::MostGeneral;
  std::deque<Item> work;
  std::set<std::pair<std::string, std::uint32_t>> seen;
  for (auto& init : initial_states(design, opts.env, opts.limits)) {
    ++report.states_checked;
    StubLetter l0 = project_letter(design, comp.instance, init);
    auto lid = stub_letter_ids.find(l0);
    if (lid == stub_letter_ids.end() || !stub.initial.count(lid->second)) {
      fail_with({}, l0, "no initial stub state for the component's initial letter");
      return report;
    }
    std::uint32_t s0 = stub.initial.at(lid->second);
    if (depth_k > 1 && seen.emplace(init.serialize(), s0).second) {
      work.push_back({std::move(init), s0, 1, {comp_intern(l0)}});
    }
  }
  while (!work.empty()) {
    if (options.cancel && options.cancel()) {
      throw Error(ErrorKind::Resource, "consistency check cancelled by caller");
    }
    Item item = std::move(work.front());
    work.pop_front();
    for (KernelState& next : boundary_successors(design, item.state, opts.env, opts.limits)) {
      ++report.states_checked;
      StubLetter l = project_letter(design, comp.instance, next);
      auto lid = stub_letter_ids.find(l);
      std::uint32_t target = 0;
      bool ok = lid != stub_letter_ids.end();
      if (ok) {
        const auto& row = stub.transitions[item.stub_state];
        auto t = row.find(lid->second);
        ok = t != row.end();
        if (ok) target = t->second;
      }
      if (!ok) {
        fail_with(item.path, l, "stub has no matching transition");
        return report;
      }
      if (item.depth + 1 < depth_k &&
          seen.emplace(next.serialize(), target).second) {
        Item ni;
        ni.state = std::move(next);
        ni.stub_state = target;
        ni.depth = item.depth + 1;
        ni.path = item.path;
        ni.path.push_back(comp_intern(l));
        work.push_back(std::move(ni));
      }
      if (seen.size() > options.state_cap) {
        throw Error(ErrorKind::Resource, "consistency check exceeded the state cap");
      }
    }
  }
  report.message = "all interface traces up to length " + std::to_string(depth_k) +
                   " accepted by the stub";
  return report;
}

bool bounded_language_included(const StubAutomaton& sub, const StubAutomaton& super,
                               std::uint32_t depth_k, std::vector<StubLetter>* witness) {
  std::map<StubLetter, std::uint32_t> super_ids;
  for (std::uint32_t i = 0; i < super.letters.size(); ++i) super_ids.emplace(super.letters[i], i);

  struct Item {
    std::uint32_t sub_state, super_state, depth;
    std::vector<std::uint32_t> path;  // sub letter ids
  };
  auto fail_with = [&](const std::vector<std::uint32_t>& path, std::uint32_t rejected) {
    if (witness) {
      witness->clear();
      for (std::uint32_t id : path) witness->push_back(sub.letters[id]);
      witness->push_back(sub.letters[rejected]);
    }
    return false;
  };
  std::deque<Item> work;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& [letter, state] : sub.initial) {
    auto sid = super_ids.find(sub.letters[letter]);
    if (sid == super_ids.end() || !super.initial.count(sid->second)) {
      return fail_with({}, letter);
    }
    std::uint32_t ps = super.initial.at(sid->second);
    if (depth_k > 1 && seen.emplace(state, ps).second) work.push_back({state, ps, 1, {letter}});
  }
  while (!work.empty()) {
    Item item = std::move(work.front());
    work.pop_front();
    for (const auto& [letter, target] : sub.transitions[item.sub_state]) {
      auto sid = super_ids.find(sub.letters[letter]);
      std::uint32_t ptarget = 0;
      bool ok = sid != super_ids.end();
      if (ok) {
        const auto& row = super.transitions[item.super_state];
        auto t = row.find(sid->second);
        ok = t != row.end();
        if (ok) ptarget = t->second;
      }
      if (!ok) return fail_with(item.path, letter);
      if (item.depth + 1 < depth_k && seen.emplace(target, ptarget).second) {
        Item ni;
        ni.sub_state = target;
        ni.super_state = ptarget;
        ni.depth = item.depth + 1;
        ni.path = item.path;
        ni.path.push_back(letter);
        work.push_back(std::move(ni));
      }
    }
  }
  return true;
}

}  // namespace scver
