#include <functional>

#include "doctest.h"
#include "scver/buchi.hpp"
#include "scver/parser.hpp"
#include "scver/prop.hpp"
#include "support/oracles.hpp"

using namespace scver;
using testing::twoatom::symbols;

namespace {

Observation obs(bool p, bool q) {
  Observation o;
  o.signals = {p ? 1 : 0, q ? 1 : 0};
  return o;
}

}  // namespace

TEST_CASE("parse_ltl: implication desugars to disjunction") {
  auto table = symbols();
  auto f = prop::parse_ltl("G (a.p -> F a.q)", table);
  REQUIRE(f->op == prop::Op::Always);
  REQUIRE(f->a->op == prop::Op::Or);
  CHECK(f->a->a->op == prop::Op::Not);
  CHECK(f->a->b->op == prop::Op::Eventually);
}

TEST_CASE("parse_ltl: until is right-associative") {
  auto table = symbols();
  auto f = prop::parse_ltl("a.p U a.q U a.p", table);
  REQUIRE(f->op == prop::Op::Until);
  CHECK(f->a->op == prop::Op::Atom);
  CHECK(f->b->op == prop::Op::Until);
}

TEST_CASE("parse_ltl: literal outside the atom's range is rejected") {
  prop::SymbolTable table;
  table.visible["m.x"] = {false, 0, ScalarType::bounded(0, 3)};
  try {
    prop::parse_ltl("G (m.x == 5)", table);
    FAIL("expected a range error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("outside range") != std::string::npos);
  }
}

TEST_CASE("parse_ltl: unknown names and temporal-in-invariant are rejected") {
  auto table = symbols();
  CHECK_THROWS_AS(prop::parse_ltl("a.nope", table), Error);
  CHECK_THROWS_AS(parse("module M { signal s: bool = false; } instance m: M; "
                        "invariant bad { F m.s }"),
                  Error);
}

TEST_CASE("eval_lasso: textbook cases") {
  auto table = symbols();
  auto Gp = prop::parse_ltl("G a.p", table);
  auto Fp = prop::parse_ltl("F a.p", table);
  auto pUq = prop::parse_ltl("a.p U a.q", table);
  std::vector<Observation> p_state{obs(true, false)};
  std::vector<Observation> not_p{obs(false, false)};
  CHECK(prop::eval_lasso(Gp, {}, p_state));
  CHECK(!prop::eval_lasso(Fp, not_p, not_p));
  std::vector<Observation> pre{obs(true, false)};
  std::vector<Observation> loop{obs(false, true)};
  CHECK(prop::eval_lasso(pUq, pre, loop));
}

TEST_CASE("eval_lasso: X distinguishes positions") {
  auto table = symbols();
  auto Xp = prop::parse_ltl("X a.p", table);
  std::vector<Observation> pre{obs(false, false)};
  std::vector<Observation> loop_p{obs(true, false)};
  CHECK(prop::eval_lasso(Xp, pre, loop_p));
  CHECK(!prop::eval_lasso(Xp, {}, pre));  // loop of !p
}

TEST_CASE("to_buchi: G p is one accepting self-loop on p") {
  auto table = symbols();
  auto ba = to_buchi(prop::parse_ltl("G a.p", table));
  CHECK(ba.num_states == 1);
  REQUIRE(ba.initial.size() == 1);
  CHECK(ba.accepting[ba.initial[0]]);
  REQUIRE(ba.out[ba.initial[0]].size() == 1);
  CHECK(ba.out[ba.initial[0]][0].dst == ba.initial[0]);
  // rejects any word with a !p position
  std::vector<Observation> pre{obs(true, false)};
  std::vector<Observation> bad{obs(false, false)};
  std::vector<Observation> good{obs(true, true)};
  CHECK(lasso_accepted(ba, pre, good));
  CHECK(!lasso_accepted(ba, pre, bad));
}

TEST_CASE("to_buchi: true is one accepting unconditional self-loop") {
  auto ba = to_buchi(prop::mk_true());
  CHECK(ba.num_states == 1);
  REQUIRE(ba.out[0].size() == 1);
  CHECK(ba.out[0][0].label.empty());
  CHECK(ba.accepting[0]);
}

TEST_CASE("to_buchi: F p has a non-accepting waiting state") {
  auto table = symbols();
  auto ba = to_buchi(prop::parse_ltl("F a.p", table));
  bool has_nonaccepting = false;
  for (std::uint32_t s = 0; s < ba.num_states; ++s) has_nonaccepting |= !ba.accepting[s];
  CHECK(has_nonaccepting);
  std::vector<Observation> notp{obs(false, false)};
  std::vector<Observation> p{obs(true, false)};
  CHECK(!lasso_accepted(ba, {}, notp));
  CHECK(lasso_accepted(ba, notp, p));
}

TEST_CASE("to_buchi: false accepts nothing") {
  auto ba = to_buchi(prop::mk_false());
  std::vector<Observation> any{obs(false, false)};
  CHECK(!lasso_accepted(ba, {}, any));
}

TEST_CASE("buchi invariants: labels satisfiable, states reachable") {
  auto corpus = testing::twoatom::formula_corpus(60);
  auto alphabet = testing::twoatom::letters();
  for (const auto& f : corpus) {
    auto ba = to_buchi(f);
    // reachability from initial states
    std::vector<bool> reach(ba.num_states, false);
    std::vector<std::uint32_t> work(ba.initial.begin(), ba.initial.end());
    for (std::uint32_t s : ba.initial) reach[s] = true;
    while (!work.empty()) {
      std::uint32_t s = work.back();
      work.pop_back();
      for (const auto& t : ba.out[s]) {
        if (!reach[t.dst]) {
          reach[t.dst] = true;
          work.push_back(t.dst);
        }
      }
    }
    for (std::uint32_t s = 0; s < ba.num_states; ++s) {
      CAPTURE(prop::to_string(f));
      CHECK(reach[s]);
      for (const auto& t : ba.out[s]) {
        bool satisfiable = false;
        for (const auto& o : alphabet) satisfiable |= label_satisfied(t.label, o);
        CHECK(satisfiable);
      }
    }
  }
}

TEST_CASE("semantically contradictory labels are pruned") {
  prop::SymbolTable table;
  table.visible["m.x"] = {false, 0, ScalarType::bounded(0, 3)};
  // x==1 && x==2 is unsatisfiable although not a syntactic negation pair
  auto f = prop::mk_and(prop::parse_ltl("m.x == 1", table), prop::parse_ltl("m.x == 2", table));
  auto ba = to_buchi(f);
  Observation o;
  o.signals = {1};
  for (std::uint32_t s = 0; s < ba.num_states; ++s) {
    for ([[maybe_unused]] const auto& t : ba.out[s]) {
      // any remaining label must be satisfiable over the 4-value domain
      bool sat = false;
      for (Value v = 0; v <= 3; ++v) {
        Observation probe;
        probe.signals = {v};
        sat |= label_satisfied(t.label, probe);
      }
      CHECK(sat);
    }
  }
  std::vector<Observation> w{o};
  CHECK(!lasso_accepted(ba, {}, w));
}

TEST_CASE("oracle equivalence: automaton membership equals direct evaluation") {
  auto corpus = testing::twoatom::formula_corpus(50);
  for (const auto& f : corpus) {
    auto ba = to_buchi(f);
    bool ok = true;
    testing::twoatom::for_each_lasso(4, [&](std::span<const Observation> pre,
                                            std::span<const Observation> loop) {
      bool by_eval = prop::eval_lasso(f, pre, loop);
      bool by_ba = lasso_accepted(ba, pre, loop);
      if (by_eval != by_ba) {
        ok = false;
        return false;
      }
      return true;
    });
    CAPTURE(prop::to_string(f));
    CHECK(ok);
  }
}

TEST_CASE("negation duality and NNF preservation") {
  auto corpus = testing::twoatom::formula_corpus(40);
  for (const auto& f : corpus) {
    auto nf = prop::nnf(f);
    auto neg = prop::mk_not(f);
    bool ok = true;
    testing::twoatom::for_each_lasso(3, [&](std::span<const Observation> pre,
                                            std::span<const Observation> loop) {
      bool v = prop::eval_lasso(f, pre, loop);
      if (prop::eval_lasso(nf, pre, loop) != v) ok = false;
      if (prop::eval_lasso(neg, pre, loop) != !v) ok = false;
      return ok;
    });
    CAPTURE(prop::to_string(f));
    CHECK(ok);
  }
}

TEST_CASE("nnf preserves the atom set") {
  auto table = symbols();
  auto f = prop::mk_not(prop::parse_ltl("G (a.p -> (a.q U a.p))", table));
  std::function<void(const prop::Formula&, std::set<std::string>&)> atoms =
      [&](const prop::Formula& g, std::set<std::string>& out) {
        if (g->op == prop::Op::Atom) out.insert(g->atom.text);
        if (g->a) atoms(g->a, out);
        if (g->b) atoms(g->b, out);
      };
  std::set<std::string> before, after;
  atoms(f, before);
  atoms(prop::nnf(f), after);
  CHECK(before == after);
}
