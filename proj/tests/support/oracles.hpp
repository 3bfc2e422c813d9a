#pragma once

// Test-side oracles, independent of the engine code paths they check:
// a naive enumerate-then-test safety oracle and an exhaustive-lasso LTL
// oracle built on eval_lasso. Both walk the kernel graph directly.

#include <map>
#include <string>
#include <vector>

#include "scver/explorer.hpp"
#include "scver/kernel.hpp"

namespace scver::testing {

struct Graph {
  std::vector<KernelState> states;
  std::vector<Observation> obs;
  std::vector<std::vector<std::uint32_t>> succ;  // state id -> successor ids
  std::vector<std::uint32_t> initial;
  std::vector<std::uint32_t> terminals;
};

// Full reachable graph by naive BFS over kernel successors.
Graph build_graph(const ElaboratedDesign& design, const CheckOptions& options);

// Pass/violation status by scanning every reachable state. Mirrors the
// checker's priorities: assertion, then invariants, then deadlock.
VerdictStatus oracle_safety(const ElaboratedDesign& design, const Graph& graph,
                            const std::vector<ResolvedProperty>& invariants,
                            bool check_deadlock);

// Violation iff some lasso (simple path + simple cycle, or a path to a
// terminal state extended by stuttering) falsifies the formula. Exhaustive
// for graphs whose cycles are simple, which covers the micro corpus.
bool oracle_ltl_violated(const ElaboratedDesign& design, const Graph& graph,
                         const prop::Formula& formula);

std::string corpus_path(const std::string& name);
std::string read_corpus(const std::string& name);

// ---- synthetic two-atom world for property-language tests ----

namespace twoatom {

// "a.p" and "a.q" as boolean signal slots 0 and 1
prop::SymbolTable symbols();

// the 4 valuations as observations (p = bit 0, q = bit 1)
std::vector<Observation> letters();

// Deterministic structural enumeration over atoms {a.p, a.q}: negated
// atoms, X/F/G, U/R, conjunction and disjunction, capped at 3 temporal
// operators per formula. Returns the first `count` formulas.
std::vector<prop::Formula> formula_corpus(std::size_t count);

// every (prefix, loop) split of every word up to total length max_len
void for_each_lasso(std::size_t max_len,
                    const std::function<bool(std::span<const Observation>,
                                             std::span<const Observation>)>& fn);

}  // namespace twoatom

}  // namespace scver::testing
