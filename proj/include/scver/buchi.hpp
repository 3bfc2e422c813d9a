#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scver/prop.hpp"

namespace scver {

// Property automaton over infinite observation words. Transitions are
// labeled with conjunctions of (possibly negated) atoms; acceptance is on
// states: a run is accepting iff it visits an accepting state infinitely
// often. Every transition label is satisfiable and every state is reachable
// from an initial state.
struct BuchiAutomaton {
  struct Literal {
    prop::Atom atom;
    bool neg = false;
  };
  using Label = std::vector<Literal>;  // conjunction; empty = true

  struct Transition {
    Label label;
    std::uint32_t dst = 0;
  };

  std::uint32_t num_states = 0;
  std::vector<std::uint32_t> initial;            // sorted
  std::vector<bool> accepting;                   // per state
  std::vector<std::vector<Transition>> out;      // per state, canonical order

  std::size_t transition_count() const {
    std::size_t n = 0;
    for (const auto& v : out) n += v.size();
    return n;
  }
};

bool label_satisfied(const BuchiAutomaton::Label& label, const Observation& obs);

// Tableau translation: the automaton accepts exactly the infinite words
// satisfying f. Node-splitting construction over the negation normal form,
// generalized acceptance removed by a counter, then reachability pruning
// and a bisimulation quotient.
BuchiAutomaton to_buchi(const prop::Formula& f);

// Does the automaton accept prefix . loop^omega? Product of the automaton
// with the lasso positions, then accepting-cycle search.
bool lasso_accepted(const BuchiAutomaton& ba, std::span<const Observation> prefix,
                    std::span<const Observation> loop);

std::string describe(const BuchiAutomaton& ba);

}  // namespace scver
