#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scver/ast.hpp"
#include "scver/observation.hpp"

namespace scver::prop {

// An atom compares one observable slot against a literal. Bare boolean
// atoms are stored as "== true".
struct Atom {
  bool is_input = false;
  std::uint32_t slot = 0;
  ast::BinOp cmp = ast::BinOp::Eq;
  Value literal = 0;
  std::string text;        // display form, e.g. "a.req == 1"
  ScalarType type;         // declared type of the observed slot

  bool same_slot(const Atom& o) const { return is_input == o.is_input && slot == o.slot; }
  bool operator==(const Atom& o) const {
    return is_input == o.is_input && slot == o.slot && cmp == o.cmp && literal == o.literal;
  }
};

enum class Op : std::uint8_t {
  True, False, Atom, Not, And, Or, Next, Eventually, Always, Until, Release,
};

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::True;
  Atom atom;           // Op::Atom
  bool neg = false;    // negated atom (set by NNF)
  Formula a, b;

  // Canonical structural key; used for subformula identity in the tableau.
  std::string key;
};

Formula mk_true();
Formula mk_false();
Formula mk_atom(Atom a, bool neg = false);
Formula mk_not(Formula f);
Formula mk_and(Formula a, Formula b);
Formula mk_or(Formula a, Formula b);
Formula mk_next(Formula f);
Formula mk_eventually(Formula f);
Formula mk_always(Formula f);
Formula mk_until(Formula a, Formula b);
Formula mk_release(Formula a, Formula b);

std::string to_string(const Formula& f);

// Negation normal form: negations pushed onto atoms, implications gone.
// The atom set is preserved (negated atoms keep their comparison intact).
Formula nnf(const Formula& f);

bool is_propositional(const Formula& f);

bool eval_atom(const Atom& atom, bool neg, const Observation& obs);

// Evaluates a propositional formula on one observation. Throws on temporal ops.
bool eval_prop(const Formula& f, const Observation& obs);

// Truth of f on the ultimately periodic word prefix . loop^omega, computed by
// direct fixpoint iteration over the lasso positions. No automata involved;
// this is the independent semantic oracle.
bool eval_lasso(const Formula& f, std::span<const Observation> prefix,
                std::span<const Observation> loop);

// Name resolution context for properties. Keys are "instance.member".
struct SymbolTable {
  struct Entry {
    bool is_input = false;
    std::uint32_t slot = 0;
    ScalarType type;
  };
  std::map<std::string, Entry> visible;
  // Names that exist in the source but may not appear in properties,
  // mapped to the reason (variables, stubbed internals).
  std::map<std::string, std::string> hidden;
};

// Resolves a parsed property tree against a symbol table. Checks literal
// types and ranges. Throws Error(Semantic) with a source position.
Formula resolve(const ast::PropExpr& e, const SymbolTable& symbols);

// Parses and resolves standalone LTL text (same grammar as ltl blocks).
Formula parse_ltl(std::string_view text, const SymbolTable& symbols);

}  // namespace scver::prop
