#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scver/types.hpp"

namespace scver::ast {

enum class UnOp { Not, Neg };
enum class BinOp { And, Or, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul };

const char* bin_op_text(BinOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind { BoolLit, IntLit, Name, Unary, Binary };

  Kind kind;
  SourceLoc loc;
  bool bval = false;        // BoolLit
  std::int64_t ival = 0;    // IntLit
  std::string name;         // Name: member reference or enum label
  UnOp un{};                // Unary
  BinOp bin{};              // Binary
  ExprPtr lhs, rhs;         // Unary uses lhs only
};

ExprPtr make_bool(bool v, SourceLoc loc);
ExprPtr make_int(std::int64_t v, SourceLoc loc);
ExprPtr make_name(std::string name, SourceLoc loc);
ExprPtr make_unary(UnOp op, ExprPtr e, SourceLoc loc);
ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, SourceLoc loc);
bool expr_equal(const Expr& a, const Expr& b);

struct Stmt;
using Block = std::vector<Stmt>;

struct Stmt {
  enum class Kind {
    Assign,      // var = expr
    NextWrite,   // signal <= expr
    If,          // if expr block (else block)?
    While,       // while expr block
    WaitTime,    // wait(time N)
    WaitChange,  // wait(change sig)
    WaitEvent,   // wait(event ev)
    NotifyNow,   // notify(ev)
    NotifyDelta, // notify(ev, delta)
    NotifyTime,  // notify(ev, time N)
    Assert,      // assert(expr)
    Skip,
  };

  Kind kind;
  SourceLoc loc;
  std::string target;  // assigned name, waited signal, or notified event
  ExprPtr expr;        // rhs, condition, or asserted expression
  std::int64_t amount = 0;
  Block body;          // if-then / while body
  Block else_body;
  bool has_else = false;
};

bool stmt_equal(const Stmt& a, const Stmt& b);

struct PortDecl {
  bool is_in = true;
  std::string name;
  ScalarType type;
  SourceLoc loc;
};

struct SignalDecl {
  std::string name;
  ScalarType type;
  ExprPtr init;
  SourceLoc loc;
};

struct VarDecl {
  std::string name;
  ScalarType type;
  ExprPtr init;
  SourceLoc loc;
};

struct EventDecl {
  std::string name;
  SourceLoc loc;
};

struct ProcessDecl {
  std::string name;
  Block body;
  SourceLoc loc;
};

struct ModuleDecl {
  std::string name;
  std::vector<PortDecl> ports;
  std::vector<SignalDecl> signals;
  std::vector<VarDecl> vars;
  std::vector<EventDecl> events;
  std::vector<ProcessDecl> processes;
  SourceLoc loc;
};

struct InstanceDecl {
  std::string name;
  std::string module_name;
  SourceLoc loc;
};

struct BindDecl {
  std::string from_instance, from_port;
  std::string to_instance, to_port;
  SourceLoc loc;
};

// Temporal property tree. Invariant bodies use the propositional subset.
struct PropExpr;
using PropExprPtr = std::unique_ptr<PropExpr>;

struct PropExpr {
  enum class Kind {
    True, False,
    Atom,         // inst.member, optionally compared against a literal
    Not, And, Or, Imply,
    Next, Eventually, Always, Until, Release,
  };

  Kind kind;
  SourceLoc loc;
  std::string instance, member;     // Atom
  bool has_cmp = false;             // bare boolean atom when false
  BinOp cmp{};                      // Eq/Ne/Lt/Le/Gt/Ge
  ExprPtr literal;                  // BoolLit | IntLit | Name (enum label)
  PropExprPtr lhs, rhs;
};

bool prop_equal(const PropExpr& a, const PropExpr& b);

struct PropertyDecl {
  bool is_ltl = false;  // false: invariant
  std::string name;
  PropExprPtr formula;
  SourceLoc loc;
};

struct DesignAst {
  std::vector<ModuleDecl> modules;
  std::vector<InstanceDecl> instances;
  std::vector<BindDecl> binds;
  std::vector<PropertyDecl> properties;
};

bool design_equal(const DesignAst& a, const DesignAst& b);

}  // namespace scver::ast
