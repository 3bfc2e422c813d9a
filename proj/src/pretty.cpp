#include "scver/pretty.hpp"

#include <sstream>

namespace scver {

using namespace ast;

namespace {

// Parenthesize everything non-atomic; reparse only needs structure, not
// minimal parens.
void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::BoolLit:
      os << (e.bval ? "true" : "false");
      return;
    case Expr::Kind::IntLit:
      os << e.ival;
      return;
    case Expr::Kind::Name:
      os << e.name;
      return;
    case Expr::Kind::Unary:
      os << (e.un == UnOp::Not ? "!" : "-") << "(";
      print_expr(os, *e.lhs);
      os << ")";
      return;
    case Expr::Kind::Binary:
      os << "(";
      print_expr(os, *e.lhs);
      os << " " << bin_op_text(e.bin) << " ";
      print_expr(os, *e.rhs);
      os << ")";
      return;
  }
}

void print_type(std::ostream& os, const ScalarType& t) {
  switch (t.kind) {
    case ScalarType::Kind::Bool:
      os << "bool";
      return;
    case ScalarType::Kind::Int:
      os << "int[" << t.lo << ".." << t.hi << "]";
      return;
    case ScalarType::Kind::Enum: {
      os << "enum {";
      for (std::size_t i = 0; i < t.labels.size(); ++i) {
        if (i) os << ", ";
        os << t.labels[i];
      }
      os << "}";
      return;
    }
  }
}

void print_block(std::ostream& os, const Block& b, int indent);

void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  os << pad;
  switch (s.kind) {
    case Stmt::Kind::Assign:
      os << s.target << " = ";
      print_expr(os, *s.expr);
      os << ";\n";
      return;
    case Stmt::Kind::NextWrite:
      os << s.target << " <= ";
      print_expr(os, *s.expr);
      os << ";\n";
      return;
    case Stmt::Kind::If:
      os << "if ";
      print_expr(os, *s.expr);
      os << " ";
      print_block(os, s.body, indent);
      if (s.has_else) {
        os << pad << "else ";
        print_block(os, s.else_body, indent);
      }
      return;
    case Stmt::Kind::While:
      os << "while ";
      print_expr(os, *s.expr);
      os << " ";
      print_block(os, s.body, indent);
      return;
    case Stmt::Kind::WaitTime:
      os << "wait(time " << s.amount << ");\n";
      return;
    case Stmt::Kind::WaitChange:
      os << "wait(change " << s.target << ");\n";
      return;
    case Stmt::Kind::WaitEvent:
      os << "wait(event " << s.target << ");\n";
      return;
    case Stmt::Kind::NotifyNow:
      os << "notify(" << s.target << ");\n";
      return;
    case Stmt::Kind::NotifyDelta:
      os << "notify(" << s.target << ", delta);\n";
      return;
    case Stmt::Kind::NotifyTime:
      os << "notify(" << s.target << ", time " << s.amount << ");\n";
      return;
    case Stmt::Kind::Assert:
      os << "assert(";
      print_expr(os, *s.expr);
      os << ");\n";
      return;
    case Stmt::Kind::Skip:
      os << "skip;\n";
      return;
  }
}

void print_block(std::ostream& os, const Block& b, int indent) {
  os << "{\n";
  for (const auto& s : b) print_stmt(os, s, indent + 1);
  os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << "}\n";
}

void print_prop(std::ostream& os, const PropExpr& p) {
  switch (p.kind) {
    case PropExpr::Kind::True: os << "true"; return;
    case PropExpr::Kind::False: os << "false"; return;
    case PropExpr::Kind::Atom:
      os << p.instance << "." << p.member;
      if (p.has_cmp) {
        os << " " << bin_op_text(p.cmp) << " ";
        print_expr(os, *p.literal);
      }
      return;
    case PropExpr::Kind::Not:
      os << "!(";
      print_prop(os, *p.lhs);
      os << ")";
      return;
    case PropExpr::Kind::Next:
    case PropExpr::Kind::Eventually:
    case PropExpr::Kind::Always: {
      const char* op = p.kind == PropExpr::Kind::Next         ? "X"
                       : p.kind == PropExpr::Kind::Eventually ? "F"
                                                              : "G";
      os << op << " (";
      print_prop(os, *p.lhs);
      os << ")";
      return;
    }
    case PropExpr::Kind::And:
    case PropExpr::Kind::Or:
    case PropExpr::Kind::Imply:
    case PropExpr::Kind::Until:
    case PropExpr::Kind::Release: {
      const char* op = p.kind == PropExpr::Kind::And     ? "&&"
                       : p.kind == PropExpr::Kind::Or    ? "||"
                       : p.kind == PropExpr::Kind::Imply ? "->"
                       : p.kind == PropExpr::Kind::Until ? "U"
                                                         : "R";
      os << "(";
      print_prop(os, *p.lhs);
      os << ") " << op << " (";
      print_prop(os, *p.rhs);
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string pretty_print(const Expr& expr) {
  std::ostringstream os;
  print_expr(os, expr);
  return os.str();
}

std::string pretty_print(const PropExpr& prop) {
  std::ostringstream os;
  print_prop(os, prop);
  return os.str();
}

std::string pretty_print(const DesignAst& d) {
  std::ostringstream os;
  for (const auto& m : d.modules) {
    os << "module " << m.name << " {\n";
    for (const auto& p : m.ports) {
      os << "  " << (p.is_in ? "in" : "out") << " " << p.name << ": ";
      print_type(os, p.type);
      os << ";\n";
    }
    for (const auto& s : m.signals) {
      os << "  signal " << s.name << ": ";
      print_type(os, s.type);
      os << " = ";
      print_expr(os, *s.init);
      os << ";\n";
    }
    for (const auto& v : m.vars) {
      os << "  var " << v.name << ": ";
      print_type(os, v.type);
      os << " = ";
      print_expr(os, *v.init);
      os << ";\n";
    }
    for (const auto& e : m.events) os << "  event " << e.name << ";\n";
    for (const auto& p : m.processes) {
      os << "  process " << p.name << " ";
      print_block(os, p.body, 1);
    }
    os << "}\n";
  }
  for (const auto& i : d.instances) {
    os << "instance " << i.name << ": " << i.module_name << ";\n";
  }
  for (const auto& b : d.binds) {
    os << "bind " << b.from_instance << "." << b.from_port << " -> " << b.to_instance
       << "." << b.to_port << ";\n";
  }
  for (const auto& p : d.properties) {
    os << (p.is_ltl ? "ltl " : "invariant ") << p.name << " { ";
    print_prop(os, *p.formula);
    os << " }\n";
  }
  return os.str();
}

}  // namespace scver
