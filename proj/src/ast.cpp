#include "scver/ast.hpp"

namespace scver::ast {

const char* bin_op_text(BinOp op) {
  switch (op) {
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
  }
  return "?";
}

ExprPtr make_bool(bool v, SourceLoc loc) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::BoolLit;
  e->bval = v;
  e->loc = loc;
  return e;
}

ExprPtr make_int(std::int64_t v, SourceLoc loc) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::IntLit;
  e->ival = v;
  e->loc = loc;
  return e;
}

ExprPtr make_name(std::string name, SourceLoc loc) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Name;
  e->name = std::move(name);
  e->loc = loc;
  return e;
}

ExprPtr make_unary(UnOp op, ExprPtr inner, SourceLoc loc) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Unary;
  e->un = op;
  e->lhs = std::move(inner);
  e->loc = loc;
  return e;
}

ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, SourceLoc loc) {
  auto e = std::make_unique<Expr>();
  e->kind = Expr::Kind::Binary;
  e->bin = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  e->loc = loc;
  return e;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::BoolLit: return a.bval == b.bval;
    case Expr::Kind::IntLit: return a.ival == b.ival;
    case Expr::Kind::Name: return a.name == b.name;
    case Expr::Kind::Unary: return a.un == b.un && expr_equal(*a.lhs, *b.lhs);
    case Expr::Kind::Binary:
      return a.bin == b.bin && expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
  }
  return false;
}

namespace {

bool block_equal(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!stmt_equal(a[i], b[i])) return false;
  }
  return true;
}

bool opt_expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return expr_equal(*a, *b);
}

}  // namespace

bool stmt_equal(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && a.target == b.target && a.amount == b.amount &&
         a.has_else == b.has_else && opt_expr_equal(a.expr, b.expr) &&
         block_equal(a.body, b.body) && block_equal(a.else_body, b.else_body);
}

bool prop_equal(const PropExpr& a, const PropExpr& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == PropExpr::Kind::Atom) {
    return a.instance == b.instance && a.member == b.member && a.has_cmp == b.has_cmp &&
           (!a.has_cmp || (a.cmp == b.cmp && opt_expr_equal(a.literal, b.literal)));
  }
  auto child_eq = [](const PropExprPtr& x, const PropExprPtr& y) {
    if (!x || !y) return !x && !y;
    return prop_equal(*x, *y);
  };
  return child_eq(a.lhs, b.lhs) && child_eq(a.rhs, b.rhs);
}

bool design_equal(const DesignAst& a, const DesignAst& b) {
  if (a.modules.size() != b.modules.size() || a.instances.size() != b.instances.size() ||
      a.binds.size() != b.binds.size() || a.properties.size() != b.properties.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.modules.size(); ++i) {
    const auto& m = a.modules[i];
    const auto& n = b.modules[i];
    if (m.name != n.name || m.ports.size() != n.ports.size() ||
        m.signals.size() != n.signals.size() || m.vars.size() != n.vars.size() ||
        m.events.size() != n.events.size() || m.processes.size() != n.processes.size()) {
      return false;
    }
    for (std::size_t j = 0; j < m.ports.size(); ++j) {
      if (m.ports[j].is_in != n.ports[j].is_in || m.ports[j].name != n.ports[j].name ||
          !(m.ports[j].type == n.ports[j].type)) {
        return false;
      }
    }
    for (std::size_t j = 0; j < m.signals.size(); ++j) {
      if (m.signals[j].name != n.signals[j].name || !(m.signals[j].type == n.signals[j].type) ||
          !opt_expr_equal(m.signals[j].init, n.signals[j].init)) {
        return false;
      }
    }
    for (std::size_t j = 0; j < m.vars.size(); ++j) {
      if (m.vars[j].name != n.vars[j].name || !(m.vars[j].type == n.vars[j].type) ||
          !opt_expr_equal(m.vars[j].init, n.vars[j].init)) {
        return false;
      }
    }
    for (std::size_t j = 0; j < m.events.size(); ++j) {
      if (m.events[j].name != n.events[j].name) return false;
    }
    for (std::size_t j = 0; j < m.processes.size(); ++j) {
      if (m.processes[j].name != n.processes[j].name ||
          !block_equal(m.processes[j].body, n.processes[j].body)) {
        return false;
      }
    }
  }
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    if (a.instances[i].name != b.instances[i].name ||
        a.instances[i].module_name != b.instances[i].module_name) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.binds.size(); ++i) {
    const auto& x = a.binds[i];
    const auto& y = b.binds[i];
    if (x.from_instance != y.from_instance || x.from_port != y.from_port ||
        x.to_instance != y.to_instance || x.to_port != y.to_port) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.properties.size(); ++i) {
    if (a.properties[i].is_ltl != b.properties[i].is_ltl ||
        a.properties[i].name != b.properties[i].name ||
        !prop_equal(*a.properties[i].formula, *b.properties[i].formula)) {
      return false;
    }
  }
  return true;
}

}  // namespace scver::ast
