#include "scver/parser.hpp"

#include "scver/lexer.hpp"

namespace scver {

using namespace ast;

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  ast::PropExprPtr parse_prop_only() {
    PropExprPtr e = parse_prop_imply();
    expect(Tok::End);
    return e;
  }

  DesignAst parse_design() {
    DesignAst d;
    while (!at(Tok::End)) {
      switch (cur().kind) {
        case Tok::KwModule:
          d.modules.push_back(parse_module());
          break;
        case Tok::KwInstance: {
          InstanceDecl inst;
          inst.loc = cur().loc;
          next();
          inst.name = expect_ident("instance name");
          expect(Tok::Colon);
          inst.module_name = expect_ident("module name");
          expect(Tok::Semi);
          d.instances.push_back(std::move(inst));
          break;
        }
        case Tok::KwBind: {
          BindDecl b;
          b.loc = cur().loc;
          next();
          b.from_instance = expect_ident("instance name");
          expect(Tok::Dot);
          b.from_port = expect_ident("port name");
          expect(Tok::Arrow);
          b.to_instance = expect_ident("instance name");
          expect(Tok::Dot);
          b.to_port = expect_ident("port name");
          expect(Tok::Semi);
          d.binds.push_back(std::move(b));
          break;
        }
        case Tok::KwLtl:
        case Tok::KwInvariant:
          d.properties.push_back(parse_property());
          break;
        default:
          fail_parse(std::string("expected 'module', 'instance', 'bind', 'ltl' or "
                                 "'invariant', found ") +
                         tok_text(cur().kind),
                     cur().loc);
      }
    }
    return d;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek() const { return toks_[pos_ + 1 < toks_.size() ? pos_ + 1 : pos_]; }
  bool at(Tok t) const { return cur().kind == t; }
  void next() { if (pos_ + 1 < toks_.size()) ++pos_; }

  Token expect(Tok t) {
    if (!at(t)) {
      fail_parse(std::string("expected ") + tok_text(t) + ", found " + tok_text(cur().kind),
                 cur().loc);
    }
    Token tok = cur();
    next();
    return tok;
  }

  std::string expect_ident(const char* what) {
    if (!at(Tok::Ident)) {
      fail_parse(std::string("expected ") + what + ", found " + tok_text(cur().kind),
                 cur().loc);
    }
    std::string s = cur().text;
    next();
    return s;
  }

  ModuleDecl parse_module() {
    ModuleDecl m;
    m.loc = cur().loc;
    expect(Tok::KwModule);
    m.name = expect_ident("module name");
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) {
      switch (cur().kind) {
        case Tok::KwIn:
        case Tok::KwOut: {
          PortDecl p;
          p.loc = cur().loc;
          p.is_in = at(Tok::KwIn);
          next();
          p.name = expect_ident("port name");
          expect(Tok::Colon);
          p.type = parse_type();
          expect(Tok::Semi);
          m.ports.push_back(std::move(p));
          break;
        }
        case Tok::KwSignal: {
          SignalDecl s;
          s.loc = cur().loc;
          next();
          s.name = expect_ident("signal name");
          expect(Tok::Colon);
          s.type = parse_type();
          expect(Tok::Assign);
          s.init = parse_literal();
          expect(Tok::Semi);
          m.signals.push_back(std::move(s));
          break;
        }
        case Tok::KwVar: {
          VarDecl v;
          v.loc = cur().loc;
          next();
          v.name = expect_ident("variable name");
          expect(Tok::Colon);
          v.type = parse_type();
          expect(Tok::Assign);
          v.init = parse_literal();
          expect(Tok::Semi);
          m.vars.push_back(std::move(v));
          break;
        }
        case Tok::KwEvent: {
          EventDecl e;
          e.loc = cur().loc;
          next();
          e.name = expect_ident("event name");
          expect(Tok::Semi);
          m.events.push_back(std::move(e));
          break;
        }
        case Tok::KwProcess: {
          ProcessDecl p;
          p.loc = cur().loc;
          next();
          p.name = expect_ident("process name");
          p.body = parse_block();
          m.processes.push_back(std::move(p));
          break;
        }
        default:
          fail_parse(std::string("expected 'in', 'out', 'signal', 'var', 'event', "
                                 "'process' or '}', found ") +
                         tok_text(cur().kind),
                     cur().loc);
      }
    }
    expect(Tok::RBrace);
    return m;
  }

  ScalarType parse_type() {
    if (at(Tok::KwBool)) {
      next();
      return ScalarType::boolean();
    }
    if (at(Tok::KwInt)) {
      next();
      expect(Tok::LBracket);
      std::int64_t lo = parse_signed_int();
      expect(Tok::DotDot);
      std::int64_t hi = parse_signed_int();
      SourceLoc l = cur().loc;
      expect(Tok::RBracket);
      if (lo > hi) fail_parse("empty integer range: lower bound exceeds upper bound", l);
      return ScalarType::bounded(lo, hi);
    }
    if (at(Tok::KwEnum)) {
      next();
      expect(Tok::LBrace);
      std::vector<std::string> labels;
      labels.push_back(expect_ident("enum label"));
      while (at(Tok::Comma)) {
        next();
        labels.push_back(expect_ident("enum label"));
      }
      expect(Tok::RBrace);
      return ScalarType::enumeration(std::move(labels));
    }
    fail_parse(std::string("expected type ('bool', 'int' or 'enum'), found ") +
                   tok_text(cur().kind),
               cur().loc);
  }

  std::int64_t parse_signed_int() {
    bool neg = false;
    if (at(Tok::Minus)) {
      neg = true;
      next();
    }
    Token t = expect(Tok::Int);
    return neg ? -t.value : t.value;
  }

  // Literals: true/false, (signed) integers, enum labels as bare names.
  ExprPtr parse_literal() {
    SourceLoc l = cur().loc;
    if (at(Tok::KwTrue)) { next(); return make_bool(true, l); }
    if (at(Tok::KwFalse)) { next(); return make_bool(false, l); }
    if (at(Tok::Minus) || at(Tok::Int)) return make_int(parse_signed_int(), l);
    if (at(Tok::Ident)) return make_name(expect_ident("literal"), l);
    fail_parse(std::string("expected literal, found ") + tok_text(cur().kind), l);
  }

  Block parse_block() {
    expect(Tok::LBrace);
    Block b;
    while (!at(Tok::RBrace)) b.push_back(parse_stmt());
    expect(Tok::RBrace);
    return b;
  }

  Stmt parse_stmt() {
    Stmt s;
    s.loc = cur().loc;
    switch (cur().kind) {
      case Tok::Ident: {
        s.target = cur().text;
        next();
        if (at(Tok::Assign)) {
          s.kind = Stmt::Kind::Assign;
        } else if (at(Tok::Le)) {
          s.kind = Stmt::Kind::NextWrite;
        } else {
          fail_parse(std::string("expected '=' or '<=' after name, found ") +
                         tok_text(cur().kind),
                     cur().loc);
        }
        next();
        s.expr = parse_expr();
        expect(Tok::Semi);
        return s;
      }
      case Tok::KwIf: {
        next();
        s.kind = Stmt::Kind::If;
        s.expr = parse_expr();
        s.body = parse_block();
        if (at(Tok::KwElse)) {
          next();
          s.has_else = true;
          s.else_body = parse_block();
        }
        return s;
      }
      case Tok::KwWhile: {
        next();
        s.kind = Stmt::Kind::While;
        s.expr = parse_expr();
        s.body = parse_block();
        return s;
      }
      case Tok::KwWait: {
        next();
        expect(Tok::LParen);
        if (at(Tok::KwTime)) {
          next();
          s.kind = Stmt::Kind::WaitTime;
          s.amount = expect(Tok::Int).value;
        } else if (at(Tok::KwChange)) {
          next();
          s.kind = Stmt::Kind::WaitChange;
          s.target = expect_ident("signal name");
        } else if (at(Tok::KwEvent)) {
          next();
          s.kind = Stmt::Kind::WaitEvent;
          s.target = expect_ident("event name");
        } else {
          fail_parse(std::string("expected 'time', 'change' or 'event', found ") +
                         tok_text(cur().kind),
                     cur().loc);
        }
        expect(Tok::RParen);
        expect(Tok::Semi);
        return s;
      }
      case Tok::KwNotify: {
        next();
        expect(Tok::LParen);
        s.kind = Stmt::Kind::NotifyNow;
        s.target = expect_ident("event name");
        if (at(Tok::Comma)) {
          next();
          if (at(Tok::KwDelta)) {
            next();
            s.kind = Stmt::Kind::NotifyDelta;
          } else if (at(Tok::KwTime)) {
            next();
            s.kind = Stmt::Kind::NotifyTime;
            s.amount = expect(Tok::Int).value;
          } else {
            fail_parse(std::string("expected 'delta' or 'time', found ") +
                           tok_text(cur().kind),
                       cur().loc);
          }
        }
        expect(Tok::RParen);
        expect(Tok::Semi);
        return s;
      }
      case Tok::KwAssert: {
        next();
        expect(Tok::LParen);
        s.kind = Stmt::Kind::Assert;
        s.expr = parse_expr();
        expect(Tok::RParen);
        expect(Tok::Semi);
        return s;
      }
      case Tok::KwSkip: {
        next();
        s.kind = Stmt::Kind::Skip;
        expect(Tok::Semi);
        return s;
      }
      default:
        fail_parse(std::string("expected statement, found ") + tok_text(cur().kind),
                   cur().loc);
    }
  }

  // Expressions, loosest binding first: ||, &&, comparison, + -, *, unary.
  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (at(Tok::OrOr)) {
      SourceLoc l = cur().loc;
      next();
      e = make_binary(BinOp::Or, std::move(e), parse_and(), l);
    }
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (at(Tok::AndAnd)) {
      SourceLoc l = cur().loc;
      next();
      e = make_binary(BinOp::And, std::move(e), parse_cmp(), l);
    }
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    BinOp op;
    switch (cur().kind) {
      case Tok::EqEq: op = BinOp::Eq; break;
      case Tok::Ne: op = BinOp::Ne; break;
      case Tok::Lt: op = BinOp::Lt; break;
      case Tok::Le: op = BinOp::Le; break;
      case Tok::Gt: op = BinOp::Gt; break;
      case Tok::Ge: op = BinOp::Ge; break;
      default: return e;
    }
    SourceLoc l = cur().loc;
    next();
    return make_binary(op, std::move(e), parse_add(), l);
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      SourceLoc l = cur().loc;
      next();
      e = make_binary(op, std::move(e), parse_mul(), l);
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (at(Tok::Star)) {
      SourceLoc l = cur().loc;
      next();
      e = make_binary(BinOp::Mul, std::move(e), parse_unary(), l);
    }
    return e;
  }

  ExprPtr parse_unary() {
    SourceLoc l = cur().loc;
    if (at(Tok::Not)) {
      next();
      return make_unary(UnOp::Not, parse_unary(), l);
    }
    if (at(Tok::Minus)) {
      next();
      return make_unary(UnOp::Neg, parse_unary(), l);
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    SourceLoc l = cur().loc;
    switch (cur().kind) {
      case Tok::KwTrue: next(); return make_bool(true, l);
      case Tok::KwFalse: next(); return make_bool(false, l);
      case Tok::Int: {
        std::int64_t v = cur().value;
        next();
        return make_int(v, l);
      }
      case Tok::Ident: {
        std::string n = cur().text;
        next();
        return make_name(std::move(n), l);
      }
      case Tok::LParen: {
        next();
        ExprPtr e = parse_expr();
        expect(Tok::RParen);
        return e;
      }
      default:
        fail_parse(std::string("expected expression, found ") + tok_text(cur().kind), l);
    }
  }

  // ---- properties ----

  PropertyDecl parse_property() {
    PropertyDecl p;
    p.loc = cur().loc;
    p.is_ltl = at(Tok::KwLtl);
    next();
    p.name = expect_ident("property name");
    expect(Tok::LBrace);
    p.formula = parse_prop_imply();
    expect(Tok::RBrace);
    if (!p.is_ltl) reject_temporal(*p.formula);
    return p;
  }

  void reject_temporal(const PropExpr& e) {
    switch (e.kind) {
      case PropExpr::Kind::Next:
      case PropExpr::Kind::Eventually:
      case PropExpr::Kind::Always:
      case PropExpr::Kind::Until:
      case PropExpr::Kind::Release:
        fail_parse("temporal operator not allowed in an invariant", e.loc);
      default:
        break;
    }
    if (e.lhs) reject_temporal(*e.lhs);
    if (e.rhs) reject_temporal(*e.rhs);
  }

  PropExprPtr mk_prop(PropExpr::Kind k, SourceLoc l, PropExprPtr a = nullptr,
                      PropExprPtr b = nullptr) {
    auto e = std::make_unique<PropExpr>();
    e->kind = k;
    e->loc = l;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
  }

  // Binding, loosest first: -> (right), ||, &&, U/R (right), unary X F G !.
  PropExprPtr parse_prop_imply() {
    PropExprPtr e = parse_prop_or();
    if (at(Tok::Arrow)) {
      SourceLoc l = cur().loc;
      next();
      return mk_prop(PropExpr::Kind::Imply, l, std::move(e), parse_prop_imply());
    }
    return e;
  }

  PropExprPtr parse_prop_or() {
    PropExprPtr e = parse_prop_and();
    while (at(Tok::OrOr)) {
      SourceLoc l = cur().loc;
      next();
      e = mk_prop(PropExpr::Kind::Or, l, std::move(e), parse_prop_and());
    }
    return e;
  }

  PropExprPtr parse_prop_and() {
    PropExprPtr e = parse_prop_until();
    while (at(Tok::AndAnd)) {
      SourceLoc l = cur().loc;
      next();
      e = mk_prop(PropExpr::Kind::And, l, std::move(e), parse_prop_until());
    }
    return e;
  }

  bool at_ltl_op(const char* name) const {
    return at(Tok::Ident) && cur().text == name;
  }

  PropExprPtr parse_prop_until() {
    PropExprPtr e = parse_prop_unary();
    if (at_ltl_op("U") || at_ltl_op("R")) {
      bool until = cur().text == "U";
      SourceLoc l = cur().loc;
      next();
      return mk_prop(until ? PropExpr::Kind::Until : PropExpr::Kind::Release, l,
                     std::move(e), parse_prop_until());
    }
    return e;
  }

  PropExprPtr parse_prop_unary() {
    SourceLoc l = cur().loc;
    if (at(Tok::Not)) {
      next();
      return mk_prop(PropExpr::Kind::Not, l, parse_prop_unary());
    }
    if (at_ltl_op("X")) { next(); return mk_prop(PropExpr::Kind::Next, l, parse_prop_unary()); }
    if (at_ltl_op("F")) { next(); return mk_prop(PropExpr::Kind::Eventually, l, parse_prop_unary()); }
    if (at_ltl_op("G")) { next(); return mk_prop(PropExpr::Kind::Always, l, parse_prop_unary()); }
    return parse_prop_primary();
  }

  PropExprPtr parse_prop_primary() {
    SourceLoc l = cur().loc;
    if (at(Tok::KwTrue)) { next(); return mk_prop(PropExpr::Kind::True, l); }
    if (at(Tok::KwFalse)) { next(); return mk_prop(PropExpr::Kind::False, l); }
    if (at(Tok::LParen)) {
      next();
      PropExprPtr e = parse_prop_imply();
      expect(Tok::RParen);
      return e;
    }
    if (at(Tok::Ident)) {
      auto e = std::make_unique<PropExpr>();
      e->kind = PropExpr::Kind::Atom;
      e->loc = l;
      e->instance = expect_ident("instance name");
      expect(Tok::Dot);
      e->member = expect_ident("signal or port name");
      switch (cur().kind) {
        case Tok::EqEq: e->cmp = BinOp::Eq; break;
        case Tok::Ne: e->cmp = BinOp::Ne; break;
        case Tok::Lt: e->cmp = BinOp::Lt; break;
        case Tok::Le: e->cmp = BinOp::Le; break;
        case Tok::Gt: e->cmp = BinOp::Gt; break;
        case Tok::Ge: e->cmp = BinOp::Ge; break;
        default: return e;  // bare boolean atom
      }
      e->has_cmp = true;
      next();
      e->literal = parse_literal();
      return e;
    }
    fail_parse(std::string("expected property expression, found ") + tok_text(cur().kind), l);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ast::DesignAst parse(std::string_view source) {
  return Parser(source).parse_design();
}

ast::PropExprPtr parse_property_expr(std::string_view text) {
  return Parser(text).parse_prop_only();
}

}  // namespace scver
