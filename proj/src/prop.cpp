#include "scver/prop.hpp"

#include <algorithm>
#include <unordered_map>

#include "scver/parser.hpp"

namespace scver::prop {

namespace {

Formula mk_node(Op op, Formula a = nullptr, Formula b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  switch (op) {
    case Op::True: n->key = "true"; break;
    case Op::False: n->key = "false"; break;
    case Op::Not: n->key = "!(" + n->a->key + ")"; break;
    case Op::And: n->key = "(" + n->a->key + ")&&(" + n->b->key + ")"; break;
    case Op::Or: n->key = "(" + n->a->key + ")||(" + n->b->key + ")"; break;
    case Op::Next: n->key = "X(" + n->a->key + ")"; break;
    case Op::Eventually: n->key = "F(" + n->a->key + ")"; break;
    case Op::Always: n->key = "G(" + n->a->key + ")"; break;
    case Op::Until: n->key = "(" + n->a->key + ")U(" + n->b->key + ")"; break;
    case Op::Release: n->key = "(" + n->a->key + ")R(" + n->b->key + ")"; break;
    case Op::Atom: break;
  }
  return n;
}

}  // namespace

Formula mk_true() { return mk_node(Op::True); }
Formula mk_false() { return mk_node(Op::False); }

Formula mk_atom(Atom a, bool neg) {
  auto n = std::make_shared<Node>();
  n->op = Op::Atom;
  n->atom = std::move(a);
  n->neg = neg;
  n->key = std::string(neg ? "!" : "") + (n->atom.is_input ? "i" : "s") +
           std::to_string(n->atom.slot) + ast::bin_op_text(n->atom.cmp) +
           std::to_string(n->atom.literal);
  return n;
}

Formula mk_not(Formula f) { return mk_node(Op::Not, std::move(f)); }
Formula mk_and(Formula a, Formula b) { return mk_node(Op::And, std::move(a), std::move(b)); }
Formula mk_or(Formula a, Formula b) { return mk_node(Op::Or, std::move(a), std::move(b)); }
Formula mk_next(Formula f) { return mk_node(Op::Next, std::move(f)); }
Formula mk_eventually(Formula f) { return mk_node(Op::Eventually, std::move(f)); }
Formula mk_always(Formula f) { return mk_node(Op::Always, std::move(f)); }
Formula mk_until(Formula a, Formula b) { return mk_node(Op::Until, std::move(a), std::move(b)); }
Formula mk_release(Formula a, Formula b) { return mk_node(Op::Release, std::move(a), std::move(b)); }

std::string to_string(const Formula& f) {
  if (f->op == Op::Atom) return (f->neg ? "!(" + f->atom.text + ")" : f->atom.text);
  switch (f->op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Not: return "!(" + to_string(f->a) + ")";
    case Op::And: return "(" + to_string(f->a) + " && " + to_string(f->b) + ")";
    case Op::Or: return "(" + to_string(f->a) + " || " + to_string(f->b) + ")";
    case Op::Next: return "X (" + to_string(f->a) + ")";
    case Op::Eventually: return "F (" + to_string(f->a) + ")";
    case Op::Always: return "G (" + to_string(f->a) + ")";
    case Op::Until: return "(" + to_string(f->a) + " U " + to_string(f->b) + ")";
    case Op::Release: return "(" + to_string(f->a) + " R " + to_string(f->b) + ")";
    default: return "?";
  }
}

namespace {

Formula nnf_pos(const Formula& f);

Formula nnf_neg(const Formula& f) {
  switch (f->op) {
    case Op::True: return mk_false();
    case Op::False: return mk_true();
    case Op::Atom: return mk_atom(f->atom, !f->neg);
    case Op::Not: return nnf_pos(f->a);
    case Op::And: return mk_or(nnf_neg(f->a), nnf_neg(f->b));
    case Op::Or: return mk_and(nnf_neg(f->a), nnf_neg(f->b));
    case Op::Next: return mk_next(nnf_neg(f->a));
    case Op::Eventually: return mk_always(nnf_neg(f->a));
    case Op::Always: return mk_eventually(nnf_neg(f->a));
    case Op::Until: return mk_release(nnf_neg(f->a), nnf_neg(f->b));
    case Op::Release: return mk_until(nnf_neg(f->a), nnf_neg(f->b));
  }
  return nullptr;
}

Formula nnf_pos(const Formula& f) {
  switch (f->op) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return f;
    case Op::Not: return nnf_neg(f->a);
    case Op::And: return mk_and(nnf_pos(f->a), nnf_pos(f->b));
    case Op::Or: return mk_or(nnf_pos(f->a), nnf_pos(f->b));
    case Op::Next: return mk_next(nnf_pos(f->a));
    case Op::Eventually: return mk_eventually(nnf_pos(f->a));
    case Op::Always: return mk_always(nnf_pos(f->a));
    case Op::Until: return mk_until(nnf_pos(f->a), nnf_pos(f->b));
    case Op::Release: return mk_release(nnf_pos(f->a), nnf_pos(f->b));
  }
  return nullptr;
}

}  // namespace

Formula nnf(const Formula& f) { return nnf_pos(f); }

bool is_propositional(const Formula& f) {
  switch (f->op) {
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
    case Op::Until:
    case Op::Release:
      return false;
    default:
      break;
  }
  if (f->a && !is_propositional(f->a)) return false;
  if (f->b && !is_propositional(f->b)) return false;
  return true;
}

bool eval_atom(const Atom& atom, bool neg, const Observation& obs) {
  Value v = atom.is_input ? obs.inputs[atom.slot] : obs.signals[atom.slot];
  bool r = false;
  switch (atom.cmp) {
    case ast::BinOp::Eq: r = v == atom.literal; break;
    case ast::BinOp::Ne: r = v != atom.literal; break;
    case ast::BinOp::Lt: r = v < atom.literal; break;
    case ast::BinOp::Le: r = v <= atom.literal; break;
    case ast::BinOp::Gt: r = v > atom.literal; break;
    case ast::BinOp::Ge: r = v >= atom.literal; break;
    default: break;
  }
  return neg ? !r : r;
}

bool eval_prop(const Formula& f, const Observation& obs) {
  switch (f->op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return eval_atom(f->atom, f->neg, obs);
    case Op::Not: return !eval_prop(f->a, obs);
    case Op::And: return eval_prop(f->a, obs) && eval_prop(f->b, obs);
    case Op::Or: return eval_prop(f->a, obs) || eval_prop(f->b, obs);
    default:
      fail_semantic("temporal operator in a propositional context");
  }
}

namespace {

// Per-subformula truth vectors over the lasso positions, computed bottom-up;
// U/F as least fixpoints, R/G as greatest fixpoints.
class LassoEval {
 public:
  LassoEval(std::span<const Observation> prefix, std::span<const Observation> loop)
      : prefix_(prefix), loop_(loop), n_(prefix.size() + loop.size()) {}

  std::vector<char> eval(const Formula& f) {
    auto it = memo_.find(f->key);
    if (it != memo_.end()) return it->second;
    std::vector<char> v(n_, 0);
    switch (f->op) {
      case Op::True: std::fill(v.begin(), v.end(), 1); break;
      case Op::False: break;
      case Op::Atom:
        for (std::size_t i = 0; i < n_; ++i) v[i] = eval_atom(f->atom, f->neg, obs(i));
        break;
      case Op::Not: {
        auto a = eval(f->a);
        for (std::size_t i = 0; i < n_; ++i) v[i] = !a[i];
        break;
      }
      case Op::And: {
        auto a = eval(f->a), b = eval(f->b);
        for (std::size_t i = 0; i < n_; ++i) v[i] = a[i] && b[i];
        break;
      }
      case Op::Or: {
        auto a = eval(f->a), b = eval(f->b);
        for (std::size_t i = 0; i < n_; ++i) v[i] = a[i] || b[i];
        break;
      }
      case Op::Next: {
        auto a = eval(f->a);
        for (std::size_t i = 0; i < n_; ++i) v[i] = a[succ(i)];
        break;
      }
      case Op::Until: {
        auto a = eval(f->a), b = eval(f->b);
        fixpoint(v, false, [&](std::size_t i, const std::vector<char>& cur) {
          return b[i] || (a[i] && cur[succ(i)]);
        });
        break;
      }
      case Op::Release: {
        auto a = eval(f->a), b = eval(f->b);
        fixpoint(v, true, [&](std::size_t i, const std::vector<char>& cur) {
          return b[i] && (a[i] || cur[succ(i)]);
        });
        break;
      }
      case Op::Eventually: {
        auto a = eval(f->a);
        fixpoint(v, false, [&](std::size_t i, const std::vector<char>& cur) {
          return a[i] || cur[succ(i)];
        });
        break;
      }
      case Op::Always: {
        auto a = eval(f->a);
        fixpoint(v, true, [&](std::size_t i, const std::vector<char>& cur) {
          return a[i] && cur[succ(i)];
        });
        break;
      }
    }
    memo_.emplace(f->key, v);
    return v;
  }

 private:
  const Observation& obs(std::size_t i) const {
    return i < prefix_.size() ? prefix_[i] : loop_[i - prefix_.size()];
  }
  std::size_t succ(std::size_t i) const { return i + 1 < n_ ? i + 1 : prefix_.size(); }

  template <typename Step>
  void fixpoint(std::vector<char>& v, bool init, Step step) {
    std::fill(v.begin(), v.end(), init ? 1 : 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t k = n_; k-- > 0;) {
        char nv = step(k, v) ? 1 : 0;
        if (nv != v[k]) {
          v[k] = nv;
          changed = true;
        }
      }
    }
  }

  std::span<const Observation> prefix_, loop_;
  std::size_t n_;
  std::unordered_map<std::string, std::vector<char>> memo_;
};

}  // namespace

bool eval_lasso(const Formula& f, std::span<const Observation> prefix,
                std::span<const Observation> loop) {
  if (loop.empty()) fail_semantic("lasso loop must be nonempty");
  LassoEval ev(prefix, loop);
  return ev.eval(f)[0] != 0;
}

namespace {

Value resolve_literal(const ast::Expr& lit, const ScalarType& type, const std::string& name) {
  switch (lit.kind) {
    case ast::Expr::Kind::BoolLit:
      if (type.kind != ScalarType::Kind::Bool) {
        fail_semantic("boolean literal compared against non-bool '" + name + "'", lit.loc);
      }
      return lit.bval ? 1 : 0;
    case ast::Expr::Kind::IntLit:
      if (type.kind != ScalarType::Kind::Int) {
        fail_semantic("integer literal compared against non-integer '" + name + "'", lit.loc);
      }
      if (!type.contains(lit.ival)) {
        fail_semantic("literal " + std::to_string(lit.ival) + " outside range of '" + name +
                          "' (" + type.str() + ")",
                      lit.loc);
      }
      return lit.ival;
    case ast::Expr::Kind::Name: {
      if (type.kind != ScalarType::Kind::Enum) {
        fail_semantic("label literal compared against non-enum '" + name + "'", lit.loc);
      }
      auto it = std::find(type.labels.begin(), type.labels.end(), lit.name);
      if (it == type.labels.end()) {
        fail_semantic("'" + lit.name + "' is not a label of " + type.str(), lit.loc);
      }
      return it - type.labels.begin();
    }
    case ast::Expr::Kind::Unary:
      if (lit.un == ast::UnOp::Neg && lit.lhs->kind == ast::Expr::Kind::IntLit) {
        auto neg = ast::make_int(-lit.lhs->ival, lit.loc);
        return resolve_literal(*neg, type, name);
      }
      [[fallthrough]];
    default:
      fail_semantic("expected a literal", lit.loc);
  }
}

}  // namespace

Formula resolve(const ast::PropExpr& e, const SymbolTable& symbols) {
  using K = ast::PropExpr::Kind;
  switch (e.kind) {
    case K::True: return mk_true();
    case K::False: return mk_false();
    case K::Atom: {
      std::string name = e.instance + "." + e.member;
      auto it = symbols.visible.find(name);
      if (it == symbols.visible.end()) {
        auto hid = symbols.hidden.find(name);
        if (hid != symbols.hidden.end()) {
          fail_semantic("'" + name + "' cannot appear in a property: " + hid->second, e.loc);
        }
        fail_semantic("unknown name '" + name + "' in property", e.loc);
      }
      Atom a;
      a.is_input = it->second.is_input;
      a.slot = it->second.slot;
      a.type = it->second.type;
      if (!e.has_cmp) {
        if (a.type.kind != ScalarType::Kind::Bool) {
          fail_semantic("bare atom '" + name + "' must be boolean (type is " + a.type.str() + ")",
                        e.loc);
        }
        a.cmp = ast::BinOp::Eq;
        a.literal = 1;
        a.text = name;
      } else {
        if (e.cmp != ast::BinOp::Eq && e.cmp != ast::BinOp::Ne &&
            a.type.kind == ScalarType::Kind::Bool) {
          fail_semantic("ordering comparison on boolean '" + name + "'", e.loc);
        }
        a.cmp = e.cmp;
        a.literal = resolve_literal(*e.literal, a.type, name);
        a.text = name + " " + ast::bin_op_text(a.cmp) + " " + a.type.render(a.literal);
      }
      return mk_atom(std::move(a));
    }
    case K::Not: return mk_not(resolve(*e.lhs, symbols));
    case K::And: return mk_and(resolve(*e.lhs, symbols), resolve(*e.rhs, symbols));
    case K::Or: return mk_or(resolve(*e.lhs, symbols), resolve(*e.rhs, symbols));
    case K::Imply:  // desugared on the spot
      return mk_or(mk_not(resolve(*e.lhs, symbols)), resolve(*e.rhs, symbols));
    case K::Next: return mk_next(resolve(*e.lhs, symbols));
    case K::Eventually: return mk_eventually(resolve(*e.lhs, symbols));
    case K::Always: return mk_always(resolve(*e.lhs, symbols));
    case K::Until: return mk_until(resolve(*e.lhs, symbols), resolve(*e.rhs, symbols));
    case K::Release: return mk_release(resolve(*e.lhs, symbols), resolve(*e.rhs, symbols));
  }
  fail_semantic("malformed property expression", e.loc);
}

Formula parse_ltl(std::string_view text, const SymbolTable& symbols) {
  ast::PropExprPtr e = parse_property_expr(text);
  return resolve(*e, symbols);
}

}  // namespace scver::prop
