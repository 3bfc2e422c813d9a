#include "scver/buchi.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace scver {

using prop::Formula;
using prop::Op;

namespace {

struct KeyLess {
  bool operator()(const Formula& a, const Formula& b) const { return a->key < b->key; }
};
using FSet = std::set<Formula, KeyLess>;

bool contains(const FSet& s, const Formula& f) { return s.count(f) > 0; }

// F/G rewritten into U/R so the tableau and its acceptance sets only deal
// with the two binary fixpoint operators.
Formula rewrite_fg(const Formula& f) {
  switch (f->op) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return f;
    case Op::Not: return prop::mk_not(rewrite_fg(f->a));
    case Op::And: return prop::mk_and(rewrite_fg(f->a), rewrite_fg(f->b));
    case Op::Or: return prop::mk_or(rewrite_fg(f->a), rewrite_fg(f->b));
    case Op::Next: return prop::mk_next(rewrite_fg(f->a));
    case Op::Eventually: return prop::mk_until(prop::mk_true(), rewrite_fg(f->a));
    case Op::Always: return prop::mk_release(prop::mk_false(), rewrite_fg(f->a));
    case Op::Until: return prop::mk_until(rewrite_fg(f->a), rewrite_fg(f->b));
    case Op::Release: return prop::mk_release(rewrite_fg(f->a), rewrite_fg(f->b));
  }
  return f;
}

bool is_literal(const Formula& f) {
  return f->op == Op::True || f->op == Op::False || f->op == Op::Atom;
}

Formula negated_literal(const Formula& f) {
  if (f->op == Op::Atom) return prop::mk_atom(f->atom, !f->neg);
  return f->op == Op::True ? prop::mk_false() : prop::mk_true();
}

struct TNode {
  std::set<int> incoming;  // -1 marks the initial edge
  FSet neword, old, next;
};

class Tableau {
 public:
  explicit Tableau(const Formula& f) {
    TNode start;
    start.incoming.insert(-1);
    start.neword.insert(f);
    expand(std::move(start));
  }

  std::vector<TNode> nodes;

 private:
  void expand(TNode node) {
    if (node.neword.empty()) {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].old == node.old && nodes[i].next == node.next) {
          nodes[i].incoming.insert(node.incoming.begin(), node.incoming.end());
          return;
        }
      }
      int id = static_cast<int>(nodes.size());
      nodes.push_back(node);
      TNode succ;
      succ.incoming.insert(id);
      succ.neword = node.next;
      expand(std::move(succ));
      return;
    }
    Formula eta = *node.neword.begin();
    node.neword.erase(node.neword.begin());
    if (is_literal(eta)) {
      if (eta->op == Op::False || contains(node.old, negated_literal(eta))) return;
      if (eta->op != Op::True) node.old.insert(eta);
      expand(std::move(node));
      return;
    }
    switch (eta->op) {
      case Op::And: {
        if (!contains(node.old, eta->a)) node.neword.insert(eta->a);
        if (!contains(node.old, eta->b)) node.neword.insert(eta->b);
        node.old.insert(eta);
        expand(std::move(node));
        return;
      }
      case Op::Next: {
        node.old.insert(eta);
        node.next.insert(eta->a);
        expand(std::move(node));
        return;
      }
      case Op::Or: {
        TNode left = node, right = std::move(node);
        left.old.insert(eta);
        right.old.insert(eta);
        if (!contains(left.old, eta->a)) left.neword.insert(eta->a);
        if (!contains(right.old, eta->b)) right.neword.insert(eta->b);
        expand(std::move(left));
        expand(std::move(right));
        return;
      }
      case Op::Until: {
        // a U b  =  b | (a & X(a U b))
        TNode left = node, right = std::move(node);
        left.old.insert(eta);
        right.old.insert(eta);
        if (!contains(left.old, eta->a)) left.neword.insert(eta->a);
        left.next.insert(eta);
        if (!contains(right.old, eta->b)) right.neword.insert(eta->b);
        expand(std::move(left));
        expand(std::move(right));
        return;
      }
      case Op::Release: {
        // a R b  =  b & (a | X(a R b))
        TNode left = node, right = std::move(node);
        left.old.insert(eta);
        right.old.insert(eta);
        if (!contains(left.old, eta->b)) left.neword.insert(eta->b);
        left.next.insert(eta);
        if (!contains(right.old, eta->a)) right.neword.insert(eta->a);
        if (!contains(right.old, eta->b)) right.neword.insert(eta->b);
        expand(std::move(left));
        expand(std::move(right));
        return;
      }
      default:
        fail_semantic("tableau over non-NNF formula");
    }
  }
};

// Conjunction of same-slot literals must leave at least one value of the
// slot's finite domain; slots are independent.
bool label_satisfiable(const BuchiAutomaton::Label& label) {
  std::map<std::pair<bool, std::uint32_t>, std::vector<const BuchiAutomaton::Literal*>> by_slot;
  for (const auto& lit : label) {
    by_slot[{lit.atom.is_input, lit.atom.slot}].push_back(&lit);
  }
  for (const auto& [slot, lits] : by_slot) {
    const ScalarType& type = lits.front()->atom.type;
    bool any = false;
    std::int64_t lo = type.kind == ScalarType::Kind::Int ? type.lo : 0;
    std::int64_t hi = lo + type.cardinality() - 1;
    for (std::int64_t v = lo; v <= hi && !any; ++v) {
      Observation probe;
      bool ok = true;
      for (const auto* lit : lits) {
        Observation obs;
        (lit->atom.is_input ? obs.inputs : obs.signals).resize(lit->atom.slot + 1);
        (lit->atom.is_input ? obs.inputs : obs.signals)[lit->atom.slot] = v;
        if (!prop::eval_atom(lit->atom, lit->neg, obs)) {
          ok = false;
          break;
        }
      }
      any = ok;
    }
    if (!any) return false;
  }
  return true;
}

std::string label_key(const BuchiAutomaton::Label& label) {
  std::vector<std::string> parts;
  for (const auto& lit : label) {
    parts.push_back(std::string(lit.neg ? "!" : "") + (lit.atom.is_input ? "i" : "s") +
                    std::to_string(lit.atom.slot) + ast::bin_op_text(lit.atom.cmp) +
                    std::to_string(lit.atom.literal));
  }
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const auto& p : parts) key += p + "&";
  return key;
}

BuchiAutomaton prune_and_quotient(const BuchiAutomaton& in) {
  // reachability from initial states
  std::vector<bool> reach(in.num_states, false);
  std::vector<std::uint32_t> work(in.initial.begin(), in.initial.end());
  for (std::uint32_t s : in.initial) reach[s] = true;
  while (!work.empty()) {
    std::uint32_t s = work.back();
    work.pop_back();
    for (const auto& t : in.out[s]) {
      if (!reach[t.dst]) {
        reach[t.dst] = true;
        work.push_back(t.dst);
      }
    }
  }

  // partition refinement: split by acceptance, then by outgoing signatures
  std::vector<std::uint32_t> cls(in.num_states, 0);
  for (std::uint32_t s = 0; s < in.num_states; ++s) cls[s] = in.accepting[s] ? 1 : 0;
  for (;;) {
    std::map<std::pair<std::uint32_t, std::string>, std::uint32_t> sig_to_class;
    std::vector<std::uint32_t> next_cls(in.num_states, 0);
    for (std::uint32_t s = 0; s < in.num_states; ++s) {
      if (!reach[s]) continue;
      std::set<std::string> edges;
      for (const auto& t : in.out[s]) {
        if (!reach[t.dst]) continue;
        edges.insert(label_key(t.label) + ">" + std::to_string(cls[t.dst]));
      }
      std::string sig;
      for (const auto& e : edges) sig += e + "|";
      auto key = std::pair{cls[s], sig};
      auto [it, inserted] = sig_to_class.emplace(key, static_cast<std::uint32_t>(sig_to_class.size()));
      next_cls[s] = it->second;
    }
    if (next_cls == cls) break;
    cls = std::move(next_cls);
  }

  // canonical numbering: classes in order of first (reachable) appearance
  std::map<std::uint32_t, std::uint32_t> renumber;
  for (std::uint32_t s = 0; s < in.num_states; ++s) {
    if (reach[s]) renumber.emplace(cls[s], static_cast<std::uint32_t>(renumber.size()));
  }

  BuchiAutomaton out;
  out.num_states = static_cast<std::uint32_t>(renumber.size());
  out.accepting.assign(out.num_states, false);
  out.out.resize(out.num_states);
  std::set<std::uint32_t> inits;
  for (std::uint32_t s : in.initial) {
    if (reach[s]) inits.insert(renumber.at(cls[s]));
  }
  out.initial.assign(inits.begin(), inits.end());
  std::vector<std::set<std::string>> seen_edges(out.num_states);
  for (std::uint32_t s = 0; s < in.num_states; ++s) {
    if (!reach[s]) continue;
    std::uint32_t cs = renumber.at(cls[s]);
    if (in.accepting[s]) out.accepting[cs] = true;
    for (const auto& t : in.out[s]) {
      if (!reach[t.dst]) continue;
      std::uint32_t cd = renumber.at(cls[t.dst]);
      std::string key = label_key(t.label) + ">" + std::to_string(cd);
      if (seen_edges[cs].insert(key).second) {
        out.out[cs].push_back({t.label, cd});
      }
    }
  }
  for (auto& edges : out.out) {
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
      if (a.dst != b.dst) return a.dst < b.dst;
      return label_key(a.label) < label_key(b.label);
    });
  }
  return out;
}

}  // namespace

bool label_satisfied(const BuchiAutomaton::Label& label, const Observation& obs) {
  for (const auto& lit : label) {
    if (!prop::eval_atom(lit.atom, lit.neg, obs)) return false;
  }
  return true;
}

BuchiAutomaton to_buchi(const prop::Formula& f) {
  Formula g = rewrite_fg(prop::nnf(f));
  Tableau tab(g);

  // collect until-subformulas present in any node (acceptance sets)
  std::vector<Formula> untils;
  {
    FSet seen;
    for (const auto& n : tab.nodes) {
      for (const auto& sub : n.old) {
        if (sub->op == Op::Until && !contains(seen, sub)) {
          seen.insert(sub);
          untils.push_back(sub);
        }
      }
    }
    std::sort(untils.begin(), untils.end(), [](const Formula& a, const Formula& b) {
      return a->key < b->key;
    });
  }
  std::size_t k = untils.size();

  // per-node labels and membership in each acceptance set
  std::vector<BuchiAutomaton::Label> labels(tab.nodes.size());
  std::vector<std::vector<bool>> in_acc(tab.nodes.size(), std::vector<bool>(k, true));
  for (std::size_t n = 0; n < tab.nodes.size(); ++n) {
    for (const auto& sub : tab.nodes[n].old) {
      if (sub->op == Op::Atom) labels[n].push_back({sub->atom, sub->neg});
    }
    for (std::size_t u = 0; u < k; ++u) {
      if (contains(tab.nodes[n].old, untils[u]) && !contains(tab.nodes[n].old, untils[u]->b)) {
        in_acc[n][u] = false;
      }
    }
  }

  // generalized automaton: state 0 is the pre-initial state, node i at i+1
  auto base_state = [](int node_id) { return static_cast<std::uint32_t>(node_id + 1); };
  std::size_t base_n = tab.nodes.size() + 1;

  struct Edge { std::uint32_t src, dst; };
  std::vector<Edge> edges;
  for (std::size_t n = 0; n < tab.nodes.size(); ++n) {
    if (!label_satisfiable(labels[n])) continue;
    for (int src : tab.nodes[n].incoming) {
      edges.push_back({src < 0 ? 0u : base_state(src), base_state(static_cast<int>(n))});
    }
  }

  BuchiAutomaton ba;
  if (k == 0) {
    ba.num_states = static_cast<std::uint32_t>(base_n);
    ba.accepting.assign(base_n, true);
    ba.out.resize(base_n);
    ba.initial = {0};
    for (const auto& e : edges) ba.out[e.src].push_back({labels[e.dst - 1], e.dst});
  } else {
    // counter construction: state (q, c); entering q' advances c past every
    // acceptance set that q' belongs to; c == k is accepting and resets
    auto enc = [&](std::uint32_t q, std::size_t c) {
      return static_cast<std::uint32_t>(q * (k + 1) + c);
    };
    ba.num_states = static_cast<std::uint32_t>(base_n * (k + 1));
    ba.accepting.assign(ba.num_states, false);
    ba.out.resize(ba.num_states);
    for (std::uint32_t q = 0; q < base_n; ++q) ba.accepting[enc(q, k)] = true;
    ba.initial = {enc(0, 0)};
    for (const auto& e : edges) {
      const auto& acc = in_acc[e.dst - 1];
      for (std::size_t c = 0; c <= k; ++c) {
        std::size_t c0 = (c == k) ? 0 : c;
        std::size_t c1 = c0;
        while (c1 < k && acc[c1]) ++c1;
        ba.out[enc(e.src, c)].push_back({labels[e.dst - 1], enc(e.dst, c1)});
      }
    }
  }
  return prune_and_quotient(ba);
}

bool lasso_accepted(const BuchiAutomaton& ba, std::span<const Observation> prefix,
                    std::span<const Observation> loop) {
  std::size_t n = prefix.size() + loop.size();
  if (loop.empty() || ba.num_states == 0) return false;
  auto word = [&](std::size_t i) -> const Observation& {
    return i < prefix.size() ? prefix[i] : loop[i - prefix.size()];
  };
  auto succ_pos = [&](std::size_t i) { return i + 1 < n ? i + 1 : prefix.size(); };
  auto enc = [&](std::uint32_t q, std::size_t i) { return q * n + i; };

  std::vector<bool> reach(ba.num_states * n, false);
  std::vector<std::pair<std::uint32_t, std::size_t>> work;
  for (std::uint32_t q : ba.initial) {
    if (!reach[enc(q, 0)]) {
      reach[enc(q, 0)] = true;
      work.emplace_back(q, 0);
    }
  }
  std::vector<std::pair<std::uint32_t, std::size_t>> order;
  while (!work.empty()) {
    auto [q, i] = work.back();
    work.pop_back();
    order.emplace_back(q, i);
    for (const auto& t : ba.out[q]) {
      if (label_satisfied(t.label, word(i)) && !reach[enc(t.dst, succ_pos(i))]) {
        reach[enc(t.dst, succ_pos(i))] = true;
        work.emplace_back(t.dst, succ_pos(i));
      }
    }
  }
  // accepting product node on a cycle
  for (const auto& [q, i] : order) {
    if (!ba.accepting[q]) continue;
    std::vector<bool> seen(ba.num_states * n, false);
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{q, i}};
    bool first = true;
    while (!stack.empty()) {
      auto [cq, ci] = stack.back();
      stack.pop_back();
      for (const auto& t : ba.out[cq]) {
        if (!label_satisfied(t.label, word(ci))) continue;
        std::uint32_t nq = t.dst;
        std::size_t ni = succ_pos(ci);
        if (nq == q && ni == i) return true;
        if (!seen[enc(nq, ni)]) {
          seen[enc(nq, ni)] = true;
          stack.emplace_back(nq, ni);
        }
      }
      first = false;
    }
    (void)first;
  }
  return false;
}

std::string describe(const BuchiAutomaton& ba) {
  std::ostringstream os;
  os << ba.num_states << " states, initial {";
  for (std::size_t i = 0; i < ba.initial.size(); ++i) os << (i ? "," : "") << ba.initial[i];
  os << "}\n";
  for (std::uint32_t s = 0; s < ba.num_states; ++s) {
    os << "  " << s << (ba.accepting[s] ? " (acc)" : "") << ":";
    for (const auto& t : ba.out[s]) {
      os << " --[";
      for (std::size_t i = 0; i < t.label.size(); ++i) {
        if (i) os << " & ";
        os << (t.label[i].neg ? "!" : "") << t.label[i].atom.text;
      }
      if (t.label.empty()) os << "true";
      os << "]--> " << t.dst << ";";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace scver
