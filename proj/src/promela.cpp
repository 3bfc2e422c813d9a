#include "scver/promela.hpp"

#include <sstream>

#include "scver/util.hpp"

namespace scver {

namespace {

constexpr int kTimedSlots = 4;

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '_') {
      out += "_0";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::string mangle_segment(const std::string& segment) { return esc(segment); }

std::string mangle_path(const std::string& dotted) {
  auto dot = dotted.find('.');
  if (dot == std::string::npos) return esc(dotted);
  return esc(dotted.substr(0, dot)) + "__" + esc(dotted.substr(dot + 1));
}

namespace {

std::string promela_type(const ScalarType& t) {
  switch (t.kind) {
    case ScalarType::Kind::Bool:
      return "bool";
    case ScalarType::Kind::Int:
      if (t.lo >= 0 && t.hi <= 255) return "byte";
      if (t.lo >= -32768 && t.hi <= 32767) return "short";
      if (t.lo >= INT32_MIN && t.hi <= INT32_MAX) return "int";
      fail_semantic("integer range " + t.str() + " exceeds the widest Promela type");
    case ScalarType::Kind::Enum:
      return t.labels.size() <= 255 ? "byte" : "short";
  }
  return "int";
}

std::string promela_value(const ScalarType& t, Value v) {
  if (t.kind == ScalarType::Kind::Bool) return v ? "true" : "false";
  return std::to_string(v);
}

class Emitter {
 public:
  Emitter(const ElaboratedDesign& design, const Limits& limits, EnvPolicy env,
          const std::string& source_hash)
      : d_(design), limits_(limits), hash_(source_hash),
        env_general_(env == EnvPolicy::MostGeneral) {
    for (const auto& s : d_.signals) sig_.push_back(mangle_path(s.name));
    for (const auto& i : d_.inputs) in_.push_back(mangle_path(i.name));
    for (const auto& v : d_.vars) var_.push_back(mangle_path(v.name));
    for (const auto& e : d_.events) ev_.push_back(mangle_path(e.name));
    for (const auto& p : d_.processes) proc_.push_back(mangle_path(p.name));
  }

  std::string run() {
    if (!d_.stubs.empty()) {
      fail_semantic("Promela emission of stub-composed designs is not supported; "
                    "emit the unstubbed design instead");
    }
    header();
    globals();
    for (std::uint32_t p = 0; p < d_.processes.size(); ++p) process(p);
    scheduler();
    properties();
    return os_.str();
  }

 private:
  // expression over current values
  std::string expr(const RExpr& e) {
    switch (e.kind) {
      case RExpr::Kind::Const: return std::to_string(e.cval);
      case RExpr::Kind::Var: return "v__" + var_[e.index];
      case RExpr::Kind::Signal: return "cur__" + sig_[e.index];
      case RExpr::Kind::Input: return "in__" + in_[e.index];
      case RExpr::Kind::Unary:
        return e.un == ast::UnOp::Not ? "!(" + expr(e.kids[0]) + ")"
                                      : "-(" + expr(e.kids[0]) + ")";
      case RExpr::Kind::Binary:
        return "(" + expr(e.kids[0]) + " " + ast::bin_op_text(e.bin) + " " + expr(e.kids[1]) +
               ")";
    }
    return "0";
  }

  // int stores wrap into the declared range, mirroring the kernel
  std::string wrapped(const ScalarType& t, const RExpr& e) {
    if (t.kind != ScalarType::Kind::Int) return expr(e);
    std::int64_t w = t.hi - t.lo + 1;
    std::string raw = expr(e);
    return "(((" + raw + " - " + std::to_string(t.lo) + ") % " + std::to_string(w) + " + " +
           std::to_string(w) + ") % " + std::to_string(w) + " + " + std::to_string(t.lo) + ")";
  }

  void header() {
    os_ << "/* generated by scver " << kToolVersion << " */\n";
    os_ << "/* source sha256: " << hash_ << " */\n";
    os_ << "/* explicit-scheduler encoding; timed notification slots per event: "
        << kTimedSlots << " (overflow asserts) */\n\n";
    os_ << "#define T_MAX " << limits_.max_time << "\n";
    os_ << "#define D_MAX " << limits_.max_delta << "\n";
    os_ << "#define NOBODY 255\n\n";
  }

  void globals() {
    os_ << "int now = 0;\n";
    os_ << "int delta_cnt = 0;\n";
    os_ << "bool ran = false;\n";
    os_ << "byte baton = NOBODY;\n\n";
    for (std::uint32_t s = 0; s < d_.signals.size(); ++s) {
      const auto& info = d_.signals[s];
      std::string t = promela_type(info.type);
      std::string init = promela_value(info.type, info.init);
      os_ << t << " cur__" << sig_[s] << " = " << init << ";\n";
      os_ << t << " nxt__" << sig_[s] << " = " << init << ";\n";
      os_ << "bool wr__" << sig_[s] << " = false;\n";
    }
    for (std::uint32_t i = 0; i < d_.inputs.size(); ++i) {
      const auto& info = d_.inputs[i];
      os_ << promela_type(info.type) << " in__" << in_[i] << " = "
          << promela_value(info.type, info.type.default_value()) << ";\n";
    }
    for (std::uint32_t v = 0; v < d_.vars.size(); ++v) {
      const auto& info = d_.vars[v];
      os_ << promela_type(info.type) << " v__" << var_[v] << " = "
          << promela_value(info.type, info.init) << ";\n";
    }
    for (std::uint32_t e = 0; e < d_.events.size(); ++e) {
      os_ << "bool de__" << ev_[e] << " = false;\n";
      os_ << "int tn__" << ev_[e] << "[" << kTimedSlots << "];\n";
    }
    for (std::uint32_t p = 0; p < d_.processes.size(); ++p) {
      os_ << "byte st__" << proc_[p] << " = 0;\n";  // 0 runnable .. 5 terminated
      os_ << "int pc__" << proc_[p] << " = 0;\n";
      os_ << "int wk__" << proc_[p] << " = 0;\n";
    }
    os_ << "\n";
  }

  // every (process, wait-location) pair waiting on the given event
  std::string wake_event_waiters(std::uint32_t ev, const std::string& pad) {
    std::ostringstream o;
    for (std::uint32_t p = 0; p < d_.processes.size(); ++p) {
      const auto& cfg = d_.processes[p].cfg;
      for (std::uint32_t l = 0; l < cfg.size(); ++l) {
        if (cfg[l].kind == CfgNode::Kind::WaitEvent && cfg[l].target == ev) {
          o << pad << "if :: (st__" << proc_[p] << " == 4 && pc__" << proc_[p] << " == " << l
            << ") -> st__" << proc_[p] << " = 0; pc__" << proc_[p] << " = " << loc_ref(p, cfg[l].next)
            << " :: else fi;\n";
        }
      }
    }
    return o.str();
  }

  std::string wake_change_waiters(std::uint32_t signal, const std::string& pad) {
    std::ostringstream o;
    for (std::uint32_t p = 0; p < d_.processes.size(); ++p) {
      const auto& cfg = d_.processes[p].cfg;
      for (std::uint32_t l = 0; l < cfg.size(); ++l) {
        if (cfg[l].kind == CfgNode::Kind::WaitChange && !cfg[l].target_is_input &&
            cfg[l].target == signal) {
          o << pad << "if :: (st__" << proc_[p] << " == 2 && pc__" << proc_[p] << " == " << l
            << ") -> st__" << proc_[p] << " = 0; pc__" << proc_[p] << " = " << loc_ref(p, cfg[l].next)
            << " :: else fi;\n";
        }
      }
    }
    return o.str();
  }

  std::string wake_input_waiters(std::uint32_t input, const std::string& pad) {
    std::ostringstream o;
    for (std::uint32_t p = 0; p < d_.processes.size(); ++p) {
      const auto& cfg = d_.processes[p].cfg;
      for (std::uint32_t l = 0; l < cfg.size(); ++l) {
        if (cfg[l].kind == CfgNode::Kind::WaitChange && cfg[l].target_is_input &&
            cfg[l].target == input) {
          o << pad << "if :: (st__" << proc_[p] << " == 3 && pc__" << proc_[p] << " == " << l
            << ") -> st__" << proc_[p] << " = 0; pc__" << proc_[p] << " = " << loc_ref(p, cfg[l].next)
            << " :: else fi;\n";
        }
      }
    }
    return o.str();
  }

  // end-of-body sentinel: one past the last location
  std::string loc_ref(std::uint32_t p, std::uint32_t loc) {
    return loc == kEndLoc ? std::to_string(d_.processes[p].cfg.size()) : std::to_string(loc);
  }

  void process(std::uint32_t p) {
    const auto& cfg = d_.processes[p].cfg;
    const std::string& me = proc_[p];
    os_ << "/* " << d_.processes[p].name << " */\n";
    os_ << "active proctype proc__" << me << "() {\n";
    os_ << "end_idle:\n";
    os_ << "  do\n";
    os_ << "  :: baton == " << p << " ->\n";
    os_ << "     do\n";
    for (std::uint32_t l = 0; l < cfg.size(); ++l) {
      const CfgNode& n = cfg[l];
      os_ << "     :: pc__" << me << " == " << l << " -> ";
      switch (n.kind) {
        case CfgNode::Kind::Entry:
        case CfgNode::Kind::Skip:
          os_ << "d_step { pc__" << me << " = " << loc_ref(p, n.next) << " }\n";
          break;
        case CfgNode::Kind::Assign:
          os_ << "d_step { v__" << var_[n.target] << " = "
              << wrapped(d_.vars[n.target].type, n.expr) << "; pc__" << me << " = "
              << loc_ref(p, n.next) << " }\n";
          break;
        case CfgNode::Kind::NextWrite:
          os_ << "d_step { nxt__" << sig_[n.target] << " = "
              << wrapped(d_.signals[n.target].type, n.expr) << "; wr__" << sig_[n.target]
              << " = true; pc__" << me << " = " << loc_ref(p, n.next) << " }\n";
          break;
        case CfgNode::Kind::Branch:
          os_ << "d_step { if :: (" << expr(n.expr) << ") -> pc__" << me << " = "
              << loc_ref(p, n.next) << " :: else -> pc__" << me << " = " << loc_ref(p, n.alt)
              << " fi }\n";
          break;
        case CfgNode::Kind::WaitTime:
          os_ << "d_step { st__" << me << " = 1; wk__" << me << " = now + " << n.amount
              << " }; break\n";
          break;
        case CfgNode::Kind::WaitChange:
          os_ << "d_step { st__" << me << " = " << (n.target_is_input ? 3 : 2) << " }; break\n";
          break;
        case CfgNode::Kind::WaitEvent:
          os_ << "d_step { st__" << me << " = 4 }; break\n";
          break;
        case CfgNode::Kind::NotifyNow: {
          os_ << "d_step {\n";
          os_ << wake_event_waiters(n.target, "          ");
          os_ << "          pc__" << me << " = " << loc_ref(p, n.next) << "\n     }\n";
          break;
        }
        case CfgNode::Kind::NotifyDelta:
          os_ << "d_step { de__" << ev_[n.target] << " = true; pc__" << me << " = "
              << loc_ref(p, n.next) << " }\n";
          break;
        case CfgNode::Kind::NotifyTime: {
          const std::string& e = ev_[n.target];
          os_ << "d_step {\n          if\n";
          for (int slot = 0; slot < kTimedSlots; ++slot) {
            os_ << "          :: ";
            for (int b = 0; b < slot; ++b) os_ << "tn__" << e << "[" << b << "] != -1 && ";
            os_ << "tn__" << e << "[" << slot << "] == -1 -> tn__" << e << "[" << slot
                << "] = now + " << n.amount << "\n";
          }
          os_ << "          :: else -> assert(false) /* timed-notify slots exhausted */\n";
          os_ << "          fi;\n";
          os_ << "          pc__" << me << " = " << loc_ref(p, n.next) << "\n     }\n";
          break;
        }
        case CfgNode::Kind::Assert:
          os_ << "d_step { assert(" << expr(n.expr) << "); pc__" << me << " = "
              << loc_ref(p, n.next) << " }\n";
          break;
      }
    }
    os_ << "     :: pc__" << me << " == " << cfg.size() << " -> d_step { st__" << me
        << " = 5 }; break\n";
    os_ << "     :: else -> break\n";
    os_ << "     od;\n";
    os_ << "     baton = NOBODY\n";
    os_ << "  od\n";
    os_ << "}\n\n";
  }

  void input_select(const std::string& pad) {
    // nondeterministic picks land in scheduler locals; a single d_step
    // commits them so the claim never sees a half-updated environment
    for (std::uint32_t i = 0; i < d_.inputs.size(); ++i) {
      const ScalarType& t = d_.inputs[i].type;
      os_ << pad << "if\n";
      std::int64_t lo = t.kind == ScalarType::Kind::Int ? t.lo : 0;
      std::int64_t hi = lo + t.cardinality() - 1;
      for (std::int64_t v = lo; v <= hi; ++v) {
        os_ << pad << ":: pick" << i << " = " << v << "\n";
      }
      os_ << pad << "fi;\n";
    }
    os_ << pad << "d_step {\n";
    for (std::uint32_t i = 0; i < d_.inputs.size(); ++i) {
      std::string wakes = wake_input_waiters(i, pad + "    ");
      if (!wakes.empty()) {
        os_ << pad << "  if :: (pick" << i << " != in__" << in_[i] << ") ->\n"
            << wakes << pad << "    skip\n" << pad << "  :: else fi;\n";
      }
      os_ << pad << "  in__" << in_[i] << " = pick" << i << ";\n";
    }
    os_ << pad << "  skip\n";
    os_ << pad << "}\n";
  }

  void scheduler() {
    os_ << "active proctype scheduler() {\n";
    for (std::uint32_t i = 0; i < d_.inputs.size(); ++i) os_ << "  int pick" << i << ";\n";
    os_ << "  int nw;\n";
    if (!d_.events.empty()) {
      os_ << "  d_step {\n";
      for (std::uint32_t e = 0; e < d_.events.size(); ++e) {
        for (int slot = 0; slot < kTimedSlots; ++slot) {
          os_ << "    tn__" << ev_[e] << "[" << slot << "] = -1;\n";
        }
      }
      os_ << "    skip\n  };\n";
    }
    if (!d_.inputs.empty() && env_general_) {
      os_ << "  atomic {\n";
      input_select("    ");
      os_ << "  };\n";
    }
    os_ << "eval:\n";
    os_ << "  if\n";
    for (std::uint32_t p = 0; p < d_.processes.size(); ++p) {
      os_ << "  :: st__" << proc_[p] << " == 0 -> ran = true; baton = " << p
          << "; (baton == NOBODY); goto eval\n";
    }
    os_ << "  :: else -> goto update\n";
    os_ << "  fi;\n";
    os_ << "update:\n  if\n  :: (ran";
    for (std::uint32_t s = 0; s < d_.signals.size(); ++s) os_ << " || wr__" << sig_[s];
    for (std::uint32_t e = 0; e < d_.events.size(); ++e) os_ << " || de__" << ev_[e];
    os_ << ") ->\n";
    os_ << "     d_step {\n";
    for (std::uint32_t s = 0; s < d_.signals.size(); ++s) {
      os_ << "       if :: (wr__" << sig_[s] << " && nxt__" << sig_[s] << " != cur__" << sig_[s]
          << ") ->\n";
      os_ << "         cur__" << sig_[s] << " = nxt__" << sig_[s] << ";\n";
      os_ << wake_change_waiters(s, "         ");
      os_ << "         skip\n       :: else fi;\n";
      os_ << "       wr__" << sig_[s] << " = false;\n";
    }
    for (std::uint32_t e = 0; e < d_.events.size(); ++e) {
      os_ << "       if :: de__" << ev_[e] << " ->\n";
      os_ << wake_event_waiters(e, "         ");
      os_ << "         de__" << ev_[e] << " = false\n       :: else fi;\n";
    }
    os_ << "       ran = false;\n";
    os_ << "       delta_cnt = delta_cnt + 1\n";
    os_ << "     };\n";
    os_ << "     if :: delta_cnt > D_MAX -> goto end_deltabound :: else -> goto eval fi\n";
    os_ << "  :: else -> goto timestep\n  fi;\n";

    os_ << "timestep:\n";
    // any timed activity?
    os_ << "  if\n  :: (false";
    for (std::uint32_t e = 0; e < d_.events.size(); ++e) {
      for (int slot = 0; slot < kTimedSlots; ++slot) {
        os_ << " || tn__" << ev_[e] << "[" << slot << "] != -1";
      }
    }
    for (std::uint32_t p = 0; p < d_.processes.size(); ++p) {
      os_ << " || st__" << proc_[p] << " == 1";
    }
    os_ << ") ->\n";
    os_ << "     d_step {\n       nw = T_MAX + 1;\n";
    for (std::uint32_t e = 0; e < d_.events.size(); ++e) {
      for (int slot = 0; slot < kTimedSlots; ++slot) {
        os_ << "       if :: (tn__" << ev_[e] << "[" << slot << "] != -1 && tn__" << ev_[e] << "["
            << slot << "] < nw) -> nw = tn__" << ev_[e] << "[" << slot << "] :: else fi;\n";
      }
    }
    for (std::uint32_t p = 0; p < d_.processes.size(); ++p) {
      os_ << "       if :: (st__" << proc_[p] << " == 1 && wk__" << proc_[p] << " < nw) -> nw = wk__"
          << proc_[p] << " :: else fi;\n";
    }
    os_ << "       skip\n     };\n";
    os_ << "     if :: nw > T_MAX -> goto end_timebound :: else fi;\n";
    os_ << "     d_step {\n";
    os_ << "       now = nw; delta_cnt = 0; ran = false;\n";
    for (std::uint32_t e = 0; e < d_.events.size(); ++e) {
      for (int slot = 0; slot < kTimedSlots; ++slot) {
        os_ << "       if :: (tn__" << ev_[e] << "[" << slot << "] == now) ->\n";
        os_ << wake_event_waiters(e, "         ");
        os_ << "         tn__" << ev_[e] << "[" << slot << "] = -1\n       :: else fi;\n";
      }
    }
    for (std::uint32_t p = 0; p < d_.processes.size(); ++p) {
      const auto& cfg = d_.processes[p].cfg;
      for (std::uint32_t l = 0; l < cfg.size(); ++l) {
        if (cfg[l].kind == CfgNode::Kind::WaitTime) {
          os_ << "       if :: (st__" << proc_[p] << " == 1 && wk__" << proc_[p]
              << " == now && pc__" << proc_[p] << " == " << l << ") -> st__" << proc_[p]
              << " = 0; wk__" << proc_[p] << " = 0; pc__" << proc_[p] << " = "
              << loc_ref(p, cfg[l].next) << " :: else fi;\n";
        }
      }
    }
    os_ << "       skip\n     };\n";
    if (!d_.inputs.empty() && env_general_) {
      os_ << "     atomic {\n";
      input_select("       ");
      os_ << "     };\n";
    }
    os_ << "     goto eval\n";
    os_ << "  :: else -> goto finish\n  fi;\n";

    os_ << "finish:\n";
    if (d_.processes.empty()) {
      os_ << "  goto end_clean;\n";
    } else {
      os_ << "  if\n  :: (";
      for (std::uint32_t p = 0; p < d_.processes.size(); ++p) {
        if (p) os_ << " && ";
        os_ << "st__" << proc_[p] << " == 5";
      }
      os_ << ") -> goto end_clean\n";
      os_ << "  :: else -> goto stuck\n  fi;\n";
      os_ << "stuck: false;  /* invalid end state: a process is still waiting */\n";
    }
    os_ << "end_deltabound: false;\n";
    os_ << "end_timebound: false;\n";
    os_ << "end_clean: false\n";
    os_ << "}\n\n";
  }

  std::string prop_expr(const prop::Formula& f) {
    using prop::Op;
    switch (f->op) {
      case Op::True: return "true";
      case Op::False: return "false";
      case Op::Atom: {
        const prop::Atom& a = f->atom;
        std::string name = (a.is_input ? "in__" + in_[a.slot] : "cur__" + sig_[a.slot]);
        std::string cmp = "(" + name + " " + ast::bin_op_text(a.cmp) + " " +
                          promela_value(a.type, a.literal) + ")";
        return f->neg ? "!" + cmp : cmp;
      }
      case Op::Not: return "!(" + prop_expr(f->a) + ")";
      case Op::And: return "(" + prop_expr(f->a) + " && " + prop_expr(f->b) + ")";
      case Op::Or: return "(" + prop_expr(f->a) + " || " + prop_expr(f->b) + ")";
      case Op::Next: return "X (" + prop_expr(f->a) + ")";
      case Op::Eventually: return "<> (" + prop_expr(f->a) + ")";
      case Op::Always: return "[] (" + prop_expr(f->a) + ")";
      case Op::Until: return "(" + prop_expr(f->a) + " U " + prop_expr(f->b) + ")";
      case Op::Release: return "(" + prop_expr(f->a) + " V " + prop_expr(f->b) + ")";
    }
    return "true";
  }

  void properties() {
    for (const auto& p : d_.properties) {
      os_ << "ltl " << mangle_segment(p.name) << " { ";
      if (p.is_ltl) {
        os_ << prop_expr(p.formula);
      } else {
        os_ << "[] (" << prop_expr(p.formula) << ")";
      }
      os_ << " }\n";
    }
  }

  const ElaboratedDesign& d_;
  const Limits& limits_;
  std::string hash_;
  std::ostringstream os_;
  bool env_general_;
  std::vector<std::string> sig_, in_, var_, ev_, proc_;
};

}  // namespace

std::string emit_promela(const ElaboratedDesign& design, const Limits& limits, EnvPolicy env,
                         const std::string& source_sha256) {
  return Emitter(design, limits, env, source_sha256).run();
}

}  // namespace scver
