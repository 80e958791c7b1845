#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "faircheck/lts.hpp"

namespace faircheck {

// ---------------------------------------------------------------------------
// Regular formulae (PDL-style, over finite action sets)
// ---------------------------------------------------------------------------

enum class RegKind { Epsilon, Atom, Concat, Union, Star };

struct RegNode;
using Regex = std::shared_ptr<const RegNode>;

struct RegNode {
  RegKind kind;
  ActionSet set;   // Atom
  Regex lhs, rhs;  // Concat/Union (rhs unused for Star)
};

inline Regex r_eps() { return std::make_shared<RegNode>(RegNode{RegKind::Epsilon, {}, {}, {}}); }
inline Regex r_atom(ActionSet s) {
  return std::make_shared<RegNode>(RegNode{RegKind::Atom, std::move(s), {}, {}});
}
/// Concatenation, kept right-nested with epsilon factors dropped so that
/// structurally equal languages built in different orders print alike.
inline Regex r_concat(Regex a, Regex b) {
  if (a->kind == RegKind::Epsilon) return b;
  if (b->kind == RegKind::Epsilon) return a;
  if (a->kind == RegKind::Concat) return r_concat(a->lhs, r_concat(a->rhs, std::move(b)));
  return std::make_shared<RegNode>(RegNode{RegKind::Concat, {}, std::move(a), std::move(b)});
}
/// Union, kept right-nested.
inline Regex r_union(Regex a, Regex b) {
  if (a->kind == RegKind::Union) return r_union(a->lhs, r_union(a->rhs, std::move(b)));
  return std::make_shared<RegNode>(RegNode{RegKind::Union, {}, std::move(a), std::move(b)});
}
inline Regex r_star(Regex a) {
  return std::make_shared<RegNode>(RegNode{RegKind::Star, {}, std::move(a), {}});
}

inline bool regex_equal(const Regex& a, const Regex& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case RegKind::Epsilon: return true;
    case RegKind::Atom: return a->set == b->set;
    case RegKind::Star: return regex_equal(a->lhs, b->lhs);
    default: return regex_equal(a->lhs, b->lhs) && regex_equal(a->rhs, b->rhs);
  }
}

// ---------------------------------------------------------------------------
// Modal mu-calculus formulae
// ---------------------------------------------------------------------------

enum class FKind { False, True, Var, Not, Or, And, Implies, Diamond, Box, Mu, Nu };

struct FNode;
using Formula = std::shared_ptr<const FNode>;

struct FNode {
  FKind kind;
  std::string name;   // Var / Mu / Nu
  Formula lhs, rhs;   // binary: lhs,rhs; unary and binders: lhs
  Regex reg;          // Diamond / Box
};

inline Formula f_false() { return std::make_shared<FNode>(FNode{FKind::False, {}, {}, {}, {}}); }
inline Formula f_true() { return std::make_shared<FNode>(FNode{FKind::True, {}, {}, {}, {}}); }
inline Formula f_var(std::string name) {
  return std::make_shared<FNode>(FNode{FKind::Var, std::move(name), {}, {}, {}});
}
inline Formula f_not(Formula f) {
  return std::make_shared<FNode>(FNode{FKind::Not, {}, std::move(f), {}, {}});
}
inline Formula f_or(Formula a, Formula b) {
  return std::make_shared<FNode>(FNode{FKind::Or, {}, std::move(a), std::move(b), {}});
}
inline Formula f_and(Formula a, Formula b) {
  return std::make_shared<FNode>(FNode{FKind::And, {}, std::move(a), std::move(b), {}});
}
inline Formula f_implies(Formula a, Formula b) {
  return std::make_shared<FNode>(FNode{FKind::Implies, {}, std::move(a), std::move(b), {}});
}
inline Formula f_dia(Regex r, Formula f) {
  return std::make_shared<FNode>(FNode{FKind::Diamond, {}, std::move(f), {}, std::move(r)});
}
inline Formula f_dia(ActionSet s, Formula f) { return f_dia(r_atom(std::move(s)), std::move(f)); }
inline Formula f_box(Regex r, Formula f) {
  return std::make_shared<FNode>(FNode{FKind::Box, {}, std::move(f), {}, std::move(r)});
}
inline Formula f_box(ActionSet s, Formula f) { return f_box(r_atom(std::move(s)), std::move(f)); }
inline Formula f_mu(std::string var, Formula body) {
  return std::make_shared<FNode>(FNode{FKind::Mu, std::move(var), std::move(body), {}, {}});
}
inline Formula f_nu(std::string var, Formula body) {
  return std::make_shared<FNode>(FNode{FKind::Nu, std::move(var), std::move(body), {}, {}});
}

/// Right-folded disjunction; the empty list is ff.
inline Formula big_or(const std::vector<Formula>& fs) {
  if (fs.empty()) return f_false();
  Formula out = fs.back();
  for (auto it = fs.rbegin() + 1; it != fs.rend(); ++it) out = f_or(*it, out);
  return out;
}

/// Right-folded conjunction; the empty list is tt.
inline Formula big_and(const std::vector<Formula>& fs) {
  if (fs.empty()) return f_true();
  Formula out = fs.back();
  for (auto it = fs.rbegin() + 1; it != fs.rend(); ++it) out = f_and(*it, out);
  return out;
}

inline bool formula_equal(const Formula& a, const Formula& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FKind::False:
    case FKind::True: return true;
    case FKind::Var: return a->name == b->name;
    case FKind::Not: return formula_equal(a->lhs, b->lhs);
    case FKind::Or:
    case FKind::And:
    case FKind::Implies:
      return formula_equal(a->lhs, b->lhs) && formula_equal(a->rhs, b->rhs);
    case FKind::Diamond:
    case FKind::Box: return regex_equal(a->reg, b->reg) && formula_equal(a->lhs, b->lhs);
    case FKind::Mu:
    case FKind::Nu: return a->name == b->name && formula_equal(a->lhs, b->lhs);
  }
  return false;
}

namespace detail {

inline void collect_names(const Formula& f, std::set<std::string>& names) {
  switch (f->kind) {
    case FKind::Var:
      names.insert(f->name);
      return;
    case FKind::Mu:
    case FKind::Nu:
      names.insert(f->name);
      collect_names(f->lhs, names);
      return;
    default:
      if (f->lhs) collect_names(f->lhs, names);
      if (f->rhs) collect_names(f->rhs, names);
      return;
  }
}

inline void free_vars_rec(const Formula& f, std::set<std::string>& bound,
                          std::set<std::string>& out) {
  switch (f->kind) {
    case FKind::Var:
      if (!bound.count(f->name)) out.insert(f->name);
      return;
    case FKind::Mu:
    case FKind::Nu: {
      bool was_bound = bound.count(f->name) != 0;
      bound.insert(f->name);
      free_vars_rec(f->lhs, bound, out);
      if (!was_bound) bound.erase(f->name);
      return;
    }
    default:
      if (f->lhs) free_vars_rec(f->lhs, bound, out);
      if (f->rhs) free_vars_rec(f->rhs, bound, out);
      return;
  }
}

}  // namespace detail

inline std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound, out;
  detail::free_vars_rec(f, bound, out);
  return out;
}

inline bool is_closed(const Formula& f) { return free_variables(f).empty(); }

/// Capture-avoiding substitution of a formula for a free variable; binders
/// that would capture a free variable of the replacement are renamed.
inline Formula substitute(const Formula& f, const std::string& var, const Formula& replacement) {
  std::set<std::string> avoid = free_variables(replacement);
  std::function<Formula(const Formula&)> walk = [&](const Formula& g) -> Formula {
    switch (g->kind) {
      case FKind::False:
      case FKind::True: return g;
      case FKind::Var: return g->name == var ? replacement : g;
      case FKind::Not: return f_not(walk(g->lhs));
      case FKind::Or: return f_or(walk(g->lhs), walk(g->rhs));
      case FKind::And: return f_and(walk(g->lhs), walk(g->rhs));
      case FKind::Implies: return f_implies(walk(g->lhs), walk(g->rhs));
      case FKind::Diamond: return f_dia(g->reg, walk(g->lhs));
      case FKind::Box: return f_box(g->reg, walk(g->lhs));
      case FKind::Mu:
      case FKind::Nu: {
        if (g->name == var) return g;  // shadowed
        Formula body = g->lhs;
        std::string name = g->name;
        if (avoid.count(name) && free_variables(body).count(var)) {
          std::set<std::string> taken = avoid;
          detail::collect_names(body, taken);
          taken.insert(var);
          int i = 0;
          do {
            name = g->name + std::to_string(++i);
          } while (taken.count(name));
          body = substitute(body, g->name, f_var(name));
        }
        body = walk(body);
        return g->kind == FKind::Mu ? f_mu(name, body) : f_nu(name, body);
      }
    }
    return g;
  };
  return walk(f);
}

/// Renames bound variables so every binder in the result uses a distinct
/// name. First use of a name is kept; later binders get numeric suffixes.
inline Formula alpha_rename(const Formula& f) {
  std::set<std::string> taken;
  detail::collect_names(f, taken);
  std::set<std::string> used;
  std::map<std::string, int> next_suffix;

  std::map<std::string, std::vector<std::string>> scope;  // original -> renamed stack
  std::function<Formula(const Formula&)> walk = [&](const Formula& g) -> Formula {
    switch (g->kind) {
      case FKind::False:
      case FKind::True: return g;
      case FKind::Var: {
        auto it = scope.find(g->name);
        if (it != scope.end() && !it->second.empty() && it->second.back() != g->name)
          return f_var(it->second.back());
        return g;
      }
      case FKind::Not: return f_not(walk(g->lhs));
      case FKind::Or:
      case FKind::And:
      case FKind::Implies: {
        // Sequenced left-to-right so renaming is compiler-independent.
        Formula l = walk(g->lhs);
        Formula r = walk(g->rhs);
        return g->kind == FKind::Or    ? f_or(l, r)
               : g->kind == FKind::And ? f_and(l, r)
                                       : f_implies(l, r);
      }
      case FKind::Diamond: return f_dia(g->reg, walk(g->lhs));
      case FKind::Box: return f_box(g->reg, walk(g->lhs));
      case FKind::Mu:
      case FKind::Nu: {
        std::string fresh = g->name;
        if (used.count(fresh)) {
          int& i = next_suffix[g->name];
          do {
            fresh = g->name + std::to_string(++i);
          } while (used.count(fresh) || taken.count(fresh));
        }
        used.insert(fresh);
        scope[g->name].push_back(fresh);
        Formula body = walk(g->lhs);
        scope[g->name].pop_back();
        return g->kind == FKind::Mu ? f_mu(fresh, body) : f_nu(fresh, body);
      }
    }
    return g;
  };
  return walk(f);
}

// ---------------------------------------------------------------------------
// Syntactic monotonicity
// ---------------------------------------------------------------------------

struct MonotonicityReport {
  bool ok = true;
  std::vector<std::string> violations;  // variable plus occurrence path
};

namespace detail {

inline void mono_rec(const Formula& f, std::map<std::string, bool>& parity_by_var,
                     std::string& path, bool parity, MonotonicityReport& report) {
  auto push = [&](const char* tag) {
    if (!path.empty()) path += "/";
    path += tag;
  };
  std::size_t saved = path.size();
  switch (f->kind) {
    case FKind::False:
    case FKind::True: return;
    case FKind::Var: {
      auto it = parity_by_var.find(f->name);
      // parity_by_var holds the parity at the binder; an occurrence is bad
      // when the negation count between binder and occurrence is odd.
      if (it != parity_by_var.end() && it->second != parity) {
        report.ok = false;
        report.violations.push_back(f->name + " at " + (path.empty() ? "<top>" : path));
      }
      return;
    }
    case FKind::Not:
      push("!");
      mono_rec(f->lhs, parity_by_var, path, !parity, report);
      break;
    case FKind::Or:
    case FKind::And: {
      push(f->kind == FKind::Or ? "||" : "&&");
      std::size_t mark = path.size();
      mono_rec(f->lhs, parity_by_var, path, parity, report);
      path.resize(mark);
      mono_rec(f->rhs, parity_by_var, path, parity, report);
      break;
    }
    case FKind::Implies: {
      push("=>");
      std::size_t mark = path.size();
      mono_rec(f->lhs, parity_by_var, path, !parity, report);  // a => b is !a || b
      path.resize(mark);
      mono_rec(f->rhs, parity_by_var, path, parity, report);
      break;
    }
    case FKind::Diamond:
      push("<>");
      mono_rec(f->lhs, parity_by_var, path, parity, report);
      break;
    case FKind::Box:
      // [R]f is !<R>!f: the two negations cancel.
      push("[]");
      mono_rec(f->lhs, parity_by_var, path, parity, report);
      break;
    case FKind::Mu:
    case FKind::Nu: {
      push(f->kind == FKind::Mu ? ("mu " + f->name).c_str() : ("nu " + f->name).c_str());
      auto it = parity_by_var.find(f->name);
      bool had = it != parity_by_var.end();
      bool old = had ? it->second : false;
      parity_by_var[f->name] = parity;
      mono_rec(f->lhs, parity_by_var, path, parity, report);
      if (had)
        parity_by_var[f->name] = old;
      else
        parity_by_var.erase(f->name);
      break;
    }
  }
  path.resize(saved);
}

}  // namespace detail

/// Every free occurrence of a fixpoint-bound variable inside its binder's
/// body must sit under an even number of negations (implication antecedents
/// count as one, boxes as two).
inline MonotonicityReport check_syntactic_monotonicity(const Formula& f) {
  MonotonicityReport report;
  std::map<std::string, bool> parity;
  std::string path;
  detail::mono_rec(f, parity, path, false, report);
  return report;
}

// ---------------------------------------------------------------------------
// Regular modality expansion
// ---------------------------------------------------------------------------

namespace detail {

struct FreshNames {
  std::set<std::string> used;
  int counter = 0;
  std::string next() {
    while (true) {
      std::string candidate = "X" + std::to_string(counter++);
      if (!used.count(candidate)) {
        used.insert(candidate);
        return candidate;
      }
    }
  }
};

inline Formula expand_rec(const Formula& f, FreshNames& fresh);

inline Formula expand_modality(bool diamond, const Regex& r, const Formula& sub,
                               FreshNames& fresh) {
  switch (r->kind) {
    case RegKind::Epsilon: return sub;
    case RegKind::Atom: return diamond ? f_dia(r->set, sub) : f_box(r->set, sub);
    case RegKind::Concat:
      return expand_modality(diamond, r->lhs, expand_modality(diamond, r->rhs, sub, fresh),
                             fresh);
    case RegKind::Union: {
      Formula a = expand_modality(diamond, r->lhs, sub, fresh);
      Formula b = expand_modality(diamond, r->rhs, sub, fresh);
      return diamond ? f_or(a, b) : f_and(a, b);
    }
    case RegKind::Star: {
      std::string var = fresh.next();
      Formula step = expand_modality(diamond, r->lhs, f_var(var), fresh);
      return diamond ? f_mu(var, f_or(step, sub)) : f_nu(var, f_and(step, sub));
    }
  }
  return sub;
}

inline Formula expand_rec(const Formula& f, FreshNames& fresh) {
  switch (f->kind) {
    case FKind::False:
    case FKind::True:
    case FKind::Var: return f;
    case FKind::Not: return f_not(expand_rec(f->lhs, fresh));
    case FKind::Or:
    case FKind::And:
    case FKind::Implies: {
      // Sequenced left-to-right so fresh names are compiler-independent.
      Formula l = expand_rec(f->lhs, fresh);
      Formula r = expand_rec(f->rhs, fresh);
      return f->kind == FKind::Or    ? f_or(l, r)
             : f->kind == FKind::And ? f_and(l, r)
                                     : f_implies(l, r);
    }
    case FKind::Diamond: return expand_modality(true, f->reg, expand_rec(f->lhs, fresh), fresh);
    case FKind::Box: return expand_modality(false, f->reg, expand_rec(f->lhs, fresh), fresh);
    case FKind::Mu: return f_mu(f->name, expand_rec(f->lhs, fresh));
    case FKind::Nu: return f_nu(f->name, expand_rec(f->lhs, fresh));
  }
  return f;
}

}  // namespace detail

/// Rewrites every modality over a composite regular formula into the core
/// grammar; only plain action-set modalities remain.
inline Formula expand_regular_modalities(const Formula& f) {
  detail::FreshNames fresh;
  detail::collect_names(f, fresh.used);
  return detail::expand_rec(f, fresh);
}

// ---------------------------------------------------------------------------
// Evaluation by fixpoint iteration
// ---------------------------------------------------------------------------

using StateSet = std::vector<bool>;
using Environment = std::map<std::string, StateSet>;

inline StateSet empty_states(const Lts& lts) { return StateSet(lts.num_states(), false); }
inline StateSet all_states(const Lts& lts) { return StateSet(lts.num_states(), true); }

inline StateSet set_complement(const StateSet& s) {
  StateSet out = s;
  out.flip();
  return out;
}

inline bool state_subset(const StateSet& a, const StateSet& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

namespace detail {

class Evaluator {
 public:
  Evaluator(const Lts& lts, const Environment& env) : lts_(lts) {
    for (const auto& [k, v] : env) env_[k].push_back(v);
  }

  StateSet eval(const Formula& f) {
    switch (f->kind) {
      case FKind::False: return empty_states(lts_);
      case FKind::True: return all_states(lts_);
      case FKind::Var: {
        auto it = env_.find(f->name);
        if (it == env_.end() || it->second.empty())
          throw std::invalid_argument("unbound variable '" + f->name + "'");
        return it->second.back();
      }
      case FKind::Not: return set_complement(eval(f->lhs));
      case FKind::Or: {
        StateSet l = eval(f->lhs), r = eval(f->rhs);
        for (std::size_t i = 0; i < l.size(); ++i) l[i] = l[i] || r[i];
        return l;
      }
      case FKind::And: {
        StateSet l = eval(f->lhs), r = eval(f->rhs);
        for (std::size_t i = 0; i < l.size(); ++i) l[i] = l[i] && r[i];
        return l;
      }
      case FKind::Implies: {
        StateSet l = eval(f->lhs), r = eval(f->rhs);
        for (std::size_t i = 0; i < l.size(); ++i) l[i] = !l[i] || r[i];
        return l;
      }
      case FKind::Diamond:
      case FKind::Box: {
        if (f->reg->kind != RegKind::Atom)
          return eval(expand_regular_modalities(f));
        return modal(f->kind == FKind::Diamond, f->reg->set, eval(f->lhs));
      }
      case FKind::Mu: return fixpoint(f, false);
      case FKind::Nu: return fixpoint(f, true);
    }
    return empty_states(lts_);
  }

 private:
  StateSet modal(bool diamond, const ActionSet& set, const StateSet& sub) {
    StateSet out(lts_.num_states(), !diamond);
    for (const auto& t : lts_.transitions()) {
      if (!set.contains(t.label)) continue;
      if (diamond) {
        if (sub[t.dst]) out[t.src] = true;
      } else {
        if (!sub[t.dst]) out[t.src] = false;
      }
    }
    return out;
  }

  StateSet fixpoint(const Formula& binder, bool greatest) {
    StateSet current = greatest ? all_states(lts_) : empty_states(lts_);
    auto& stack = env_[binder->name];
    stack.push_back(current);
    // Monotone iteration stabilizes within |S| steps.
    for (StateId i = 0; i <= lts_.num_states() + 1; ++i) {
      stack.back() = current;
      StateSet next = eval(binder->lhs);
      if (next == current) break;
      current = std::move(next);
    }
    stack.pop_back();
    if (stack.empty()) env_.erase(binder->name);
    return current;
  }

  const Lts& lts_;
  std::map<std::string, std::vector<StateSet>> env_;
};

}  // namespace detail

/// Denotation of f over the LTS under env, computed by Knaster-Tarski
/// iteration from the empty (least) or full (greatest) state set.
inline StateSet evaluate(const Lts& lts, const Formula& f, const Environment& env = {}) {
  auto mono = check_syntactic_monotonicity(f);
  if (!mono.ok)
    throw std::invalid_argument("formula is not syntactically monotonic: " + mono.violations[0]);
  detail::Evaluator ev(lts, env);
  return ev.eval(expand_regular_modalities(f));
}

inline bool satisfies(const Lts& lts, const Formula& f) {
  if (!is_closed(f)) throw std::invalid_argument("satisfaction requires a closed formula");
  return evaluate(lts, f)[lts.initial()];
}

/// The i-th approximant T^i(empty) of a least-fixpoint binder's transformer.
inline StateSet least_fixpoint_approximant(const Lts& lts, const Formula& binder, StateId i,
                                           const Environment& env = {}) {
  if (binder->kind != FKind::Mu)
    throw std::invalid_argument("approximants are defined for least-fixpoint formulae");
  if (i > lts.num_states())
    throw std::out_of_range("approximant index exceeds the state count");
  StateSet current = empty_states(lts);
  for (StateId step = 0; step < i; ++step) {
    Environment inner = env;
    inner[binder->name] = current;
    current = evaluate(lts, binder->lhs, inner);
  }
  return current;
}

// ---------------------------------------------------------------------------
// Simplification (used only behind an explicit flag)
// ---------------------------------------------------------------------------

/// Normalization limited to empty-modality collapse, unit laws for the
/// boolean connectives, and dropping binders whose variable is unused. When
/// an alphabet is supplied, set emptiness is decided relative to it;
/// otherwise only literally empty sets collapse.
inline Formula simplify(const Formula& f, const std::vector<std::string>* alphabet = nullptr) {
  auto set_is_empty = [&](const ActionSet& s) {
    if (alphabet) return s.empty_in(*alphabet);
    return s.is_literal_empty();
  };
  std::function<Formula(const Formula&)> walk = [&](const Formula& g) -> Formula {
    switch (g->kind) {
      case FKind::False:
      case FKind::True:
      case FKind::Var: return g;
      case FKind::Not: {
        Formula sub = walk(g->lhs);
        return f_not(sub);
      }
      case FKind::Or: {
        Formula l = walk(g->lhs), r = walk(g->rhs);
        if (l->kind == FKind::False) return r;
        if (r->kind == FKind::False) return l;
        if (l->kind == FKind::True || r->kind == FKind::True) return f_true();
        return f_or(l, r);
      }
      case FKind::And: {
        Formula l = walk(g->lhs), r = walk(g->rhs);
        if (l->kind == FKind::True) return r;
        if (r->kind == FKind::True) return l;
        if (l->kind == FKind::False || r->kind == FKind::False) return f_false();
        return f_and(l, r);
      }
      case FKind::Implies: {
        Formula l = walk(g->lhs), r = walk(g->rhs);
        return f_implies(l, r);
      }
      case FKind::Diamond: {
        Formula sub = walk(g->lhs);
        if (g->reg->kind == RegKind::Atom && set_is_empty(g->reg->set)) return f_false();
        return f_dia(g->reg, sub);
      }
      case FKind::Box: {
        Formula sub = walk(g->lhs);
        if (g->reg->kind == RegKind::Atom && set_is_empty(g->reg->set)) return f_true();
        return f_box(g->reg, sub);
      }
      case FKind::Mu:
      case FKind::Nu: {
        Formula body = walk(g->lhs);
        if (!free_variables(body).count(g->name)) return body;
        return g->kind == FKind::Mu ? f_mu(g->name, body) : f_nu(g->name, body);
      }
    }
    return g;
  };
  return walk(f);
}

}  // namespace faircheck
