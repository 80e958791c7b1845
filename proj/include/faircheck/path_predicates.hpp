#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "faircheck/lts.hpp"
#include "faircheck/mucalc.hpp"
#include "faircheck/templates.hpp"

namespace faircheck {

struct Verdict {
  bool holds = true;
  std::optional<std::string> witness;  // explanation, present exactly when !holds

  static Verdict yes() { return Verdict{true, std::nullopt}; }
  static Verdict no(std::string why) { return Verdict{false, std::move(why)}; }
};

// ---------------------------------------------------------------------------
// Regular formulae as NFAs over action-set edges
// ---------------------------------------------------------------------------

/// Thompson construction; edges carry per-label bitmaps materialized against
/// the LTS alphabet. Subsets are sorted state-id vectors.
class RegexNfa {
 public:
  RegexNfa(const Lts& lts, const Regex& regex) : lts_(&lts) {
    auto frag = build(regex);
    start_ = frag.first;
    accept_ = frag.second;
    closures_.resize(eps_.size());
    for (int s = 0; s < static_cast<int>(eps_.size()); ++s) closures_[s] = closure_of(s);
  }

  std::vector<int> initial() const { return closures_[start_]; }

  bool accepting(const std::vector<int>& subset) const {
    return std::binary_search(subset.begin(), subset.end(), accept_);
  }

  std::vector<int> step(const std::vector<int>& subset, std::uint32_t label) const {
    std::set<int> next;
    for (int s : subset) {
      for (const auto& e : edges_[s]) {
        if (e.labels[label]) {
          for (int t : closures_[e.to]) next.insert(t);
        }
      }
    }
    return std::vector<int>(next.begin(), next.end());
  }

 private:
  struct Edge {
    std::vector<char> labels;  // indexed by alphabet id
    int to;
  };

  int new_state() {
    edges_.emplace_back();
    eps_.emplace_back();
    return static_cast<int>(edges_.size()) - 1;
  }

  std::vector<char> label_map(const ActionSet& set) const {
    std::vector<char> out(lts_->alphabet().size(), 0);
    for (std::size_t i = 0; i < lts_->alphabet().size(); ++i)
      out[i] = set.contains(lts_->alphabet()[i]) ? 1 : 0;
    return out;
  }

  std::pair<int, int> build(const Regex& r) {
    switch (r->kind) {
      case RegKind::Epsilon: {
        int s = new_state(), t = new_state();
        eps_[s].push_back(t);
        return {s, t};
      }
      case RegKind::Atom: {
        int s = new_state(), t = new_state();
        edges_[s].push_back({label_map(r->set), t});
        return {s, t};
      }
      case RegKind::Concat: {
        auto a = build(r->lhs);
        auto b = build(r->rhs);
        eps_[a.second].push_back(b.first);
        return {a.first, b.second};
      }
      case RegKind::Union: {
        auto a = build(r->lhs);
        auto b = build(r->rhs);
        int s = new_state(), t = new_state();
        eps_[s].push_back(a.first);
        eps_[s].push_back(b.first);
        eps_[a.second].push_back(t);
        eps_[b.second].push_back(t);
        return {s, t};
      }
      case RegKind::Star: {
        auto a = build(r->lhs);
        int s = new_state(), t = new_state();
        eps_[s].push_back(a.first);
        eps_[s].push_back(t);
        eps_[a.second].push_back(a.first);
        eps_[a.second].push_back(t);
        return {s, t};
      }
    }
    throw std::logic_error("unreachable");
  }

  std::vector<int> closure_of(int s) const {
    std::set<int> seen{s};
    std::deque<int> queue{s};
    while (!queue.empty()) {
      int cur = queue.front();
      queue.pop_front();
      for (int t : eps_[cur]) {
        if (seen.insert(t).second) queue.push_back(t);
      }
    }
    return std::vector<int>(seen.begin(), seen.end());
  }

  const Lts* lts_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::vector<int>> eps_;
  std::vector<std::vector<int>> closures_;
  int start_ = 0, accept_ = 0;
};

namespace detail {

inline std::uint32_t label_id_checked(const Lts& lts, const std::string& label) {
  auto id = lts.label_id(label);
  if (!id) throw std::invalid_argument("action '" + label + "' is not in the alphabet");
  return *id;
}

inline std::vector<std::uint32_t> word_of(const Lts& lts, const Path& p) {
  std::vector<std::uint32_t> out;
  out.reserve(p.steps.size());
  for (const auto& t : p.steps) out.push_back(label_id_checked(lts, t.label));
  return out;
}

}  // namespace detail

/// True when the path's action sequence is in the language of the regular
/// formula.
inline bool matches_regular(const Lts& lts, const Path& p, const Regex& regex) {
  RegexNfa nfa(lts, regex);
  std::vector<int> subset = nfa.initial();
  for (auto label : detail::word_of(lts, p)) {
    subset = nfa.step(subset, label);
    if (subset.empty()) return false;
  }
  return nfa.accepting(subset);
}

// ---------------------------------------------------------------------------
// The violating-path shape
// ---------------------------------------------------------------------------

namespace detail {

/// Left-to-right scan state for deciding whether some split into a
/// rho-matching prefix and a "good" suffix exists. `ok` records a split
/// whose suffix already saw its scope end; `pending` records splits whose
/// suffix is still clean of both alpha_f and alpha_e.
struct SplitScan {
  std::vector<int> subset;
  bool pending = false;
  bool ok = false;

  void arm(const RegexNfa& nfa) { pending = pending || nfa.accepting(subset); }

  void consume(const RegexNfa& nfa, std::uint32_t label, const ActionSet& alpha_f,
               const ActionSet& alpha_e, const std::string& name) {
    subset = nfa.step(subset, label);
    bool in_e = alpha_e.contains(name);
    bool in_f = alpha_f.contains(name);
    if (pending && in_e) ok = true;
    if (in_e || in_f) pending = false;
    arm(nfa);
  }
};

/// Fate of an armed split whose suffix continues with this action sequence:
/// +1 resolved good, -1 resolved bad, 0 still clean.
inline int suffix_fate(const std::vector<std::string>& labels, std::size_t from, std::size_t count,
                       const ActionSet& alpha_f, const ActionSet& alpha_e) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::string& a = labels[(from + i) % labels.size()];
    if (alpha_e.contains(a)) return 1;
    if (alpha_f.contains(a)) return -1;
  }
  return 0;
}

}  // namespace detail

/// Decides whether the path (or the infinite path denoted by the lasso) is
/// violating for the template: some split exists where the prefix matches
/// rho and the suffix is alpha_f-free up until the first alpha_e action.
/// For lassos, splits inside cycle repetitions are covered by iterating the
/// automaton subset over unrollings until it revisits a known subset.
inline Verdict is_violating(const Lts& lts, const PathOrLasso& p, const ViolationTemplate& t) {
  RegexNfa nfa(lts, t.rho);

  if (std::holds_alternative<Path>(p)) {
    const Path& path = std::get<Path>(p);
    detail::SplitScan scan{nfa.initial()};
    scan.arm(nfa);
    for (const auto& step : path.steps)
      scan.consume(nfa, detail::label_id_checked(lts, step.label), t.alpha_f, t.alpha_e,
                   step.label);
    // A split still pending at the end has an alpha_f-free suffix.
    if (scan.ok || scan.pending) return Verdict::yes();
    return Verdict::no("no split has a prefix matching rho and a suffix free of alpha_f up to "
                       "the first alpha_e action");
  }

  const Lasso& lasso = std::get<Lasso>(p);
  std::vector<std::string> cycle_labels;
  for (const auto& s : lasso.cycle.steps) cycle_labels.push_back(s.label);

  // Suffix fate per cycle offset: scan one full wrap starting there.
  std::vector<int> fate(cycle_labels.size());
  for (std::size_t j = 0; j < cycle_labels.size(); ++j)
    fate[j] = detail::suffix_fate(cycle_labels, j, cycle_labels.size(), t.alpha_f, t.alpha_e);

  // Splits at stem positions: the scan resolves them against the rest of
  // the stem; a split still pending at the stem end survives exactly when
  // the cycle's fate from offset 0 is clean or good.
  detail::SplitScan scan{nfa.initial()};
  scan.arm(nfa);
  for (const auto& step : lasso.stem.steps)
    scan.consume(nfa, detail::label_id_checked(lts, step.label), t.alpha_f, t.alpha_e,
                 step.label);
  if (scan.ok) return Verdict::yes();
  if (scan.pending && fate[0] >= 0) return Verdict::yes();

  // Splits at cycle offsets, across unrollings: iterate the subset around
  // the cycle until it repeats at the cycle start.
  std::set<std::vector<int>> seen;
  std::vector<int> subset = scan.subset;
  while (seen.insert(subset).second) {
    for (std::size_t j = 0; j < cycle_labels.size(); ++j) {
      subset = nfa.step(subset, detail::label_id_checked(lts, cycle_labels[j]));
      std::size_t offset = (j + 1) % cycle_labels.size();
      if (nfa.accepting(subset) && fate[offset] >= 0) return Verdict::yes();
    }
  }
  return Verdict::no("no split has a prefix matching rho and a suffix free of alpha_f up to the "
                     "first alpha_e action");
}

// ---------------------------------------------------------------------------
// Completeness criteria on paths and lassos
// ---------------------------------------------------------------------------

/// B-progress: infinite paths always; finite paths exactly when the final
/// state is B-locked.
inline Verdict satisfies_progress(const Lts& lts, const PathOrLasso& p, const ActionSet& blocking) {
  if (std::holds_alternative<Lasso>(p)) return Verdict::yes();
  const Path& path = std::get<Path>(p);
  StateId last = path.final_state();
  if (is_b_locked(lts, last, blocking)) return Verdict::yes();
  std::vector<std::string> open = set_difference(enabled_actions(lts, last), blocking)
                                      .materialize(lts.alphabet());
  std::string names;
  for (const auto& a : open) names += (names.empty() ? "" : ",") + a;
  return Verdict::no("finite path ends in state " + std::to_string(last) +
                     " where non-blocking {" + names + "} are still enabled");
}

namespace detail {

struct LassoView {
  std::vector<StateId> cycle_states;       // states on the cycle (deduplicated)
  std::set<std::string> cycle_actions;
};

inline LassoView view_of(const Lasso& lasso) {
  LassoView v;
  std::set<StateId> states;
  for (std::size_t i = 0; i < lasso.cycle.length(); ++i) states.insert(lasso.cycle.state_at(i));
  v.cycle_states.assign(states.begin(), states.end());
  for (const auto& s : lasso.cycle.steps) v.cycle_actions.insert(s.label);
  return v;
}

inline bool occurs_from(const Path& path, std::size_t from, const std::string& a) {
  for (std::size_t j = from; j < path.steps.size(); ++j) {
    if (path.steps[j].label == a) return true;
  }
  return false;
}

}  // namespace detail

/// Weak fairness of actions: on every suffix, every perpetually enabled
/// non-blocking action occurs. On a lasso this reduces to the cycle: an
/// action enabled in every cycle state must occur on the cycle.
inline Verdict satisfies_wfa(const Lts& lts, const PathOrLasso& p, const ActionSet& blocking) {
  std::vector<std::string> candidates = non_blocking_actions(lts.alphabet(), blocking);
  if (std::holds_alternative<Lasso>(p)) {
    const Lasso& lasso = std::get<Lasso>(p);
    auto view = detail::view_of(lasso);
    for (const auto& a : candidates) {
      bool everywhere = true;
      for (StateId s : view.cycle_states) everywhere = everywhere && is_action_enabled(lts, s, a);
      if (everywhere && !view.cycle_actions.count(a))
        return Verdict::no(a + " perpetually enabled from suffix index " +
                           std::to_string(lasso.stem.length()) + ", never occurs");
    }
    return Verdict::yes();
  }
  const Path& path = std::get<Path>(p);
  for (std::size_t i = 0; i <= path.length(); ++i) {
    for (const auto& a : candidates) {
      bool everywhere = true;
      for (std::size_t j = i; j <= path.length(); ++j)
        everywhere = everywhere && is_action_enabled(lts, path.state_at(j), a);
      if (everywhere && !detail::occurs_from(path, i, a))
        return Verdict::no(a + " perpetually enabled from suffix index " + std::to_string(i) +
                           ", never occurs");
    }
  }
  return Verdict::yes();
}

/// Strong fairness of actions: relentlessly enabled non-blocking actions
/// occur in every suffix. Lasso reduction: enabled in some cycle state
/// implies occurring on the cycle.
inline Verdict satisfies_sfa(const Lts& lts, const PathOrLasso& p, const ActionSet& blocking) {
  std::vector<std::string> candidates = non_blocking_actions(lts.alphabet(), blocking);
  if (std::holds_alternative<Lasso>(p)) {
    const Lasso& lasso = std::get<Lasso>(p);
    auto view = detail::view_of(lasso);
    for (const auto& a : candidates) {
      bool somewhere = false;
      for (StateId s : view.cycle_states) somewhere = somewhere || is_action_enabled(lts, s, a);
      if (somewhere && !view.cycle_actions.count(a))
        return Verdict::no(a + " relentlessly enabled from suffix index " +
                           std::to_string(lasso.stem.length()) + ", never occurs");
    }
    return Verdict::yes();
  }
  const Path& path = std::get<Path>(p);
  // On a finite path relentless enabledness is enabledness in the final
  // state (the singleton suffix must contain an enabling state).
  for (std::size_t i = 0; i <= path.length(); ++i) {
    for (const auto& a : candidates) {
      if (is_action_enabled(lts, path.final_state(), a) && !detail::occurs_from(path, i, a))
        return Verdict::no(a + " relentlessly enabled from suffix index " + std::to_string(i) +
                           ", never occurs");
    }
  }
  return Verdict::yes();
}

/// Weak hyperfairness: as weak fairness with B-reachability in place of
/// enabledness.
inline Verdict satisfies_whfa(const Lts& lts, const PathOrLasso& p, const ActionSet& blocking) {
  std::vector<std::string> candidates = non_blocking_actions(lts.alphabet(), blocking);
  std::map<StateId, ActionSet> reach;
  auto reachable = [&](StateId s, const std::string& a) {
    auto it = reach.find(s);
    if (it == reach.end()) it = reach.emplace(s, b_reachable_actions(lts, s, blocking)).first;
    return it->second.contains(a);
  };
  if (std::holds_alternative<Lasso>(p)) {
    const Lasso& lasso = std::get<Lasso>(p);
    auto view = detail::view_of(lasso);
    for (const auto& a : candidates) {
      bool everywhere = true;
      for (StateId s : view.cycle_states) everywhere = everywhere && reachable(s, a);
      if (everywhere && !view.cycle_actions.count(a))
        return Verdict::no(a + " perpetually reachable from suffix index " +
                           std::to_string(lasso.stem.length()) + ", never occurs");
    }
    return Verdict::yes();
  }
  const Path& path = std::get<Path>(p);
  for (std::size_t i = 0; i <= path.length(); ++i) {
    for (const auto& a : candidates) {
      bool everywhere = true;
      for (std::size_t j = i; j <= path.length(); ++j)
        everywhere = everywhere && reachable(path.state_at(j), a);
      if (everywhere && !detail::occurs_from(path, i, a))
        return Verdict::no(a + " perpetually reachable from suffix index " + std::to_string(i) +
                           ", never occurs");
    }
  }
  return Verdict::yes();
}

/// Strong hyperfairness: as strong fairness with B-reachability in place of
/// enabledness.
inline Verdict satisfies_shfa(const Lts& lts, const PathOrLasso& p, const ActionSet& blocking) {
  std::vector<std::string> candidates = non_blocking_actions(lts.alphabet(), blocking);
  std::map<StateId, ActionSet> reach;
  auto reachable = [&](StateId s, const std::string& a) {
    auto it = reach.find(s);
    if (it == reach.end()) it = reach.emplace(s, b_reachable_actions(lts, s, blocking)).first;
    return it->second.contains(a);
  };
  if (std::holds_alternative<Lasso>(p)) {
    const Lasso& lasso = std::get<Lasso>(p);
    auto view = detail::view_of(lasso);
    for (const auto& a : candidates) {
      bool somewhere = false;
      for (StateId s : view.cycle_states) somewhere = somewhere || reachable(s, a);
      if (somewhere && !view.cycle_actions.count(a))
        return Verdict::no(a + " relentlessly reachable from suffix index " +
                           std::to_string(lasso.stem.length()) + ", never occurs");
    }
    return Verdict::yes();
  }
  const Path& path = std::get<Path>(p);
  for (std::size_t i = 0; i <= path.length(); ++i) {
    for (const auto& a : candidates) {
      if (reachable(path.final_state(), a) && !detail::occurs_from(path, i, a))
        return Verdict::no(a + " relentlessly reachable from suffix index " + std::to_string(i) +
                           ", never occurs");
    }
  }
  return Verdict::yes();
}

/// Justness of actions: every enabled non-blocking action is later
/// eliminated by an interfering occurrence.
inline Verdict satisfies_ja(const Lts& lts, const PathOrLasso& p, const ActionSet& blocking,
                            const ConcurrencyRelation& conc) {
  std::vector<std::string> candidates = non_blocking_actions(lts.alphabet(), blocking);
  auto eliminated_in = [&](const std::string& a, const std::set<std::string>& occurring) {
    for (const auto& b : occurring) {
      if (conc.interferes(a, b)) return true;
    }
    return false;
  };

  if (std::holds_alternative<Lasso>(p)) {
    const Lasso& lasso = std::get<Lasso>(p);
    auto view = detail::view_of(lasso);
    // Cycle positions: the suffix wraps, so any cycle occurrence counts.
    for (StateId s : view.cycle_states) {
      for (const auto& a : candidates) {
        if (is_action_enabled(lts, s, a) && !eliminated_in(a, view.cycle_actions))
          return Verdict::no(a + " enabled in cycle state " + std::to_string(s) +
                             ", never eliminated");
      }
    }
    // Stem positions: remaining stem occurrences plus all cycle occurrences.
    for (std::size_t i = 0; i < lasso.stem.length(); ++i) {
      std::set<std::string> later = view.cycle_actions;
      for (std::size_t j = i; j < lasso.stem.length(); ++j)
        later.insert(lasso.stem.steps[j].label);
      for (const auto& a : candidates) {
        if (is_action_enabled(lts, lasso.stem.state_at(i), a) && !eliminated_in(a, later))
          return Verdict::no(a + " enabled at suffix index " + std::to_string(i) +
                             ", never eliminated");
      }
    }
    return Verdict::yes();
  }

  const Path& path = std::get<Path>(p);
  for (std::size_t i = 0; i <= path.length(); ++i) {
    std::set<std::string> later;
    for (std::size_t j = i; j < path.length(); ++j) later.insert(path.steps[j].label);
    for (const auto& a : candidates) {
      if (is_action_enabled(lts, path.state_at(i), a) && !eliminated_in(a, later))
        return Verdict::no(a + " enabled at suffix index " + std::to_string(i) +
                           ", never eliminated");
    }
  }
  return Verdict::yes();
}

inline Verdict satisfies_criterion(const Lts& lts, const PathOrLasso& p,
                                   const CriterionSpec& criterion) {
  switch (criterion.kind) {
    case CriterionKind::Progress: return satisfies_progress(lts, p, criterion.blocking);
    case CriterionKind::Justness:
      return satisfies_ja(lts, p, criterion.blocking, criterion.concurrency);
    case CriterionKind::WeakFairness: return satisfies_wfa(lts, p, criterion.blocking);
    case CriterionKind::WeakHyperfairness: return satisfies_whfa(lts, p, criterion.blocking);
    case CriterionKind::StrongFairness: return satisfies_sfa(lts, p, criterion.blocking);
    case CriterionKind::StrongHyperfairness: return satisfies_shfa(lts, p, criterion.blocking);
  }
  throw std::logic_error("unknown criterion");
}

// ---------------------------------------------------------------------------
// Fair-extension constructions
// ---------------------------------------------------------------------------

namespace detail {

/// Shortest B-free path from `from` to some state enabling `action`,
/// followed by one transition labelled with it. BFS expands targets in
/// ascending order; the appended action transition takes the smallest
/// target.
inline std::optional<Path> realize_reachable_action(const Lts& lts, StateId from,
                                                    const ActionSet& blocking,
                                                    const std::string& action) {
  std::vector<int> parent(lts.num_states(), -1);
  std::vector<char> seen(lts.num_states(), 0);
  std::deque<StateId> queue{from};
  seen[from] = 1;
  std::optional<StateId> hit;
  while (!queue.empty() && !hit) {
    StateId cur = queue.front();
    queue.pop_front();
    if (is_action_enabled(lts, cur, action)) {
      hit = cur;
      break;
    }
    std::vector<std::uint32_t> out = lts.outgoing(cur);
    std::sort(out.begin(), out.end(), [&](std::uint32_t x, std::uint32_t y) {
      return lts.transitions()[x].dst < lts.transitions()[y].dst;
    });
    for (auto ti : out) {
      const Transition& t = lts.transitions()[ti];
      if (blocking.contains(t.label) || seen[t.dst]) continue;
      seen[t.dst] = 1;
      parent[t.dst] = static_cast<int>(ti);
      queue.push_back(t.dst);
    }
  }
  if (!hit) return std::nullopt;
  std::vector<Transition> rev;
  for (StateId v = *hit; v != from;) {
    const Transition& t = lts.transitions()[parent[v]];
    rev.push_back(t);
    v = t.src;
  }
  Path path = Path::at(from);
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) path.push(*it);
  std::optional<Transition> chosen;
  for (auto ti : lts.outgoing(*hit)) {
    const Transition& t = lts.transitions()[ti];
    if (t.label != action) continue;
    if (!chosen || t.dst < chosen->dst) chosen = t;
  }
  path.push(*chosen);
  return path;
}

inline PathOrLasso fold_or_path(const Path& whole, std::size_t stem_len, bool fold) {
  if (!fold) return whole;
  Path stem = Path::at(whole.start);
  for (std::size_t i = 0; i < stem_len; ++i) stem.push(whole.steps[i]);
  Path cycle = Path::at(stem.final_state());
  for (std::size_t i = stem_len; i < whole.steps.size(); ++i) cycle.push(whole.steps[i]);
  return Lasso(stem, cycle);
}

}  // namespace detail

/// Extends a finite path to one satisfying weak B-hyperfairness using a
/// queue of reachable non-blocking actions; the extension itself contains
/// no blocking actions. Deterministic: the queue starts alphabet-sorted and
/// path segments come from smallest-target-first BFS. Infinite schedules
/// are folded into a lasso at the first repeated (state, queue) pair.
inline PathOrLasso extend_to_whfa(const Lts& lts, const Path& p, const ActionSet& blocking) {
  if (!is_valid_path(lts, p)) throw std::invalid_argument("input path is not a path of the LTS");
  Path current = p;
  std::deque<std::string> queue;
  for (const auto& a :
       b_reachable_actions(lts, p.final_state(), blocking).materialize(lts.alphabet())) {
    if (!blocking.contains(a)) queue.push_back(a);
  }
  std::map<std::pair<StateId, std::vector<std::string>>, std::size_t> seen;
  while (true) {
    std::pair<StateId, std::vector<std::string>> key{
        current.final_state(), std::vector<std::string>(queue.begin(), queue.end())};
    auto it = seen.find(key);
    if (it != seen.end()) return detail::fold_or_path(current, it->second, true);
    seen.emplace(key, current.length());
    if (queue.empty()) return current;
    std::string a = queue.front();
    queue.pop_front();
    if (!b_reachable_actions(lts, current.final_state(), blocking).contains(a)) continue;
    auto segment = detail::realize_reachable_action(lts, current.final_state(), blocking, a);
    current = append_paths(current, *segment);
    queue.push_back(a);
  }
}

/// Extends a finite path to one satisfying B-justness of actions: pop the
/// queue head (still enabled for a valid concurrency relation), take it,
/// purge interfered actions and enqueue newly enabled ones. Terminates with
/// a B-locked end or folds into a lasso on a repeated (state, queue) pair.
inline PathOrLasso extend_to_just(const Lts& lts, const Path& p, const ActionSet& blocking,
                                  const ConcurrencyRelation& conc) {
  if (!is_valid_path(lts, p)) throw std::invalid_argument("input path is not a path of the LTS");
  auto report = validate_concurrency_relation(lts, conc);
  if (!report.valid)
    throw std::invalid_argument("concurrency relation is not valid for this LTS");

  std::deque<std::string> queue;
  auto in_queue = [&](const std::string& a) {
    return std::find(queue.begin(), queue.end(), a) != queue.end();
  };
  auto enqueue_enabled = [&](StateId s) {
    for (const auto& a : enabled_actions(lts, s).materialize(lts.alphabet())) {
      if (!blocking.contains(a) && !in_queue(a)) queue.push_back(a);
    }
  };
  auto purge = [&](const std::string& occurred) {
    std::deque<std::string> kept;
    for (const auto& q : queue) {
      if (!conc.interferes(q, occurred)) kept.push_back(q);
    }
    queue = std::move(kept);
  };

  enqueue_enabled(p.start);
  for (const auto& step : p.steps) {
    purge(step.label);
    enqueue_enabled(step.dst);
  }

  Path current = p;
  std::map<std::pair<StateId, std::vector<std::string>>, std::size_t> seen;
  while (true) {
    std::pair<StateId, std::vector<std::string>> key{
        current.final_state(), std::vector<std::string>(queue.begin(), queue.end())};
    auto it = seen.find(key);
    if (it != seen.end()) return detail::fold_or_path(current, it->second, true);
    seen.emplace(key, current.length());
    if (queue.empty()) return current;
    std::string a = queue.front();
    queue.pop_front();
    std::optional<Transition> chosen;
    for (auto ti : lts.outgoing(current.final_state())) {
      const Transition& t = lts.transitions()[ti];
      if (t.label != a) continue;
      if (!chosen || t.dst < chosen->dst) chosen = t;
    }
    if (!chosen)
      throw std::logic_error("queue head no longer enabled; concurrency relation is invalid");
    current.push(*chosen);
    purge(a);
    enqueue_enabled(chosen->dst);
  }
}

// ---------------------------------------------------------------------------
// Trace format
// ---------------------------------------------------------------------------

namespace detail {

inline StateId parse_trace_state(const std::string& line, std::size_t& pos, int lineno) {
  skip_spaces(line, pos);
  if (pos < line.size() && (line[pos] == 's' || line[pos] == 'S') && pos + 1 < line.size() &&
      std::isdigit(static_cast<unsigned char>(line[pos + 1])))
    ++pos;
  return static_cast<StateId>(parse_number(line, pos, lineno));
}

inline Path parse_trace_path(const Lts& lts, const std::string& line, std::size_t pos,
                             int lineno) {
  Path path = Path::at(parse_trace_state(line, pos, lineno));
  lts.check_state(path.start);
  while (true) {
    skip_spaces(line, pos);
    if (pos >= line.size()) break;
    if (line[pos] != '-') throw ParseError(lineno, "expected '-label->' after state");
    ++pos;
    std::string label;
    skip_spaces(line, pos);
    if (pos < line.size() && line[pos] == '"') {
      label = parse_quoted(line, pos, lineno);
    } else {
      std::size_t start = pos;
      while (pos < line.size() && line.compare(pos, 2, "->") != 0) ++pos;
      label = line.substr(start, pos - start);
      while (!label.empty() && (label.back() == ' ' || label.back() == '\t')) label.pop_back();
      if (label.empty()) throw ParseError(lineno, "empty action label in trace");
    }
    skip_spaces(line, pos);
    if (line.compare(pos, 2, "->") != 0) throw ParseError(lineno, "expected '->' after label");
    pos += 2;
    StateId to = parse_trace_state(line, pos, lineno);
    lts.check_state(to);
    Transition t{path.final_state(), label, to};
    path.push(t);
    if (!is_valid_path(lts, path))
      throw ParseError(lineno, "transition (" + std::to_string(t.src) + ",\"" + label + "\"," +
                                   std::to_string(to) + ") is not in the LTS");
  }
  return path;
}

}  // namespace detail

/// Trace format: `stem: 0 -a-> 1 -b-> 2` with an optional
/// `cycle: 2 -c-> 2` second line. State tokens are .aut indices (an `s`
/// prefix is accepted); labels are quoted when they contain spaces.
inline PathOrLasso parse_trace(const Lts& lts, const std::string& text) {
  std::optional<Path> stem, cycle;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int lineno = static_cast<int>(i + 1);
    const std::string& line = lines[i];
    std::size_t pos = 0;
    detail::skip_spaces(line, pos);
    if (pos >= line.size() || line[pos] == '#') continue;
    if (line.compare(pos, 5, "stem:") == 0) {
      if (stem) throw ParseError(lineno, "duplicate stem line");
      stem = detail::parse_trace_path(lts, line, pos + 5, lineno);
    } else if (line.compare(pos, 6, "cycle:") == 0) {
      if (cycle) throw ParseError(lineno, "duplicate cycle line");
      cycle = detail::parse_trace_path(lts, line, pos + 6, lineno);
    } else {
      throw ParseError(lineno, "expected 'stem:' or 'cycle:'");
    }
  }
  if (!stem) throw ParseError(1, "trace needs a stem line");
  if (!cycle) return *stem;
  return Lasso(*stem, *cycle);
}

inline std::string format_trace(const PathOrLasso& p) {
  auto path_text = [](const Path& path) {
    std::ostringstream out;
    out << path.start;
    for (const auto& s : path.steps) {
      bool plain = !s.label.empty() && s.label.find_first_of(" \t\"") == std::string::npos;
      out << " -" << (plain ? s.label : detail::quote_label(s.label)) << "-> " << s.dst;
    }
    return out.str();
  };
  std::ostringstream out;
  if (std::holds_alternative<Path>(p)) {
    out << "stem: " << path_text(std::get<Path>(p)) << "\n";
  } else {
    const Lasso& lasso = std::get<Lasso>(p);
    out << "stem: " << path_text(lasso.stem) << "\n";
    out << "cycle: " << path_text(lasso.cycle) << "\n";
  }
  return out.str();
}

}  // namespace faircheck
