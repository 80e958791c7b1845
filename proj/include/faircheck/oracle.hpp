#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "faircheck/lts.hpp"
#include "faircheck/mucalc.hpp"
#include "faircheck/path_predicates.hpp"
#include "faircheck/templates.hpp"

namespace faircheck {

struct SearchBounds {
  std::uint32_t max_stem = 0;
  std::uint32_t max_cycle = 0;

  static SearchBounds defaults(const Lts& lts) {
    std::uint32_t bound =
        lts.num_states() * (static_cast<std::uint32_t>(lts.alphabet().size()) + 2);
    return SearchBounds{bound, bound};
  }
};

struct OracleBudgetExceeded : std::runtime_error {
  explicit OracleBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Yields every finite path from the initial state of length at most
/// max_stem, and every lasso with stem at most max_stem and cycle between 1
/// and max_cycle starting at a stem's final state. Step sequences are not
/// repeated. The callback returns false to stop early; the function returns
/// true when the stream was exhausted.
inline bool enumerate_candidates(const Lts& lts, const SearchBounds& bounds,
                                 const std::function<bool(const PathOrLasso&)>& visit) {
  std::function<bool(Path&)> emit_cycles = [&](Path& stem) -> bool {
    StateId anchor = stem.final_state();
    Path walk = Path::at(anchor);
    std::function<bool()> go = [&]() -> bool {
      if (walk.length() >= 1 && walk.final_state() == anchor) {
        if (!visit(Lasso(stem, walk))) return false;
      }
      if (walk.length() >= bounds.max_cycle) return true;
      for (auto ti : lts.outgoing(walk.final_state())) {
        walk.push(lts.transitions()[ti]);
        bool keep = go();
        walk.steps.pop_back();
        if (!keep) return false;
      }
      return true;
    };
    return go();
  };

  Path stem = Path::at(lts.initial());
  std::function<bool()> go_stem = [&]() -> bool {
    if (!visit(stem)) return false;
    if (!emit_cycles(stem)) return false;
    if (stem.length() >= bounds.max_stem) return true;
    for (auto ti : lts.outgoing(stem.final_state())) {
      stem.push(lts.transitions()[ti]);
      bool keep = go_stem();
      stem.steps.pop_back();
      if (!keep) return false;
    }
    return true;
  };
  return go_stem();
}

struct OracleResult {
  bool found = false;
  std::optional<PathOrLasso> witness;
  bool stem_saturated = false;
  bool cycle_saturated = false;
};

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

namespace detail {

using Bits = std::vector<bool>;

inline Bits bits(std::size_t n) { return Bits(n, false); }

inline bool bits_intersect(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) return true;
  }
  return false;
}

/// Per-LTS tables the search consults: enabledness and B-reachability by
/// (state, label id), eliminator masks for justness, locked states.
struct SearchTables {
  const Lts* lts;
  std::size_t n_labels;
  std::vector<Bits> enabled;      // state -> label bits
  std::vector<Bits> reachable;    // state -> label bits (B-reachable)
  std::vector<char> locked;       // state -> B-locked
  Bits non_blocking;              // label bits
  std::vector<Bits> kill;         // label b -> labels a eliminated by b (justness)
  std::vector<Bits> elim;         // label a -> labels whose occurrence eliminates a
  Bits alpha_f, alpha_e;          // label bits

  SearchTables(const Lts& l, const ViolationTemplate& t, const CriterionSpec& criterion)
      : lts(&l), n_labels(l.alphabet().size()) {
    enabled.assign(l.num_states(), bits(n_labels));
    reachable.assign(l.num_states(), bits(n_labels));
    locked.assign(l.num_states(), 1);
    non_blocking = bits(n_labels);
    alpha_f = bits(n_labels);
    alpha_e = bits(n_labels);
    for (std::size_t i = 0; i < n_labels; ++i) {
      const std::string& a = l.alphabet()[i];
      non_blocking[i] = !criterion.blocking.contains(a);
      alpha_f[i] = t.alpha_f.contains(a);
      alpha_e[i] = t.alpha_e.contains(a);
    }
    for (StateId s = 0; s < l.num_states(); ++s) {
      for (auto ti : l.outgoing(s)) {
        std::uint32_t id = *l.label_id(l.transitions()[ti].label);
        enabled[s][id] = true;
        if (non_blocking[id]) locked[s] = 0;
      }
      ActionSet reach = b_reachable_actions(l, s, criterion.blocking);
      for (std::size_t i = 0; i < n_labels; ++i) reachable[s][i] = reach.contains(l.alphabet()[i]);
    }
    if (criterion.kind == CriterionKind::Justness) {
      kill.assign(n_labels, bits(n_labels));
      elim.assign(n_labels, bits(n_labels));
      for (std::size_t a = 0; a < n_labels; ++a) {
        for (std::size_t b = 0; b < n_labels; ++b) {
          bool interferes = criterion.concurrency.interferes(l.alphabet()[a], l.alphabet()[b]);
          kill[b][a] = interferes;  // occurrence of b eliminates a
          elim[a][b] = interferes;  // actions whose occurrence eliminates a
        }
      }
    }
  }
};

/// Exact search with the same verdict semantics as checking every candidate
/// from enumerate_candidates: finite witnesses via a breadth-first product
/// of the LTS with the prefix automaton and the split-scan flags, lasso
/// witnesses via a cycle search over (state, visited set, action set) from
/// every reachable product summary.
class WitnessSearch {
 public:
  WitnessSearch(const Lts& lts, const ViolationTemplate& t, const CriterionSpec& criterion,
                const SearchBounds& bounds, std::size_t node_budget = 4'000'000)
      : lts_(lts),
        criterion_(criterion),
        bounds_(bounds),
        tables_(lts, t, criterion),
        nfa_(lts, t.rho),
        budget_(node_budget) {}

  OracleResult run() {
    OracleResult result;
    if (auto finite = stem_search(&result)) {
      result.found = true;
      result.witness = *finite;
      return result;
    }
    for (std::size_t task = 0; task < lasso_tasks_.size(); ++task) {
      const LassoTask& lt = lasso_tasks_[task];
      if (auto cycle = cycle_search(lt, &result)) {
        Path stem = reconstruct_stem(lt.node);
        result.found = true;
        result.witness = Lasso(stem, *cycle);
        return result;
      }
    }
    return result;
  }

 private:
  struct NodeKey {
    StateId state;
    int subset;
    bool pend, ok;
    Bits obligations;
    auto tie() const { return std::tie(state, subset, pend, ok, obligations); }
    bool operator<(const NodeKey& o) const { return tie() < o.tie(); }
  };

  struct Node {
    NodeKey key;
    int parent = -1;
    int via_transition = -1;
    std::uint32_t depth = 0;
  };

  struct LassoTask {
    int node;        // index into nodes_
    bool need_fate;  // true when only a pending split reaches the boundary
    Bits obligations;
  };

  int intern_subset(const std::vector<int>& subset) {
    auto it = subset_ids_.find(subset);
    if (it != subset_ids_.end()) return it->second;
    int id = static_cast<int>(subsets_.size());
    subset_ids_.emplace(subset, id);
    subsets_.push_back(subset);
    return id;
  }

  int step_subset(int subset, std::uint32_t label) {
    auto key = std::make_pair(subset, label);
    auto it = step_memo_.find(key);
    if (it != step_memo_.end()) return it->second;
    int id = intern_subset(nfa_.step(subsets_[subset], label));
    step_memo_.emplace(key, id);
    return id;
  }

  /// Breadth-first search over stem summaries. Returns a finite witness if
  /// one exists; collects lasso tasks as a side effect.
  std::optional<PathOrLasso> stem_search(OracleResult* result) {
    const bool justness = criterion_.kind == CriterionKind::Justness;

    NodeKey initial;
    initial.state = lts_.initial();
    initial.subset = intern_subset(nfa_.initial());
    initial.pend = nfa_.accepting(subsets_[initial.subset]);
    initial.ok = false;
    if (justness) {
      initial.obligations = tables_.enabled[initial.state];
      for (std::size_t i = 0; i < tables_.n_labels; ++i)
        if (!tables_.non_blocking[i]) initial.obligations[i] = false;
    }

    node_ids_.emplace(initial, 0);
    nodes_.push_back(Node{initial, -1, -1, 0});
    std::set<std::pair<StateId, std::pair<bool, Bits>>> seen_tasks;

    for (std::size_t at = 0; at < nodes_.size(); ++at) {
      Node node = nodes_[at];
      const NodeKey& key = node.key;
      bool viable = key.ok || key.pend;
      if (viable && tables_.locked[key.state]) {
        Path witness = reconstruct_stem(static_cast<int>(at));
        return PathOrLasso(witness);
      }
      if (viable) {
        LassoTask task{static_cast<int>(at), !key.ok, justness ? key.obligations : Bits{}};
        auto dedup = std::make_pair(key.state, std::make_pair(task.need_fate, task.obligations));
        if (seen_tasks.insert(dedup).second) lasso_tasks_.push_back(task);
      }
      if (node.depth >= bounds_.max_stem) {
        if (!lts_.outgoing(key.state).empty()) result->stem_saturated = true;
        continue;
      }
      for (auto ti : lts_.outgoing(key.state)) {
        const Transition& t = lts_.transitions()[ti];
        std::uint32_t label = *lts_.label_id(t.label);
        NodeKey next;
        next.state = t.dst;
        next.subset = step_subset(key.subset, label);
        bool in_e = tables_.alpha_e[label];
        bool in_f = tables_.alpha_f[label];
        next.ok = key.ok || (key.pend && in_e);
        next.pend = (key.pend && !in_e && !in_f) || nfa_.accepting(subsets_[next.subset]);
        if (justness) {
          next.obligations = key.obligations;
          for (std::size_t i = 0; i < tables_.n_labels; ++i) {
            if (tables_.kill[label][i]) next.obligations[i] = false;
            if (tables_.enabled[t.dst][i] && tables_.non_blocking[i]) next.obligations[i] = true;
          }
        }
        if (node_ids_.count(next)) continue;
        if (nodes_.size() >= budget_)
          throw OracleBudgetExceeded("oracle stem search exceeded its node budget");
        node_ids_.emplace(next, static_cast<int>(nodes_.size()));
        nodes_.push_back(Node{next, static_cast<int>(at), static_cast<int>(ti), node.depth + 1});
      }
    }
    return std::nullopt;
  }

  Path reconstruct_stem(int node) const {
    std::vector<int> chain;
    for (int at = node; at >= 0; at = nodes_[at].parent) chain.push_back(at);
    Path path = Path::at(lts_.initial());
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      if (nodes_[*it].via_transition >= 0)
        path.push(lts_.transitions()[nodes_[*it].via_transition]);
    }
    return path;
  }

  struct CycleKey {
    StateId state;
    Bits visited, actions;
    char fate;  // 0 = clean, 1 = scope ended (or fate irrelevant)
    auto tie() const { return std::tie(state, visited, actions, fate); }
    bool operator<(const CycleKey& o) const { return tie() < o.tie(); }
  };

  std::optional<Path> cycle_search(const LassoTask& task, OracleResult* result) {
    const StateId anchor = nodes_[task.node].key.state;
    struct CycleNode {
      CycleKey key;
      int parent;
      int via_transition;
      std::uint32_t depth;
    };
    std::map<CycleKey, int> ids;
    std::vector<CycleNode> nodes;

    CycleKey initial;
    initial.state = anchor;
    initial.visited = detail::bits(lts_.num_states());
    initial.visited[anchor] = true;
    initial.actions = detail::bits(tables_.n_labels);
    initial.fate = task.need_fate ? 0 : 1;
    ids.emplace(initial, 0);
    nodes.push_back(CycleNode{initial, -1, -1, 0});

    for (std::size_t at = 0; at < nodes.size(); ++at) {
      CycleNode node = nodes[at];
      if (node.depth >= bounds_.max_cycle) {
        if (!lts_.outgoing(node.key.state).empty()) result->cycle_saturated = true;
        continue;
      }
      for (auto ti : lts_.outgoing(node.key.state)) {
        const Transition& t = lts_.transitions()[ti];
        std::uint32_t label = *lts_.label_id(t.label);
        CycleKey next = node.key;
        next.state = t.dst;
        next.visited[t.dst] = true;
        next.actions[label] = true;
        if (next.fate == 0) {
          if (tables_.alpha_e[label])
            next.fate = 1;
          else if (tables_.alpha_f[label])
            continue;  // the pending split's suffix would see alpha_f first
        }
        if (t.dst == anchor &&
            cycle_ok(task, next.visited, next.actions)) {
          // Reconstruct: this edge closes an acceptable cycle.
          std::vector<int> chain;
          for (int walk = static_cast<int>(at); walk >= 0; walk = nodes[walk].parent)
            chain.push_back(walk);
          Path cycle = Path::at(anchor);
          for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            if (nodes[*it].via_transition >= 0)
              cycle.push(lts_.transitions()[nodes[*it].via_transition]);
          }
          cycle.push(t);
          return cycle;
        }
        if (ids.count(next)) continue;
        if (nodes.size() >= budget_)
          throw OracleBudgetExceeded("oracle cycle search exceeded its node budget");
        ids.emplace(next, static_cast<int>(nodes.size()));
        nodes.push_back(
            CycleNode{next, static_cast<int>(at), static_cast<int>(ti), node.depth + 1});
      }
    }
    return std::nullopt;
  }

  bool cycle_ok(const LassoTask& task, const Bits& visited, const Bits& actions) const {
    const std::size_t n = tables_.n_labels;
    auto all_states_have = [&](const std::vector<Bits>& table, std::size_t label) {
      for (StateId s = 0; s < lts_.num_states(); ++s) {
        if (visited[s] && !table[s][label]) return false;
      }
      return true;
    };
    auto some_state_has = [&](const std::vector<Bits>& table, std::size_t label) {
      for (StateId s = 0; s < lts_.num_states(); ++s) {
        if (visited[s] && table[s][label]) return true;
      }
      return false;
    };
    switch (criterion_.kind) {
      case CriterionKind::Progress: return true;
      case CriterionKind::WeakFairness:
        for (std::size_t a = 0; a < n; ++a) {
          if (tables_.non_blocking[a] && !actions[a] && all_states_have(tables_.enabled, a))
            return false;
        }
        return true;
      case CriterionKind::StrongFairness:
        for (std::size_t a = 0; a < n; ++a) {
          if (tables_.non_blocking[a] && !actions[a] && some_state_has(tables_.enabled, a))
            return false;
        }
        return true;
      case CriterionKind::WeakHyperfairness:
        for (std::size_t a = 0; a < n; ++a) {
          if (tables_.non_blocking[a] && !actions[a] && all_states_have(tables_.reachable, a))
            return false;
        }
        return true;
      case CriterionKind::StrongHyperfairness:
        for (std::size_t a = 0; a < n; ++a) {
          if (tables_.non_blocking[a] && !actions[a] && some_state_has(tables_.reachable, a))
            return false;
        }
        return true;
      case CriterionKind::Justness:
        for (std::size_t a = 0; a < n; ++a) {
          if (!tables_.non_blocking[a]) continue;
          bool on = (!task.obligations.empty() && task.obligations[a]) ||
                    some_state_has(tables_.enabled, a);
          if (on && !detail::bits_intersect(actions, tables_.elim[a])) return false;
        }
        return true;
    }
    return false;
  }

  const Lts& lts_;
  CriterionSpec criterion_;
  SearchBounds bounds_;
  SearchTables tables_;
  RegexNfa nfa_;
  std::size_t budget_;

  std::map<std::vector<int>, int> subset_ids_;
  std::vector<std::vector<int>> subsets_;
  std::map<std::pair<int, std::uint32_t>, int> step_memo_;
  std::map<NodeKey, int> node_ids_;
  std::vector<Node> nodes_;
  std::vector<LassoTask> lasso_tasks_;
};

}  // namespace detail

/// Does the initial state admit a path that is violating for the template,
/// B-progressing, and satisfying the criterion? The verdict matches
/// checking every candidate within the bounds; a found witness always
/// re-passes the three path predicates (asserted here). A negative answer
/// with a saturation flag set means "no witness within bounds".
inline OracleResult oracle_admits_violating(const Lts& lts, const ViolationTemplate& t,
                                            const CriterionSpec& criterion,
                                            const SearchBounds& bounds) {
  if (criterion.kind == CriterionKind::Justness) {
    auto report = validate_concurrency_relation(lts, criterion.concurrency);
    if (!report.valid)
      throw std::invalid_argument("justness oracle requires a valid concurrency relation");
  }
  detail::WitnessSearch search(lts, t, criterion, bounds);
  OracleResult result = search.run();
  if (result.found) {
    const PathOrLasso& w = *result.witness;
    if (!is_violating(lts, w, t).holds || !satisfies_progress(lts, w, criterion.blocking).holds ||
        !satisfies_criterion(lts, w, criterion).holds)
      throw std::logic_error("oracle produced a witness that fails re-validation");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Cross-validation of formula verdicts against the oracle
// ---------------------------------------------------------------------------

struct CrossValidationReport {
  bool formula_satisfied = false;
  bool oracle_found = false;
  bool agree = false;
  std::optional<PathOrLasso> counterexample;
  bool stem_saturated = false;
  bool cycle_saturated = false;
  double formula_seconds = 0.0;
  double oracle_seconds = 0.0;
  Formula formula;
};

inline CrossValidationReport cross_validate(const Lts& lts, const ViolationTemplate& t,
                                            const CriterionSpec& criterion,
                                            const SearchBounds& bounds,
                                            std::size_t subset_cap = 12) {
  CrossValidationReport report;
  auto t0 = std::chrono::steady_clock::now();
  report.formula = build_criterion_formula(lts.alphabet(), t, criterion, subset_cap);
  report.formula_satisfied = satisfies(lts, report.formula);
  auto t1 = std::chrono::steady_clock::now();
  OracleResult oracle = oracle_admits_violating(lts, t, criterion, bounds);
  auto t2 = std::chrono::steady_clock::now();
  report.oracle_found = oracle.found;
  report.counterexample = oracle.witness;
  report.stem_saturated = oracle.stem_saturated;
  report.cycle_saturated = oracle.cycle_saturated;
  report.formula_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.oracle_seconds = std::chrono::duration<double>(t2 - t1).count();
  report.agree = report.formula_satisfied == !report.oracle_found;
  return report;
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

using RandomEngine = std::mt19937_64;

struct RandomLtsParams {
  std::uint32_t max_states = 5;
  std::uint32_t max_actions = 4;
  std::uint32_t max_transitions = 10;
};

/// Random LTS, connected from state 0 (the initial state). The alphabet may
/// include labels with no transitions.
inline Lts gen_random_lts(RandomEngine& rng, const RandomLtsParams& params) {
  auto pick = [&](std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
  };
  std::uint32_t n_states = pick(1, params.max_states);
  std::uint32_t n_actions = pick(1, params.max_actions);
  std::vector<std::string> alphabet;
  for (std::uint32_t i = 0; i < n_actions; ++i) alphabet.push_back(std::string(1, char('a' + i)));

  std::set<std::tuple<StateId, std::string, StateId>> chosen;
  for (StateId s = 1; s < n_states; ++s)
    chosen.insert({pick(0, s - 1), alphabet[pick(0, n_actions - 1)], s});
  std::uint32_t target = pick(static_cast<std::uint32_t>(chosen.size()),
                              std::max<std::uint32_t>(params.max_transitions,
                                                      static_cast<std::uint32_t>(chosen.size())));
  for (std::uint32_t guard = 0; chosen.size() < target && guard < 10 * target + 10; ++guard)
    chosen.insert({pick(0, n_states - 1), alphabet[pick(0, n_actions - 1)], pick(0, n_states - 1)});

  std::vector<Transition> transitions;
  for (const auto& [src, label, dst] : chosen) transitions.push_back({src, label, dst});
  return Lts(n_states, 0, alphabet, transitions);
}

inline ActionSet gen_random_subset(RandomEngine& rng, const std::vector<std::string>& alphabet,
                                   bool allow_empty) {
  std::vector<std::string> members;
  while (true) {
    members.clear();
    for (const auto& a : alphabet) {
      if (std::uniform_int_distribution<int>(0, 1)(rng)) members.push_back(a);
    }
    if (!members.empty() || allow_empty) break;
  }
  return ActionSet::of(members);
}

inline PatternSpec gen_random_pattern(RandomEngine& rng, const std::vector<std::string>& alphabet) {
  PatternSpec spec;
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: spec.scope = Scope::Global; break;
    case 1: spec.scope = Scope::Until; break;
    case 2: spec.scope = Scope::After; break;
    default: spec.scope = Scope::AfterUntil; break;
  }
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: spec.behaviour = Behaviour::Existence; break;
    case 1:
      spec.behaviour = Behaviour::ExistenceAtLeast;
      spec.k = std::uniform_int_distribution<std::uint32_t>(1, 3)(rng);
      break;
    default: spec.behaviour = Behaviour::Response; break;
  }
  spec.Sa = gen_random_subset(rng, alphabet, false);
  spec.Sb = gen_random_subset(rng, alphabet, false);
  spec.Sq = gen_random_subset(rng, alphabet, false);
  spec.Sr = gen_random_subset(rng, alphabet, false);
  return spec;
}

/// Random valid concurrency relation: start from a random irreflexive
/// relation and repair it by removing a concurrency pair named by each
/// validation counterexample until validation passes.
inline ConcurrencyRelation gen_random_valid_concurrency(RandomEngine& rng, const Lts& lts) {
  ConcurrencyRelation rel;
  for (const auto& a : lts.alphabet()) {
    for (const auto& b : lts.alphabet()) {
      if (a != b && std::uniform_int_distribution<int>(0, 1)(rng))
        rel.concurrent.insert({a, b});
    }
  }
  while (true) {
    auto report = validate_concurrency_relation(lts, rel);
    if (report.valid) return rel;
    for (const auto& v : report.violations) {
      if (!v.witness.steps.empty())
        rel.concurrent.erase({v.action, v.witness.steps.front().label});
    }
  }
}

// ---------------------------------------------------------------------------
// Cross-validation harness
// ---------------------------------------------------------------------------

struct HarnessConfig {
  std::uint64_t seed = 1;
  std::uint32_t instances = 200;
  RandomLtsParams lts_params;
  std::vector<CriterionKind> criteria = {
      CriterionKind::Progress,     CriterionKind::Justness,
      CriterionKind::WeakFairness, CriterionKind::WeakHyperfairness,
      CriterionKind::StrongFairness, CriterionKind::StrongHyperfairness};
  std::uint32_t bounds_stem = 0;   // 0 = per-LTS default
  std::uint32_t bounds_cycle = 0;
};

/// Plain key=value config: seed, instances, max_states, max_actions,
/// max_transitions, criteria (comma list), bounds_stem, bounds_cycle.
inline HarnessConfig parse_harness_config(const std::string& text) {
  HarnessConfig cfg;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int lineno = static_cast<int>(i + 1);
    std::string line = lines[i];
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t pos = 0;
    detail::skip_spaces(line, pos);
    if (pos >= line.size()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    auto trim = [](std::string s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
      return s;
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto as_number = [&]() -> std::uint64_t {
      std::size_t p = 0;
      std::uint64_t v = detail::parse_number(value, p, lineno);
      if (p != value.size()) throw ParseError(lineno, "trailing characters after number");
      return v;
    };
    if (key == "seed") cfg.seed = as_number();
    else if (key == "instances") cfg.instances = static_cast<std::uint32_t>(as_number());
    else if (key == "max_states") cfg.lts_params.max_states = static_cast<std::uint32_t>(as_number());
    else if (key == "max_actions") cfg.lts_params.max_actions = static_cast<std::uint32_t>(as_number());
    else if (key == "max_transitions")
      cfg.lts_params.max_transitions = static_cast<std::uint32_t>(as_number());
    else if (key == "bounds_stem") cfg.bounds_stem = static_cast<std::uint32_t>(as_number());
    else if (key == "bounds_cycle") cfg.bounds_cycle = static_cast<std::uint32_t>(as_number());
    else if (key == "criteria") {
      cfg.criteria.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        auto kind = criterion_from_name(item);
        if (!kind) throw ParseError(lineno, "unknown criterion '" + item + "'");
        cfg.criteria.push_back(*kind);
      }
    } else {
      throw ParseError(lineno, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

struct HarnessSummary {
  std::uint32_t runs = 0;
  std::uint32_t agreements = 0;
  std::uint32_t disagreements = 0;
  bool any_saturated = false;
};

namespace detail {

inline std::string set_summary(const ActionSet& s, const std::vector<std::string>& alphabet) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : s.materialize(alphabet)) {
    if (!first) out += ",";
    out += a;
    first = false;
  }
  return out + "}";
}

}  // namespace detail

/// Runs seeded random cross-validations and writes one AGREE|DISAGREE line
/// per run plus a closing summary line.
inline HarnessSummary run_crossval_harness(const HarnessConfig& cfg, std::ostream& out) {
  HarnessSummary summary;
  RandomEngine rng(cfg.seed);
  for (std::uint32_t instance = 0; instance < cfg.instances; ++instance) {
    Lts lts = gen_random_lts(rng, cfg.lts_params);
    PatternSpec pattern = gen_random_pattern(rng, lts.alphabet());
    auto instantiation = instantiate_pattern(pattern, lts.alphabet());
    SearchBounds bounds = SearchBounds::defaults(lts);
    if (cfg.bounds_stem) bounds.max_stem = cfg.bounds_stem;
    if (cfg.bounds_cycle) bounds.max_cycle = cfg.bounds_cycle;

    std::vector<ActionSet> blocking_choices{ActionSet::none(),
                                            gen_random_subset(rng, lts.alphabet(), false)};
    ConcurrencyRelation random_rel = gen_random_valid_concurrency(rng, lts);

    for (const auto& t : instantiation.templates) {
      for (const auto& blocking : blocking_choices) {
        for (CriterionKind kind : cfg.criteria) {
          std::vector<ConcurrencyRelation> relations{ConcurrencyRelation{}};
          if (kind == CriterionKind::Justness) relations.push_back(random_rel);
          for (std::size_t r = 0; r < relations.size(); ++r) {
            if (kind != CriterionKind::Justness && r > 0) continue;
            CriterionSpec criterion{kind, blocking, relations[r]};
            CrossValidationReport report = cross_validate(lts, t, criterion, bounds);
            summary.runs += 1;
            summary.agreements += report.agree ? 1 : 0;
            summary.disagreements += report.agree ? 0 : 1;
            summary.any_saturated =
                summary.any_saturated || report.stem_saturated || report.cycle_saturated;
            out << (report.agree ? "AGREE" : "DISAGREE") << " instance=" << instance
                << " states=" << lts.num_states() << " trans=" << lts.transitions().size()
                << " criterion=" << criterion_name(kind)
                << (kind == CriterionKind::Justness ? (r == 0 ? "(empty-rel)" : "(random-rel)")
                                                    : "")
                << " blocking=" << detail::set_summary(blocking, lts.alphabet())
                << " formula=" << (report.formula_satisfied ? "satisfied" : "violated")
                << " oracle=" << (report.oracle_found ? "witness" : "none")
                << (report.stem_saturated || report.cycle_saturated ? " saturated" : "") << "\n";
          }
        }
      }
    }
  }
  out << "summary: " << summary.agreements << "/" << summary.runs << " agree, "
      << summary.disagreements << " disagree\n";
  return summary;
}

}  // namespace faircheck
