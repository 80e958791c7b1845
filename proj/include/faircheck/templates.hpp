#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "faircheck/lts.hpp"
#include "faircheck/mucalc.hpp"

namespace faircheck {

// ---------------------------------------------------------------------------
// Liveness property patterns: scope x behaviour
// ---------------------------------------------------------------------------

enum class Scope { Global, Until, After, AfterUntil };
enum class Behaviour { Existence, ExistenceAtLeast, Response, ChainResponse };

struct PatternSpec {
  Scope scope = Scope::Global;
  Behaviour behaviour = Behaviour::Existence;
  std::uint32_t k = 1;  // existence-at-least
  ActionSet Sa, Sb, Sq, Sr;
  std::vector<ActionSet> chain_q, chain_r;  // chain-response
};

/// Shape of a violating path: a prefix matching rho, after which no action
/// in alpha_f occurs up until the first occurrence of an action in alpha_e.
struct ViolationTemplate {
  Regex rho;
  ActionSet alpha_f;
  ActionSet alpha_e;
};

struct InstantiationResult {
  std::vector<ViolationTemplate> templates;
  std::vector<std::string> warnings;
};

namespace detail {

inline void require_subset(const ActionSet& s, const std::vector<std::string>& alphabet,
                           const char* what) {
  if (s.complemented) return;  // complements are always relative to Act
  for (const auto& a : s.members) {
    if (!std::binary_search(alphabet.begin(), alphabet.end(), a))
      throw std::invalid_argument(std::string(what) + " mentions action '" + a +
                                  "' outside the alphabet");
  }
}

inline Regex repeat(const Regex& r, std::uint32_t times) {
  Regex out = r_eps();
  for (std::uint32_t i = 0; i < times; ++i) out = r_concat(out, r);
  return out;
}

}  // namespace detail

/// Turns a pattern into violation templates. All combinations produce one
/// template except chain-response, which yields one per response position; a
/// chain property holds when no template admits a complete violating path.
inline InstantiationResult instantiate_pattern(const PatternSpec& spec,
                                               const std::vector<std::string>& alphabet) {
  InstantiationResult result;

  std::vector<std::string> sorted_alphabet = alphabet;
  std::sort(sorted_alphabet.begin(), sorted_alphabet.end());
  detail::require_subset(spec.Sa, sorted_alphabet, "Sa");
  detail::require_subset(spec.Sb, sorted_alphabet, "Sb");
  detail::require_subset(spec.Sq, sorted_alphabet, "Sq");
  detail::require_subset(spec.Sr, sorted_alphabet, "Sr");
  for (const auto& s : spec.chain_q) detail::require_subset(s, sorted_alphabet, "chain_q");
  for (const auto& s : spec.chain_r) detail::require_subset(s, sorted_alphabet, "chain_r");

  Regex rho_s = r_eps();
  ActionSet alpha_e = ActionSet::none();
  switch (spec.scope) {
    case Scope::Global: break;
    case Scope::Until:
      alpha_e = spec.Sb;
      break;
    case Scope::After:
      rho_s = r_concat(r_star(r_atom(spec.Sa.complement())), r_atom(spec.Sa));
      break;
    case Scope::AfterUntil:
      rho_s = r_concat(r_star(r_atom(ActionSet::all())), r_atom(spec.Sa));
      alpha_e = spec.Sb;
      break;
  }

  auto push_template = [&](Regex rho_b, ActionSet alpha_f) {
    result.templates.push_back({r_concat(rho_s, std::move(rho_b)), std::move(alpha_f), alpha_e});
  };

  switch (spec.behaviour) {
    case Behaviour::Existence:
      push_template(r_eps(), spec.Sr);
      break;
    case Behaviour::ExistenceAtLeast: {
      if (spec.k == 0) throw std::invalid_argument("existence-at-least requires k >= 1");
      ActionSet filler = set_union(alpha_e, spec.Sr).complement();
      Regex unit = r_concat(r_star(r_atom(filler)), r_atom(spec.Sr));
      Regex rho_b = detail::repeat(unit, 0);
      for (std::uint32_t i = 1; i < spec.k; ++i)
        rho_b = r_union(rho_b, detail::repeat(unit, i));
      push_template(rho_b, spec.Sr);
      break;
    }
    case Behaviour::Response:
      push_template(r_concat(r_star(r_atom(alpha_e.complement())), r_atom(spec.Sq)), spec.Sr);
      break;
    case Behaviour::ChainResponse: {
      if (spec.chain_q.empty() || spec.chain_r.empty())
        throw std::invalid_argument("chain-response requires non-empty chains");
      // For response position i, the violating path sees the whole query
      // chain plus the first i responses, and then no action in chain_r[i].
      for (std::size_t i = 0; i < spec.chain_r.size(); ++i) {
        std::vector<ActionSet> sequence = spec.chain_q;
        sequence.insert(sequence.end(), spec.chain_r.begin(), spec.chain_r.begin() + i);
        Regex rho_b = r_concat(r_star(r_atom(alpha_e.complement())), r_atom(sequence[0]));
        for (std::size_t j = 1; j < sequence.size(); ++j) {
          ActionSet filler = set_union(alpha_e, sequence[j]).complement();
          rho_b = r_concat(rho_b, r_concat(r_star(r_atom(filler)), r_atom(sequence[j])));
        }
        push_template(rho_b, spec.chain_r[i]);
      }
      break;
    }
  }

  for (std::size_t i = 0; i < result.templates.size(); ++i) {
    const auto& t = result.templates[i];
    if (t.alpha_f.empty_in(sorted_alphabet))
      result.warnings.push_back("template " + std::to_string(i) +
                                " is degenerate: alpha_f is empty, so every complete path with "
                                "a matching prefix is violating");
    ActionSet overlap = set_intersect(t.alpha_f, t.alpha_e);
    if (!overlap.empty_in(sorted_alphabet))
      result.warnings.push_back("template " + std::to_string(i) +
                                " has overlapping alpha_f and alpha_e; such an action ends the "
                                "scope rather than violating it");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Criterion formulae
// ---------------------------------------------------------------------------

/// Per-action data describing a finitely realisable completeness criterion:
/// when an action is "on", when it is "off", and which occurrences
/// eliminate it. The three maps share the domain, exactly the non-blocking
/// actions.
struct FinitelyRealisableSpec {
  std::map<std::string, Formula> phi_on;
  std::map<std::string, Formula> phi_of;
  std::map<std::string, ActionSet> alpha_el;
};

struct SubsetCapExceeded : std::runtime_error {
  std::size_t non_blocking;
  explicit SubsetCapExceeded(std::size_t n)
      : std::runtime_error("strong-criterion formula needs 2^" + std::to_string(n) +
                           "-1 disjuncts, which exceeds the configured cap"),
        non_blocking(n) {}
};

/// No violating path exists under B-progress:
///   !<rho> nu X. (<alpha_e>tt || [~B]ff || <~alpha_f>X)
inline Formula build_progress_formula(const ViolationTemplate& t, const ActionSet& blocking) {
  Formula body = big_or({f_dia(t.alpha_e, f_true()), f_box(blocking.complement(), f_false()),
                         f_dia(t.alpha_f.complement(), f_var("X"))});
  return f_not(f_dia(t.rho, f_nu("X", body)));
}

/// No violating path satisfying the given finitely realisable criterion:
///   !<rho> nu X. AND_a (phi_on(a) =>
///       <~alpha_f*>(<alpha_e>tt || (phi_of(a) && X) || <alpha_el(a)\alpha_f>X))
/// The conjunction runs over the non-blocking actions in sorted order; with
/// no non-blocking actions it degenerates to !<rho> nu X. tt.
inline Formula build_finitely_realisable_formula(const ViolationTemplate& t,
                                                 const ActionSet& blocking,
                                                 const FinitelyRealisableSpec& spec) {
  if (spec.phi_on.size() != spec.phi_of.size() || spec.phi_on.size() != spec.alpha_el.size())
    throw std::invalid_argument("phi_on, phi_of and alpha_el must share a domain");
  std::vector<Formula> conjuncts;
  for (const auto& [a, on] : spec.phi_on) {
    if (blocking.contains(a))
      throw std::invalid_argument("criterion maps defined on blocking action '" + a + "'");
    auto of_it = spec.phi_of.find(a);
    auto el_it = spec.alpha_el.find(a);
    if (of_it == spec.phi_of.end() || el_it == spec.alpha_el.end())
      throw std::invalid_argument("phi_of/alpha_el missing action '" + a + "'");
    if (!is_closed(on) || !is_closed(of_it->second))
      throw std::invalid_argument("phi_on and phi_of must map to closed formulae");
    Formula eliminate = f_dia(
        r_star(r_atom(t.alpha_f.complement())),
        big_or({f_dia(t.alpha_e, f_true()), f_and(of_it->second, f_var("X")),
                f_dia(set_difference(el_it->second, t.alpha_f), f_var("X"))}));
    conjuncts.push_back(f_implies(on, eliminate));
  }
  return alpha_rename(f_not(f_dia(t.rho, f_nu("X", big_and(conjuncts)))));
}

/// No violating path satisfying the strong-fairness-style criterion given by
/// phi_of:
///   !<rho . ~alpha_f*>(<alpha_e>tt || [~B]ff ||
///       OR_{{} != F <= ~B} nu X. AND_{a in F} mu W.
///           ((AND_{b in ~B\F} phi_of(b)) && (<a\alpha_f>X || <~alpha_f>W)))
/// Subsets are enumerated over the sorted non-blocking actions, by ascending
/// bitmask with the first action as the lowest bit.
inline Formula build_strong_formula(const ViolationTemplate& t, const ActionSet& blocking,
                                    const std::map<std::string, Formula>& phi_of,
                                    std::size_t subset_cap = 12) {
  std::vector<std::string> non_blocking;
  for (const auto& [b, of] : phi_of) {
    if (blocking.contains(b))
      throw std::invalid_argument("phi_of defined on blocking action '" + b + "'");
    if (!is_closed(of)) throw std::invalid_argument("phi_of must map to closed formulae");
    non_blocking.push_back(b);
  }
  if (non_blocking.size() > subset_cap) throw SubsetCapExceeded(non_blocking.size());

  std::vector<Formula> disjuncts;
  const std::size_t n = non_blocking.size();
  for (std::uint64_t mask = 1; n > 0 && mask < (std::uint64_t(1) << n); ++mask) {
    std::vector<Formula> per_a;
    std::vector<Formula> off_conjuncts;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (std::uint64_t(1) << i)))
        off_conjuncts.push_back(phi_of.at(non_blocking[i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (std::uint64_t(1) << i))) continue;
      ActionSet a_only = ActionSet::single(non_blocking[i]);
      Formula inner = f_and(big_and(off_conjuncts),
                            f_or(f_dia(set_difference(a_only, t.alpha_f), f_var("X")),
                                 f_dia(t.alpha_f.complement(), f_var("W"))));
      per_a.push_back(f_mu("W", inner));
    }
    disjuncts.push_back(f_nu("X", big_and(per_a)));
  }

  Formula body = big_or({f_dia(t.alpha_e, f_true()), f_box(blocking.complement(), f_false()),
                         big_or(disjuncts)});
  Regex prefix = r_concat(t.rho, r_star(r_atom(t.alpha_f.complement())));
  return alpha_rename(f_not(f_dia(prefix, body)));
}

// ---------------------------------------------------------------------------
// Criterion presets
// ---------------------------------------------------------------------------

enum class CriterionKind {
  Progress,
  Justness,
  WeakFairness,
  WeakHyperfairness,
  StrongFairness,
  StrongHyperfairness,
};

inline const char* criterion_name(CriterionKind k) {
  switch (k) {
    case CriterionKind::Progress: return "progress";
    case CriterionKind::Justness: return "ja";
    case CriterionKind::WeakFairness: return "wfa";
    case CriterionKind::WeakHyperfairness: return "whfa";
    case CriterionKind::StrongFairness: return "sfa";
    case CriterionKind::StrongHyperfairness: return "shfa";
  }
  return "?";
}

inline std::optional<CriterionKind> criterion_from_name(const std::string& name) {
  if (name == "progress") return CriterionKind::Progress;
  if (name == "ja") return CriterionKind::Justness;
  if (name == "wfa") return CriterionKind::WeakFairness;
  if (name == "whfa") return CriterionKind::WeakHyperfairness;
  if (name == "sfa") return CriterionKind::StrongFairness;
  if (name == "shfa") return CriterionKind::StrongHyperfairness;
  return std::nullopt;
}

struct CriterionSpec {
  CriterionKind kind = CriterionKind::Progress;
  ActionSet blocking;
  ConcurrencyRelation concurrency;  // justness only
};

inline std::vector<std::string> non_blocking_actions(const std::vector<std::string>& alphabet,
                                                     const ActionSet& blocking) {
  std::vector<std::string> out;
  for (const auto& a : alphabet) {
    if (!blocking.contains(a)) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// phi_on(a) = <a>tt, phi_of(a) = [a]ff, alpha_el(a) = {a}.
inline FinitelyRealisableSpec weak_fairness_spec(const std::vector<std::string>& alphabet,
                                                 const ActionSet& blocking) {
  FinitelyRealisableSpec spec;
  for (const auto& a : non_blocking_actions(alphabet, blocking)) {
    spec.phi_on[a] = f_dia(ActionSet::single(a), f_true());
    spec.phi_of[a] = f_box(ActionSet::single(a), f_false());
    spec.alpha_el[a] = ActionSet::single(a);
  }
  return spec;
}

/// phi_on(a) = <~B* . a>tt, phi_of(a) = [~B* . a]ff, alpha_el(a) = {a}.
inline FinitelyRealisableSpec weak_hyperfairness_spec(const std::vector<std::string>& alphabet,
                                                      const ActionSet& blocking) {
  FinitelyRealisableSpec spec;
  for (const auto& a : non_blocking_actions(alphabet, blocking)) {
    Regex reach = r_concat(r_star(r_atom(blocking.complement())), r_atom(ActionSet::single(a)));
    spec.phi_on[a] = f_dia(reach, f_true());
    spec.phi_of[a] = f_box(reach, f_false());
    spec.alpha_el[a] = ActionSet::single(a);
  }
  return spec;
}

/// phi_on(a) = <a>tt, phi_of(a) = ff, alpha_el(a) = {b | not (a ~ b)}.
inline FinitelyRealisableSpec justness_spec(const std::vector<std::string>& alphabet,
                                            const ActionSet& blocking,
                                            const ConcurrencyRelation& conc) {
  FinitelyRealisableSpec spec;
  for (const auto& a : non_blocking_actions(alphabet, blocking)) {
    spec.phi_on[a] = f_dia(ActionSet::single(a), f_true());
    spec.phi_of[a] = f_false();
    spec.alpha_el[a] = conc.eliminators(a, alphabet);
  }
  return spec;
}

/// phi_of(b) = [b]ff per non-blocking b (strong fairness).
inline std::map<std::string, Formula> strong_fairness_phi_of(
    const std::vector<std::string>& alphabet, const ActionSet& blocking) {
  std::map<std::string, Formula> out;
  for (const auto& b : non_blocking_actions(alphabet, blocking))
    out[b] = f_box(ActionSet::single(b), f_false());
  return out;
}

/// phi_of(b) = [~B* . b]ff per non-blocking b (strong hyperfairness).
inline std::map<std::string, Formula> strong_hyperfairness_phi_of(
    const std::vector<std::string>& alphabet, const ActionSet& blocking) {
  std::map<std::string, Formula> out;
  for (const auto& b : non_blocking_actions(alphabet, blocking))
    out[b] = f_box(r_concat(r_star(r_atom(blocking.complement())), r_atom(ActionSet::single(b))),
                   f_false());
  return out;
}

/// Builds the criterion formula for one violation template.
inline Formula build_criterion_formula(const std::vector<std::string>& alphabet,
                                       const ViolationTemplate& t, const CriterionSpec& criterion,
                                       std::size_t subset_cap = 12) {
  const ActionSet& B = criterion.blocking;
  switch (criterion.kind) {
    case CriterionKind::Progress: return build_progress_formula(t, B);
    case CriterionKind::WeakFairness:
      return build_finitely_realisable_formula(t, B, weak_fairness_spec(alphabet, B));
    case CriterionKind::WeakHyperfairness:
      return build_finitely_realisable_formula(t, B, weak_hyperfairness_spec(alphabet, B));
    case CriterionKind::Justness:
      return build_finitely_realisable_formula(t, B,
                                               justness_spec(alphabet, B, criterion.concurrency));
    case CriterionKind::StrongFairness:
      return build_strong_formula(t, B, strong_fairness_phi_of(alphabet, B), subset_cap);
    case CriterionKind::StrongHyperfairness:
      return build_strong_formula(t, B, strong_hyperfairness_phi_of(alphabet, B), subset_cap);
  }
  throw std::logic_error("unknown criterion");
}

}  // namespace faircheck
