#pragma once

#include <cctype>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "faircheck/action_set.hpp"

namespace faircheck {

using StateId = std::uint32_t;

/// Error for all line-oriented text formats handled by the library.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct Transition {
  StateId src = 0;
  std::string label;
  StateId dst = 0;

  friend bool operator==(const Transition& a, const Transition& b) {
    return a.src == b.src && a.label == b.label && a.dst == b.dst;
  }
};

/// Finite labelled transition system with a distinguished initial state.
/// States are dense integers 0..num_states-1; the alphabet is kept sorted
/// and may declare labels that no transition uses.
class Lts {
 public:
  Lts(StateId num_states, StateId initial, std::vector<std::string> alphabet,
      std::vector<Transition> transitions)
      : num_states_(num_states), initial_(initial), transitions_(std::move(transitions)) {
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    alphabet_ = std::move(alphabet);
    if (initial_ >= num_states_) throw std::invalid_argument("initial state out of range");
    out_.assign(num_states_, {});
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
      const Transition& t = transitions_[i];
      if (t.src >= num_states_ || t.dst >= num_states_)
        throw std::invalid_argument("transition endpoint out of range");
      if (!std::binary_search(alphabet_.begin(), alphabet_.end(), t.label))
        throw std::invalid_argument("transition label '" + t.label + "' not in alphabet");
      out_[t.src].push_back(static_cast<std::uint32_t>(i));
    }
  }

  StateId num_states() const { return num_states_; }
  StateId initial() const { return initial_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  /// Indices into transitions() for transitions leaving s, in file order.
  const std::vector<std::uint32_t>& outgoing(StateId s) const {
    check_state(s);
    return out_[s];
  }

  std::optional<std::uint32_t> label_id(const std::string& label) const {
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), label);
    if (it == alphabet_.end() || *it != label) return std::nullopt;
    return static_cast<std::uint32_t>(it - alphabet_.begin());
  }

  void check_state(StateId s) const {
    if (s >= num_states_) throw std::out_of_range("unknown state id " + std::to_string(s));
  }

 private:
  StateId num_states_;
  StateId initial_;
  std::vector<std::string> alphabet_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<std::uint32_t>> out_;
};

/// Finite path: a start state and a consecutive sequence of transitions.
/// The empty step sequence is the empty path.
struct Path {
  StateId start = 0;
  std::vector<Transition> steps;

  static Path at(StateId s) { return Path{s, {}}; }

  std::size_t length() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  StateId final_state() const { return steps.empty() ? start : steps.back().dst; }

  /// State at position i (0 = start, length() = final state).
  StateId state_at(std::size_t i) const {
    if (i == 0) return start;
    return steps.at(i - 1).dst;
  }

  void push(const Transition& t) {
    if (t.src != final_state()) throw std::invalid_argument("non-consecutive step");
    steps.push_back(t);
  }

  friend bool operator==(const Path& a, const Path& b) {
    return a.start == b.start && a.steps == b.steps;
  }
};

/// Ultimately periodic path stem . cycle^w; the cycle has at least one
/// transition and returns to its first state.
struct Lasso {
  Path stem;
  Path cycle;

  Lasso(Path stem_, Path cycle_) : stem(std::move(stem_)), cycle(std::move(cycle_)) {
    if (cycle.length() == 0) throw std::invalid_argument("lasso cycle must be non-empty");
    if (cycle.final_state() != cycle.start)
      throw std::invalid_argument("lasso cycle must return to its first state");
    if (stem.final_state() != cycle.start)
      throw std::invalid_argument("lasso stem must end where the cycle starts");
  }

  friend bool operator==(const Lasso& a, const Lasso& b) {
    return a.stem == b.stem && a.cycle == b.cycle;
  }
};

using PathOrLasso = std::variant<Path, Lasso>;

inline bool is_valid_path(const Lts& lts, const Path& p) {
  if (p.start >= lts.num_states()) return false;
  StateId cur = p.start;
  for (const auto& step : p.steps) {
    if (step.src != cur || step.dst >= lts.num_states()) return false;
    bool found = false;
    for (auto ti : lts.outgoing(step.src)) {
      const Transition& t = lts.transitions()[ti];
      if (t.label == step.label && t.dst == step.dst) {
        found = true;
        break;
      }
    }
    if (!found) return false;
    cur = step.dst;
  }
  return true;
}

inline Path append_paths(const Path& prefix, const Path& suffix) {
  if (prefix.final_state() != suffix.start)
    throw std::invalid_argument("append: prefix ends in state " +
                                std::to_string(prefix.final_state()) +
                                " but suffix starts in state " + std::to_string(suffix.start));
  Path out = prefix;
  for (const auto& t : suffix.steps) out.push(t);
  return out;
}

inline Lasso append_paths(const Path& prefix, const Lasso& suffix) {
  return Lasso(append_paths(prefix, suffix.stem), suffix.cycle);
}

inline PathOrLasso append_paths(const Path& prefix, const PathOrLasso& suffix) {
  if (std::holds_alternative<Path>(suffix))
    return append_paths(prefix, std::get<Path>(suffix));
  return append_paths(prefix, std::get<Lasso>(suffix));
}

// ---------------------------------------------------------------------------
// Enabledness, blocking sets, reachability
// ---------------------------------------------------------------------------

/// Labels of transitions leaving s, as a literal set.
inline ActionSet enabled_actions(const Lts& lts, StateId s) {
  lts.check_state(s);
  std::vector<std::string> labels;
  for (auto ti : lts.outgoing(s)) labels.push_back(lts.transitions()[ti].label);
  return ActionSet::of(std::move(labels));
}

inline bool is_action_enabled(const Lts& lts, StateId s, const std::string& a) {
  for (auto ti : lts.outgoing(s)) {
    if (lts.transitions()[ti].label == a) return true;
  }
  return false;
}

/// A state is B-locked when every enabled action is blocking. Deadlock
/// states are B-locked for every B.
inline bool is_b_locked(const Lts& lts, StateId s, const ActionSet& blocking) {
  lts.check_state(s);
  for (auto ti : lts.outgoing(s)) {
    if (!blocking.contains(lts.transitions()[ti].label)) return false;
  }
  return true;
}

/// States reachable from s via transitions labelled outside B. The empty
/// path counts, so s itself is always included.
inline std::vector<StateId> b_free_reachable_states(const Lts& lts, StateId s,
                                                    const ActionSet& blocking) {
  lts.check_state(s);
  std::vector<char> seen(lts.num_states(), 0);
  std::deque<StateId> queue{s};
  seen[s] = 1;
  std::vector<StateId> out;
  while (!queue.empty()) {
    StateId cur = queue.front();
    queue.pop_front();
    out.push_back(cur);
    for (auto ti : lts.outgoing(cur)) {
      const Transition& t = lts.transitions()[ti];
      if (blocking.contains(t.label) || seen[t.dst]) continue;
      seen[t.dst] = 1;
      queue.push_back(t.dst);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Every action enabled in some state that is reachable from s over the
/// B-free transition subgraph.
inline ActionSet b_reachable_actions(const Lts& lts, StateId s, const ActionSet& blocking) {
  std::vector<std::string> labels;
  for (StateId r : b_free_reachable_states(lts, s, blocking)) {
    for (auto ti : lts.outgoing(r)) labels.push_back(lts.transitions()[ti].label);
  }
  return ActionSet::of(std::move(labels));
}

// ---------------------------------------------------------------------------
// Concurrency relation
// ---------------------------------------------------------------------------

/// The relation "a is concurrent with b" on ordered action pairs. Pairs not
/// present interfere. May be asymmetric.
struct ConcurrencyRelation {
  std::set<std::pair<std::string, std::string>> concurrent;

  bool concurrent_with(const std::string& a, const std::string& b) const {
    return concurrent.count({a, b}) != 0;
  }
  bool interferes(const std::string& a, const std::string& b) const {
    return !concurrent_with(a, b);
  }

  /// Actions that eliminate a, i.e. {b in Act | not (a ~ b)}.
  ActionSet eliminators(const std::string& a, const std::vector<std::string>& alphabet) const {
    std::vector<std::string> out;
    for (const auto& b : alphabet) {
      if (interferes(a, b)) out.push_back(b);
    }
    return ActionSet::of(std::move(out));
  }
};

struct ConcurrencyViolation {
  std::string action;   // the action that should have stayed enabled
  StateId from_state;   // state where the action is enabled
  Path witness;         // concurrent-only path to a state disabling it
};

struct ConcurrencyValidationReport {
  bool valid = true;
  bool irreflexive = true;
  std::vector<ConcurrencyViolation> violations;
  std::vector<std::pair<std::string, std::string>> asymmetric_pairs;  // informational
};

/// Checks the two defining conditions: irreflexivity, and preservation of
/// enabledness along paths whose actions are all concurrent with the action
/// in question. Asymmetric pairs are reported but do not fail validation.
inline ConcurrencyValidationReport validate_concurrency_relation(const Lts& lts,
                                                                 const ConcurrencyRelation& conc) {
  ConcurrencyValidationReport report;
  for (const auto& pr : conc.concurrent) {
    if (!lts.label_id(pr.first) || !lts.label_id(pr.second))
      throw std::invalid_argument("concurrency relation mentions label outside the alphabet: " +
                                  (lts.label_id(pr.first) ? pr.second : pr.first));
    if (pr.first == pr.second) {
      report.irreflexive = false;
      report.valid = false;
    }
    if (!conc.concurrent_with(pr.second, pr.first))
      report.asymmetric_pairs.push_back(pr);
  }

  for (const auto& a : lts.alphabet()) {
    // BFS over transitions whose label is concurrent with a, from every
    // state enabling a; everything reached must still enable a.
    for (StateId s = 0; s < lts.num_states(); ++s) {
      if (!is_action_enabled(lts, s, a)) continue;
      std::vector<int> parent_edge(lts.num_states(), -1);
      std::vector<char> seen(lts.num_states(), 0);
      std::deque<StateId> queue{s};
      seen[s] = 1;
      while (!queue.empty()) {
        StateId cur = queue.front();
        queue.pop_front();
        if (!is_action_enabled(lts, cur, a)) {
          std::vector<Transition> rev;
          for (StateId v = cur; v != s;) {
            const Transition& t = lts.transitions()[parent_edge[v]];
            rev.push_back(t);
            v = t.src;
          }
          Path witness = Path::at(s);
          for (auto it = rev.rbegin(); it != rev.rend(); ++it) witness.push(*it);
          report.violations.push_back({a, s, witness});
          report.valid = false;
          break;  // one witness per (action, state) pair is enough
        }
        for (auto ti : lts.outgoing(cur)) {
          const Transition& t = lts.transitions()[ti];
          if (!conc.concurrent_with(a, t.label) || seen[t.dst]) continue;
          seen[t.dst] = 1;
          parent_edge[t.dst] = static_cast<int>(ti);
          queue.push_back(t.dst);
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Aldebaran (.aut) format
// ---------------------------------------------------------------------------

namespace detail {

inline void skip_spaces(const std::string& s, std::size_t& pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
}

inline std::uint64_t parse_number(const std::string& s, std::size_t& pos, int line) {
  skip_spaces(s, pos);
  if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
    throw ParseError(line, "expected a number");
  std::uint64_t value = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    value = value * 10 + static_cast<std::uint64_t>(s[pos] - '0');
    ++pos;
  }
  return value;
}

inline void expect_char(const std::string& s, std::size_t& pos, char c, int line) {
  skip_spaces(s, pos);
  if (pos >= s.size() || s[pos] != c)
    throw ParseError(line, std::string("expected '") + c + "'");
  ++pos;
}

inline std::string parse_quoted(const std::string& s, std::size_t& pos, int line) {
  skip_spaces(s, pos);
  if (pos >= s.size() || s[pos] != '"') throw ParseError(line, "expected a quoted label");
  ++pos;
  std::string out;
  while (pos < s.size()) {
    char c = s[pos];
    if (c == '\\') {
      if (pos + 1 >= s.size()) throw ParseError(line, "unterminated escape in quoted label");
      char next = s[pos + 1];
      if (next != '"' && next != '\\') throw ParseError(line, "unknown escape in quoted label");
      out.push_back(next);
      pos += 2;
      continue;
    }
    if (c == '"') {
      ++pos;
      return out;
    }
    out.push_back(c);
    ++pos;
  }
  throw ParseError(line, "unterminated quoted label");
}

inline std::string quote_label(const std::string& label) {
  std::string out = "\"";
  for (char c : label) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) {
    if (cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

}  // namespace detail

/// Parses the Aldebaran format: a `des (<init>,<#trans>,<#states>)` header
/// followed by one `(<from>,"<label>",<to>)` line per transition. Lines
/// starting with '%' are comments; `%alphabet "a" "b"` declares labels with
/// no transitions.
inline Lts parse_aut(const std::string& text) {
  auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError(1, "empty input, expected 'des' header");

  std::size_t pos = 0;
  const std::string& header = lines[0];
  detail::skip_spaces(header, pos);
  if (header.compare(pos, 3, "des") != 0) throw ParseError(1, "malformed header, expected 'des'");
  pos += 3;
  detail::expect_char(header, pos, '(', 1);
  std::uint64_t init = detail::parse_number(header, pos, 1);
  detail::expect_char(header, pos, ',', 1);
  std::uint64_t ntrans = detail::parse_number(header, pos, 1);
  detail::expect_char(header, pos, ',', 1);
  std::uint64_t nstates = detail::parse_number(header, pos, 1);
  detail::expect_char(header, pos, ')', 1);
  if (nstates == 0) throw ParseError(1, "state count must be positive");
  if (init >= nstates) throw ParseError(1, "initial state out of range");

  std::vector<Transition> transitions;
  std::vector<std::string> declared;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    int lineno = static_cast<int>(i + 1);
    const std::string& line = lines[i];
    std::size_t p = 0;
    detail::skip_spaces(line, p);
    if (p >= line.size()) continue;  // blank line
    if (line[p] == '%') {
      std::size_t q = p + 1;
      if (line.compare(q, 8, "alphabet") == 0) {
        q += 8;
        while (true) {
          detail::skip_spaces(line, q);
          if (q >= line.size()) break;
          declared.push_back(detail::parse_quoted(line, q, lineno));
        }
      }
      continue;
    }
    detail::expect_char(line, p, '(', lineno);
    std::uint64_t from = detail::parse_number(line, p, lineno);
    detail::expect_char(line, p, ',', lineno);
    std::string label = detail::parse_quoted(line, p, lineno);
    detail::expect_char(line, p, ',', lineno);
    std::uint64_t to = detail::parse_number(line, p, lineno);
    detail::expect_char(line, p, ')', lineno);
    if (from >= nstates || to >= nstates)
      throw ParseError(lineno, "state index out of range (state count is " +
                                   std::to_string(nstates) + ")");
    transitions.push_back({static_cast<StateId>(from), label, static_cast<StateId>(to)});
  }
  if (transitions.size() != ntrans)
    throw ParseError(1, "header declares " + std::to_string(ntrans) + " transitions but " +
                            std::to_string(transitions.size()) + " were given");

  std::vector<std::string> alphabet = declared;
  for (const auto& t : transitions) alphabet.push_back(t.label);
  return Lts(static_cast<StateId>(nstates), static_cast<StateId>(init), std::move(alphabet),
             std::move(transitions));
}

inline std::string serialize_aut(const Lts& lts) {
  std::ostringstream out;
  out << "des (" << lts.initial() << "," << lts.transitions().size() << "," << lts.num_states()
      << ")\n";
  std::set<std::string> used;
  for (const auto& t : lts.transitions()) used.insert(t.label);
  std::vector<std::string> unused;
  for (const auto& a : lts.alphabet()) {
    if (!used.count(a)) unused.push_back(a);
  }
  if (!unused.empty()) {
    out << "%alphabet";
    for (const auto& a : unused) out << " " << detail::quote_label(a);
    out << "\n";
  }
  for (const auto& t : lts.transitions())
    out << "(" << t.src << "," << detail::quote_label(t.label) << "," << t.dst << ")\n";
  return out.str();
}

/// Interference-list format: one `a !| b` line per interfering ordered pair,
/// '#' comments. Every ordered pair over the alphabet that is not listed is
/// concurrent.
inline ConcurrencyRelation parse_concurrency_file(const Lts& lts, const std::string& text) {
  std::set<std::pair<std::string, std::string>> interfering;
  auto lines = detail::split_lines(text);
  auto parse_label = [](const std::string& line, std::size_t& p, int lineno) {
    detail::skip_spaces(line, p);
    if (p < line.size() && line[p] == '"') return detail::parse_quoted(line, p, lineno);
    std::size_t start = p;
    while (p < line.size() && line[p] != ' ' && line[p] != '\t' && line[p] != '!') ++p;
    if (p == start) throw ParseError(lineno, "expected an action label");
    return line.substr(start, p - start);
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int lineno = static_cast<int>(i + 1);
    const std::string& line = lines[i];
    std::size_t p = 0;
    detail::skip_spaces(line, p);
    if (p >= line.size() || line[p] == '#') continue;
    std::string a = parse_label(line, p, lineno);
    detail::skip_spaces(line, p);
    if (line.compare(p, 2, "!|") != 0) throw ParseError(lineno, "expected '!|' between labels");
    p += 2;
    std::string b = parse_label(line, p, lineno);
    if (!lts.label_id(a)) throw ParseError(lineno, "unknown action '" + a + "'");
    if (!lts.label_id(b)) throw ParseError(lineno, "unknown action '" + b + "'");
    interfering.insert({a, b});
  }
  ConcurrencyRelation rel;
  for (const auto& a : lts.alphabet()) {
    for (const auto& b : lts.alphabet()) {
      if (!interfering.count({a, b})) rel.concurrent.insert({a, b});
    }
  }
  return rel;
}

}  // namespace faircheck
