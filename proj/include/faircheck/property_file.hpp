#pragma once

#include <optional>
#include <string>
#include <vector>

#include "faircheck/lts.hpp"
#include "faircheck/templates.hpp"

namespace faircheck {

/// A parsed property file: either a pattern plus criterion, or a raw
/// formula in the textual mu-calculus grammar.
struct PropertySpec {
  std::optional<PatternSpec> pattern;
  std::optional<std::string> raw_formula;
  std::optional<CriterionKind> criterion;
  ActionSet blocking;
  std::optional<std::string> concurrency_file;
};

namespace detail {

inline std::vector<std::string> parse_label_list(const std::string& value, int lineno) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    skip_spaces(value, pos);
    if (pos >= value.size()) break;
    if (value[pos] == '"') {
      out.push_back(parse_quoted(value, pos, lineno));
    } else {
      std::size_t start = pos;
      while (pos < value.size() && value[pos] != ',' && value[pos] != ' ' && value[pos] != '\t')
        ++pos;
      if (pos == start) throw ParseError(lineno, "expected an action label");
      out.push_back(value.substr(start, pos - start));
    }
    skip_spaces(value, pos);
    if (pos < value.size()) {
      if (value[pos] != ',') throw ParseError(lineno, "expected ',' between labels");
      ++pos;
    }
  }
  return out;
}

inline ActionSet parse_label_set(const std::string& value, int lineno) {
  return ActionSet::of(parse_label_list(value, lineno));
}

inline std::vector<ActionSet> parse_set_list(const std::string& value, int lineno) {
  std::vector<ActionSet> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t semi = value.find(';', start);
    std::string part =
        semi == std::string::npos ? value.substr(start) : value.substr(start, semi - start);
    out.push_back(parse_label_set(part, lineno));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return out;
}

inline std::string trimmed(std::string s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  return s;
}

}  // namespace detail

/// Line-oriented `key = value` format with '#' comments. Keys: scope,
/// behaviour, k, Sa, Sb, Sq, Sr (comma-separated labels), chain_q, chain_r
/// (semicolon-separated sets), criterion, blocking, concurrency_file, and
/// formula (the raw text alternative that bypasses pattern templates).
inline PropertySpec parse_property_file(const std::string& text) {
  PropertySpec spec;
  PatternSpec pattern;
  bool saw_pattern_key = false, saw_scope = false, saw_behaviour = false;

  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int lineno = static_cast<int>(i + 1);
    std::string line = lines[i];
    std::size_t pos = 0;
    detail::skip_spaces(line, pos);
    if (pos >= line.size() || line[pos] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    std::string key = detail::trimmed(line.substr(0, eq));
    std::string value = detail::trimmed(line.substr(eq + 1));
    if (key != "formula") {
      auto hash = value.find('#');
      if (hash != std::string::npos) value = detail::trimmed(value.substr(0, hash));
    }

    if (key == "formula") {
      spec.raw_formula = value;
    } else if (key == "scope") {
      saw_pattern_key = saw_scope = true;
      if (value == "global") pattern.scope = Scope::Global;
      else if (value == "until") pattern.scope = Scope::Until;
      else if (value == "after") pattern.scope = Scope::After;
      else if (value == "after-until") pattern.scope = Scope::AfterUntil;
      else throw ParseError(lineno, "unknown scope '" + value + "'");
    } else if (key == "behaviour") {
      saw_pattern_key = saw_behaviour = true;
      if (value == "existence") pattern.behaviour = Behaviour::Existence;
      else if (value == "existence-at-least") pattern.behaviour = Behaviour::ExistenceAtLeast;
      else if (value == "response") pattern.behaviour = Behaviour::Response;
      else if (value == "chain-response") pattern.behaviour = Behaviour::ChainResponse;
      else throw ParseError(lineno, "unknown behaviour '" + value + "'");
    } else if (key == "k") {
      saw_pattern_key = true;
      std::size_t p = 0;
      pattern.k = static_cast<std::uint32_t>(detail::parse_number(value, p, lineno));
    } else if (key == "Sa") {
      saw_pattern_key = true;
      pattern.Sa = detail::parse_label_set(value, lineno);
    } else if (key == "Sb") {
      saw_pattern_key = true;
      pattern.Sb = detail::parse_label_set(value, lineno);
    } else if (key == "Sq") {
      saw_pattern_key = true;
      pattern.Sq = detail::parse_label_set(value, lineno);
    } else if (key == "Sr") {
      saw_pattern_key = true;
      pattern.Sr = detail::parse_label_set(value, lineno);
    } else if (key == "chain_q") {
      saw_pattern_key = true;
      pattern.chain_q = detail::parse_set_list(value, lineno);
    } else if (key == "chain_r") {
      saw_pattern_key = true;
      pattern.chain_r = detail::parse_set_list(value, lineno);
    } else if (key == "criterion") {
      auto kind = criterion_from_name(value);
      if (!kind) throw ParseError(lineno, "unknown criterion '" + value + "'");
      spec.criterion = *kind;
    } else if (key == "blocking") {
      spec.blocking = detail::parse_label_set(value, lineno);
    } else if (key == "concurrency_file") {
      spec.concurrency_file = value;
    } else {
      throw ParseError(lineno, "unknown key '" + key + "'");
    }
  }

  if (spec.raw_formula && saw_pattern_key)
    throw ParseError(1, "a property is either a raw formula or a pattern, not both");
  if (!spec.raw_formula) {
    if (!saw_scope || !saw_behaviour)
      throw ParseError(1, "pattern properties need both scope and behaviour");
    spec.pattern = pattern;
  }
  return spec;
}

}  // namespace faircheck
