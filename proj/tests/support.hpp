#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "faircheck/lts.hpp"
#include "faircheck/oracle.hpp"
#include "faircheck/path_predicates.hpp"

namespace testing_support {

inline std::string fixture_path(const std::string& name) {
  return std::string(FAIRCHECK_FIXTURES) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline faircheck::Lts coffee() { return faircheck::parse_aut(read_fixture("coffee.aut")); }
inline faircheck::Lts coffee_pay() { return faircheck::parse_aut(read_fixture("coffee_pay.aut")); }

/// Concurrency relation of the running example (every action self-interferes,
/// payment and mode-switch actions mutually interfere, everything else is
/// concurrent).
inline faircheck::ConcurrencyRelation coffee_relation(const faircheck::Lts& lts) {
  return faircheck::parse_concurrency_file(lts, read_fixture("coffee.conc"));
}

/// Relation for the merged-pay variant where pay is concurrent with both
/// mode switches (but not the other way around).
inline faircheck::ConcurrencyRelation pay_concurrent_relation(const faircheck::Lts& lts) {
  faircheck::ConcurrencyRelation rel;
  for (const auto& a : lts.alphabet()) {
    for (const auto& b : lts.alphabet()) {
      if (a == b) continue;
      if ((a == "to_cash" || a == "to_card") && b == "pay") continue;
      rel.concurrent.insert({a, b});
    }
  }
  return rel;
}

/// Builds a path through the LTS from a start state and a label sequence,
/// resolving each label to the unique matching transition (smallest target
/// if several match).
inline faircheck::Path path_of(const faircheck::Lts& lts, faircheck::StateId start,
                               const std::vector<std::string>& labels) {
  faircheck::Path p = faircheck::Path::at(start);
  for (const auto& label : labels) {
    std::optional<faircheck::Transition> chosen;
    for (auto ti : lts.outgoing(p.final_state())) {
      const auto& t = lts.transitions()[ti];
      if (t.label == label && (!chosen || t.dst < chosen->dst)) chosen = t;
    }
    if (!chosen) throw std::runtime_error("no transition labelled " + label);
    p.push(*chosen);
  }
  return p;
}

/// Builds a path from explicit (label, target) steps.
inline faircheck::Path path_via(const faircheck::Lts& lts, faircheck::StateId start,
                                const std::vector<std::pair<std::string, faircheck::StateId>>& steps) {
  faircheck::Path p = faircheck::Path::at(start);
  for (const auto& [label, dst] : steps) p.push({p.final_state(), label, dst});
  if (!faircheck::is_valid_path(lts, p)) throw std::runtime_error("path not in the LTS");
  return p;
}

/// The brew-loop lasso of the running example: s0 -order-> s1 -card-> s3,
/// then the brew self-loop.
inline faircheck::Lasso brew_loop(const faircheck::Lts& lts) {
  faircheck::Path stem = path_of(lts, 0, {"order", "card"});
  faircheck::Path cycle = faircheck::Path::at(3);
  cycle.push({3, "brew", 3});
  return faircheck::Lasso(stem, cycle);
}

/// The pay-loop lasso: s0 -order-> s1, then switching modes forever.
inline faircheck::Lasso pay_loop(const faircheck::Lts& lts, const std::string& to_cash = "to_cash",
                                 const std::string& to_card = "to_card") {
  faircheck::Path stem = path_of(lts, 0, {"order"});
  faircheck::Path cycle = path_of(lts, 1, {to_cash, to_card});
  return faircheck::Lasso(stem, cycle);
}

}  // namespace testing_support
