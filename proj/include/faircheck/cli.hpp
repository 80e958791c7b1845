#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "faircheck/lts.hpp"
#include "faircheck/mucalc.hpp"
#include "faircheck/mucalc_text.hpp"
#include "faircheck/oracle.hpp"
#include "faircheck/path_predicates.hpp"
#include "faircheck/property_file.hpp"
#include "faircheck/templates.hpp"

namespace faircheck {

// Exit codes: 0 satisfied, 1 violated, 2 input error, 3 resource guard,
// 4 formula/oracle disagreement under --with-oracle.
enum ExitCode {
  kExitSatisfied = 0,
  kExitViolated = 1,
  kExitInputError = 2,
  kExitResourceGuard = 3,
  kExitDisagreement = 4,
};

struct RunConfig {
  enum class Command { Check, Generate, ValidateConc, CheckTrace, Crossval };
  Command command = Command::Check;
  std::string lts_path;
  std::string property_path;
  std::string trace_path;
  std::string conc_path;
  std::string config_path;
  std::optional<ActionSet> blocking_override;
  std::vector<CriterionKind> trace_criteria;  // empty = all six
  bool with_oracle = false;
  bool simplify = false;
  bool porcelain = false;
  std::optional<std::uint32_t> bounds_stem;
  std::optional<std::uint32_t> bounds_cycle;
  std::size_t subset_cap = 12;
  std::optional<std::uint64_t> seed;
};

namespace cli_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline bool color_enabled() {
  const char* v = std::getenv("FAIRCHECK_COLOR");
  return v && std::string(v) == "1";
}

inline std::string verdict_text(bool satisfied) {
  std::string word = satisfied ? "SATISFIED" : "VIOLATED";
  if (!color_enabled()) return word;
  return satisfied ? "\033[32m" + word + "\033[0m" : "\033[31m" + word + "\033[0m";
}

struct LoadedProperty {
  PropertySpec spec;
  std::vector<ViolationTemplate> templates;  // empty for raw formulae
  std::vector<std::string> warnings;
  CriterionSpec criterion;
  std::vector<Formula> formulas;  // one per template, or the single raw formula
};

inline LoadedProperty load_property(const Lts& lts, const RunConfig& config) {
  LoadedProperty loaded;
  loaded.spec = parse_property_file(read_file(config.property_path));
  ActionSet blocking =
      config.blocking_override ? *config.blocking_override : loaded.spec.blocking;

  if (loaded.spec.raw_formula) {
    Formula f = parse_formula(*loaded.spec.raw_formula);
    if (config.simplify) f = simplify(f, &lts.alphabet());
    loaded.formulas.push_back(f);
    loaded.criterion = CriterionSpec{CriterionKind::Progress, blocking, {}};
    return loaded;
  }

  if (!loaded.spec.criterion)
    throw std::runtime_error("property file names no criterion (progress|ja|wfa|whfa|sfa|shfa)");
  loaded.criterion.kind = *loaded.spec.criterion;
  loaded.criterion.blocking = blocking;
  if (loaded.criterion.kind == CriterionKind::Justness) {
    std::string conc_path = !config.conc_path.empty() ? config.conc_path
                            : loaded.spec.concurrency_file ? *loaded.spec.concurrency_file
                                                           : "";
    if (!conc_path.empty())
      loaded.criterion.concurrency = parse_concurrency_file(lts, read_file(conc_path));
    auto report = validate_concurrency_relation(lts, loaded.criterion.concurrency);
    if (!report.valid)
      throw std::runtime_error("concurrency relation is not valid for this LTS");
  }

  auto instantiation = instantiate_pattern(*loaded.spec.pattern, lts.alphabet());
  loaded.templates = instantiation.templates;
  loaded.warnings = instantiation.warnings;
  for (const auto& t : loaded.templates) {
    Formula f = build_criterion_formula(lts.alphabet(), t, loaded.criterion, config.subset_cap);
    if (config.simplify) f = simplify(f, &lts.alphabet());
    loaded.formulas.push_back(f);
  }
  return loaded;
}

inline SearchBounds bounds_for(const Lts& lts, const RunConfig& config) {
  SearchBounds bounds = SearchBounds::defaults(lts);
  if (config.bounds_stem) bounds.max_stem = *config.bounds_stem;
  if (config.bounds_cycle) bounds.max_cycle = *config.bounds_cycle;
  return bounds;
}

inline void emit(std::ostream& out, bool porcelain, const std::string& key,
                 const std::string& value) {
  if (porcelain)
    out << key << "\t" << value << "\n";
  else
    out << key << ": " << value << "\n";
}

inline int run_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Lts lts = parse_aut(read_file(config.lts_path));
  LoadedProperty loaded = load_property(lts, config);
  for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";

  Formula conjunction = loaded.formulas.size() == 1 ? loaded.formulas[0] : big_and(loaded.formulas);
  bool satisfied = satisfies(lts, conjunction);
  emit(out, config.porcelain, "formula", to_text(conjunction));
  emit(out, config.porcelain, "verdict",
       config.porcelain ? (satisfied ? "SATISFIED" : "VIOLATED") : verdict_text(satisfied));

  int exit_code = satisfied ? kExitSatisfied : kExitViolated;
  if (config.with_oracle) {
    if (loaded.templates.empty())
      throw std::runtime_error("--with-oracle needs a pattern property, not a raw formula");
    SearchBounds bounds = bounds_for(lts, config);
    bool any_witness = false;
    bool saturated = false;
    std::optional<PathOrLasso> witness;
    for (const auto& t : loaded.templates) {
      OracleResult result = oracle_admits_violating(lts, t, loaded.criterion, bounds);
      any_witness = any_witness || result.found;
      saturated = saturated || result.stem_saturated || result.cycle_saturated;
      if (result.found && !witness) witness = result.witness;
    }
    bool agree = satisfied == !any_witness;
    emit(out, config.porcelain, "oracle",
         any_witness ? "violating path found" : (saturated ? "no witness within bounds" : "no witness"));
    if (witness) {
      std::istringstream trace(format_trace(*witness));
      std::string line;
      while (std::getline(trace, line))
        emit(out, config.porcelain, "counterexample", line);
    }
    emit(out, config.porcelain, "agreement", agree ? "yes" : "no");
    if (!agree) return kExitDisagreement;
  }
  return exit_code;
}

inline int run_generate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Lts lts = parse_aut(read_file(config.lts_path));
  LoadedProperty loaded = load_property(lts, config);
  for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
  for (const auto& f : loaded.formulas) {
    if (config.porcelain)
      out << "formula\t" << to_text(f) << "\n";
    else
      out << to_text(f) << "\n";
  }
  return kExitSatisfied;
}

inline int run_validate_conc(const RunConfig& config, std::ostream& out, std::ostream&) {
  Lts lts = parse_aut(read_file(config.lts_path));
  ConcurrencyRelation rel = parse_concurrency_file(lts, read_file(config.conc_path));
  auto report = validate_concurrency_relation(lts, rel);
  emit(out, config.porcelain, "relation", report.valid ? "valid" : "invalid");
  if (!report.irreflexive) emit(out, config.porcelain, "violation", "relation is not irreflexive");
  for (const auto& v : report.violations) {
    std::ostringstream msg;
    msg << v.action << " enabled in state " << v.from_state
        << " but disabled after concurrent-only path:";
    msg << " " << v.from_state;
    for (const auto& s : v.witness.steps) msg << " -" << s.label << "-> " << s.dst;
    emit(out, config.porcelain, "violation", msg.str());
  }
  for (const auto& pr : report.asymmetric_pairs)
    emit(out, config.porcelain, "asymmetric", pr.first + " ~ " + pr.second + " but not " +
                                                   pr.second + " ~ " + pr.first);
  return report.valid ? kExitSatisfied : kExitViolated;
}

inline int run_check_trace(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Lts lts = parse_aut(read_file(config.lts_path));
  PathOrLasso trace = parse_trace(lts, read_file(config.trace_path));

  ActionSet blocking =
      config.blocking_override ? *config.blocking_override : ActionSet::none();
  ConcurrencyRelation conc;
  std::vector<ViolationTemplate> templates;
  if (!config.property_path.empty()) {
    PropertySpec spec = parse_property_file(read_file(config.property_path));
    if (!config.blocking_override) blocking = spec.blocking;
    if (spec.concurrency_file && config.conc_path.empty())
      conc = parse_concurrency_file(lts, read_file(*spec.concurrency_file));
    if (spec.pattern) {
      auto instantiation = instantiate_pattern(*spec.pattern, lts.alphabet());
      templates = instantiation.templates;
      for (const auto& w : instantiation.warnings) err << "warning: " << w << "\n";
    }
  }
  if (!config.conc_path.empty())
    conc = parse_concurrency_file(lts, read_file(config.conc_path));
  {
    auto report = validate_concurrency_relation(lts, conc);
    if (!report.valid) throw std::runtime_error("concurrency relation is not valid for this LTS");
  }

  std::vector<CriterionKind> criteria = config.trace_criteria;
  if (criteria.empty())
    criteria = {CriterionKind::Progress,       CriterionKind::Justness,
                CriterionKind::WeakFairness,   CriterionKind::WeakHyperfairness,
                CriterionKind::StrongFairness, CriterionKind::StrongHyperfairness};

  for (CriterionKind kind : criteria) {
    CriterionSpec criterion{kind, blocking, conc};
    Verdict verdict = satisfies_criterion(lts, trace, criterion);
    std::string line = verdict.holds ? "holds" : "fails (" + *verdict.witness + ")";
    emit(out, config.porcelain, criterion_name(kind), line);
  }
  for (std::size_t i = 0; i < templates.size(); ++i) {
    Verdict verdict = is_violating(lts, trace, templates[i]);
    std::string key = templates.size() == 1 ? "violating" : "violating[" + std::to_string(i) + "]";
    emit(out, config.porcelain, key, verdict.holds ? "yes" : "no");
  }
  return kExitSatisfied;
}

inline int run_crossval(const RunConfig& config, std::ostream& out, std::ostream&) {
  HarnessConfig cfg = parse_harness_config(read_file(config.config_path));
  if (config.seed) cfg.seed = *config.seed;
  if (config.bounds_stem) cfg.bounds_stem = *config.bounds_stem;
  if (config.bounds_cycle) cfg.bounds_cycle = *config.bounds_cycle;
  HarnessSummary summary = run_crossval_harness(cfg, out);
  return summary.disagreements == 0 ? kExitSatisfied : kExitDisagreement;
}

}  // namespace cli_detail

inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case RunConfig::Command::Check: return cli_detail::run_check(config, out, err);
      case RunConfig::Command::Generate: return cli_detail::run_generate(config, out, err);
      case RunConfig::Command::ValidateConc:
        return cli_detail::run_validate_conc(config, out, err);
      case RunConfig::Command::CheckTrace: return cli_detail::run_check_trace(config, out, err);
      case RunConfig::Command::Crossval: return cli_detail::run_crossval(config, out, err);
    }
  } catch (const SubsetCapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitResourceGuard;
  } catch (const OracleBudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitResourceGuard;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace faircheck
