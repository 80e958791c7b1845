#pragma once

#include <CLI11.hpp>

#include "faircheck/cli.hpp"
#include "faircheck/property_file.hpp"

namespace faircheck {

/// Parses argv-style arguments into a RunConfig and runs the selected
/// subcommand. Returns the process exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"faircheck: liveness checking on labelled transition systems under completeness "
               "criteria (progress, justness, fairness, hyperfairness)"};
  app.require_subcommand(1);

  RunConfig config;
  std::string blocking_text;
  bool blocking_given = false;
  std::string criteria_text;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--porcelain", config.porcelain, "machine-readable key<TAB>value output");
    cmd->add_option("--subset-cap", config.subset_cap,
                    "largest non-blocking action count for strong criteria");
  };

  auto add_blocking = [&](CLI::App* cmd) {
    cmd->add_option("--blocking", blocking_text, "comma-separated blocking actions (overrides the property file)")
        ->each([&](const std::string&) { blocking_given = true; });
  };

  auto* check = app.add_subcommand("check", "model-check a property file against an LTS");
  check->add_option("lts", config.lts_path, "LTS in .aut format")->required();
  check->add_option("property", config.property_path, "property file")->required();
  check->add_flag("--with-oracle", config.with_oracle,
                  "cross-validate the verdict against the path-search oracle");
  check->add_flag("--simplify", config.simplify, "apply empty-set/unit normalization");
  check->add_option("--bounds-stem", [&](const std::vector<std::string>& v) {
    config.bounds_stem = static_cast<std::uint32_t>(std::stoul(v[0]));
    return true;
  }, "oracle stem bound");
  check->add_option("--bounds-cycle", [&](const std::vector<std::string>& v) {
    config.bounds_cycle = static_cast<std::uint32_t>(std::stoul(v[0]));
    return true;
  }, "oracle cycle bound");
  check->add_option("--conc", config.conc_path, "concurrency relation file (justness)");
  add_blocking(check);
  add_common(check);

  auto* generate = app.add_subcommand("generate", "print the template formulae without evaluating");
  generate->add_option("lts", config.lts_path, "LTS in .aut format")->required();
  generate->add_option("property", config.property_path, "property file")->required();
  generate->add_flag("--simplify", config.simplify, "apply empty-set/unit normalization");
  generate->add_option("--conc", config.conc_path, "concurrency relation file (justness)");
  add_blocking(generate);
  add_common(generate);

  auto* vconc = app.add_subcommand("validate-conc", "validate a concurrency relation against an LTS");
  vconc->add_option("lts", config.lts_path, "LTS in .aut format")->required();
  vconc->add_option("relation", config.conc_path, "interference list file")->required();
  add_common(vconc);

  auto* ctrace = app.add_subcommand("check-trace",
                                    "evaluate the completeness criteria on a stem/cycle trace");
  ctrace->add_option("lts", config.lts_path, "LTS in .aut format")->required();
  ctrace->add_option("trace", config.trace_path, "trace file")->required();
  ctrace->add_option("--property", config.property_path, "property file for the violation check");
  ctrace->add_option("--criteria", criteria_text, "comma-separated criteria (default: all six)");
  ctrace->add_option("--conc", config.conc_path, "concurrency relation file (justness)");
  add_blocking(ctrace);
  add_common(ctrace);

  auto* crossval = app.add_subcommand("crossval", "run the randomized formula/oracle agreement harness");
  crossval->add_option("config", config.config_path, "harness configuration file")->required();
  crossval->add_option("--seed", [&](const std::vector<std::string>& v) {
    config.seed = std::stoull(v[0]);
    return true;
  }, "override the config seed");
  crossval->add_option("--bounds-stem", [&](const std::vector<std::string>& v) {
    config.bounds_stem = static_cast<std::uint32_t>(std::stoul(v[0]));
    return true;
  }, "override the stem bound");
  crossval->add_option("--bounds-cycle", [&](const std::vector<std::string>& v) {
    config.bounds_cycle = static_cast<std::uint32_t>(std::stoul(v[0]));
    return true;
  }, "override the cycle bound");
  add_common(crossval);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitSatisfied;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  if (check->parsed()) config.command = RunConfig::Command::Check;
  if (generate->parsed()) config.command = RunConfig::Command::Generate;
  if (vconc->parsed()) config.command = RunConfig::Command::ValidateConc;
  if (ctrace->parsed()) config.command = RunConfig::Command::CheckTrace;
  if (crossval->parsed()) config.command = RunConfig::Command::Crossval;

  try {
    if (blocking_given) config.blocking_override = detail::parse_label_set(blocking_text, 1);
    if (!criteria_text.empty()) {
      std::stringstream ss(criteria_text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto kind = criterion_from_name(detail::trimmed(item));
        if (!kind) throw std::runtime_error("unknown criterion '" + item + "'");
        config.trace_criteria.push_back(*kind);
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  return run(config, out, err);
}

}  // namespace faircheck
