#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "faircheck/cli_main.hpp"
#include "faircheck/mucalc_text.hpp"
#include "support.hpp"

using namespace faircheck;
using testing_support::fixture_path;

namespace {

struct CliRun {
  int exit_code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& content) {
  auto dir = std::filesystem::temp_directory_path() / "faircheck_tests";
  std::filesystem::create_directories(dir);
  auto path = dir / name;
  std::ofstream file(path, std::ios::binary);
  file << content;
  return path.string();
}

}  // namespace

TEST_CASE("check reports the fixture verdicts with matching exit codes") {
  CliRun violated =
      cli({"check", fixture_path("coffee.aut"), fixture_path("inevitable_delivery_progress.prop")});
  CHECK(violated.exit_code == kExitViolated);
  CHECK(violated.out.find("VIOLATED") != std::string::npos);
  CHECK(violated.out.find("formula:") != std::string::npos);

  CliRun wfa =
      cli({"check", fixture_path("coffee.aut"), fixture_path("inevitable_delivery_wfa.prop")});
  CHECK(wfa.exit_code == kExitViolated);

  CliRun whfa =
      cli({"check", fixture_path("coffee.aut"), fixture_path("inevitable_delivery_whfa.prop")});
  CHECK(whfa.exit_code == kExitSatisfied);
  CHECK(whfa.out.find("SATISFIED") != std::string::npos);

  CliRun single = cli({"check", fixture_path("coffee.aut"), fixture_path("single_order.prop")});
  CHECK(single.exit_code == kExitSatisfied);

  CliRun possible =
      cli({"check", fixture_path("coffee.aut"), fixture_path("possible_delivery.prop")});
  CHECK(possible.exit_code == kExitSatisfied);
}

TEST_CASE("check with the oracle reports agreement") {
  CliRun run = cli({"check", fixture_path("coffee.aut"),
                    fixture_path("inevitable_delivery_progress.prop"), "--with-oracle"});
  CHECK(run.exit_code == kExitViolated);
  CHECK(run.out.find("oracle: violating path found") != std::string::npos);
  CHECK(run.out.find("agreement: yes") != std::string::npos);
  CHECK(run.out.find("counterexample") != std::string::npos);

  CliRun sat = cli({"check", fixture_path("coffee.aut"),
                    fixture_path("inevitable_delivery_shfa.prop"), "--with-oracle"});
  CHECK(sat.exit_code == kExitSatisfied);
  CHECK(sat.out.find("agreement: yes") != std::string::npos);
}

TEST_CASE("check accepts a blocking override") {
  // Blocking the brew action makes the stuck-before-brewing path complete,
  // so inevitable delivery is violated even under strong hyperfairness.
  CliRun run = cli({"check", fixture_path("coffee.aut"),
                    fixture_path("inevitable_delivery_shfa.prop"), "--blocking", "brew"});
  CHECK(run.exit_code == kExitViolated);
}

TEST_CASE("generate output reparses to the built formulae") {
  CliRun run =
      cli({"generate", fixture_path("coffee.aut"), fixture_path("inevitable_delivery_wfa.prop")});
  REQUIRE(run.exit_code == kExitSatisfied);
  std::istringstream lines(run.out);
  std::string line;
  std::vector<Formula> printed;
  while (std::getline(lines, line)) {
    if (!line.empty()) printed.push_back(parse_formula(line));
  }
  REQUIRE(printed.size() == 1);

  Lts lts = testing_support::coffee();
  PatternSpec spec;
  spec.scope = Scope::Global;
  spec.behaviour = Behaviour::Response;
  spec.Sq = ActionSet::of({"order"});
  spec.Sr = ActionSet::of({"deliver"});
  auto t = instantiate_pattern(spec, lts.alphabet()).templates[0];
  CriterionSpec criterion{CriterionKind::WeakFairness, ActionSet::none(), {}};
  Formula built = build_criterion_formula(lts.alphabet(), t, criterion);
  CHECK(formula_equal(printed[0], built));
}

TEST_CASE("porcelain output is tab separated") {
  CliRun run = cli({"check", fixture_path("coffee.aut"), fixture_path("single_order.prop"),
                    "--porcelain"});
  CHECK(run.exit_code == kExitSatisfied);
  CHECK(run.out.find("verdict\tSATISFIED") != std::string::npos);
  CHECK(run.out.find("formula\t") != std::string::npos);
}

TEST_CASE("validate-conc prints the validation report") {
  CliRun good =
      cli({"validate-conc", fixture_path("coffee.aut"), fixture_path("coffee.conc")});
  CHECK(good.exit_code == kExitSatisfied);
  CHECK(good.out.find("relation: valid") != std::string::npos);

  std::string bad = write_temp("bad.conc",
                               "order !| order\nto_cash !| to_cash\nto_card !| to_card\n"
                               "card !| card\ncash !| cash\nbrew !| brew\ndeliver !| deliver\n");
  CliRun invalid = cli({"validate-conc", fixture_path("coffee.aut"), bad});
  CHECK(invalid.exit_code == kExitViolated);
  CHECK(invalid.out.find("relation: invalid") != std::string::npos);
  CHECK(invalid.out.find("violation") != std::string::npos);
}

TEST_CASE("check-trace evaluates the criteria on the brewing loop") {
  CliRun run = cli({"check-trace", fixture_path("coffee.aut"), fixture_path("brewloop.trace"),
                    "--criteria", "sfa,whfa", "--blocking", ""});
  REQUIRE(run.exit_code == kExitSatisfied);
  CHECK(run.out.find("sfa: holds") != std::string::npos);
  CHECK(run.out.find("whfa: fails (") != std::string::npos);
  CHECK(run.out.find("perpetually reachable") != std::string::npos);
  CHECK(run.out.find("never occurs") != std::string::npos);
  CHECK(run.out.find("wfa:") == std::string::npos);  // not requested

  CliRun all = cli({"check-trace", fixture_path("coffee.aut"), fixture_path("payloop.trace"),
                    "--conc", fixture_path("coffee.conc"),
                    "--property", fixture_path("inevitable_delivery_progress.prop")});
  REQUIRE(all.exit_code == kExitSatisfied);
  CHECK(all.out.find("progress: holds") != std::string::npos);
  CHECK(all.out.find("ja: holds") != std::string::npos);
  CHECK(all.out.find("sfa: fails") != std::string::npos);
  CHECK(all.out.find("violating: yes") != std::string::npos);
}

TEST_CASE("crossval runs a small harness config") {
  std::string cfg = write_temp("tiny.cfg",
                               "seed = 9\ninstances = 2\nmax_states = 3\nmax_actions = 2\n"
                               "max_transitions = 5\ncriteria = progress,sfa\n");
  CliRun run = cli({"crossval", cfg});
  CHECK(run.exit_code == kExitSatisfied);
  CHECK(run.out.find("AGREE") != std::string::npos);
  CHECK(run.out.find("summary:") != std::string::npos);

  CliRun reseeded = cli({"crossval", cfg, "--seed", "10"});
  CHECK(reseeded.exit_code == kExitSatisfied);
}

TEST_CASE("input problems map to the input-error exit code") {
  CliRun missing = cli({"check", "/nonexistent.aut", fixture_path("single_order.prop")});
  CHECK(missing.exit_code == kExitInputError);
  CHECK(missing.err.find("error:") != std::string::npos);

  std::string broken = write_temp("broken.aut", "des (0,1,1)\n(0,\"a\",5)\n");
  CliRun malformed = cli({"check", broken, fixture_path("single_order.prop")});
  CHECK(malformed.exit_code == kExitInputError);
  CHECK(malformed.err.find("line 2") != std::string::npos);

  CliRun usage = cli({"check"});
  CHECK(usage.exit_code == kExitInputError);

  CliRun help = cli({"--help"});
  CHECK(help.exit_code == kExitSatisfied);
  CHECK(help.out.find("faircheck") != std::string::npos);
}

TEST_CASE("the subset cap trips the resource guard exit code") {
  std::ostringstream aut;
  aut << "des (0,13,1)\n";
  for (int i = 0; i < 13; ++i) aut << "(0,\"a" << i << "\",0)\n";
  std::string big = write_temp("big.aut", aut.str());
  std::string prop = write_temp("sfa.prop",
                                "scope = global\nbehaviour = existence\nSr = \"a0\"\n"
                                "criterion = sfa\nblocking =\n");
  CliRun capped = cli({"check", big, prop});
  CHECK(capped.exit_code == kExitResourceGuard);
  CHECK(capped.err.find("cap") != std::string::npos);

  // Raising the cap lets the 2^13-1 disjunct formula build and evaluate;
  // with nothing blocked, strong fairness forces every enabled action to
  // recur, so no a0-free fair path exists and the property holds.
  CliRun raised = cli({"check", big, prop, "--subset-cap", "13"});
  CHECK(raised.exit_code == kExitSatisfied);
}

TEST_CASE("verdicts can be colored via the environment") {
  setenv("FAIRCHECK_COLOR", "1", 1);
  CliRun run = cli({"check", fixture_path("coffee.aut"), fixture_path("single_order.prop")});
  unsetenv("FAIRCHECK_COLOR");
  CHECK(run.out.find("\033[32m") != std::string::npos);

  CliRun plain = cli({"check", fixture_path("coffee.aut"), fixture_path("single_order.prop")});
  CHECK(plain.out.find("\033[") == std::string::npos);
}

TEST_CASE("justness property files pull in the concurrency relation") {
  // The fixture names its relation file relative to the repository root;
  // resolve it next to the fixtures instead.
  std::string prop = write_temp("ja.prop",
                                "scope = global\nbehaviour = response\nSq = \"order\"\n"
                                "Sr = \"deliver\"\ncriterion = ja\nblocking =\n"
                                "concurrency_file = " + fixture_path("coffee.conc") + "\n");
  CliRun run = cli({"check", fixture_path("coffee.aut"), prop});
  CHECK(run.exit_code == kExitViolated);  // the mode-switching loop is just
}
