#include <catch2/catch_amalgamated.hpp>

#include "faircheck/mucalc_text.hpp"
#include "faircheck/oracle.hpp"
#include "support.hpp"

using namespace faircheck;
using testing_support::coffee;
using testing_support::path_of;

namespace {

ViolationTemplate inevitable_delivery(const Lts& lts) {
  PatternSpec spec;
  spec.scope = Scope::Global;
  spec.behaviour = Behaviour::Response;
  spec.Sq = ActionSet::of({"order"});
  spec.Sr = ActionSet::of({"deliver"});
  return instantiate_pattern(spec, lts.alphabet()).templates[0];
}

bool candidate_passes(const Lts& lts, const PathOrLasso& candidate, const ViolationTemplate& t,
                      const CriterionSpec& criterion) {
  return is_violating(lts, candidate, t).holds &&
         satisfies_progress(lts, candidate, criterion.blocking).holds &&
         satisfies_criterion(lts, candidate, criterion).holds;
}

/// Reference decision: literally try every enumerated candidate.
bool naive_admits(const Lts& lts, const ViolationTemplate& t, const CriterionSpec& criterion,
                  const SearchBounds& bounds) {
  bool found = false;
  enumerate_candidates(lts, bounds, [&](const PathOrLasso& candidate) {
    if (candidate_passes(lts, candidate, t, criterion)) {
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace

TEST_CASE("candidate enumeration is exhaustive on tiny systems") {
  Lts deadlock = parse_aut("des (0,0,1)\n");
  std::vector<PathOrLasso> seen;
  CHECK(enumerate_candidates(deadlock, SearchBounds{3, 3}, [&](const PathOrLasso& c) {
    seen.push_back(c);
    return true;
  }));
  REQUIRE(seen.size() == 1);
  CHECK(std::holds_alternative<Path>(seen[0]));

  Lts loop = parse_aut("des (0,1,1)\n(0,\"a\",0)\n");
  seen.clear();
  enumerate_candidates(loop, SearchBounds{1, 1}, [&](const PathOrLasso& c) {
    seen.push_back(c);
    return true;
  });
  // empty path, one-step path, and the lasso from each of the two stems
  REQUIRE(seen.size() == 4);
  int paths = 0, lassos = 0;
  for (const auto& c : seen) (std::holds_alternative<Path>(c) ? paths : lassos) += 1;
  CHECK(paths == 2);
  CHECK(lassos == 2);

  // Early stop is honored.
  int visits = 0;
  bool completed = enumerate_candidates(loop, SearchBounds{4, 4}, [&](const PathOrLasso&) {
    return ++visits < 3;
  });
  CHECK_FALSE(completed);
  CHECK(visits == 3);
}

TEST_CASE("enumeration yields the example lassos of the running example") {
  Lts lts = coffee();
  Lasso brew = testing_support::brew_loop(lts);
  Lasso pay = testing_support::pay_loop(lts);
  bool saw_brew = false, saw_pay = false;
  // Small bounds keep this exhaustive; the stream at larger bounds is a
  // superset of the stream at smaller ones.
  enumerate_candidates(lts, SearchBounds{2, 2}, [&](const PathOrLasso& c) {
    if (std::holds_alternative<Lasso>(c)) {
      if (std::get<Lasso>(c) == brew) saw_brew = true;
      if (std::get<Lasso>(c) == pay) saw_pay = true;
    }
    return true;
  });
  CHECK(saw_brew);
  CHECK(saw_pay);
}

TEST_CASE("oracle finds the brewing loop under progress") {
  Lts lts = coffee();
  ViolationTemplate t = inevitable_delivery(lts);
  CriterionSpec criterion{CriterionKind::Progress, ActionSet::none(), {}};
  OracleResult result = oracle_admits_violating(lts, t, criterion, SearchBounds::defaults(lts));
  REQUIRE(result.found);
  REQUIRE(result.witness.has_value());
  CHECK(candidate_passes(lts, *result.witness, t, criterion));
}

TEST_CASE("oracle finds no weakly hyperfair violating path in the running example") {
  Lts lts = coffee();
  ViolationTemplate t = inevitable_delivery(lts);
  CriterionSpec criterion{CriterionKind::WeakHyperfairness, ActionSet::none(), {}};
  OracleResult result = oracle_admits_violating(lts, t, criterion, SearchBounds::defaults(lts));
  CHECK_FALSE(result.found);
}

TEST_CASE("a deadlocked system admits the empty violating path") {
  Lts deadlock = parse_aut("des (0,0,1)\n%alphabet \"a\"\n");
  ViolationTemplate t{r_eps(), ActionSet::of({"a"}), ActionSet::none()};
  CriterionSpec criterion{CriterionKind::Progress, ActionSet::none(), {}};
  OracleResult result = oracle_admits_violating(deadlock, t, criterion, SearchBounds{3, 3});
  REQUIRE(result.found);
  REQUIRE(std::holds_alternative<Path>(*result.witness));
  CHECK(std::get<Path>(*result.witness).empty());
}

TEST_CASE("oracle verdicts match naive candidate checking on small instances") {
  RandomEngine rng(71);
  SearchBounds small{4, 4};
  int runs = 0;
  for (int i = 0; i < 30; ++i) {
    Lts lts = gen_random_lts(rng, {4, 3, 7});
    PatternSpec pattern = gen_random_pattern(rng, lts.alphabet());
    auto templates = instantiate_pattern(pattern, lts.alphabet()).templates;
    ActionSet blocking = (i % 2) ? gen_random_subset(rng, lts.alphabet(), true) : ActionSet::none();
    ConcurrencyRelation rel = gen_random_valid_concurrency(rng, lts);
    for (CriterionKind kind :
         {CriterionKind::Progress, CriterionKind::Justness, CriterionKind::WeakFairness,
          CriterionKind::WeakHyperfairness, CriterionKind::StrongFairness,
          CriterionKind::StrongHyperfairness}) {
      CriterionSpec criterion{kind, blocking, rel};
      bool naive = naive_admits(lts, templates[0], criterion, small);
      OracleResult generous =
          oracle_admits_violating(lts, templates[0], criterion, SearchBounds::defaults(lts));
      // Anything the naive bounded check finds, the search finds.
      if (naive) CHECK(generous.found);
      // Any witness within the naive bounds is confirmed by the naive check.
      OracleResult bounded = oracle_admits_violating(lts, templates[0], criterion, small);
      if (bounded.found) {
        const Path& stem = std::holds_alternative<Path>(*bounded.witness)
                               ? std::get<Path>(*bounded.witness)
                               : std::get<Lasso>(*bounded.witness).stem;
        if (stem.length() <= small.max_stem) CHECK(naive);
      }
      ++runs;
    }
  }
  CHECK(runs > 0);
}

TEST_CASE("oracle verdicts are monotone in the bounds") {
  RandomEngine rng(73);
  for (int i = 0; i < 20; ++i) {
    Lts lts = gen_random_lts(rng, {5, 3, 9});
    PatternSpec pattern = gen_random_pattern(rng, lts.alphabet());
    auto t = instantiate_pattern(pattern, lts.alphabet()).templates[0];
    CriterionSpec criterion{CriterionKind::Progress, ActionSet::none(), {}};
    OracleResult tight = oracle_admits_violating(lts, t, criterion, SearchBounds{2, 2});
    OracleResult loose = oracle_admits_violating(lts, t, criterion, SearchBounds{8, 8});
    if (tight.found) CHECK(loose.found);
  }
}

TEST_CASE("a strongly hyperfair witness certifies the weaker criteria") {
  RandomEngine rng(79);
  int confirmed = 0;
  for (int i = 0; i < 40 && confirmed < 10; ++i) {
    Lts lts = gen_random_lts(rng, {5, 3, 9});
    PatternSpec pattern = gen_random_pattern(rng, lts.alphabet());
    auto t = instantiate_pattern(pattern, lts.alphabet()).templates[0];
    ActionSet blocking = gen_random_subset(rng, lts.alphabet(), true);
    CriterionSpec shfa{CriterionKind::StrongHyperfairness, blocking, {}};
    OracleResult result = oracle_admits_violating(lts, t, shfa, SearchBounds::defaults(lts));
    if (!result.found) continue;
    const PathOrLasso& witness = *result.witness;
    CHECK(satisfies_shfa(lts, witness, blocking).holds);
    CHECK(satisfies_whfa(lts, witness, blocking).holds);
    CHECK(satisfies_sfa(lts, witness, blocking).holds);
    CHECK(satisfies_wfa(lts, witness, blocking).holds);
    CHECK(satisfies_progress(lts, witness, blocking).holds);
    ++confirmed;
  }
  CHECK(confirmed > 0);
}

TEST_CASE("cross validation agrees on the running example") {
  Lts lts = coffee();
  ViolationTemplate t = inevitable_delivery(lts);
  SearchBounds bounds = SearchBounds::defaults(lts);

  CriterionSpec progress{CriterionKind::Progress, ActionSet::none(), {}};
  CrossValidationReport r1 = cross_validate(lts, t, progress, bounds);
  CHECK(r1.agree);
  CHECK_FALSE(r1.formula_satisfied);
  CHECK(r1.oracle_found);
  REQUIRE(r1.counterexample.has_value());

  CriterionSpec sfa{CriterionKind::StrongFairness, ActionSet::none(), {}};
  CrossValidationReport r2 = cross_validate(lts, t, sfa, bounds);
  CHECK(r2.agree);
  CHECK_FALSE(r2.formula_satisfied);

  CriterionSpec whfa{CriterionKind::WeakHyperfairness, ActionSet::none(), {}};
  CrossValidationReport r3 = cross_validate(lts, t, whfa, bounds);
  CHECK(r3.agree);
  CHECK(r3.formula_satisfied);
  CHECK_FALSE(r3.oracle_found);
}

TEST_CASE("an empty alpha_f makes every progressing continuation violating") {
  Lts lts = coffee();
  ViolationTemplate t{parse_regular_formula("!{}* . order"), ActionSet::none(),
                      ActionSet::none()};
  Formula f = build_progress_formula(t, ActionSet::none());
  // ~alpha_f is the full alphabet, so the unfolding diamond is <!{}>.
  CHECK(to_text(f).find("<!{}>X") != std::string::npos);
  CHECK_FALSE(satisfies(lts, f));
  CriterionSpec criterion{CriterionKind::Progress, ActionSet::none(), {}};
  CrossValidationReport report = cross_validate(lts, t, criterion, SearchBounds::defaults(lts));
  CHECK(report.agree);
  CHECK(report.oracle_found);
}

TEST_CASE("harness runs and reports agreement lines") {
  HarnessConfig cfg = parse_harness_config(
      "seed = 5\ninstances = 4\nmax_states = 4\nmax_actions = 3\nmax_transitions = 7\n"
      "criteria = progress,wfa\n");
  std::ostringstream out;
  HarnessSummary summary = run_crossval_harness(cfg, out);
  CHECK(summary.runs == summary.agreements + summary.disagreements);
  CHECK(summary.runs >= 4 * 2 * 2);
  CHECK(summary.disagreements == 0);
  CHECK(out.str().find("AGREE") != std::string::npos);
  CHECK(out.str().find("summary:") != std::string::npos);

  CHECK_THROWS_AS(parse_harness_config("criteria = nope\n"), ParseError);
  CHECK_THROWS_AS(parse_harness_config("what = 1\n"), ParseError);
}

TEST_CASE("chain responses agree as a conjunction over their templates") {
  RandomEngine rng(89);
  int tested = 0;
  while (tested < 15) {
    Lts lts = gen_random_lts(rng, {4, 3, 8});
    if (lts.alphabet().size() < 2) continue;
    PatternSpec spec;
    spec.scope = (tested % 2) ? Scope::Global : Scope::Until;
    spec.behaviour = Behaviour::ChainResponse;
    spec.Sb = gen_random_subset(rng, lts.alphabet(), false);
    spec.chain_q = {gen_random_subset(rng, lts.alphabet(), false)};
    spec.chain_r = {gen_random_subset(rng, lts.alphabet(), false),
                    gen_random_subset(rng, lts.alphabet(), false)};
    auto templates = instantiate_pattern(spec, lts.alphabet()).templates;
    REQUIRE(templates.size() == 2);

    CriterionSpec criterion{CriterionKind::WeakFairness, ActionSet::none(), {}};
    std::vector<Formula> formulas;
    bool any_witness = false;
    for (const auto& t : templates) {
      formulas.push_back(build_criterion_formula(lts.alphabet(), t, criterion));
      any_witness = any_witness ||
                    oracle_admits_violating(lts, t, criterion, SearchBounds::defaults(lts)).found;
    }
    bool conjunction_satisfied = satisfies(lts, big_and(formulas));
    CHECK(conjunction_satisfied == !any_witness);
    ++tested;
  }
}

TEST_CASE("identical harness runs produce identical reports") {
  HarnessConfig cfg = parse_harness_config(
      "seed = 31\ninstances = 3\nmax_states = 4\nmax_actions = 3\nmax_transitions = 7\n"
      "criteria = progress,ja\n");
  std::ostringstream first, second;
  run_crossval_harness(cfg, first);
  run_crossval_harness(cfg, second);
  CHECK(first.str() == second.str());
}

TEST_CASE("random valid relations validate and random systems are connected") {
  RandomEngine rng(83);
  for (int i = 0; i < 25; ++i) {
    Lts lts = gen_random_lts(rng, {5, 4, 10});
    // connected from the initial state
    std::set<StateId> seen{lts.initial()};
    std::deque<StateId> queue{lts.initial()};
    while (!queue.empty()) {
      StateId cur = queue.front();
      queue.pop_front();
      for (auto ti : lts.outgoing(cur)) {
        StateId dst = lts.transitions()[ti].dst;
        if (seen.insert(dst).second) queue.push_back(dst);
      }
    }
    CHECK(seen.size() == lts.num_states());
    ConcurrencyRelation rel = gen_random_valid_concurrency(rng, lts);
    CHECK(validate_concurrency_relation(lts, rel).valid);
  }
}
