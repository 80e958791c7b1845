#include <catch2/catch_amalgamated.hpp>

#include "faircheck/mucalc_text.hpp"
#include "faircheck/oracle.hpp"
#include "faircheck/property_file.hpp"
#include "faircheck/templates.hpp"
#include "support.hpp"

using namespace faircheck;
using testing_support::coffee;

namespace {

/// Number of fairness disjuncts in a strong-criterion formula:
/// !<...>(<ae>tt || [~B]ff || OR_F nu X. ...).
std::size_t strong_disjunct_count(const Formula& f) {
  REQUIRE(f->kind == FKind::Not);
  REQUIRE(f->lhs->kind == FKind::Diamond);
  const Formula& body = f->lhs->lhs;
  REQUIRE(body->kind == FKind::Or);
  REQUIRE(body->rhs->kind == FKind::Or);
  Formula big = body->rhs->rhs;
  if (big->kind == FKind::False) return 0;
  std::size_t count = 1;
  while (big->kind == FKind::Or) {
    ++count;
    big = big->rhs;
  }
  return count;
}

std::size_t ast_size(const Formula& f) {
  std::size_t n = 1;
  if (f->lhs) n += ast_size(f->lhs);
  if (f->rhs) n += ast_size(f->rhs);
  return n;
}

}  // namespace

TEST_CASE("global response instantiates to the expected template") {
  Lts lts = coffee();
  PatternSpec spec;
  spec.scope = Scope::Global;
  spec.behaviour = Behaviour::Response;
  spec.Sq = ActionSet::of({"order"});
  spec.Sr = ActionSet::of({"deliver"});
  auto result = instantiate_pattern(spec, lts.alphabet());
  REQUIRE(result.templates.size() == 1);
  const auto& t = result.templates[0];
  CHECK(to_text(t.rho) == "!{}* . order");
  CHECK(t.alpha_f == ActionSet::of({"deliver"}));
  CHECK(t.alpha_e == ActionSet::none());
  CHECK(result.warnings.empty());
}

TEST_CASE("until existence instantiates to an empty prefix") {
  Lts lts = coffee();
  PatternSpec spec;
  spec.scope = Scope::Until;
  spec.behaviour = Behaviour::Existence;
  spec.Sb = ActionSet::of({"order"});
  spec.Sr = ActionSet::of({"deliver"});
  auto result = instantiate_pattern(spec, lts.alphabet());
  REQUIRE(result.templates.size() == 1);
  CHECK(result.templates[0].rho->kind == RegKind::Epsilon);
  CHECK(result.templates[0].alpha_f == ActionSet::of({"deliver"}));
  CHECK(result.templates[0].alpha_e == ActionSet::of({"order"}));
}

TEST_CASE("after scope anchors on the first occurrence") {
  Lts lts = coffee();
  PatternSpec spec;
  spec.scope = Scope::After;
  spec.behaviour = Behaviour::Existence;
  spec.Sa = ActionSet::of({"order"});
  spec.Sr = ActionSet::of({"deliver"});
  auto result = instantiate_pattern(spec, lts.alphabet());
  REQUIRE(result.templates.size() == 1);
  CHECK(to_text(result.templates[0].rho) == "!{order}* . order");
}

TEST_CASE("existence at least k sums bounded repetitions") {
  Lts lts = coffee();
  PatternSpec spec;
  spec.scope = Scope::Until;
  spec.behaviour = Behaviour::ExistenceAtLeast;
  spec.k = 3;
  spec.Sb = ActionSet::of({"order"});
  spec.Sr = ActionSet::of({"deliver"});
  auto result = instantiate_pattern(spec, lts.alphabet());
  REQUIRE(result.templates.size() == 1);
  CHECK(to_text(result.templates[0].rho) ==
        "eps + !{deliver,order}* . deliver + "
        "!{deliver,order}* . deliver . !{deliver,order}* . deliver");

  spec.k = 0;
  CHECK_THROWS_AS(instantiate_pattern(spec, lts.alphabet()), std::invalid_argument);
}

TEST_CASE("chain response yields one template per response position") {
  Lts lts = coffee();
  PatternSpec spec;
  spec.scope = Scope::AfterUntil;
  spec.behaviour = Behaviour::ChainResponse;
  spec.Sa = ActionSet::of({"order"});
  spec.Sb = ActionSet::of({"deliver"});
  spec.chain_q = {ActionSet::of({"to_cash"}), ActionSet::of({"to_card"})};
  spec.chain_r = {ActionSet::of({"card"}), ActionSet::of({"cash"})};
  auto result = instantiate_pattern(spec, lts.alphabet());
  REQUIRE(result.templates.size() == 2);
  CHECK(to_text(result.templates[0].rho) ==
        "!{}* . order . !{deliver}* . to_cash . !{deliver,to_card}* . to_card");
  CHECK(result.templates[0].alpha_f == ActionSet::of({"card"}));
  CHECK(result.templates[0].alpha_e == ActionSet::of({"deliver"}));
  CHECK(to_text(result.templates[1].rho) ==
        "!{}* . order . !{deliver}* . to_cash . !{deliver,to_card}* . to_card . "
        "!{card,deliver}* . card");
  CHECK(result.templates[1].alpha_f == ActionSet::of({"cash"}));

  spec.chain_q.clear();
  CHECK_THROWS_AS(instantiate_pattern(spec, lts.alphabet()), std::invalid_argument);
}

TEST_CASE("instantiation rejects sets outside the alphabet and flags degenerates") {
  Lts lts = coffee();
  PatternSpec spec;
  spec.scope = Scope::Global;
  spec.behaviour = Behaviour::Response;
  spec.Sq = ActionSet::of({"zap"});
  spec.Sr = ActionSet::of({"deliver"});
  CHECK_THROWS_AS(instantiate_pattern(spec, lts.alphabet()), std::invalid_argument);

  spec.Sq = ActionSet::of({"order"});
  spec.Sr = ActionSet::none();
  auto degenerate = instantiate_pattern(spec, lts.alphabet());
  REQUIRE_FALSE(degenerate.warnings.empty());
  CHECK(degenerate.warnings[0].find("degenerate") != std::string::npos);

  PatternSpec overlap;
  overlap.scope = Scope::Until;
  overlap.behaviour = Behaviour::Existence;
  overlap.Sb = ActionSet::of({"deliver"});
  overlap.Sr = ActionSet::of({"deliver"});
  auto overlapping = instantiate_pattern(overlap, lts.alphabet());
  REQUIRE_FALSE(overlapping.warnings.empty());
  CHECK(overlapping.warnings[0].find("overlap") != std::string::npos);
}

TEST_CASE("progress formula has the template shape") {
  Lts lts = coffee();
  PatternSpec spec;
  spec.scope = Scope::Global;
  spec.behaviour = Behaviour::Response;
  spec.Sq = ActionSet::of({"order"});
  spec.Sr = ActionSet::of({"deliver"});
  auto t = instantiate_pattern(spec, lts.alphabet()).templates[0];

  Formula f = build_progress_formula(t, ActionSet::none());
  CHECK(to_text(f) == "!<!{}* . order>(nu X. <{}>tt || [!{}]ff || <!{deliver}>X)");
  CHECK(is_closed(f));
  CHECK(check_syntactic_monotonicity(f).ok);

  // The empty alpha_e diamond is retained literally.
  CHECK(to_text(f).find("<{}>tt") != std::string::npos);
}

TEST_CASE("weak fairness preset matches the generic formula shape") {
  Lts lts = parse_aut("des (0,2,1)\n(0,\"w\",0)\n(0,\"e\",0)\n");
  PatternSpec spec;
  spec.scope = Scope::Global;
  spec.behaviour = Behaviour::Response;
  spec.Sq = ActionSet::of({"w"});
  spec.Sr = ActionSet::of({"e"});
  auto t = instantiate_pattern(spec, lts.alphabet()).templates[0];

  CriterionSpec criterion{CriterionKind::WeakFairness, ActionSet::none(), {}};
  Formula f = build_criterion_formula(lts.alphabet(), t, criterion);
  CHECK(to_text(f) ==
        "!<!{}* . w>(nu X. (<e>tt => <!{e}*>(<{}>tt || [e]ff && X || <{}>X)) && "
        "(<w>tt => <!{e}*>(<{}>tt || [w]ff && X || <w>X)))");
}

TEST_CASE("weak hyperfairness and justness presets differ only in on/off/eliminators") {
  Lts lts = coffee();
  ActionSet blocking = ActionSet::of({"order"});
  auto whfa = weak_hyperfairness_spec(lts.alphabet(), blocking);
  CHECK(to_text(whfa.phi_on.at("brew")) == "<!{order}* . brew>tt");
  CHECK(to_text(whfa.phi_of.at("brew")) == "[!{order}* . brew]ff");
  CHECK(whfa.alpha_el.at("brew") == ActionSet::of({"brew"}));
  CHECK(whfa.phi_on.count("order") == 0);

  ConcurrencyRelation rel = testing_support::coffee_relation(lts);
  auto ja = justness_spec(lts.alphabet(), blocking, rel);
  CHECK(to_text(ja.phi_of.at("card")) == "ff");
  CHECK(ja.alpha_el.at("card") == ActionSet::of({"card", "to_cash"}));
}

TEST_CASE("strong formulae enumerate non-empty subsets of the non-blocking actions") {
  // One state with n self-loops; alpha_f = {r} on a separate label.
  for (std::size_t n = 1; n <= 4; ++n) {
    std::ostringstream aut;
    aut << "des (0," << (n + 1) << ",1)\n";
    for (std::size_t i = 0; i < n; ++i)
      aut << "(0,\"" << std::string(1, char('a' + i)) << "\",0)\n";
    aut << "(0,\"r\",0)\n";
    Lts lts = parse_aut(aut.str());
    PatternSpec spec;
    spec.scope = Scope::Global;
    spec.behaviour = Behaviour::Existence;
    spec.Sr = ActionSet::of({"r"});
    auto t = instantiate_pattern(spec, lts.alphabet()).templates[0];
    ActionSet blocking = ActionSet::of({"r"});
    Formula f = build_strong_formula(t, blocking, strong_fairness_phi_of(lts.alphabet(), blocking));
    CHECK(strong_disjunct_count(f) == (std::size_t(1) << n) - 1);
    CHECK(is_closed(f));
    CHECK(check_syntactic_monotonicity(f).ok);
  }
}

TEST_CASE("strong fairness and strong hyperfairness inner conjuncts") {
  Lts lts = parse_aut("des (0,3,1)\n(0,\"x\",0)\n(0,\"y\",0)\n(0,\"r\",0)\n");
  PatternSpec spec;
  spec.scope = Scope::Global;
  spec.behaviour = Behaviour::Existence;
  spec.Sr = ActionSet::of({"r"});
  auto t = instantiate_pattern(spec, lts.alphabet()).templates[0];
  ActionSet blocking = ActionSet::of({"r"});

  Formula sfa = build_strong_formula(t, blocking, strong_fairness_phi_of(lts.alphabet(), blocking));
  CHECK(strong_disjunct_count(sfa) == 3);
  CHECK(to_text(sfa).find("[y]ff") != std::string::npos);
  CHECK(to_text(sfa).find("<!{r}>") != std::string::npos);
  CHECK(to_text(sfa).find("!<!{r}*>") == 0);

  Formula shfa =
      build_strong_formula(t, blocking, strong_hyperfairness_phi_of(lts.alphabet(), blocking));
  CHECK(to_text(shfa).find("[!{r}* . y]ff") != std::string::npos);

  CHECK_THROWS_AS(build_strong_formula(t, blocking,
                                       strong_fairness_phi_of(lts.alphabet(), blocking), 1),
                  SubsetCapExceeded);
}

TEST_CASE("every built formula is closed and monotonic, and evaluates") {
  RandomEngine rng(37);
  for (int i = 0; i < 15; ++i) {
    Lts lts = gen_random_lts(rng, {4, 3, 8});
    PatternSpec spec = gen_random_pattern(rng, lts.alphabet());
    auto result = instantiate_pattern(spec, lts.alphabet());
    ActionSet blocking = gen_random_subset(rng, lts.alphabet(), true);
    ConcurrencyRelation rel = gen_random_valid_concurrency(rng, lts);
    for (const auto& t : result.templates) {
      for (CriterionKind kind :
           {CriterionKind::Progress, CriterionKind::Justness, CriterionKind::WeakFairness,
            CriterionKind::WeakHyperfairness, CriterionKind::StrongFairness,
            CriterionKind::StrongHyperfairness}) {
        CriterionSpec criterion{kind, blocking, rel};
        Formula f = build_criterion_formula(lts.alphabet(), t, criterion);
        CHECK(is_closed(f));
        CHECK(check_syntactic_monotonicity(f).ok);
        CHECK_NOTHROW(evaluate(lts, f));
      }
    }
  }
}

TEST_CASE("formula size scaling") {
  Lts lts = coffee();
  PatternSpec spec;
  spec.scope = Scope::Global;
  spec.behaviour = Behaviour::Response;
  spec.Sq = ActionSet::of({"order"});
  spec.Sr = ActionSet::of({"deliver"});
  auto t = instantiate_pattern(spec, lts.alphabet()).templates[0];

  // Progress does not depend on the alphabet size at all; the generic
  // formula grows by a constant-size conjunct per unblocked action.
  std::size_t progress_size = ast_size(build_progress_formula(t, ActionSet::none()));
  CHECK(progress_size == ast_size(build_progress_formula(t, ActionSet::of({"brew"}))));

  auto generic_size = [&](const ActionSet& blocking) {
    return ast_size(build_finitely_realisable_formula(
        t, blocking, weak_fairness_spec(lts.alphabet(), blocking)));
  };
  std::size_t with_one = generic_size(ActionSet::of({"brew", "card", "cash", "deliver", "order",
                                                     "to_card"}));
  std::size_t with_two = generic_size(ActionSet::of({"brew", "card", "cash", "deliver", "order"}));
  std::size_t with_three = generic_size(ActionSet::of({"brew", "card", "cash", "deliver"}));
  CHECK(with_two - with_one == with_three - with_two);
}

TEST_CASE("blocking everything collapses the formulae under simplification") {
  Lts lts = coffee();
  PatternSpec spec;
  spec.scope = Scope::Global;
  spec.behaviour = Behaviour::Response;
  spec.Sq = ActionSet::of({"order"});
  spec.Sr = ActionSet::of({"deliver"});
  auto t = instantiate_pattern(spec, lts.alphabet()).templates[0];
  Formula expected = f_not(f_dia(t.rho, f_true()));

  // Complement-style full blocking set: no alphabet needed.
  Formula progress = build_progress_formula(t, ActionSet::all());
  CHECK(formula_equal(simplify(progress), expected));

  // Literal full blocking set: emptiness is relative to the alphabet.
  ActionSet literal_all = ActionSet::of(lts.alphabet());
  Formula progress_literal = build_progress_formula(t, literal_all);
  CHECK(formula_equal(simplify(progress_literal, &lts.alphabet()), expected));

  // The generic formula degenerates to an empty conjunction.
  Formula generic = build_finitely_realisable_formula(
      t, literal_all, weak_fairness_spec(lts.alphabet(), literal_all));
  CHECK(formula_equal(simplify(generic, &lts.alphabet()), expected));
}

TEST_CASE("verdicts are ordered by criterion strength") {
  RandomEngine rng(41);
  for (int i = 0; i < 12; ++i) {
    Lts lts = gen_random_lts(rng, {5, 3, 9});
    PatternSpec spec = gen_random_pattern(rng, lts.alphabet());
    auto result = instantiate_pattern(spec, lts.alphabet());
    ActionSet blocking =
        (i % 2 == 0) ? ActionSet::none() : gen_random_subset(rng, lts.alphabet(), true);
    for (const auto& t : result.templates) {
      auto eval_kind = [&](CriterionKind kind) {
        CriterionSpec criterion{kind, blocking, {}};
        return evaluate(lts, build_criterion_formula(lts.alphabet(), t, criterion));
      };
      StateSet progress = eval_kind(CriterionKind::Progress);
      StateSet wfa = eval_kind(CriterionKind::WeakFairness);
      StateSet whfa = eval_kind(CriterionKind::WeakHyperfairness);
      StateSet sfa = eval_kind(CriterionKind::StrongFairness);
      StateSet shfa = eval_kind(CriterionKind::StrongHyperfairness);
      CHECK(state_subset(progress, wfa));
      CHECK(state_subset(wfa, whfa));
      CHECK(state_subset(progress, sfa));
      CHECK(state_subset(sfa, shfa));
      CHECK(state_subset(wfa, sfa));
      CHECK(state_subset(whfa, shfa));
    }
  }
}

TEST_CASE("identical specifications build byte-identical formulae") {
  Lts lts = coffee();
  PatternSpec spec;
  spec.scope = Scope::AfterUntil;
  spec.behaviour = Behaviour::Response;
  spec.Sa = ActionSet::of({"order"});
  spec.Sb = ActionSet::of({"deliver"});
  spec.Sq = ActionSet::of({"to_cash"});
  spec.Sr = ActionSet::of({"cash"});
  auto t1 = instantiate_pattern(spec, lts.alphabet()).templates[0];
  auto t2 = instantiate_pattern(spec, lts.alphabet()).templates[0];
  for (CriterionKind kind : {CriterionKind::Progress, CriterionKind::WeakFairness,
                             CriterionKind::StrongFairness}) {
    CriterionSpec criterion{kind, ActionSet::of({"order"}), {}};
    CHECK(to_text(build_criterion_formula(lts.alphabet(), t1, criterion)) ==
          to_text(build_criterion_formula(lts.alphabet(), t2, criterion)));
  }
}

TEST_CASE("property files parse patterns, criteria and raw formulae") {
  PropertySpec p = parse_property_file(
      "# comment\nscope = after-until\nbehaviour = existence-at-least\nk = 2\n"
      "Sa = \"order\"\nSb = \"deliver\"\nSr = \"cash\", \"card\"\n"
      "criterion = wfa\nblocking = \"order\"\n");
  REQUIRE(p.pattern.has_value());
  CHECK(p.pattern->scope == Scope::AfterUntil);
  CHECK(p.pattern->behaviour == Behaviour::ExistenceAtLeast);
  CHECK(p.pattern->k == 2);
  CHECK(p.pattern->Sr == ActionSet::of({"card", "cash"}));
  CHECK(p.criterion == CriterionKind::WeakFairness);
  CHECK(p.blocking == ActionSet::of({"order"}));

  PropertySpec chain = parse_property_file(
      "scope = global\nbehaviour = chain-response\n"
      "chain_q = \"a\" ; \"b\", \"c\"\nchain_r = \"d\"\ncriterion = progress\n");
  REQUIRE(chain.pattern.has_value());
  REQUIRE(chain.pattern->chain_q.size() == 2);
  CHECK(chain.pattern->chain_q[1] == ActionSet::of({"b", "c"}));

  PropertySpec raw = parse_property_file("formula = [!{}*]<!{}* . deliver>tt\n");
  REQUIRE(raw.raw_formula.has_value());
  CHECK_NOTHROW(parse_formula(*raw.raw_formula));

  CHECK_THROWS_AS(parse_property_file("scope = global\n"), ParseError);
  CHECK_THROWS_AS(parse_property_file("formula = tt\nscope = global\n"), ParseError);
  CHECK_THROWS_AS(parse_property_file("what = 3\n"), ParseError);
}
