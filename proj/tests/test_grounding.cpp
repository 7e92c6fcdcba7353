#include <doctest.h>

#include "llmdp/grounding.hpp"
#include "llmdp/prompts.hpp"
#include "llmdp/rng.hpp"
#include "support/generators.hpp"
#include "support/naive.hpp"

using namespace llmdp;

namespace {

ProblemDef kitchen_problem(const std::string& goal_text) {
  const DomainDef& alfred = alfred_domain();
  std::string text = R"(
(define (problem kitchen)
(:domain alfred)
(:objects
  start-loc - startloc
  countertop-1 - countertop
  microwave-1 - microwave
  plate-1 - plate
  plate-2 - plate)
(:init
  (atReceptacleLocation start-loc)
  (handEmpty)
  (isReceptacle countertop-1)
  (isReceptacle microwave-1)
  (openable microwave-1)
  (inReceptacle plate-1 countertop-1)
  (inReceptacle plate-2 countertop-1))
)" + goal_text + "\n)";
  return parse_problem(text, alfred);
}

const std::string kCleanPlateGoal =
    "(:goal (exists (?t - plate ?r - microwave) (and (inReceptacle ?t ?r) (isClean ?t))))";

}  // namespace

TEST_CASE("goal binding enumeration") {
  const DomainDef& alfred = alfred_domain();
  SUBCASE("one plate, one microwave: single disjunct") {
    ProblemDef p = kitchen_problem(kCleanPlateGoal);
    p.objects.erase(std::remove_if(p.objects.begin(), p.objects.end(),
                                   [](const ObjectDecl& o) { return o.name == "plate-2"; }),
                    p.objects.end());
    p.init.erase({"inReceptacle", {"plate-2", "countertop-1"}});
    GroundProblem gp = ground_problem(alfred, p);
    REQUIRE(gp.goal.disjuncts.size() == 1);
    std::set<Atom> disjunct = gp.externalize(gp.goal.disjuncts[0]);
    CHECK(disjunct.count({"inReceptacle", {"plate-1", "microwave-1"}}) == 1);
    CHECK(disjunct.count({"isClean", {"plate-1"}}) == 1);
  }
  SUBCASE("two plates: two disjuncts") {
    GroundProblem gp = ground_problem(alfred, kitchen_problem(kCleanPlateGoal));
    CHECK(gp.goal.disjuncts.size() == 2);
  }
  SUBCASE("puttwo over two cds: exactly the two ordered bindings") {
    ProblemDef p = parse_problem(R"(
(define (problem two)
(:domain alfred)
(:objects cd-1 - cd cd-2 - cd safe-1 - safe)
(:init (isReceptacle safe-1) (openable safe-1))
(:goal (exists (?t1 - cd ?t2 - cd ?r - safe)
  (and (inReceptacle ?t1 ?r) (inReceptacle ?t2 ?r) (not (= ?t1 ?t2))))))
)",
                                 alfred);
    GroundProblem gp = ground_problem(alfred, p);
    CHECK(gp.goal.disjuncts.size() == 2);
    // brute-force oracle agrees
    std::vector<naive::AtomSet> expected = naive::naive_goal_disjuncts(p.goal, p);
    CHECK(expected.size() == 2);
  }
  SUBCASE("no objects of a bound type: ungroundable") {
    ProblemDef p = kitchen_problem(
        "(:goal (exists (?t - spoon ?r - microwave) (inReceptacle ?t ?r)))");
    try {
      ground_problem(alfred, p);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::GoalUngroundable);
    }
  }
}

TEST_CASE("disjunct count equals brute-force binding enumeration on small instances") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    testgen::Instance inst = testgen::random_instance(seed, false);
    if (inst.problem.objects.size() > 6) continue;
    std::vector<naive::AtomSet> expected =
        naive::naive_goal_disjuncts(inst.problem.goal, inst.problem);
    if (expected.empty()) {
      CHECK_THROWS_AS(ground_problem(inst.domain, inst.problem), Error);
      continue;
    }
    GroundProblem gp = ground_problem(inst.domain, inst.problem);
    CHECK(gp.goal.disjuncts.size() == expected.size());
  }
}

TEST_CASE("apply and applicable") {
  const DomainDef& alfred = alfred_domain();
  GroundProblem gp = ground_problem(alfred, kitchen_problem(kCleanPlateGoal));

  auto find_action = [&](const std::string& display) -> const GroundAction& {
    for (const auto& a : gp.actions) {
      if (a.to_string() == display) return a;
    }
    REQUIRE_MESSAGE(false, "missing action ", display);
    static GroundAction dummy;
    return dummy;
  };

  SUBCASE("goto moves the agent location atom") {
    const GroundAction& go = find_action("(gotoReceptacle start-loc countertop-1)");
    REQUIRE(applicable(gp.initial_state, go));
    State next = apply_action(gp.initial_state, go);
    CHECK(state_contains(next, *gp.find_atom({"atReceptacleLocation", {"countertop-1"}})));
    CHECK(!state_contains(next, *gp.find_atom({"atReceptacleLocation", {"start-loc"}})));
  }
  SUBCASE("apply on a non-applicable action throws") {
    const GroundAction& pickup = find_action("(pickupFromSurface plate-1 countertop-1)");
    CHECK(!applicable(gp.initial_state, pickup));
    try {
      apply_action(gp.initial_state, pickup);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InapplicableAction);
    }
  }
  SUBCASE("empty add and del is the identity") {
    GroundAction noop;
    CHECK(applicable(gp.initial_state, noop));
    CHECK(apply_action(gp.initial_state, noop) == gp.initial_state);
  }
  SUBCASE("negative preconditions gate openReceptacle") {
    const GroundAction& go = find_action("(gotoReceptacle start-loc microwave-1)");
    const GroundAction& open = find_action("(openReceptacle microwave-1)");
    State at_micro = apply_action(gp.initial_state, go);
    REQUIRE(applicable(at_micro, open));
    State opened = apply_action(at_micro, open);
    CHECK(!applicable(opened, open));  // already open
  }
}

TEST_CASE("grounded transitions match the naive text-atom simulator") {
  size_t checked = 0;
  for (uint64_t seed = 0; seed < 60; ++seed) {
    testgen::Instance inst = testgen::random_instance(seed, true);
    GroundProblem gp;
    try {
      gp = ground_problem(inst.domain, inst.problem);
    } catch (const Error&) {
      continue;
    }
    std::vector<naive::NaiveAction> naive_actions =
        naive::naive_ground_actions(inst.domain, inst.problem);

    State state = gp.initial_state;
    naive::AtomSet naive_state = inst.problem.init;
    SplitMix rng(seed * 31 + 7);
    for (int step = 0; step < 12; ++step) {
      std::vector<const GroundAction*> fast_app;
      for (const auto& a : gp.actions) {
        if (applicable(state, a)) fast_app.push_back(&a);
      }
      std::vector<const naive::NaiveAction*> naive_app;
      for (const auto& a : naive_actions) {
        if (naive::naive_applicable(naive_state, a)) naive_app.push_back(&a);
      }
      // static pruning only removes never-applicable actions
      REQUIRE(fast_app.size() == naive_app.size());
      if (fast_app.empty()) break;
      size_t pick = rng.below(fast_app.size());
      std::string want = fast_app[pick]->to_string();
      const naive::NaiveAction* counterpart = nullptr;
      for (const auto* na : naive_app) {
        if (na->display == want.substr(1, want.size() - 2)) counterpart = na;
      }
      REQUIRE(counterpart != nullptr);
      state = apply_action(state, *fast_app[pick]);
      naive_state = naive::naive_apply(naive_state, *counterpart);
      CHECK(gp.externalize(state) == naive_state);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("goal_satisfied") {
  const DomainDef& alfred = alfred_domain();
  SUBCASE("empty conjunction is always satisfied") {
    ProblemDef p = kitchen_problem("(:goal (and))");
    GroundProblem gp = ground_problem(alfred, p);
    CHECK(goal_satisfied(gp.initial_state, gp.goal));
    CHECK(goal_satisfied(State{}, gp.goal));
  }
  SUBCASE("plate in microwave but not clean: unsatisfied") {
    ProblemDef p = kitchen_problem(kCleanPlateGoal);
    p.init.erase({"inReceptacle", {"plate-1", "countertop-1"}});
    p.init.insert({"inReceptacle", {"plate-1", "microwave-1"}});
    GroundProblem gp = ground_problem(alfred, p);
    CHECK(!goal_satisfied(gp.initial_state, gp.goal));
    State with_clean = gp.initial_state;
    with_clean.push_back(gp.intern({"isClean", {"plate-1"}}));
    with_clean = sorted_unique(std::move(with_clean));
    CHECK(goal_satisfied(with_clean, gp.goal));
  }
  SUBCASE("randomized states agree with the naive subset oracle") {
    for (uint64_t seed = 100; seed < 140; ++seed) {
      testgen::Instance inst = testgen::random_instance(seed, false);
      std::vector<naive::AtomSet> disjuncts =
          naive::naive_goal_disjuncts(inst.problem.goal, inst.problem);
      if (disjuncts.empty()) continue;
      GroundProblem gp = ground_problem(inst.domain, inst.problem);
      SplitMix rng(seed);
      for (int trial = 0; trial < 20; ++trial) {
        naive::AtomSet random_state;
        for (const auto& atom : inst.problem.init) {
          if (rng.below(2) == 0) random_state.insert(atom);
        }
        for (const auto& d : disjuncts) {
          for (const auto& atom : d) {
            if (rng.below(3) == 0) random_state.insert(atom);
          }
        }
        bool fast = goal_satisfied(gp.intern_state(random_state, /*strict=*/false), gp.goal);
        bool naive_result = naive::naive_goal_satisfied(random_state, disjuncts);
        CHECK(fast == naive_result);
      }
    }
  }
}

TEST_CASE("grounding invariants") {
  const DomainDef& alfred = alfred_domain();
  GroundProblem gp = ground_problem(alfred, kitchen_problem(kCleanPlateGoal));

  SUBCASE("add and del are disjoint, preconditions sorted and unique") {
    for (const auto& a : gp.actions) {
      State overlap;
      std::set_intersection(a.add.begin(), a.add.end(), a.del.begin(), a.del.end(),
                            std::back_inserter(overlap));
      CHECK(overlap.empty());
      CHECK(std::is_sorted(a.pre_pos.begin(), a.pre_pos.end()));
      CHECK(std::is_sorted(a.add.begin(), a.add.end()));
    }
  }
  SUBCASE("deterministic: same problem grounds to the same ordered action list") {
    GroundProblem gp2 = ground_problem(alfred, kitchen_problem(kCleanPlateGoal));
    REQUIRE(gp.actions.size() == gp2.actions.size());
    for (size_t i = 0; i < gp.actions.size(); ++i) {
      CHECK(gp.actions[i].to_string() == gp2.actions[i].to_string());
    }
    CHECK(std::is_sorted(gp.actions.begin(), gp.actions.end(),
                         [](const GroundAction& a, const GroundAction& b) {
                           return std::tie(a.schema, a.args) < std::tie(b.schema, b.args);
                         }));
  }
  SUBCASE("inequality-violating bindings are never emitted") {
    for (const auto& a : gp.actions) {
      if (a.schema == "gotoReceptacle") CHECK(a.args[0] != a.args[1]);
    }
  }
  SUBCASE("apply never produces an out-of-vocabulary atom") {
    State s = gp.initial_state;
    SplitMix rng(3);
    for (int step = 0; step < 30; ++step) {
      std::vector<const GroundAction*> app;
      for (const auto& a : gp.actions) {
        if (applicable(s, a)) app.push_back(&a);
      }
      if (app.empty()) break;
      s = apply_action(s, *app[rng.below(app.size())]);
      for (AtomId id : s) CHECK(id < gp.atom_count());
    }
  }
  SUBCASE("strict intern_state rejects foreign atoms") {
    std::set<Atom> atoms = {{"isShinyThing", {"x"}}};
    CHECK_THROWS_AS(gp.intern_state(atoms), Error);
    CHECK(gp.intern_state(atoms, /*strict=*/false).empty());
  }
}
