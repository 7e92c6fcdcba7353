#include <doctest.h>

#include <cmath>

#include "llmdp/prompts.hpp"
#include "llmdp/sampling.hpp"

using namespace llmdp;

namespace {

std::vector<ReceptacleInfo> plain_room(int n) {
  std::vector<ReceptacleInfo> out;
  for (int i = 1; i <= n; ++i) {
    ReceptacleInfo r;
    r.name = "shelf-" + std::to_string(i);
    r.type = "shelf";
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("empty belief set yields N empty assignments") {
  auto [w, b] = init_from_scene({}, plain_room(3));
  SamplerConfig cfg;
  cfg.n_samples = 3;
  std::vector<Assignment> samples = sample(w, b, cfg, {});
  REQUIRE(samples.size() == 3);
  for (const auto& a : samples) CHECK(a.empty());
}

TEST_CASE("random sampling is deterministic under a fixed seed") {
  auto [w, b] = init_from_scene({{"mug", 1}}, plain_room(3));
  SamplerConfig cfg;
  cfg.seed = 42;
  cfg.n_samples = 3;
  SampleContext ctx;
  ctx.round = 1;
  std::vector<Assignment> first = sample(w, b, cfg, ctx);
  std::vector<Assignment> second = sample(w, b, cfg, ctx);
  CHECK(first == second);
  // every choice comes from the candidate set
  for (const auto& a : first) {
    for (const auto& [obj, atom] : a) {
      const auto& cands = b.slots.at(obj).candidates;
      CHECK(std::find(cands.begin(), cands.end(), atom) != cands.end());
    }
  }
  // a different round draws a different stream
  SampleContext ctx2;
  ctx2.round = 2;
  bool any_diff = false;
  for (int rep = 0; rep < 4 && !any_diff; ++rep) {
    ctx2.round = 2 + rep;
    if (sample(w, b, cfg, ctx2) != first) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("random sampler marginals are near-uniform over a 4-candidate slot") {
  auto [w, b] = init_from_scene({{"mug", 1}}, plain_room(4));
  SamplerConfig cfg;
  cfg.seed = 7;
  cfg.n_samples = 1;
  std::map<Atom, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    SampleContext ctx;
    ctx.round = static_cast<uint64_t>(i);
    counts[sample(w, b, cfg, ctx)[0].begin()->second] += 1;
  }
  REQUIRE(counts.size() == 4);
  for (const auto& [atom, n] : counts) {
    double freq = double(n) / draws;
    CHECK(std::abs(freq - 0.25) <= 0.03);
  }
}

TEST_CASE("llm sampler parses the reply by option-name containment") {
  auto [w, b] = init_from_scene({{"tomato", 1}}, plain_room(3));
  SamplerConfig cfg;
  cfg.strategy = SamplerStrategy::Llm;
  cfg.n_samples = 1;
  ScriptedBackend backend;
  SampleContext ctx;
  ctx.backend = &backend;

  SUBCASE("scripted reply names an option") {
    backend.add_prefix("Known world state:", "I believe it is on shelf-2.");
    std::vector<Assignment> samples = sample(w, b, cfg, ctx);
    CHECK(samples[0].at("tomato-h1") == Atom{"inReceptacle", {"tomato-h1", "shelf-2"}});
  }
  SUBCASE("garbage replies fall back to a uniform random candidate") {
    backend.add_prefix("Known world state:", "no idea, sorry!");
    std::vector<Assignment> samples = sample(w, b, cfg, ctx);
    const auto& cands = b.slots.at("tomato-h1").candidates;
    CHECK(std::find(cands.begin(), cands.end(), samples[0].at("tomato-h1")) != cands.end());
  }
  SUBCASE("earliest mention wins") {
    backend.add_prefix("Known world state:", "maybe shelf-3, though shelf-1 is possible");
    std::vector<Assignment> samples = sample(w, b, cfg, ctx);
    CHECK(samples[0].at("tomato-h1") == Atom{"inReceptacle", {"tomato-h1", "shelf-3"}});
  }
  SUBCASE("prompt lists known facts, the slot, and the options") {
    std::string prompt = sampler_prompt(w, b.slots.at("tomato-h1"));
    CHECK(prompt.find("Known world state:") == 0);
    CHECK(prompt.find("(isReceptacle shelf-1)") != std::string::npos);
    CHECK(prompt.find("(inReceptacle tomato-h1 ?x)") != std::string::npos);
    CHECK(prompt.find("shelf-1, shelf-2, shelf-3") != std::string::npos);
  }
  SUBCASE("no backend raises BackendUnavailable") {
    SampleContext bare;
    CHECK_THROWS_AS(sample(w, b, cfg, bare), Error);
  }
}

TEST_CASE("oracle sampler reads the hidden truth") {
  auto [w, b] = init_from_scene({{"mug", 1}}, plain_room(3));
  OracleInfo oracle;
  oracle.object_types = {{"mug-1", "mug"}};
  oracle.atoms = {{"inReceptacle", {"mug-1", "shelf-2"}},
                  {"isReceptacle", {"shelf-1"}},
                  {"isReceptacle", {"shelf-2"}},
                  {"isReceptacle", {"shelf-3"}}};
  SamplerConfig cfg;
  cfg.strategy = SamplerStrategy::Oracle;
  cfg.n_samples = 3;
  SampleContext ctx;
  ctx.oracle = &oracle;
  std::vector<Assignment> samples = sample(w, b, cfg, ctx);
  for (const auto& a : samples) {
    CHECK(a.at("mug-h1") == Atom{"inReceptacle", {"mug-h1", "shelf-2"}});
  }
  SUBCASE("missing oracle info raises") {
    CHECK_THROWS_AS(sample(w, b, cfg, {}), Error);
  }
}

TEST_CASE("oracle sampler prefers objects that need no extra open action") {
  std::vector<ReceptacleInfo> receptacles = plain_room(2);
  ReceptacleInfo drawer;
  drawer.name = "drawer-1";
  drawer.type = "drawer";
  drawer.openable = true;
  receptacles.push_back(drawer);
  auto [w, b] = init_from_scene({{"mug", 1}}, receptacles);
  OracleInfo oracle;
  oracle.object_types = {{"mug-1", "mug"}, {"mug-2", "mug"}};
  oracle.atoms = {{"inReceptacle", {"mug-1", "drawer-1"}},
                  {"inReceptacle", {"mug-2", "shelf-2"}},
                  {"openable", {"drawer-1"}}};
  SamplerConfig cfg;
  cfg.strategy = SamplerStrategy::Oracle;
  cfg.n_samples = 1;
  SampleContext ctx;
  ctx.oracle = &oracle;
  std::vector<Assignment> samples = sample(w, b, cfg, ctx);
  // mug-2 on the open shelf is one action cheaper to fetch than mug-1
  CHECK(samples[0].at("mug-h1") == Atom{"inReceptacle", {"mug-h1", "shelf-2"}});
}

TEST_CASE("dedupe_and_screen") {
  auto [w, b] = init_from_scene({{"plate", 1}}, plain_room(3));
  GoalFormula goal = parse_goal(
      "(:goal (exists (?t - plate ?r - shelf) (inReceptacle ?t ?r)))", alfred_domain());
  Atom on_1{"inReceptacle", {"plate-h1", "shelf-1"}};
  Atom on_2{"inReceptacle", {"plate-h1", "shelf-2"}};
  GroundProblem gp = ground_problem(alfred_domain(), export_problem(w, b, {on_1}, goal));

  SUBCASE("identical assignments merge to one usable entry") {
    Assignment a{{"plate-h1", on_1}};
    ScreenResult r = dedupe_and_screen({a, a, a}, w, gp);
    CHECK(r.usable.size() == 1);
  }
  SUBCASE("the goal shelf placement flags all_satisfied only when every sample has it") {
    Assignment sat{{"plate-h1", on_1}};
    Assignment sat2{{"plate-h1", on_2}};
    ScreenResult all_sat = dedupe_and_screen({sat, sat2}, w, gp);
    CHECK(all_sat.all_satisfied);  // any shelf satisfies this goal
  }
  SUBCASE("unsatisfied samples clear the flag") {
    auto [w2, b2] = init_from_scene({{"plate", 1}}, plain_room(2));
    GoalFormula clean_goal = parse_goal(
        "(:goal (exists (?t - plate ?r - shelf) (and (inReceptacle ?t ?r) (isClean ?t))))",
        alfred_domain());
    Atom choice{"inReceptacle", {"plate-h1", "shelf-1"}};
    GroundProblem gp2 =
        ground_problem(alfred_domain(), export_problem(w2, b2, {choice}, clean_goal));
    ScreenResult r = dedupe_and_screen({Assignment{{"plate-h1", choice}}}, w2, gp2);
    CHECK(!r.all_satisfied);
  }
}
