#include <doctest.h>

#include "llmdp/agent.hpp"
#include "llmdp/harness.hpp"
#include "llmdp/prompts.hpp"

using namespace llmdp;

namespace {

PlanOutcome outcome(int index, PlanStatus status, size_t length) {
  PlanOutcome o;
  o.sample_index = index;
  o.result.status = status;
  if (status == PlanStatus::Found) {
    o.result.plan.steps.resize(length);
    for (auto& s : o.result.plan.steps) s.schema = "noop";
  }
  return o;
}

// Scripted backend covering one scenario's goal plus sampler prompts.
void fixtures_for(ScriptedBackend& backend, const ScenarioSpec& spec) {
  backend.add_exact("Your task is to: " + spec.task.nl_instruction,
                    print_goal(spec.task.goal()));
  backend.add_prefix("Known world state:", "unknown");
}

}  // namespace

TEST_CASE("select_action picks the shortest plan, ties to the lowest sample index") {
  Selection sel = select_action(
      {outcome(0, PlanStatus::Found, 6), outcome(1, PlanStatus::Found, 4),
       outcome(2, PlanStatus::Found, 9)},
      false);
  CHECK(sel.kind == Selection::Kind::Plan);
  CHECK(sel.sample_index == 1);
  CHECK(sel.plan.length() == 4);

  Selection tie = select_action(
      {outcome(0, PlanStatus::Found, 4), outcome(1, PlanStatus::Found, 4)}, false);
  CHECK(tie.sample_index == 0);
}

TEST_CASE("select_action signals resampling when no plan is usable") {
  SUBCASE("all unsolvable") {
    Selection sel = select_action({outcome(0, PlanStatus::Unsolvable, 0),
                                   outcome(1, PlanStatus::Unsolvable, 0),
                                   outcome(2, PlanStatus::Unsolvable, 0)},
                                  false);
    CHECK(sel.kind == Selection::Kind::NeedsResample);
  }
  SUBCASE("budget exhaustion is not a plan") {
    Selection sel = select_action({outcome(0, PlanStatus::BudgetExhausted, 0)}, false);
    CHECK(sel.kind == Selection::Kind::NeedsResample);
  }
  SUBCASE("empty plans never win; they mean the sample was already satisfied") {
    Selection sel = select_action(
        {outcome(0, PlanStatus::Found, 0), outcome(1, PlanStatus::Found, 3)}, false);
    CHECK(sel.kind == Selection::Kind::Plan);
    CHECK(sel.sample_index == 1);
    Selection none = select_action({outcome(0, PlanStatus::Found, 0)}, false);
    CHECK(none.kind == Selection::Kind::NeedsResample);
  }
  SUBCASE("screen verdict wins") {
    Selection sel = select_action({outcome(0, PlanStatus::Found, 0)}, true);
    CHECK(sel.kind == Selection::Kind::AllSatisfied);
  }
}

TEST_CASE("oracle agent solves a scenario with no wasted actions") {
  ScenarioSpec spec = generate_scenario(TaskFamily::Put, 42);
  ScriptedBackend backend;
  fixtures_for(backend, spec);

  Simulator env(spec, /*oracle_enabled=*/true);
  AgentConfig cfg;
  cfg.sampler.strategy = SamplerStrategy::Oracle;
  cfg.sampler.seed = 42;
  cfg.planner = AgentConfig::PlannerStrategy::Optimal;
  EpisodeTrace trace = run_episode(env, cfg, backend);
  REQUIRE_MESSAGE(trace.success, trace.failure_reason);
  CHECK(trace.steps == static_cast<int>(env.steps_taken()));
  // trace bookkeeping: contiguous steps, every action from the chosen plan
  for (size_t i = 0; i < trace.step_records.size(); ++i) {
    CHECK(trace.step_records[i].index == static_cast<int>(i + 1));
  }
  for (const auto& rec : trace.step_records) {
    bool from_plan = false;
    for (const auto& round : trace.rounds) {
      for (const auto& action : round.chosen_plan) {
        if (action == rec.action) from_plan = true;
      }
      if (round.resolution == "explore") from_plan = true;
    }
    CHECK(from_plan);
  }
}

TEST_CASE("max_steps cuts the episode off as a failure") {
  ScenarioSpec spec = generate_scenario(TaskFamily::Put, 9);
  ScriptedBackend backend;
  fixtures_for(backend, spec);
  Simulator env(spec, true);
  AgentConfig cfg;
  cfg.sampler.strategy = SamplerStrategy::Oracle;
  cfg.max_steps = 1;
  EpisodeTrace trace = run_episode(env, cfg, backend);
  CHECK(!trace.success);
  CHECK(trace.steps == 1);
  CHECK(trace.failure_reason == "max_steps");
}

TEST_CASE("translation failure fails the episode before any action") {
  ScenarioSpec spec = generate_scenario(TaskFamily::Put, 13);
  ScriptedBackend backend;
  backend.add_prefix("", "I only chat, no goals from me.");
  Simulator env(spec);
  AgentConfig cfg;
  EpisodeTrace trace = run_episode(env, cfg, backend);
  CHECK(!trace.success);
  CHECK(trace.steps == 0);
  CHECK(trace.failure_reason.find("translation_failed") == 0);
}

TEST_CASE("token totals equal the sum over logged backend calls") {
  ScenarioSpec spec = generate_scenario(TaskFamily::Clean, 21);
  ScriptedBackend backend;
  fixtures_for(backend, spec);
  Simulator env(spec);
  AgentConfig cfg;
  cfg.sampler.strategy = SamplerStrategy::Llm;
  cfg.sampler.seed = 21;
  EpisodeTrace trace = run_episode(env, cfg, backend);
  long prompt = 0, completion = 0;
  for (const auto& call : trace.backend_calls) {
    prompt += call.response.prompt_tokens;
    completion += call.response.completion_tokens;
  }
  CHECK(trace.prompt_tokens() == prompt);
  CHECK(trace.completion_tokens() == completion);
  CHECK(trace.prompt_tokens("goal") + trace.prompt_tokens("sampler") == prompt);
  CHECK(trace.backend_calls.size() >= 1);
}

TEST_CASE("random agent with fallback finishes a small scenario") {
  ScenarioSpec spec = generate_scenario(TaskFamily::Put, 77);
  ScriptedBackend backend;
  fixtures_for(backend, spec);
  Simulator env(spec);
  AgentConfig cfg;
  cfg.sampler.strategy = SamplerStrategy::Random;
  cfg.sampler.seed = 77;
  EpisodeTrace trace = run_episode(env, cfg, backend);
  REQUIRE_MESSAGE(trace.success, trace.failure_reason);
  CHECK(trace.steps >= 4);
  // jsonl trace shape: one line per step plus the summary
  std::string jsonl = trace.to_jsonl();
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') ==
        static_cast<long>(trace.step_records.size()) + 1);
}

TEST_CASE("strict mode replans after every executed action") {
  ScenarioSpec spec = generate_scenario(TaskFamily::Put, 31);
  ScriptedBackend backend;
  fixtures_for(backend, spec);
  Simulator env(spec, true);
  AgentConfig cfg;
  cfg.sampler.strategy = SamplerStrategy::Oracle;
  cfg.resample_every_step = true;
  EpisodeTrace trace = run_episode(env, cfg, backend);
  REQUIRE_MESSAGE(trace.success, trace.failure_reason);
  // one planning round per executed action
  CHECK(trace.rounds.size() == trace.step_records.size());
}

TEST_CASE("fallback is attempted exactly once per round, then exploration") {
  // A goal the samples always satisfy: the hypothetical's location IS the
  // goal, so every sample is screened out and the fallback also fails,
  // forcing an exploratory goto each round until max_steps.
  ScenarioSpec spec;
  spec.seed = 5;
  spec.receptacles.push_back({"shelf-1", "shelf", false, SpecialRole::None});
  spec.receptacles.push_back({"shelf-2", "shelf", false, SpecialRole::None});
  spec.objects.push_back({"vase-1", "vase", "shelf-1"});
  spec.task.family = TaskFamily::Put;
  spec.task.target_type = "statue";  // never present: stays hypothetical
  spec.task.target_receptacle_type = "shelf";
  spec.task.nl_instruction = "put some statue on shelf.";

  ScriptedBackend backend;
  fixtures_for(backend, spec);
  Simulator env(spec);
  AgentConfig cfg;
  cfg.max_steps = 6;
  cfg.sampler.seed = 5;

  SUBCASE("with fallback: exploration keeps the episode alive to the step budget") {
    cfg.sampler.fallback_to_random = true;
    EpisodeTrace trace = run_episode(env, cfg, backend);
    CHECK(!trace.success);
    CHECK(trace.failure_reason == "max_steps");
    CHECK(trace.steps == 6);
    for (const auto& round : trace.rounds) {
      CHECK(round.fallback_used);
      CHECK(round.resolution == "explore");
    }
  }
  SUBCASE("without fallback: the first dead round fails the episode") {
    cfg.sampler.fallback_to_random = false;
    EpisodeTrace trace = run_episode(env, cfg, backend);
    CHECK(!trace.success);
    CHECK(trace.steps == 0);
    CHECK(trace.failure_reason == "all_samples_satisfied");
    REQUIRE(trace.rounds.size() == 1);
    CHECK(!trace.rounds[0].fallback_used);
  }
}
