#pragma once

// Closed-loop episode driver: translate the task into a goal, instantiate
// beliefs, then repeatedly sample N worlds, plan each concurrently, execute
// the shortest plan, and replan when an observation adds knowledge. One
// round may fall back to random resampling once; after that the agent takes
// an exploratory goto before trying again.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmdp/backend.hpp"
#include "llmdp/belief.hpp"
#include "llmdp/goal_translation.hpp"
#include "llmdp/planner.hpp"
#include "llmdp/sampling.hpp"
#include "llmdp/simulator.hpp"

namespace llmdp {

struct AgentConfig {
  SamplerConfig sampler;
  enum class PlannerStrategy { Bffs, Optimal } planner = PlannerStrategy::Bffs;
  int max_steps = 50;
  bool replan_on_new_info = true;    // default loop: keep executing until news
  bool resample_every_step = false;  // strict mode: one action per round
  SearchBudget budget;
};

struct PlanOutcome {
  int sample_index = -1;
  PlanResult result;
};

struct Selection {
  enum class Kind { Plan, NeedsResample, AllSatisfied } kind = Kind::NeedsResample;
  int sample_index = -1;
  Plan plan;
};

// Shortest non-empty valid plan wins, ties broken by sample index. Empty
// plans mean the sample already satisfied the goal while the environment
// says otherwise, so they never get selected; when the screen reported every
// sample satisfied this returns AllSatisfied (handled like NeedsResample).
Selection select_action(const std::vector<PlanOutcome>& outcomes, bool all_satisfied);

struct PlanOutcomeRecord {
  int sample_index = -1;
  std::string status;
  size_t plan_length = 0;
  size_t expanded = 0;
};

struct RoundRecord {
  int round = 0;
  bool fallback_used = false;
  bool all_satisfied = false;
  std::vector<PlanOutcomeRecord> outcomes;
  std::string resolution;  // plan | explore | fail
  int chosen_sample = -1;
  std::vector<std::string> chosen_plan;
};

struct StepRecord {
  int index = 0;
  int round = 0;
  std::string action;
  std::string feedback;
  bool valid = false;
  bool new_info = false;
  bool done = false;
  std::string observation_text;
  nlohmann::json snapshot;  // world + beliefs after the observation merge
};

struct EpisodeTrace {
  std::string task;
  TaskFamily family = TaskFamily::Put;
  uint64_t scenario_seed = 0;
  bool success = false;
  std::string failure_reason;
  int steps = 0;

  std::vector<RoundRecord> rounds;
  std::vector<StepRecord> step_records;
  std::vector<BackendCallRecord> backend_calls;

  long prompt_tokens(std::string_view tag = {}) const;
  long completion_tokens(std::string_view tag = {}) const;
  long total_tokens() const { return prompt_tokens() + completion_tokens(); }

  nlohmann::json summary_json() const;
  std::string to_jsonl() const;  // one record per step plus a summary record
};

EpisodeTrace run_episode(Simulator& env, const AgentConfig& cfg, ChatBackend& backend);

}  // namespace llmdp
