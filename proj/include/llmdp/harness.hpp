#pragma once

// Batch episode runner and report emission: per-family and overall success
// rate, episode lengths, token totals, as plain text, JSON, and CSV with
// identical numbers. Episode seeds derive only from (base seed, family,
// index) so ablation rows are paired.

#include <atomic>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmdp/agent.hpp"

namespace llmdp {

enum class BackendKind { Scripted, Http };

struct SuiteConfig {
  std::vector<TaskFamily> families{kAllFamilies, kAllFamilies + 6};
  int episodes_per_family = 10;
  AgentConfig agent;
  uint64_t base_seed = 7;
  int workers = 4;
  BackendKind backend = BackendKind::Scripted;
};

uint64_t episode_seed(uint64_t base_seed, TaskFamily family, int index);

struct EpisodeSummary {
  TaskFamily family = TaskFamily::Put;
  int index = 0;
  uint64_t seed = 0;
  bool success = false;
  int steps = 0;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  std::string failure_reason;
  std::string task;
};

struct FamilyStats {
  int episodes = 0;
  int successes = 0;
  long steps_successes = 0;
  long steps_all = 0;
  long prompt_tokens = 0;
  long completion_tokens = 0;

  double success_rate() const { return episodes ? double(successes) / episodes : 0.0; }
  double mean_length_successes() const {
    return successes ? double(steps_successes) / successes : 0.0;
  }
  double mean_length_all() const { return episodes ? double(steps_all) / episodes : 0.0; }
  long tokens() const { return prompt_tokens + completion_tokens; }
  void absorb(const EpisodeSummary& e);
};

struct SuiteReport {
  SuiteConfig config;
  std::vector<std::pair<TaskFamily, FamilyStats>> per_family;  // report column order
  FamilyStats overall;
  std::vector<EpisodeSummary> episodes;
  bool interrupted = false;

  std::string to_text() const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Installs the scripted fixtures for a config: exact goal fixtures derived
// from each scenario's task plus a catch-all sampler fixture whose reply
// names no receptacle (the llm sampler then falls back to uniform random per
// slot).
void add_scripted_fixtures(const SuiteConfig& config, ScriptedBackend& backend);

// Runs seeded episodes over a worker pool. A null backend means: build the
// scripted backend internally (BackendKind::Scripted) or configure the HTTP
// backend from the environment. `stop` (optional) flushes partial results
// when set, e.g. from a SIGINT handler; traces (optional) receives one JSONL
// blob per episode in episode order.
SuiteReport run_suite(const SuiteConfig& config, ChatBackend* backend = nullptr,
                      const std::atomic<bool>* stop = nullptr,
                      std::vector<std::string>* traces = nullptr);

struct AblationRow {
  std::string label;  // e.g. "LLM-DP (n=3) - fallback"
  int n_samples = 3;
  bool fallback = true;
  double success_rate = 0.0;
  double mean_episode_length = 0.0;  // over successes
  SuiteReport report;
};

struct AblationReport {
  std::vector<AblationRow> rows;
  std::string to_text() const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

AblationReport ablate(const SuiteConfig& base, const std::vector<int>& n_values,
                      const std::vector<bool>& fallback_flags, ChatBackend* backend = nullptr,
                      const std::atomic<bool>* stop = nullptr);

}  // namespace llmdp
