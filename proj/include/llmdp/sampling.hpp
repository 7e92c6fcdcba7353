#pragma once

// Produces N concrete belief completions per planning round. Three
// strategies behind one interface: seeded uniform random, a test-only
// oracle that reads the simulator's hidden truth, and an LLM-guided sampler
// that asks the backend to pick each slot's most plausible candidate.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "llmdp/backend.hpp"
#include "llmdp/belief.hpp"

namespace llmdp {

enum class SamplerStrategy { Random, Oracle, Llm };

const char* to_string(SamplerStrategy strategy);
SamplerStrategy sampler_strategy_from_string(const std::string& name);

struct SamplerConfig {
  SamplerStrategy strategy = SamplerStrategy::Random;
  int n_samples = 3;
  uint64_t seed = 0;
  bool fallback_to_random = true;
};

// One chosen candidate per open slot, keyed by slot object.
using Assignment = std::map<std::string, Atom>;

std::set<Atom> assignment_atoms(const Assignment& a);

// Hidden ground truth handed to the oracle strategy.
struct OracleInfo {
  std::set<Atom> atoms;
  std::map<std::string, std::string> object_types;
};

struct SampleContext {
  uint64_t round = 0;                 // advances the random stream per round
  ChatBackend* backend = nullptr;     // llm strategy
  const OracleInfo* oracle = nullptr; // oracle strategy
  CallRecorder* recorder = nullptr;   // verbatim prompt/response log
};

// Returns cfg.n_samples assignments, each picking exactly one candidate per
// slot; with an empty belief set it returns N empty assignments. Sample i
// draws from sub-seed i of (cfg.seed, round). The llm strategy falls back
// per slot to uniform random when the reply names no candidate.
std::vector<Assignment> sample(const WorldModel& w, const BeliefSet& b,
                               const SamplerConfig& cfg, const SampleContext& ctx);

std::string sampler_prompt(const WorldModel& w, const BeliefSlot& slot);

struct ScreenResult {
  std::vector<int> usable;   // indices of deduplicated assignments
  bool all_satisfied = true; // every sampled init already satisfies the goal
};

ScreenResult dedupe_and_screen(const std::vector<Assignment>& assignments,
                               const WorldModel& w, const GroundProblem& gp);

}  // namespace llmdp
