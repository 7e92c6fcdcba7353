#pragma once

// Forward state-space search over a GroundProblem. Two strategies share the
// machinery: plan_optimal is uninformed breadth-first with duplicate
// detection (shortest plans, exhaustive unsolvability), plan_bffs is a
// best-first search ordered by (novelty width, goal-count, insertion order)
// that never prunes, so it stays complete within budget.

#include <chrono>
#include <string>
#include <vector>

#include "llmdp/grounding.hpp"

namespace llmdp {

struct SearchBudget {
  size_t max_expanded_nodes = 100000;
  std::chrono::milliseconds max_wall_time{5000};
};

enum class PlanStatus { Found, Unsolvable, BudgetExhausted };

const char* to_string(PlanStatus status);

struct Plan {
  std::vector<GroundAction> steps;
  size_t length() const { return steps.size(); }
  std::string to_string() const;  // one action per line
  friend bool operator==(const Plan&, const Plan&) = default;
};

struct PlanResult {
  PlanStatus status = PlanStatus::Unsolvable;
  Plan plan;
  size_t expanded = 0;
  bool found() const { return status == PlanStatus::Found; }
};

PlanResult plan_optimal(const GroundProblem& problem, const State& init,
                        const SearchBudget& budget = {});
PlanResult plan_bffs(const GroundProblem& problem, const State& init,
                     const SearchBudget& budget = {});

struct PlanValidation {
  bool ok = false;
  int failed_step = -1;  // -1: goal not satisfied at the end (or ok)
  std::string reason;
  explicit operator bool() const { return ok; }
};

PlanValidation validate_plan(const GroundProblem& problem, const State& init, const Plan& plan);

}  // namespace llmdp
