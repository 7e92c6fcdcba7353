#pragma once

// Versioned text assets: the household planning domain, the predicate block
// used as the goal-generation system prompt, and the fixed few-shot pairs.
// These strings are byte-identical across every episode of a run.

#include <string>
#include <utility>
#include <vector>

#include "llmdp/pddl.hpp"

namespace llmdp {

// Full domain: the 14 household predicates plus the handEmpty carry flag and
// the action schemas. Parseable PDDL.
const std::string& alfred_domain_text();

// Predicate declarations only (the goal-translation system prompt).
const std::string& alfred_predicates_text();

// Fixed few-shot (task, goal) pairs for goal generation.
const std::vector<std::pair<std::string, std::string>>& goal_few_shots();

// Parsed canonical domain, cached.
const DomainDef& alfred_domain();

}  // namespace llmdp
