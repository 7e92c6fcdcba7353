#pragma once

// Natural-language task -> validated GoalFormula via the chat backend, using
// the fixed predicate-block system prompt and three few-shot pairs. One
// retry with the error message appended; a second failure is reported as
// data, not thrown, and counts as an episode failure.

#include <string>

#include "llmdp/backend.hpp"
#include "llmdp/pddl.hpp"

namespace llmdp {

struct TranslationOutcome {
  bool ok = false;
  GoalFormula goal;
  std::string error;   // last parse/validation failure when !ok
  int attempts = 0;    // backend calls made (1 or 2)
};

ChatRequest goal_translation_request(const std::string& task);

TranslationOutcome translate_goal(const std::string& task, const DomainDef& domain,
                                  ChatBackend& backend, CallRecorder* recorder = nullptr);

// Pulls the first balanced (:goal ...) / (exists ...) / (and ...) form out of
// a free-text reply; empty when none is found.
std::string extract_goal_sexp(const std::string& reply);

}  // namespace llmdp
