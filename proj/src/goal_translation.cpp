#include "llmdp/goal_translation.hpp"

#include "llmdp/prompts.hpp"

namespace llmdp {

ChatRequest goal_translation_request(const std::string& task) {
  ChatRequest request;
  request.messages.push_back({"system", alfred_predicates_text()});
  for (const auto& [shot_task, shot_goal] : goal_few_shots()) {
    request.messages.push_back({"user", shot_task});
    request.messages.push_back({"assistant", shot_goal});
  }
  std::string line = task;
  if (line.rfind("Your task is to:", 0) != 0) line = "Your task is to: " + line;
  request.messages.push_back({"user", line});
  return request;
}

std::string extract_goal_sexp(const std::string& reply) {
  for (const char* anchor : {"(:goal", "(exists", "(and"}) {
    size_t start = reply.find(anchor);
    if (start == std::string::npos) continue;
    int depth = 0;
    for (size_t i = start; i < reply.size(); ++i) {
      if (reply[i] == '(') ++depth;
      if (reply[i] == ')') {
        --depth;
        if (depth == 0) return reply.substr(start, i - start + 1);
      }
    }
  }
  return {};
}

TranslationOutcome translate_goal(const std::string& task, const DomainDef& domain,
                                  ChatBackend& backend, CallRecorder* recorder) {
  TranslationOutcome outcome;
  ChatRequest request = goal_translation_request(task);

  for (int attempt = 0; attempt < 2; ++attempt) {
    ChatResponse response = backend.complete(request);
    ++outcome.attempts;
    if (recorder != nullptr) recorder->record("goal", request, response);

    std::string sexp = extract_goal_sexp(response.content);
    std::string error;
    if (sexp.empty()) {
      error = "reply contains no (:goal ...) s-expression";
    } else {
      try {
        GoalFormula goal = parse_goal(sexp, domain);
        std::vector<std::string> violations = validate_goal(goal, domain);
        if (violations.empty()) {
          outcome.ok = true;
          outcome.goal = std::move(goal);
          return outcome;
        }
        error = violations.front();
      } catch (const Error& e) {
        error = e.what();
      }
    }
    outcome.error = error;
    if (attempt == 0) {
      request.messages.push_back({"assistant", response.content});
      request.messages.push_back(
          {"user", "That goal is invalid (" + error +
                       "). Reply with only a corrected (:goal ...) s-expression."});
    }
  }
  return outcome;
}

}  // namespace llmdp
