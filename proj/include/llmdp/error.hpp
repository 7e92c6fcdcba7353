#pragma once

#include <stdexcept>
#include <string>

namespace llmdp {

enum class ErrorKind {
  UnbalancedParens,
  UnknownSection,
  ArityRedeclaration,
  ArityMismatch,
  MalformedExpression,
  UndeclaredObject,
  UndeclaredPredicate,
  TypeMismatch,
  MalformedBinder,
  GoalUngroundable,
  InapplicableAction,
  ContradictoryObservation,
  IncompleteSample,
  BackendUnavailable,
  FixtureMiss,
  EpisodeFinished,
  OracleDisabled,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace llmdp
