#pragma once

// Typed-STRIPS PDDL subset: flat types under `object`, conjunctive
// positive/negative preconditions with (in)equality atoms, add/delete
// effects, and existential conjunctive goals. This is the interchange
// format between every other module; text in, text out, no globals.

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "llmdp/error.hpp"

namespace llmdp {

struct TypedVar {
  std::string name;       // includes the leading '?'
  std::string type_name;  // "object" if omitted in source
  friend bool operator==(const TypedVar&, const TypedVar&) = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedVar> params;
  size_t arity() const { return params.size(); }
  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

struct Term {
  bool is_variable = false;
  std::string text;
  friend bool operator==(const Term&, const Term&) = default;
};

inline Term var(std::string name) { return Term{true, std::move(name)}; }
inline Term constant(std::string name) { return Term{false, std::move(name)}; }

// `predicate` may be "=" for (in)equality atoms in preconditions/goals.
struct LiteralTemplate {
  bool positive = true;
  std::string predicate;
  std::vector<Term> args;
  bool is_equality() const { return predicate == "="; }
  friend bool operator==(const LiteralTemplate&, const LiteralTemplate&) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedVar> params;
  std::vector<LiteralTemplate> preconditions;  // positive, negative, (in)equality
  std::vector<LiteralTemplate> add_effects;    // positive literals
  std::vector<LiteralTemplate> del_effects;    // positive literals (deleted atoms)
  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

struct GoalFormula {
  std::vector<TypedVar> binder;            // existential; empty for bare conjunctions
  std::vector<LiteralTemplate> literals;   // conjunction; negation only on "="
  bool empty() const { return literals.empty(); }
  friend bool operator==(const GoalFormula&, const GoalFormula&) = default;
};

struct DomainDef {
  std::string name;
  std::vector<std::string> types;  // declared subtypes of `object`
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> actions;

  const PredicateDecl* find_predicate(std::string_view pred_name) const;
  bool type_known(std::string_view type_name) const;
  friend bool operator==(const DomainDef&, const DomainDef&) = default;
};

// Ground positive atom in text space.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;
  std::string to_string() const;
  auto operator<=>(const Atom&) const = default;
};

struct ObjectDecl {
  std::string name;
  std::string type_name;
  friend bool operator==(const ObjectDecl&, const ObjectDecl&) = default;
};

struct ProblemDef {
  std::string name;
  std::string domain_name;
  std::vector<ObjectDecl> objects;  // kept sorted by name
  std::set<Atom> init;
  GoalFormula goal;

  const ObjectDecl* find_object(std::string_view obj_name) const;
  friend bool operator==(const ProblemDef&, const ProblemDef&) = default;
};

DomainDef parse_domain(std::string_view text);
ProblemDef parse_problem(std::string_view text, const DomainDef& domain);

// Parses the `(:goal ...)` fragment an LLM emits; a bare `(exists ...)` or
// `(and ...)` body is accepted too. Throws on undeclared predicates, arity
// mismatches, unbound variables, and malformed binders.
GoalFormula parse_goal(std::string_view text, const DomainDef& domain);

// Non-throwing validation used by the goal-translation retry loop: returns
// human-readable violations, empty when the goal is well-formed. Semantic
// nonsense (a mug used as a receptacle) passes and surfaces later as an
// unsolvable plan.
std::vector<std::string> validate_goal(const GoalFormula& goal, const DomainDef& domain);

std::string print_domain(const DomainDef& domain);
std::string print_problem(const ProblemDef& problem);
std::string print_goal(const GoalFormula& goal);

std::string to_lower_ascii(std::string_view s);

}  // namespace llmdp
