#pragma once

// Instantiates action schemas and existential goals over a problem's object
// universe. States are sorted vectors of interned atom ids so the planner's
// subset tests and hashing stay cheap; a GroundProblem is immutable once
// built and safe to share across concurrent searches.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "llmdp/pddl.hpp"

namespace llmdp {

using AtomId = uint32_t;
using State = std::vector<AtomId>;  // sorted, unique

struct GroundAction {
  std::string schema;             // schema name
  std::vector<std::string> args;  // bound objects, display form
  State pre_pos;
  State pre_neg;
  State add;
  State del;
  std::string to_string() const;
  friend bool operator==(const GroundAction&, const GroundAction&) = default;
};

struct GroundGoal {
  // One disjunct per binding of the existential variables; positive atoms only.
  std::vector<State> disjuncts;
};

class GroundProblem {
 public:
  State initial_state;
  std::vector<GroundAction> actions;
  GroundGoal goal;

  size_t atom_count() const { return atoms_.size(); }
  const Atom& atom(AtomId id) const { return atoms_[id]; }
  std::string atom_text(AtomId id) const { return atoms_[id].to_string(); }
  std::optional<AtomId> find_atom(const Atom& a) const;

  // Interns a fresh initial state over the same objects; atoms outside the
  // problem's reachable vocabulary are rejected (strict) or dropped.
  State intern_state(const std::set<Atom>& atoms, bool strict = true) const;
  std::set<Atom> externalize(const State& s) const;

  AtomId intern(const Atom& a);  // build-time only

 private:
  std::vector<Atom> atoms_;
  std::unordered_map<std::string, AtomId> ids_;
};

GroundProblem ground_problem(const DomainDef& domain, const ProblemDef& problem);

bool applicable(const State& s, const GroundAction& a);
State apply_action(const State& s, const GroundAction& a);  // throws InapplicableAction
bool goal_satisfied(const State& s, const GroundGoal& g);

bool state_contains(const State& s, AtomId id);
State sorted_unique(State s);

struct StateHash {
  size_t operator()(const State& s) const {
    size_t h = 1469598103934665603ull;
    for (AtomId id : s) {
      h ^= (static_cast<size_t>(id) + 0x9E3779B97F4A7C15ull);
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace llmdp
