#pragma once

// Independent test oracles, deliberately written with different machinery
// than the library: text-atom set manipulation, brute-force binding
// enumeration, and a plain queue-based breadth-first search over tree sets.

#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "llmdp/grounding.hpp"
#include "llmdp/pddl.hpp"

namespace naive {

using llmdp::Atom;
using AtomSet = std::set<Atom>;

struct NaiveAction {
  std::string display;
  AtomSet pre_pos, pre_neg, add, del;
};

inline bool naive_applicable(const AtomSet& state, const NaiveAction& a) {
  for (const auto& p : a.pre_pos) {
    if (!state.count(p)) return false;
  }
  for (const auto& n : a.pre_neg) {
    if (state.count(n)) return false;
  }
  return true;
}

inline AtomSet naive_apply(const AtomSet& state, const NaiveAction& a) {
  AtomSet out = state;
  for (const auto& d : a.del) out.erase(d);
  for (const auto& x : a.add) out.insert(x);
  return out;
}

// Brute-force grounding: every type-consistent binding, equality literals
// checked per binding, no static pruning.
inline void enumerate_bindings(
    const std::vector<llmdp::TypedVar>& vars, const llmdp::ProblemDef& problem, size_t i,
    std::map<std::string, std::string>& binding,
    const std::function<void(const std::map<std::string, std::string>&)>& fn) {
  if (i == vars.size()) {
    fn(binding);
    return;
  }
  for (const auto& obj : problem.objects) {
    if (vars[i].type_name != "object" && vars[i].type_name != obj.type_name) continue;
    binding[vars[i].name] = obj.name;
    enumerate_bindings(vars, problem, i + 1, binding, fn);
  }
  binding.erase(vars[i].name);
}

inline Atom bind_literal(const llmdp::LiteralTemplate& lit,
                         const std::map<std::string, std::string>& binding) {
  Atom a;
  a.predicate = lit.predicate;
  for (const auto& t : lit.args) {
    a.args.push_back(t.is_variable ? binding.at(t.text) : t.text);
  }
  return a;
}

inline bool equalities_ok(const std::vector<llmdp::LiteralTemplate>& lits,
                          const std::map<std::string, std::string>& binding) {
  for (const auto& lit : lits) {
    if (lit.predicate != "=") continue;
    std::string lhs = lit.args[0].is_variable ? binding.at(lit.args[0].text) : lit.args[0].text;
    std::string rhs = lit.args[1].is_variable ? binding.at(lit.args[1].text) : lit.args[1].text;
    if ((lhs == rhs) != lit.positive) return false;
  }
  return true;
}

inline std::vector<NaiveAction> naive_ground_actions(const llmdp::DomainDef& domain,
                                                     const llmdp::ProblemDef& problem) {
  std::vector<NaiveAction> out;
  for (const auto& schema : domain.actions) {
    std::map<std::string, std::string> binding;
    enumerate_bindings(schema.params, problem, 0, binding,
                       [&](const std::map<std::string, std::string>& bound) {
                         if (!equalities_ok(schema.preconditions, bound)) return;
                         NaiveAction a;
                         a.display = schema.name;
                         for (const auto& p : schema.params) a.display += " " + bound.at(p.name);
                         for (const auto& lit : schema.preconditions) {
                           if (lit.predicate == "=") continue;
                           (lit.positive ? a.pre_pos : a.pre_neg).insert(bind_literal(lit, bound));
                         }
                         for (const auto& lit : schema.add_effects) a.add.insert(bind_literal(lit, bound));
                         for (const auto& lit : schema.del_effects) {
                           Atom d = bind_literal(lit, bound);
                           if (!a.add.count(d)) a.del.insert(d);
                         }
                         out.push_back(std::move(a));
                       });
  }
  return out;
}

// Goal disjuncts by brute-force binder enumeration.
inline std::vector<AtomSet> naive_goal_disjuncts(const llmdp::GoalFormula& goal,
                                                 const llmdp::ProblemDef& problem) {
  std::vector<AtomSet> out;
  std::map<std::string, std::string> binding;
  enumerate_bindings(goal.binder, problem, 0, binding,
                     [&](const std::map<std::string, std::string>& bound) {
                       if (!equalities_ok(goal.literals, bound)) return;
                       AtomSet disjunct;
                       for (const auto& lit : goal.literals) {
                         if (lit.predicate == "=") continue;
                         disjunct.insert(bind_literal(lit, bound));
                       }
                       out.push_back(std::move(disjunct));
                     });
  return out;
}

inline bool naive_goal_satisfied(const AtomSet& state, const std::vector<AtomSet>& disjuncts) {
  for (const auto& d : disjuncts) {
    bool all = true;
    for (const auto& a : d) {
      if (!state.count(a)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Plain queue-based BFS over a GroundProblem's data, sharing none of the
// planner's search code: tree-set closed list, dedup on pop, no hashing.

struct NaiveSearchResult {
  bool found = false;
  bool exhausted = false;  // closed the whole reachable space without a goal
  size_t plan_length = 0;
};

inline NaiveSearchResult naive_bfs(const llmdp::GroundProblem& gp, const llmdp::State& init,
                                   size_t max_states = 2000000) {
  using StateVec = std::vector<llmdp::AtomId>;
  auto is_goal = [&](const StateVec& s) {
    for (const auto& d : gp.goal.disjuncts) {
      bool all = true;
      for (llmdp::AtomId id : d) {
        if (!std::binary_search(s.begin(), s.end(), id)) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  };

  std::queue<std::pair<StateVec, size_t>> open;
  std::set<StateVec> closed;
  open.push({init, 0});
  NaiveSearchResult result;
  while (!open.empty()) {
    auto [state, depth] = open.front();
    open.pop();
    if (!closed.insert(state).second) continue;
    if (closed.size() > max_states) return result;  // neither found nor exhausted
    if (is_goal(state)) {
      result.found = true;
      result.plan_length = depth;
      return result;
    }
    for (const auto& a : gp.actions) {
      bool ok = true;
      for (llmdp::AtomId id : a.pre_pos) {
        if (!std::binary_search(state.begin(), state.end(), id)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (llmdp::AtomId id : a.pre_neg) {
        if (std::binary_search(state.begin(), state.end(), id)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      std::set<llmdp::AtomId> next(state.begin(), state.end());
      for (llmdp::AtomId id : a.del) next.erase(id);
      for (llmdp::AtomId id : a.add) next.insert(id);
      StateVec nv(next.begin(), next.end());
      if (!closed.count(nv)) open.push({std::move(nv), depth + 1});
    }
  }
  result.exhausted = true;
  return result;
}

}  // namespace naive
