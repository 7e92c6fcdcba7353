#include "llmdp/grounding.hpp"

#include <algorithm>
#include <map>

namespace llmdp {

std::string GroundAction::to_string() const {
  std::string out = "(" + schema;
  for (const auto& a : args) {
    out += ' ';
    out += a;
  }
  out += ')';
  return out;
}

std::optional<AtomId> GroundProblem::find_atom(const Atom& a) const {
  auto it = ids_.find(a.to_string());
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

AtomId GroundProblem::intern(const Atom& a) {
  std::string key = a.to_string();
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  AtomId id = static_cast<AtomId>(atoms_.size());
  atoms_.push_back(a);
  ids_.emplace(std::move(key), id);
  return id;
}

State GroundProblem::intern_state(const std::set<Atom>& atoms, bool strict) const {
  State s;
  s.reserve(atoms.size());
  for (const auto& a : atoms) {
    auto id = find_atom(a);
    if (!id) {
      if (strict) {
        raise(ErrorKind::MalformedExpression,
              "atom " + a.to_string() + " is outside this ground problem's vocabulary");
      }
      continue;
    }
    s.push_back(*id);
  }
  return sorted_unique(std::move(s));
}

std::set<Atom> GroundProblem::externalize(const State& s) const {
  std::set<Atom> out;
  for (AtomId id : s) out.insert(atoms_[id]);
  return out;
}

bool state_contains(const State& s, AtomId id) {
  return std::binary_search(s.begin(), s.end(), id);
}

State sorted_unique(State s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

bool applicable(const State& s, const GroundAction& a) {
  if (!std::includes(s.begin(), s.end(), a.pre_pos.begin(), a.pre_pos.end())) return false;
  for (AtomId id : a.pre_neg) {
    if (state_contains(s, id)) return false;
  }
  return true;
}

State apply_action(const State& s, const GroundAction& a) {
  if (!applicable(s, a)) {
    raise(ErrorKind::InapplicableAction, a.to_string());
  }
  State without;
  without.reserve(s.size());
  std::set_difference(s.begin(), s.end(), a.del.begin(), a.del.end(),
                      std::back_inserter(without));
  State out;
  out.reserve(without.size() + a.add.size());
  std::set_union(without.begin(), without.end(), a.add.begin(), a.add.end(),
                 std::back_inserter(out));
  return out;
}

bool goal_satisfied(const State& s, const GroundGoal& g) {
  for (const auto& d : g.disjuncts) {
    if (std::includes(s.begin(), s.end(), d.begin(), d.end())) return true;
  }
  return false;
}

namespace {

using Binding = std::map<std::string, std::string>;  // variable -> object

std::string resolve(const Term& t, const Binding& binding) {
  if (!t.is_variable) return t.text;
  auto it = binding.find(t.text);
  if (it == binding.end()) {
    raise(ErrorKind::MalformedExpression, "unbound variable " + t.text + " at grounding time");
  }
  return it->second;
}

Atom instantiate(const LiteralTemplate& lit, const Binding& binding) {
  Atom a;
  a.predicate = lit.predicate;
  a.args.reserve(lit.args.size());
  for (const auto& t : lit.args) a.args.push_back(resolve(t, binding));
  return a;
}

// Equality literals are resolved entirely at grounding time; a binding that
// violates one is skipped.
bool equalities_hold(const std::vector<LiteralTemplate>& lits, const Binding& binding) {
  for (const auto& lit : lits) {
    if (!lit.is_equality()) continue;
    std::string lhs = resolve(lit.args[0], binding);
    std::string rhs = resolve(lit.args[1], binding);
    bool equal = lhs == rhs;
    if (lit.positive != equal) return false;
  }
  return true;
}

struct Enumerator {
  const std::vector<std::string>* all_objects;
  const std::map<std::string, std::vector<std::string>>* by_type;

  const std::vector<std::string>& candidates(const std::string& type_name) const {
    static const std::vector<std::string> kEmpty;
    if (type_name == "object") return *all_objects;
    auto it = by_type->find(type_name);
    return it == by_type->end() ? kEmpty : it->second;
  }

  // Enumerates bindings in lexicographic candidate order (candidate lists are
  // pre-sorted), invoking fn on each complete binding.
  template <typename Fn>
  void enumerate(const std::vector<TypedVar>& vars, Fn&& fn) const {
    Binding binding;
    enumerate_from(vars, 0, binding, fn);
  }

  template <typename Fn>
  void enumerate_from(const std::vector<TypedVar>& vars, size_t i, Binding& binding,
                      Fn&& fn) const {
    if (i == vars.size()) {
      fn(binding);
      return;
    }
    for (const auto& obj : candidates(vars[i].type_name)) {
      binding[vars[i].name] = obj;
      enumerate_from(vars, i + 1, binding, fn);
    }
    binding.erase(vars[i].name);
  }
};

}  // namespace

GroundProblem ground_problem(const DomainDef& domain, const ProblemDef& problem) {
  GroundProblem gp;

  std::vector<std::string> all_objects;
  std::map<std::string, std::vector<std::string>> by_type;
  for (const auto& o : problem.objects) {
    all_objects.push_back(o.name);
    by_type[o.type_name].push_back(o.name);
  }
  std::sort(all_objects.begin(), all_objects.end());
  for (auto& [_, objs] : by_type) std::sort(objs.begin(), objs.end());
  Enumerator en{&all_objects, &by_type};

  for (const auto& atom : problem.init) gp.intern(atom);
  gp.initial_state = gp.intern_state(problem.init);

  // Predicates never touched by an effect are static; ground preconditions on
  // them can be decided against init right now, pruning the action set.
  std::set<std::string> dynamic_preds;
  for (const auto& a : domain.actions) {
    for (const auto& e : a.add_effects) dynamic_preds.insert(e.predicate);
    for (const auto& e : a.del_effects) dynamic_preds.insert(e.predicate);
  }
  auto is_static = [&](const std::string& pred) { return !dynamic_preds.count(pred); };
  auto statically_true = [&](const Atom& a) { return problem.init.count(a) > 0; };

  for (const auto& schema : domain.actions) {
    en.enumerate(schema.params, [&](const Binding& binding) {
      if (!equalities_hold(schema.preconditions, binding)) return;
      GroundAction ga;
      ga.schema = schema.name;
      for (const auto& p : schema.params) ga.args.push_back(binding.at(p.name));

      State pre_pos, pre_neg;
      for (const auto& lit : schema.preconditions) {
        if (lit.is_equality()) continue;
        Atom atom = instantiate(lit, binding);
        if (is_static(atom.predicate)) {
          if (statically_true(atom) != lit.positive) return;  // never applicable
        }
        (lit.positive ? pre_pos : pre_neg).push_back(gp.intern(atom));
      }
      for (const auto& lit : schema.add_effects) {
        ga.add.push_back(gp.intern(instantiate(lit, binding)));
      }
      for (const auto& lit : schema.del_effects) {
        ga.del.push_back(gp.intern(instantiate(lit, binding)));
      }
      ga.pre_pos = sorted_unique(std::move(pre_pos));
      ga.pre_neg = sorted_unique(std::move(pre_neg));
      ga.add = sorted_unique(std::move(ga.add));
      ga.del = sorted_unique(std::move(ga.del));
      // Delete-then-add semantics: an atom both added and deleted is a net
      // add, so normalizing keeps add/del disjoint without changing apply_action().
      State del_only;
      std::set_difference(ga.del.begin(), ga.del.end(), ga.add.begin(), ga.add.end(),
                          std::back_inserter(del_only));
      ga.del = std::move(del_only);
      gp.actions.push_back(std::move(ga));
    });
  }
  std::sort(gp.actions.begin(), gp.actions.end(),
            [](const GroundAction& a, const GroundAction& b) {
              if (a.schema != b.schema) return a.schema < b.schema;
              return a.args < b.args;
            });

  const GoalFormula& goal = problem.goal;
  for (const auto& v : goal.binder) {
    if (en.candidates(v.type_name).empty()) {
      raise(ErrorKind::GoalUngroundable,
            "no objects of type " + v.type_name + " for goal variable " + v.name);
    }
  }
  en.enumerate(goal.binder, [&](const Binding& binding) {
    if (!equalities_hold(goal.literals, binding)) return;
    State disjunct;
    for (const auto& lit : goal.literals) {
      if (lit.is_equality()) continue;
      disjunct.push_back(gp.intern(instantiate(lit, binding)));
    }
    gp.goal.disjuncts.push_back(sorted_unique(std::move(disjunct)));
  });
  if (gp.goal.disjuncts.empty()) {
    raise(ErrorKind::GoalUngroundable, "no binding satisfies the goal's equality constraints");
  }
  return gp;
}

}  // namespace llmdp
