#include "llmdp/belief.hpp"

#include "llmdp/prompts.hpp"

#include <algorithm>

namespace llmdp {

using nlohmann::json;

namespace {

Atom at_loc(const std::string& obj, const std::string& receptacle) {
  return Atom{"inReceptacle", {obj, receptacle}};
}

const char* kIntrinsics[] = {"isReceptacle", "openable", "isSink",
                             "isMicrowave", "isFridge", "isLight"};

}  // namespace

std::string Observation::text() const {
  std::string out;
  if (!visible_receptacles.empty()) {
    out = "You are in the middle of a room. Looking quickly around you, you see";
    for (size_t i = 0; i < visible_receptacles.size(); ++i) {
      out += (i == 0 ? " a " : ", a ") + visible_receptacles[i].name;
    }
    out += '.';
    return out;
  }
  if (!action_succeeded()) return action_feedback;
  out = action_feedback.empty() ? "" : action_feedback + " ";
  if (!contents_visible()) {
    out += "The " + location + " is closed.";
    return out;
  }
  if (receptacle_openable && receptacle_opened) {
    out += "The " + location + " is open. ";
  }
  if (contents.empty()) {
    out += "On the " + location + ", you see nothing.";
  } else {
    out += "On the " + location + ", you see";
    for (size_t i = 0; i < contents.size(); ++i) {
      out += (i == 0 ? " a " : ", a ") + contents[i].name;
    }
    out += '.';
  }
  return out;
}

std::vector<std::string> WorldModel::receptacles() const {
  std::vector<std::string> out;
  for (const auto& [name, info] : objects) {
    if (info.is_receptacle && name != kStartLocation) out.push_back(name);
  }
  return out;
}

std::string WorldModel::agent_location() const {
  for (const auto& atom : known_true) {
    if (atom.predicate == "atReceptacleLocation") return atom.args[0];
  }
  return kStartLocation;
}

void WorldModel::set_true(const Atom& a) {
  known_false.erase(a);
  known_true.insert(a);
}

void WorldModel::set_false(const Atom& a) {
  known_true.erase(a);
  known_false.insert(a);
}

json WorldModel::to_json() const {
  json j;
  j["objects"] = json::array();
  for (const auto& [name, info] : objects) {
    j["objects"].push_back({{"name", name},
                            {"type", info.type},
                            {"is_receptacle", info.is_receptacle},
                            {"openable", info.openable},
                            {"hypothetical", info.hypothetical}});
  }
  auto dump = [](const std::set<Atom>& atoms) {
    json arr = json::array();
    for (const auto& a : atoms) arr.push_back(a.to_string());
    return arr;
  };
  j["known_true"] = dump(known_true);
  j["known_false"] = dump(known_false);
  return j;
}

size_t BeliefSet::candidate_count() const {
  size_t n = 0;
  for (const auto& [_, slot] : slots) n += slot.candidates.size();
  return n;
}

json BeliefSet::to_json() const {
  json j = json::array();
  for (const auto& [obj, slot] : slots) {
    json cands = json::array();
    for (const auto& c : slot.candidates) cands.push_back(c.to_string());
    j.push_back({{"object", obj}, {"predicate", slot.predicate}, {"candidates", cands}});
  }
  return j;
}

namespace {

void register_receptacle(WorldModel& w, const ReceptacleInfo& r) {
  ObjectInfo info;
  info.name = r.name;
  info.type = r.type;
  info.is_receptacle = true;
  info.openable = r.openable;
  w.objects[r.name] = info;
  w.set_true({"isReceptacle", {r.name}});
  auto flag = [&](const char* pred, bool value) {
    Atom a{pred, {r.name}};
    value ? w.set_true(a) : w.set_false(a);
  };
  flag("openable", r.openable);
  flag("isSink", r.is_sink);
  flag("isMicrowave", r.is_microwave);
  flag("isFridge", r.is_fridge);
  w.set_false({"isLight", {r.name}});
  if (r.openable) w.set_false({"opened", {r.name}});  // rooms start closed
}

void register_object(WorldModel& w, const ObservedObject& o, bool hypothetical) {
  ObjectInfo info;
  info.name = o.name;
  info.type = o.type;
  info.hypothetical = hypothetical;
  w.objects[o.name] = info;
  w.set_false({"isReceptacle", {o.name}});
  w.set_false({"openable", {o.name}});
  if (hypothetical) return;  // attributes unknown until sighted
  auto flag = [&](const char* pred, bool value) {
    Atom a{pred, {o.name}};
    value ? w.set_true(a) : w.set_false(a);
  };
  flag("isLight", o.is_light);
  flag("isClean", o.is_clean);
  flag("isHot", o.is_hot);
  flag("isCool", o.is_cool);
}

// Promotes single-candidate slots and detects contradictions; returns true
// if anything changed.
bool normalize_slots(WorldModel& w, BeliefSet& b) {
  bool changed = false;
  for (auto it = b.slots.begin(); it != b.slots.end();) {
    BeliefSlot& slot = it->second;
    if (slot.candidates.empty()) {
      raise(ErrorKind::ContradictoryObservation,
            "no candidate location left for " + slot.object);
    }
    if (slot.candidates.size() == 1) {
      w.set_true(slot.candidates[0]);
      it = b.slots.erase(it);
      changed = true;
    } else {
      ++it;
    }
  }
  return changed;
}

}  // namespace

std::pair<WorldModel, BeliefSet> init_from_scene(
    const std::vector<std::pair<std::string, int>>& goal_types,
    const std::vector<ReceptacleInfo>& receptacle_list) {
  if (receptacle_list.empty()) {
    raise(ErrorKind::MalformedExpression, "init_from_scene needs at least one receptacle");
  }
  WorldModel w;
  BeliefSet b;

  ObjectInfo start;
  start.name = kStartLocation;
  start.type = "startloc";
  w.objects[kStartLocation] = start;
  w.set_false({"isReceptacle", {kStartLocation}});
  w.set_true({"atReceptacleLocation", {kStartLocation}});
  w.set_true({"handEmpty", {}});

  for (const auto& r : receptacle_list) register_receptacle(w, r);

  for (const auto& [type, multiplicity] : goal_types) {
    for (int i = 1; i <= multiplicity; ++i) {
      ObservedObject hypothetical;
      hypothetical.name = type + "-h" + std::to_string(i);
      hypothetical.type = type;
      register_object(w, hypothetical, /*hypothetical=*/true);
      BeliefSlot slot;
      slot.object = hypothetical.name;
      slot.predicate = "inReceptacle";
      for (const auto& r : receptacle_list) {
        slot.candidates.push_back(at_loc(hypothetical.name, r.name));
      }
      std::sort(slot.candidates.begin(), slot.candidates.end());
      b.slots[hypothetical.name] = std::move(slot);
    }
  }
  normalize_slots(w, b);
  return {std::move(w), std::move(b)};
}

namespace {

Atom instantiate_effect(const LiteralTemplate& lit, const ActionSchema& schema,
                        const std::vector<std::string>& args) {
  Atom a;
  a.predicate = lit.predicate;
  for (const auto& t : lit.args) {
    if (!t.is_variable) {
      a.args.push_back(t.text);
      continue;
    }
    for (size_t i = 0; i < schema.params.size(); ++i) {
      if (schema.params[i].name == t.text) {
        a.args.push_back(args[i]);
        break;
      }
    }
  }
  return a;
}

}  // namespace

void apply_action_effects(WorldModel& w, const DomainDef& domain, const GroundAction& action) {
  for (const auto& schema : domain.actions) {
    if (schema.name != action.schema) continue;
    if (schema.params.size() != action.args.size()) break;
    for (const auto& lit : schema.del_effects) {
      w.set_false(instantiate_effect(lit, schema, action.args));
    }
    for (const auto& lit : schema.add_effects) {
      w.set_true(instantiate_effect(lit, schema, action.args));
    }
    return;
  }
  raise(ErrorKind::MalformedExpression,
        "action " + action.to_string() + " does not match any domain schema");
}

ObserveResult observe(WorldModel& w, BeliefSet& b, const GroundAction* action,
                      const Observation& obs) {
  ObserveResult result;

  // 1. The executed action's own symbolic effects; these do not count as new
  //    information.
  if (action != nullptr && obs.action_succeeded()) {
    apply_action_effects(w, alfred_domain(), *action);
  }

  const std::string& loc = obs.location;
  if (loc == kStartLocation) return result;

  // 2. Receptacle attributes from sight.
  if (w.objects.count(loc) == 0) {
    raise(ErrorKind::ContradictoryObservation, "observation at unknown receptacle " + loc);
  }
  if (obs.receptacle_openable) {
    Atom opened{"opened", {loc}};
    bool was_open = w.is_true(opened);
    if (obs.receptacle_opened != was_open) {
      obs.receptacle_opened ? w.set_true(opened) : w.set_false(opened);
      result.new_info = true;
      result.notes.push_back(loc + (obs.receptacle_opened ? " is open" : " is closed"));
    }
  }

  if (!obs.contents_visible()) return result;

  // 3. Sightings: record locations, unify hypotheticals, register strangers.
  std::set<std::string> present;
  for (const auto& oo : obs.contents) {
    std::string name = oo.name;
    if (w.objects.count(name) == 0) {
      // Try to unify with the first unmatched hypothetical of this type.
      std::string hypothetical_name;
      for (const auto& [slot_obj, slot] : b.slots) {
        auto it = w.objects.find(slot_obj);
        if (it != w.objects.end() && it->second.hypothetical && it->second.type == oo.type) {
          hypothetical_name = slot_obj;
          break;
        }
      }
      if (!hypothetical_name.empty()) {
        b.slots.erase(hypothetical_name);
        w.objects.erase(hypothetical_name);
        for (const char* pred : kIntrinsics) w.known_false.erase(Atom{pred, {hypothetical_name}});
        result.notes.push_back(hypothetical_name + " unified with " + name);
      } else {
        result.notes.push_back("discovered " + name);
      }
      register_object(w, oo, /*hypothetical=*/false);
      w.set_true(at_loc(name, loc));
      result.new_info = true;
    } else {
      // Known object: confirm location and refresh visible attributes.
      Atom here = at_loc(name, loc);
      if (!w.is_true(here)) {
        for (const auto& r : w.receptacles()) {
          if (r != loc && w.is_true(at_loc(name, r))) {
            raise(ErrorKind::ContradictoryObservation,
                  name + " observed at " + loc + " but known at " + r);
          }
        }
        w.set_true(here);
        result.new_info = true;
        result.notes.push_back(name + " is at " + loc);
      }
      auto slot_it = b.slots.find(name);
      if (slot_it != b.slots.end()) {
        b.slots.erase(slot_it);
        result.new_info = true;
      }
      auto refresh = [&](const char* pred, bool value) {
        Atom a{pred, {name}};
        bool known = value ? w.is_true(a) : w.known_false.count(a) > 0;
        if (!known) {
          value ? w.set_true(a) : w.set_false(a);
          result.new_info = true;
        }
      };
      refresh("isClean", oo.is_clean);
      refresh("isHot", oo.is_hot);
      refresh("isCool", oo.is_cool);
      refresh("isLight", oo.is_light);
    }
    present.insert(name);
  }

  // 4. Absence: eliminate this location from every unresolved slot.
  for (auto& [slot_obj, slot] : b.slots) {
    if (present.count(slot_obj)) continue;
    Atom here = at_loc(slot_obj, loc);
    auto it = std::find(slot.candidates.begin(), slot.candidates.end(), here);
    if (it != slot.candidates.end()) {
      slot.candidates.erase(it);
      result.new_info = true;
      result.notes.push_back(slot_obj + " is not at " + loc);
    }
  }
  // Absence also applies to known placements: a tracked object recorded at
  // this location must be visible (perfect observations).
  for (const auto& [name, info] : w.objects) {
    if (info.hypothetical || info.is_receptacle) continue;
    if (w.is_true(at_loc(name, loc)) && !present.count(name)) {
      raise(ErrorKind::ContradictoryObservation,
            name + " known at " + loc + " but not observed there");
    }
  }

  if (normalize_slots(w, b)) result.new_info = true;
  return result;
}

ProblemDef export_problem(const WorldModel& w, const BeliefSet& b,
                          const std::set<Atom>& belief_sample, const GoalFormula& goal,
                          const std::string& name) {
  for (const auto& [obj, slot] : b.slots) {
    bool chosen = std::any_of(slot.candidates.begin(), slot.candidates.end(),
                              [&](const Atom& c) { return belief_sample.count(c) > 0; });
    if (!chosen) {
      raise(ErrorKind::IncompleteSample, "no candidate chosen for slot " + obj);
    }
  }
  ProblemDef problem;
  problem.name = name;
  problem.domain_name = "alfred";
  for (const auto& [obj_name, info] : w.objects) {
    problem.objects.push_back({obj_name, info.type});
  }
  std::sort(problem.objects.begin(), problem.objects.end(),
            [](const ObjectDecl& a, const ObjectDecl& b) { return a.name < b.name; });
  problem.init = w.known_true;
  for (const auto& a : belief_sample) problem.init.insert(a);
  problem.goal = goal;
  return problem;
}

}  // namespace llmdp
