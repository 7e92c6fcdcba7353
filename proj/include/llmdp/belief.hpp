#pragma once

// Tracks the known world state (facts observed true/false) and the belief
// set over unknown facts: per-object candidate locations, exactly one of
// which is true. Observations collapse candidates two ways — an object seen
// at a location is nowhere else, and an object missing from a fully visible
// location is not there.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmdp/grounding.hpp"
#include "llmdp/pddl.hpp"

namespace llmdp {

inline const std::string kStartLocation = "start-loc";

struct ReceptacleInfo {
  std::string name;
  std::string type;
  bool openable = false;
  bool is_sink = false;
  bool is_microwave = false;
  bool is_fridge = false;
};

struct ObservedObject {
  std::string name;
  std::string type;
  bool is_light = false;
  bool is_clean = false;
  bool is_hot = false;
  bool is_cool = false;
};

struct Observation {
  std::string location;  // receptacle the agent is at; start-loc after reset
  bool receptacle_openable = false;
  bool receptacle_opened = false;
  std::vector<ObservedObject> contents;            // visible contents, exhaustive
  std::vector<ReceptacleInfo> visible_receptacles; // populated by reset only
  std::string action_feedback;

  bool contents_visible() const { return !receptacle_openable || receptacle_opened; }
  bool action_succeeded() const { return action_feedback != "Nothing happens."; }
  std::string text() const;
};

struct ObjectInfo {
  std::string name;
  std::string type;
  bool is_receptacle = false;
  bool openable = false;
  bool hypothetical = false;
};

struct WorldModel {
  std::map<std::string, ObjectInfo> objects;
  std::set<Atom> known_true;
  std::set<Atom> known_false;

  std::vector<std::string> receptacles() const;  // excludes start-loc
  std::string agent_location() const;
  bool is_true(const Atom& a) const { return known_true.count(a) > 0; }
  void set_true(const Atom& a);
  void set_false(const Atom& a);
  nlohmann::json to_json() const;
};

struct BeliefSlot {
  std::string object;
  std::string predicate;          // candidate family, inReceptacle here
  std::vector<Atom> candidates;   // sorted; exactly one is true
};

struct BeliefSet {
  std::map<std::string, BeliefSlot> slots;  // keyed by object name
  bool empty() const { return slots.empty(); }
  size_t candidate_count() const;
  nlohmann::json to_json() const;
};

// Builds W from the initial room scan and instantiates one hypothetical
// object per goal-required (type, multiplicity) with a full location belief.
// Single-candidate slots are promoted into known_true immediately.
std::pair<WorldModel, BeliefSet> init_from_scene(
    const std::vector<std::pair<std::string, int>>& goal_types,
    const std::vector<ReceptacleInfo>& receptacle_list);

struct ObserveResult {
  bool new_info = false;
  std::vector<std::string> notes;  // human-readable changes, for traces
};

// Applies the executed action's symbolic effects to known_true first, then
// merges the observation: sighting collapses a slot, absence eliminates a
// candidate when the location's contents are fully visible. Unseen objects
// unify with the first unmatched hypothetical of their type. Throws
// ContradictoryObservation when a candidate set empties.
ObserveResult observe(WorldModel& w, BeliefSet& b, const GroundAction* action,
                      const Observation& obs);

// Applies a ground action's add/delete effects to known_true/known_false by
// re-instantiating its schema.
void apply_action_effects(WorldModel& w, const DomainDef& domain, const GroundAction& action);

// init = known_true ∪ sample; sample must pick exactly one candidate per
// open slot (IncompleteSample otherwise).
ProblemDef export_problem(const WorldModel& w, const BeliefSet& b,
                          const std::set<Atom>& belief_sample, const GoalFormula& goal,
                          const std::string& name = "episode");

}  // namespace llmdp
