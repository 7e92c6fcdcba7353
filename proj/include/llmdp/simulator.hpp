#pragma once

// Deterministic text household environment: hidden object placements,
// perfect local observations, six task families, success detection against
// the hidden state. One instance per episode.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmdp/belief.hpp"
#include "llmdp/grounding.hpp"

namespace llmdp {

enum class TaskFamily { Clean, Cool, Examine, Heat, Put, PutTwo };

inline constexpr TaskFamily kAllFamilies[] = {TaskFamily::Clean,   TaskFamily::Cool,
                                              TaskFamily::Examine, TaskFamily::Heat,
                                              TaskFamily::Put,     TaskFamily::PutTwo};

const char* to_string(TaskFamily family);
TaskFamily family_from_string(const std::string& name);

struct TaskSpec {
  TaskFamily family = TaskFamily::Put;
  std::string target_type;
  std::string target_receptacle_type;  // empty for examine
  std::string nl_instruction;
  GoalFormula goal() const;
};

enum class SpecialRole { None, Sink, Microwave, Fridge, LampHolder };

struct ReceptacleSpec {
  std::string name;
  std::string type;
  bool openable = false;
  SpecialRole special = SpecialRole::None;
  ReceptacleInfo info() const;
};

struct ObjectSpec {
  std::string name;
  std::string type;
  std::string location;
  bool is_light = false;
  bool is_clean = false;
  bool is_hot = false;
  bool is_cool = false;
};

struct ScenarioSpec {
  uint64_t seed = 0;
  std::vector<ReceptacleSpec> receptacles;
  std::vector<ObjectSpec> objects;
  TaskSpec task;

  nlohmann::json to_json() const;
  static ScenarioSpec from_json(const nlohmann::json& j);
};

// Seeded deterministic scenario: 6-12 receptacles, 5-15 objects, special
// receptacles required by the family present, task satisfiable but never
// satisfied at reset.
ScenarioSpec generate_scenario(TaskFamily family, uint64_t seed);

class Simulator {
 public:
  explicit Simulator(ScenarioSpec spec, bool oracle_enabled = false);

  struct ResetResult {
    Observation observation;
    std::string nl_instruction;
  };
  ResetResult reset();

  struct StepResult {
    Observation observation;
    bool done = false;
  };
  // Valid actions always succeed; invalid ones return "Nothing happens."
  // and leave the state untouched. Every attempt counts one step.
  StepResult step(const GroundAction& action);

  bool done() const { return done_; }
  size_t steps_taken() const { return steps_; }
  const TaskSpec& task() const { return spec_.task; }
  uint64_t scenario_seed() const { return spec_.seed; }

  // Test-only hooks, gated by the oracle flag.
  std::set<Atom> oracle_state() const;
  std::map<std::string, std::string> oracle_object_types() const;
  const ScenarioSpec& oracle_scenario() const;

 private:
  void init_state();
  const ReceptacleSpec* receptacle(const std::string& name) const;
  const ObjectSpec* object_spec(const std::string& name) const;
  bool contents_visible(const std::string& receptacle_name) const;
  Observation observe_here(std::string feedback) const;
  std::set<Atom> hidden_atoms() const;
  void refresh_done();
  void require_oracle() const;

  ScenarioSpec spec_;
  bool oracle_enabled_ = false;

  std::string agent_loc_;
  std::optional<std::string> held_;
  std::map<std::string, std::string> object_loc_;
  std::map<std::string, bool> opened_;
  std::set<std::string> clean_, hot_, cool_;
  std::set<std::pair<std::string, std::string>> examined_;
  size_t steps_ = 0;
  bool done_ = false;
  bool was_reset_ = false;
  bool goal_groundable_ = false;

  GroundProblem truth_;  // ground task goal over the true object universe
};

}  // namespace llmdp
