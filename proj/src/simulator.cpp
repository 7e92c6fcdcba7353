#include "llmdp/simulator.hpp"

#include <algorithm>

#include "llmdp/prompts.hpp"
#include "llmdp/rng.hpp"

namespace llmdp {

using nlohmann::json;

const char* to_string(TaskFamily family) {
  switch (family) {
    case TaskFamily::Clean: return "clean";
    case TaskFamily::Cool: return "cool";
    case TaskFamily::Examine: return "examine";
    case TaskFamily::Heat: return "heat";
    case TaskFamily::Put: return "put";
    case TaskFamily::PutTwo: return "puttwo";
  }
  return "?";
}

TaskFamily family_from_string(const std::string& name) {
  for (TaskFamily f : kAllFamilies) {
    if (name == to_string(f)) return f;
  }
  raise(ErrorKind::MalformedExpression, "unknown task family '" + name + "'");
}

GoalFormula TaskSpec::goal() const {
  GoalFormula g;
  switch (family) {
    case TaskFamily::Put:
    case TaskFamily::Clean:
    case TaskFamily::Heat:
    case TaskFamily::Cool: {
      g.binder = {{"?t", target_type}, {"?r", target_receptacle_type}};
      g.literals.push_back({true, "inReceptacle", {var("?t"), var("?r")}});
      if (family == TaskFamily::Clean) g.literals.push_back({true, "isClean", {var("?t")}});
      if (family == TaskFamily::Heat) g.literals.push_back({true, "isHot", {var("?t")}});
      if (family == TaskFamily::Cool) g.literals.push_back({true, "isCool", {var("?t")}});
      break;
    }
    case TaskFamily::Examine: {
      g.binder = {{"?t", target_type}, {"?l", "desklamp"}};
      g.literals.push_back({true, "examined", {var("?t"), var("?l")}});
      g.literals.push_back({true, "holds", {var("?t")}});
      break;
    }
    case TaskFamily::PutTwo: {
      g.binder = {{"?t1", target_type}, {"?t2", target_type}, {"?r", target_receptacle_type}};
      g.literals.push_back({true, "inReceptacle", {var("?t1"), var("?r")}});
      g.literals.push_back({true, "inReceptacle", {var("?t2"), var("?r")}});
      g.literals.push_back({false, "=", {var("?t1"), var("?t2")}});
      break;
    }
  }
  return g;
}

ReceptacleInfo ReceptacleSpec::info() const {
  ReceptacleInfo r;
  r.name = name;
  r.type = type;
  r.openable = openable;
  r.is_sink = special == SpecialRole::Sink;
  r.is_microwave = special == SpecialRole::Microwave;
  r.is_fridge = special == SpecialRole::Fridge;
  return r;
}

// ---------------------------------------------------------------------------
// Scenario generation

namespace {

struct ReceptacleKind {
  const char* type;
  bool openable;
  SpecialRole special;
};

const ReceptacleKind kSink{"sinkbasin", false, SpecialRole::Sink};
const ReceptacleKind kMicrowave{"microwave", true, SpecialRole::Microwave};
const ReceptacleKind kFridge{"fridge", true, SpecialRole::Fridge};

const ReceptacleKind kPlainKinds[] = {
    {"countertop", false, SpecialRole::None}, {"diningtable", false, SpecialRole::None},
    {"sidetable", false, SpecialRole::None},  {"shelf", false, SpecialRole::None},
    {"desk", false, SpecialRole::None},       {"coffeetable", false, SpecialRole::None},
    {"dresser", false, SpecialRole::None},    {"garbagecan", false, SpecialRole::None},
    {"sofa", false, SpecialRole::None},       {"bed", false, SpecialRole::None},
    {"drawer", true, SpecialRole::None},      {"cabinet", true, SpecialRole::None},
    {"safe", true, SpecialRole::None},
};

const char* kCleanable[] = {"plate", "bowl", "mug", "cup",  "apple",   "tomato",
                            "potato", "lettuce", "knife", "spatula", "soapbar"};
const char* kHeatable[] = {"mug", "cup", "plate", "bowl", "bread", "potato", "tomato", "egg"};
const char* kCoolable[] = {"apple", "tomato", "potato", "bread", "mug", "plate", "bowl", "egg"};
const char* kExaminable[] = {"book", "alarmclock", "cd",     "creditcard", "keychain",
                             "pen",  "pencil",     "statue", "watch",      "cellphone"};
const char* kAnyObject[] = {"plate",  "bowl",   "mug",        "cup",           "apple",
                            "tomato", "potato", "bread",      "egg",           "book",
                            "cd",     "pen",    "pencil",     "keychain",      "watch",
                            "statue", "vase",   "newspaper",  "remotecontrol", "peppershaker",
                            "saltshaker",       "creditcard", "cellphone",     "alarmclock"};

template <typename T, size_t N>
const T& pick(SplitMix& rng, const T (&pool)[N]) {
  return pool[rng.below(N)];
}

std::string pick_target_type(SplitMix& rng, TaskFamily family) {
  switch (family) {
    case TaskFamily::Clean: return pick(rng, kCleanable);
    case TaskFamily::Heat: return pick(rng, kHeatable);
    case TaskFamily::Cool: return pick(rng, kCoolable);
    case TaskFamily::Examine: return pick(rng, kExaminable);
    case TaskFamily::Put:
    case TaskFamily::PutTwo: return pick(rng, kAnyObject);
  }
  return "mug";
}

std::string instruction_for(const TaskSpec& task) {
  switch (task.family) {
    case TaskFamily::Put:
      return "put some " + task.target_type + " on " + task.target_receptacle_type + ".";
    case TaskFamily::Clean:
      return "put a clean " + task.target_type + " in " + task.target_receptacle_type + ".";
    case TaskFamily::Heat:
      return "heat some " + task.target_type + " and put it in " +
             task.target_receptacle_type + ".";
    case TaskFamily::Cool:
      return "cool some " + task.target_type + " and put it in " +
             task.target_receptacle_type + ".";
    case TaskFamily::Examine:
      return "examine the " + task.target_type + " with the desklamp.";
    case TaskFamily::PutTwo:
      return "put two " + task.target_type + " in " + task.target_receptacle_type + ".";
  }
  return {};
}

}  // namespace

ScenarioSpec generate_scenario(TaskFamily family, uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.task.family = family;
  SplitMix rng(mix_seed(seed, static_cast<uint64_t>(family) + 101));

  // receptacles: required specials first, then random fill
  std::vector<ReceptacleKind> kinds;
  if (family == TaskFamily::Clean) kinds.push_back(kSink);
  if (family == TaskFamily::Heat) kinds.push_back(kMicrowave);
  if (family == TaskFamily::Cool) kinds.push_back(kFridge);
  size_t n_receptacles = 6 + rng.below(7);
  while (kinds.size() < n_receptacles) kinds.push_back(pick(rng, kPlainKinds));

  std::map<std::string, int> type_counts;
  for (const auto& kind : kinds) {
    ReceptacleSpec r;
    r.type = kind.type;
    r.name = r.type + "-" + std::to_string(++type_counts[r.type]);
    r.openable = kind.openable;
    r.special = kind.special;
    spec.receptacles.push_back(std::move(r));
  }
  if (family == TaskFamily::Examine) {
    // the desklamp needs a surface it is visible on
    std::vector<size_t> surfaces;
    for (size_t i = 0; i < spec.receptacles.size(); ++i) {
      if (!spec.receptacles[i].openable) surfaces.push_back(i);
    }
    if (surfaces.empty()) {
      ReceptacleSpec r;
      r.type = "desk";
      r.name = "desk-" + std::to_string(++type_counts["desk"]);
      spec.receptacles.push_back(std::move(r));
      surfaces.push_back(spec.receptacles.size() - 1);
    }
    spec.receptacles[surfaces[rng.below(surfaces.size())]].special = SpecialRole::LampHolder;
  }

  spec.task.target_type = pick_target_type(rng, family);
  if (family != TaskFamily::Examine) {
    spec.task.target_receptacle_type =
        spec.receptacles[rng.below(spec.receptacles.size())].type;
  }
  spec.task.nl_instruction = instruction_for(spec.task);

  // objects: targets first (never inside a target-type receptacle, goal flag
  // unset), then distractors of other types
  size_t n_objects = 5 + rng.below(11);
  size_t n_targets = family == TaskFamily::PutTwo ? 2 + rng.below(2) : 1 + rng.below(2);
  n_targets = std::min(n_targets, n_objects);

  std::vector<size_t> non_target_receptacles;
  for (size_t i = 0; i < spec.receptacles.size(); ++i) {
    if (spec.receptacles[i].type != spec.task.target_receptacle_type) {
      non_target_receptacles.push_back(i);
    }
  }
  if (non_target_receptacles.empty()) {
    // every receptacle has the target type; fetching from one is still a
    // valid task as long as the goal flags start unset, which put/puttwo
    // lack, so add a plain countertop to hide targets on
    ReceptacleSpec r;
    r.type = "countertop";
    r.name = "countertop-" + std::to_string(++type_counts["countertop"]);
    spec.receptacles.push_back(std::move(r));
    non_target_receptacles.push_back(spec.receptacles.size() - 1);
  }

  std::map<std::string, int> object_counts;
  auto add_object = [&](const std::string& type, size_t receptacle_index) -> ObjectSpec& {
    ObjectSpec o;
    o.type = type;
    o.name = type + "-" + std::to_string(++object_counts[type]);
    o.location = spec.receptacles[receptacle_index].name;
    spec.objects.push_back(std::move(o));
    return spec.objects.back();
  };

  for (size_t i = 0; i < n_targets; ++i) {
    size_t where = family == TaskFamily::Examine
                       ? rng.below(spec.receptacles.size())
                       : non_target_receptacles[rng.below(non_target_receptacles.size())];
    add_object(spec.task.target_type, where);
  }
  if (family == TaskFamily::Examine) {
    size_t holder = 0;
    for (size_t i = 0; i < spec.receptacles.size(); ++i) {
      if (spec.receptacles[i].special == SpecialRole::LampHolder) holder = i;
    }
    ObjectSpec& lamp = add_object("desklamp", holder);
    lamp.is_light = true;
  }
  while (spec.objects.size() < n_objects) {
    std::string type = pick(rng, kAnyObject);
    if (type == spec.task.target_type) continue;
    ObjectSpec& o = add_object(type, rng.below(spec.receptacles.size()));
    if (rng.below(4) == 0) o.is_clean = true;
    size_t thermal = rng.below(8);
    if (thermal == 0) o.is_hot = true;
    if (thermal == 1) o.is_cool = true;
  }
  return spec;
}

// ---------------------------------------------------------------------------
// JSON round trip

json ScenarioSpec::to_json() const {
  json j;
  j["seed"] = seed;
  j["task"] = {{"family", std::string(to_string(task.family))},
               {"target_type", task.target_type},
               {"target_receptacle_type", task.target_receptacle_type},
               {"nl_instruction", task.nl_instruction}};
  j["receptacles"] = json::array();
  for (const auto& r : receptacles) {
    j["receptacles"].push_back({{"name", r.name},
                                {"type", r.type},
                                {"openable", r.openable},
                                {"special", static_cast<int>(r.special)}});
  }
  j["objects"] = json::array();
  for (const auto& o : objects) {
    j["objects"].push_back({{"name", o.name},
                            {"type", o.type},
                            {"location", o.location},
                            {"is_light", o.is_light},
                            {"is_clean", o.is_clean},
                            {"is_hot", o.is_hot},
                            {"is_cool", o.is_cool}});
  }
  return j;
}

ScenarioSpec ScenarioSpec::from_json(const json& j) {
  ScenarioSpec spec;
  spec.seed = j.at("seed").get<uint64_t>();
  spec.task.family = family_from_string(j.at("task").at("family").get<std::string>());
  spec.task.target_type = j.at("task").at("target_type").get<std::string>();
  spec.task.target_receptacle_type =
      j.at("task").at("target_receptacle_type").get<std::string>();
  spec.task.nl_instruction = j.at("task").at("nl_instruction").get<std::string>();
  for (const auto& rj : j.at("receptacles")) {
    ReceptacleSpec r;
    r.name = rj.at("name").get<std::string>();
    r.type = rj.at("type").get<std::string>();
    r.openable = rj.at("openable").get<bool>();
    r.special = static_cast<SpecialRole>(rj.at("special").get<int>());
    spec.receptacles.push_back(std::move(r));
  }
  for (const auto& oj : j.at("objects")) {
    ObjectSpec o;
    o.name = oj.at("name").get<std::string>();
    o.type = oj.at("type").get<std::string>();
    o.location = oj.at("location").get<std::string>();
    o.is_light = oj.at("is_light").get<bool>();
    o.is_clean = oj.at("is_clean").get<bool>();
    o.is_hot = oj.at("is_hot").get<bool>();
    o.is_cool = oj.at("is_cool").get<bool>();
    spec.objects.push_back(std::move(o));
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Simulator

void Simulator::init_state() {
  agent_loc_ = kStartLocation;
  held_.reset();
  object_loc_.clear();
  opened_.clear();
  clean_.clear();
  hot_.clear();
  cool_.clear();
  examined_.clear();
  steps_ = 0;
  done_ = false;
  for (const auto& r : spec_.receptacles) {
    if (r.openable) opened_[r.name] = false;
  }
  for (const auto& o : spec_.objects) {
    object_loc_[o.name] = o.location;
    if (o.is_clean) clean_.insert(o.name);
    if (o.is_hot) hot_.insert(o.name);
    if (o.is_cool) cool_.insert(o.name);
  }
}

Simulator::Simulator(ScenarioSpec spec, bool oracle_enabled)
    : spec_(std::move(spec)), oracle_enabled_(oracle_enabled) {
  init_state();
  ProblemDef truth;
  truth.name = "truth";
  truth.domain_name = "alfred";
  truth.objects.push_back({kStartLocation, "startloc"});
  for (const auto& r : spec_.receptacles) truth.objects.push_back({r.name, r.type});
  for (const auto& o : spec_.objects) truth.objects.push_back({o.name, o.type});
  std::sort(truth.objects.begin(), truth.objects.end(),
            [](const ObjectDecl& a, const ObjectDecl& b) { return a.name < b.name; });
  truth.init = hidden_atoms();
  truth.goal = spec_.task.goal();
  try {
    truth_ = ground_problem(alfred_domain(), truth);
    goal_groundable_ = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::GoalUngroundable) throw;
    goal_groundable_ = false;  // no such object exists: never done
  }
  refresh_done();
}

const ReceptacleSpec* Simulator::receptacle(const std::string& name) const {
  for (const auto& r : spec_.receptacles) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const ObjectSpec* Simulator::object_spec(const std::string& name) const {
  for (const auto& o : spec_.objects) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

bool Simulator::contents_visible(const std::string& receptacle_name) const {
  const ReceptacleSpec* r = receptacle(receptacle_name);
  if (r == nullptr) return false;
  if (!r->openable) return true;
  auto it = opened_.find(receptacle_name);
  return it != opened_.end() && it->second;
}

Observation Simulator::observe_here(std::string feedback) const {
  Observation obs;
  obs.location = agent_loc_;
  obs.action_feedback = std::move(feedback);
  const ReceptacleSpec* r = receptacle(agent_loc_);
  if (r == nullptr) return obs;  // still at start-loc
  obs.receptacle_openable = r->openable;
  if (r->openable) obs.receptacle_opened = opened_.at(agent_loc_);
  if (!obs.contents_visible()) return obs;
  for (const auto& o : spec_.objects) {
    if (object_loc_.at(o.name) != agent_loc_) continue;
    ObservedObject oo;
    oo.name = o.name;
    oo.type = o.type;
    oo.is_light = o.is_light;
    oo.is_clean = clean_.count(o.name) > 0;
    oo.is_hot = hot_.count(o.name) > 0;
    oo.is_cool = cool_.count(o.name) > 0;
    obs.contents.push_back(std::move(oo));
  }
  return obs;
}

Simulator::ResetResult Simulator::reset() {
  if (was_reset_) {
    init_state();
    refresh_done();
  }
  was_reset_ = true;
  Observation obs;
  obs.location = kStartLocation;
  obs.action_feedback = "";
  for (const auto& r : spec_.receptacles) obs.visible_receptacles.push_back(r.info());
  return {std::move(obs), spec_.task.nl_instruction};
}

Simulator::StepResult Simulator::step(const GroundAction& action) {
  if (done_) raise(ErrorKind::EpisodeFinished, "episode already finished");
  ++steps_;

  const auto& args = action.args;
  auto at = [&](const std::string& r) { return agent_loc_ == r; };
  auto is_recep = [&](const std::string& r) { return receptacle(r) != nullptr; };
  auto openable = [&](const std::string& r) {
    const ReceptacleSpec* rs = receptacle(r);
    return rs != nullptr && rs->openable;
  };
  auto is_open = [&](const std::string& r) {
    auto it = opened_.find(r);
    return it != opened_.end() && it->second;
  };
  auto obj_at = [&](const std::string& o, const std::string& r) {
    auto it = object_loc_.find(o);
    return it != object_loc_.end() && it->second == r;
  };
  auto holding = [&](const std::string& o) { return held_.has_value() && *held_ == o; };

  std::string feedback = "Nothing happens.";
  const std::string& schema = action.schema;

  if (schema == "gotoReceptacle" && args.size() == 2) {
    if (at(args[0]) && is_recep(args[1]) && args[0] != args[1]) {
      agent_loc_ = args[1];
      feedback = "You arrive at " + args[1] + ".";
    }
  } else if (schema == "openReceptacle" && args.size() == 1) {
    if (at(args[0]) && openable(args[0]) && !is_open(args[0])) {
      opened_[args[0]] = true;
      feedback = "You open the " + args[0] + ".";
    }
  } else if (schema == "closeReceptacle" && args.size() == 1) {
    if (at(args[0]) && openable(args[0]) && is_open(args[0])) {
      opened_[args[0]] = false;
      feedback = "You close the " + args[0] + ".";
    }
  } else if ((schema == "pickupFromSurface" || schema == "pickupFromOpen") &&
             args.size() == 2) {
    bool open_ok = schema == "pickupFromSurface"
                       ? !openable(args[1])
                       : (openable(args[1]) && is_open(args[1]));
    if (at(args[1]) && is_recep(args[1]) && open_ok && obj_at(args[0], args[1]) &&
        !held_.has_value()) {
      held_ = args[0];
      object_loc_[args[0]] = "";
      feedback = "You pick up the " + args[0] + " from the " + args[1] + ".";
    }
  } else if ((schema == "putObject" || schema == "putObjectInOpen") && args.size() == 2) {
    bool open_ok = schema == "putObject" ? !openable(args[1])
                                         : (openable(args[1]) && is_open(args[1]));
    if (at(args[1]) && is_recep(args[1]) && open_ok && holding(args[0])) {
      held_.reset();
      object_loc_[args[0]] = args[1];
      feedback = "You put the " + args[0] + " in/on the " + args[1] + ".";
    }
  } else if (schema == "cleanObject" && args.size() == 2) {
    const ReceptacleSpec* r = receptacle(args[1]);
    if (holding(args[0]) && at(args[1]) && r != nullptr && r->special == SpecialRole::Sink) {
      clean_.insert(args[0]);
      feedback = "You clean the " + args[0] + " using the " + args[1] + ".";
    }
  } else if (schema == "heatObject" && args.size() == 2) {
    const ReceptacleSpec* r = receptacle(args[1]);
    if (holding(args[0]) && at(args[1]) && r != nullptr &&
        r->special == SpecialRole::Microwave) {
      hot_.insert(args[0]);
      cool_.erase(args[0]);
      feedback = "You heat the " + args[0] + " using the " + args[1] + ".";
    }
  } else if (schema == "coolObject" && args.size() == 2) {
    const ReceptacleSpec* r = receptacle(args[1]);
    if (holding(args[0]) && at(args[1]) && r != nullptr &&
        r->special == SpecialRole::Fridge) {
      cool_.insert(args[0]);
      hot_.erase(args[0]);
      feedback = "You cool the " + args[0] + " using the " + args[1] + ".";
    }
  } else if (schema == "examineObjectInLight" && args.size() == 3) {
    const ObjectSpec* light = object_spec(args[1]);
    if (holding(args[0]) && light != nullptr && light->is_light &&
        obj_at(args[1], args[2]) && at(args[2])) {
      examined_.insert({args[0], args[1]});
      feedback = "You examine the " + args[0] + " under the " + args[1] + ".";
    }
  }

  if (feedback != "Nothing happens.") refresh_done();
  return {observe_here(std::move(feedback)), done_};
}

std::set<Atom> Simulator::hidden_atoms() const {
  std::set<Atom> atoms;
  atoms.insert({"atReceptacleLocation", {agent_loc_}});
  if (!held_.has_value()) atoms.insert({"handEmpty", {}});
  for (const auto& r : spec_.receptacles) {
    atoms.insert({"isReceptacle", {r.name}});
    if (r.openable) atoms.insert({"openable", {r.name}});
    if (r.special == SpecialRole::Sink) atoms.insert({"isSink", {r.name}});
    if (r.special == SpecialRole::Microwave) atoms.insert({"isMicrowave", {r.name}});
    if (r.special == SpecialRole::Fridge) atoms.insert({"isFridge", {r.name}});
  }
  for (const auto& [r, open] : opened_) {
    if (open) atoms.insert({"opened", {r}});
  }
  for (const auto& o : spec_.objects) {
    const std::string& loc = object_loc_.at(o.name);
    if (!loc.empty()) atoms.insert({"inReceptacle", {o.name, loc}});
    if (o.is_light) atoms.insert({"isLight", {o.name}});
  }
  if (held_.has_value()) atoms.insert({"holds", {*held_}});
  for (const auto& n : clean_) atoms.insert({"isClean", {n}});
  for (const auto& n : hot_) atoms.insert({"isHot", {n}});
  for (const auto& n : cool_) atoms.insert({"isCool", {n}});
  for (const auto& [o, l] : examined_) atoms.insert({"examined", {o, l}});
  return atoms;
}

void Simulator::refresh_done() {
  done_ = goal_groundable_ &&
          goal_satisfied(truth_.intern_state(hidden_atoms()), truth_.goal);
}

void Simulator::require_oracle() const {
  if (!oracle_enabled_) {
    raise(ErrorKind::OracleDisabled, "oracle access is disabled for this simulator");
  }
}

std::set<Atom> Simulator::oracle_state() const {
  require_oracle();
  return hidden_atoms();
}

std::map<std::string, std::string> Simulator::oracle_object_types() const {
  require_oracle();
  std::map<std::string, std::string> types;
  for (const auto& o : spec_.objects) types[o.name] = o.type;
  return types;
}

const ScenarioSpec& Simulator::oracle_scenario() const {
  require_oracle();
  return spec_;
}

}  // namespace llmdp
