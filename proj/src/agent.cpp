#include "llmdp/agent.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>

#include "llmdp/prompts.hpp"

namespace llmdp {

using nlohmann::json;

Selection select_action(const std::vector<PlanOutcome>& outcomes, bool all_satisfied) {
  Selection sel;
  if (all_satisfied) {
    sel.kind = Selection::Kind::AllSatisfied;
    return sel;
  }
  const PlanOutcome* best = nullptr;
  for (const auto& o : outcomes) {
    if (!o.result.found() || o.result.plan.length() == 0) continue;
    if (best == nullptr || o.result.plan.length() < best->result.plan.length()) best = &o;
  }
  if (best == nullptr) {
    sel.kind = Selection::Kind::NeedsResample;
    return sel;
  }
  sel.kind = Selection::Kind::Plan;
  sel.sample_index = best->sample_index;
  sel.plan = best->result.plan;
  return sel;
}

long EpisodeTrace::prompt_tokens(std::string_view tag) const {
  long n = 0;
  for (const auto& c : backend_calls) {
    if (tag.empty() || c.tag == tag) n += c.response.prompt_tokens;
  }
  return n;
}

long EpisodeTrace::completion_tokens(std::string_view tag) const {
  long n = 0;
  for (const auto& c : backend_calls) {
    if (tag.empty() || c.tag == tag) n += c.response.completion_tokens;
  }
  return n;
}

json EpisodeTrace::summary_json() const {
  json j;
  j["type"] = "summary";
  j["task"] = task;
  j["family"] = std::string(to_string(family));
  j["scenario_seed"] = scenario_seed;
  j["success"] = success;
  j["failure_reason"] = failure_reason;
  j["steps"] = steps;
  j["rounds"] = rounds.size();
  j["backend_calls"] = backend_calls.size();
  j["tokens"] = {{"prompt", prompt_tokens()},
                 {"completion", completion_tokens()},
                 {"total", total_tokens()},
                 {"goal_prompt", prompt_tokens("goal")},
                 {"goal_completion", completion_tokens("goal")},
                 {"sampler_prompt", prompt_tokens("sampler")},
                 {"sampler_completion", completion_tokens("sampler")}};
  return j;
}

std::string EpisodeTrace::to_jsonl() const {
  std::string out;
  for (const auto& s : step_records) {
    json j;
    j["type"] = "step";
    j["index"] = s.index;
    j["round"] = s.round;
    j["action"] = s.action;
    j["feedback"] = s.feedback;
    j["valid"] = s.valid;
    j["new_info"] = s.new_info;
    j["done"] = s.done;
    j["observation"] = s.observation_text;
    j["snapshot"] = s.snapshot;
    out += j.dump();
    out += '\n';
  }
  out += summary_json().dump();
  out += '\n';
  return out;
}

namespace {

std::vector<std::pair<std::string, int>> hypothetical_types(
    const GoalFormula& goal, const std::vector<ReceptacleInfo>& receptacles) {
  std::set<std::string> receptacle_types;
  for (const auto& r : receptacles) receptacle_types.insert(r.type);
  std::map<std::string, int> counts;
  std::vector<std::string> order;
  for (const auto& v : goal.binder) {
    if (v.type_name == "object" || receptacle_types.count(v.type_name)) continue;
    if (counts[v.type_name]++ == 0) order.push_back(v.type_name);
  }
  std::vector<std::pair<std::string, int>> out;
  for (const auto& type : order) out.push_back({type, counts[type]});
  return out;
}

struct Executor {
  Simulator& env;
  WorldModel& w;
  BeliefSet& b;
  EpisodeTrace& trace;
  const AgentConfig& cfg;
  std::map<std::string, int>& last_seen;

  struct Outcome {
    bool valid = false;
    bool new_info = false;
    bool done = false;
  };

  Outcome execute(const GroundAction& action, int round) {
    Simulator::StepResult sr = env.step(action);
    ++trace.steps;
    ObserveResult ores = observe(w, b, &action, sr.observation);
    last_seen[sr.observation.location] = trace.steps;

    StepRecord rec;
    rec.index = trace.steps;
    rec.round = round;
    rec.action = action.to_string();
    rec.feedback = sr.observation.action_feedback;
    rec.valid = sr.observation.action_succeeded();
    rec.new_info = ores.new_info;
    rec.done = sr.done;
    rec.observation_text = sr.observation.text();
    rec.snapshot = {{"world", w.to_json()}, {"beliefs", b.to_json()}};
    trace.step_records.push_back(std::move(rec));
    return {sr.observation.action_succeeded(), ores.new_info, sr.done};
  }
};

const GroundAction* find_goto(const GroundProblem& gp, const std::string& from,
                              const std::string& to) {
  for (const auto& a : gp.actions) {
    if (a.schema == "gotoReceptacle" && a.args.size() == 2 && a.args[0] == from &&
        a.args[1] == to) {
      return &a;
    }
  }
  return nullptr;
}

// Least-recently-seen receptacle, unvisited first, ties lexicographic.
const GroundAction* pick_exploration(const GroundProblem& gp, const WorldModel& w,
                                     const std::map<std::string, int>& last_seen) {
  std::string here = w.agent_location();
  std::vector<std::pair<int, std::string>> ranked;
  for (const auto& r : w.receptacles()) {
    if (r == here) continue;
    auto it = last_seen.find(r);
    ranked.push_back({it == last_seen.end() ? -1 : it->second, r});
  }
  std::sort(ranked.begin(), ranked.end());
  for (const auto& [_, r] : ranked) {
    if (const GroundAction* a = find_goto(gp, here, r)) return a;
  }
  return nullptr;
}

}  // namespace

EpisodeTrace run_episode(Simulator& env, const AgentConfig& cfg, ChatBackend& backend) {
  EpisodeTrace trace;
  trace.family = env.task().family;
  trace.scenario_seed = env.scenario_seed();
  CallRecorder recorder;
  const DomainDef& domain = alfred_domain();

  Simulator::ResetResult start = env.reset();
  trace.task = start.nl_instruction;

  try {
    TranslationOutcome tr = translate_goal(start.nl_instruction, domain, backend, &recorder);
    if (!tr.ok) {
      trace.failure_reason = "translation_failed: " + tr.error;
    } else {
      GoalFormula goal = tr.goal;
      auto [w, b] =
          init_from_scene(hypothetical_types(goal, start.observation.visible_receptacles),
                          start.observation.visible_receptacles);
      std::map<std::string, int> last_seen;
      Executor exec{env, w, b, trace, cfg, last_seen};
      int round_counter = 0;

      while (true) {
        if (env.done()) {
          trace.success = true;
          break;
        }
        if (trace.steps >= cfg.max_steps) {
          trace.failure_reason = "max_steps";
          break;
        }
        ++round_counter;
        RoundRecord round;
        round.round = round_counter;

        SampleContext ctx;
        ctx.round = static_cast<uint64_t>(round_counter);
        ctx.backend = &backend;
        ctx.recorder = &recorder;
        OracleInfo oracle;
        if (cfg.sampler.strategy == SamplerStrategy::Oracle) {
          oracle.atoms = env.oracle_state();
          oracle.object_types = env.oracle_object_types();
          ctx.oracle = &oracle;
        }

        std::vector<Assignment> assignments;
        bool sampling_failed = false;
        try {
          assignments = sample(w, b, cfg.sampler, ctx);
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::BackendUnavailable && cfg.sampler.fallback_to_random) {
            SamplerConfig random_cfg = cfg.sampler;
            random_cfg.strategy = SamplerStrategy::Random;
            assignments = sample(w, b, random_cfg, ctx);
          } else {
            trace.failure_reason = std::string("sampling_failed: ") + e.what();
            sampling_failed = true;
          }
        }
        if (sampling_failed) break;

        std::set<Atom> base_sample =
            assignments.empty() ? std::set<Atom>{} : assignment_atoms(assignments[0]);
        GroundProblem gp = ground_problem(domain, export_problem(w, b, base_sample, goal));

        auto plan_round = [&](const std::vector<Assignment>& asgn) {
          ScreenResult screen = dedupe_and_screen(asgn, w, gp);
          std::vector<std::future<PlanResult>> futures;
          for (int idx : screen.usable) {
            std::set<Atom> init_atoms = w.known_true;
            std::set<Atom> extra = assignment_atoms(asgn[idx]);
            init_atoms.insert(extra.begin(), extra.end());
            State init = gp.intern_state(init_atoms);
            futures.push_back(std::async(std::launch::async, [&gp, &cfg, init]() {
              return cfg.planner == AgentConfig::PlannerStrategy::Bffs
                         ? plan_bffs(gp, init, cfg.budget)
                         : plan_optimal(gp, init, cfg.budget);
            }));
          }
          std::vector<PlanOutcome> outcomes;
          for (size_t i = 0; i < futures.size(); ++i) {
            outcomes.push_back({screen.usable[i], futures[i].get()});
          }
          for (const auto& o : outcomes) {
            round.outcomes.push_back({o.sample_index, to_string(o.result.status),
                                      o.result.plan.length(), o.result.expanded});
          }
          round.all_satisfied = screen.all_satisfied;
          return std::pair(outcomes, screen.all_satisfied);
        };

        auto [outcomes, all_satisfied] = plan_round(assignments);
        Selection sel = select_action(outcomes, all_satisfied);

        if (sel.kind != Selection::Kind::Plan) {
          if (!cfg.sampler.fallback_to_random) {
            round.resolution = "fail";
            trace.rounds.push_back(std::move(round));
            trace.failure_reason = sel.kind == Selection::Kind::AllSatisfied
                                       ? "all_samples_satisfied"
                                       : "no_valid_plans";
            break;
          }
          // one random resample per planning round
          round.fallback_used = true;
          SamplerConfig random_cfg = cfg.sampler;
          random_cfg.strategy = SamplerStrategy::Random;
          SampleContext fallback_ctx = ctx;
          fallback_ctx.round = ctx.round + (1ull << 32);  // fresh draws
          assignments = sample(w, b, random_cfg, fallback_ctx);
          auto [outcomes2, all_satisfied2] = plan_round(assignments);
          sel = select_action(outcomes2, all_satisfied2);
        }

        if (sel.kind != Selection::Kind::Plan) {
          // still nothing: take one exploratory step toward the least
          // recently seen receptacle, then replan
          const GroundAction* explore = pick_exploration(gp, w, last_seen);
          if (explore == nullptr) {
            round.resolution = "fail";
            trace.rounds.push_back(std::move(round));
            trace.failure_reason = "no_exploration_available";
            break;
          }
          round.resolution = "explore";
          GroundAction explore_action = *explore;
          trace.rounds.push_back(std::move(round));
          Executor::Outcome out = exec.execute(explore_action, round_counter);
          if (out.done) {
            trace.success = true;
            break;
          }
          continue;
        }

        round.resolution = "plan";
        round.chosen_sample = sel.sample_index;
        for (const auto& a : sel.plan.steps) round.chosen_plan.push_back(a.to_string());
        trace.rounds.push_back(std::move(round));

        bool finished = false;
        for (const auto& action : sel.plan.steps) {
          if (trace.steps >= cfg.max_steps) break;
          Executor::Outcome out = exec.execute(action, round_counter);
          if (out.done) {
            trace.success = true;
            finished = true;
            break;
          }
          if (!out.valid) break;  // wrong belief surfaced as a failed action
          if (cfg.resample_every_step) break;
          if (out.new_info && cfg.replan_on_new_info) break;
        }
        if (finished) break;
      }
    }
  } catch (const Error& e) {
    trace.failure_reason = std::string("error: ") + e.what();
    trace.success = false;
  }

  trace.backend_calls = recorder.calls();
  return trace;
}

}  // namespace llmdp
