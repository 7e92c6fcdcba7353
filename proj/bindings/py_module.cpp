// Python bindings for the planning core: PDDL parsing/printing, grounding,
// the two planners, the household simulator, backends, and the episode/suite
// runners. Reports and traces cross the boundary as plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "llmdp/harness.hpp"
#include "llmdp/prompts.hpp"

namespace py = pybind11;
using namespace llmdp;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  py::module_ json_mod = py::module_::import("json");
  return json_mod.attr("loads")(j.dump());
}

AgentConfig make_agent_config(const std::string& sampler, int n_samples, uint64_t seed,
                              bool fallback, const std::string& planner, int max_steps) {
  AgentConfig cfg;
  cfg.sampler.strategy = sampler_strategy_from_string(sampler);
  cfg.sampler.n_samples = n_samples;
  cfg.sampler.seed = seed;
  cfg.sampler.fallback_to_random = fallback;
  cfg.planner = planner == "optimal" ? AgentConfig::PlannerStrategy::Optimal
                                     : AgentConfig::PlannerStrategy::Bffs;
  cfg.max_steps = max_steps;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(llmdp, m) {
  m.doc() = "neuro-symbolic household planning agent";

  py::register_exception<Error>(m, "PlanningError");

  // --- PDDL ---------------------------------------------------------------
  py::class_<DomainDef>(m, "DomainDef")
      .def_readonly("name", &DomainDef::name)
      .def_property_readonly("predicates",
                             [](const DomainDef& d) {
                               std::vector<std::pair<std::string, size_t>> out;
                               for (const auto& p : d.predicates)
                                 out.push_back({p.name, p.arity()});
                               return out;
                             })
      .def_property_readonly("action_names",
                             [](const DomainDef& d) {
                               std::vector<std::string> out;
                               for (const auto& a : d.actions) out.push_back(a.name);
                               return out;
                             })
      .def("__eq__", [](const DomainDef& a, const DomainDef& b) { return a == b; })
      .def("__repr__",
           [](const DomainDef& d) { return "<DomainDef " + d.name + ">"; });

  py::class_<GoalFormula>(m, "GoalFormula")
      .def("__str__", [](const GoalFormula& g) { return print_goal(g); })
      .def("__eq__", [](const GoalFormula& a, const GoalFormula& b) { return a == b; });

  py::class_<ProblemDef>(m, "ProblemDef")
      .def_readonly("name", &ProblemDef::name)
      .def_property_readonly("objects",
                             [](const ProblemDef& p) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& o : p.objects)
                                 out.push_back({o.name, o.type_name});
                               return out;
                             })
      .def_property_readonly("init",
                             [](const ProblemDef& p) {
                               std::vector<std::string> out;
                               for (const auto& a : p.init) out.push_back(a.to_string());
                               return out;
                             })
      .def_readonly("goal", &ProblemDef::goal)
      .def("__eq__", [](const ProblemDef& a, const ProblemDef& b) { return a == b; });

  m.def("parse_domain", [](const std::string& text) { return parse_domain(text); });
  m.def("parse_problem", [](const std::string& text, const DomainDef& d) {
    return parse_problem(text, d);
  });
  m.def("parse_goal",
        [](const std::string& text, const DomainDef& d) { return parse_goal(text, d); });
  m.def("validate_goal", &validate_goal);
  m.def("print_domain", &print_domain);
  m.def("print_problem", &print_problem);
  m.def("print_goal", &print_goal);
  m.def("alfred_domain", &alfred_domain, py::return_value_policy::reference);
  m.def("alfred_domain_text", &alfred_domain_text, py::return_value_policy::reference);
  m.def("alfred_predicates_text", &alfred_predicates_text,
        py::return_value_policy::reference);

  // --- grounding + planning ------------------------------------------------
  py::class_<GroundAction>(m, "GroundAction")
      .def_readonly("schema", &GroundAction::schema)
      .def_readonly("args", &GroundAction::args)
      .def("__str__", &GroundAction::to_string)
      .def("__repr__", &GroundAction::to_string);

  py::class_<Plan>(m, "Plan")
      .def_property_readonly("length", &Plan::length)
      .def_readonly("steps", &Plan::steps)
      .def("__str__", &Plan::to_string)
      .def("__len__", &Plan::length);

  py::class_<PlanResult>(m, "PlanResult")
      .def_property_readonly("status",
                             [](const PlanResult& r) { return to_string(r.status); })
      .def_readonly("plan", &PlanResult::plan)
      .def_readonly("expanded", &PlanResult::expanded)
      .def_property_readonly("found", &PlanResult::found);

  py::class_<GroundProblem>(m, "GroundProblem")
      .def_property_readonly("action_count",
                             [](const GroundProblem& gp) { return gp.actions.size(); })
      .def_property_readonly("actions",
                             [](const GroundProblem& gp) { return gp.actions; })
      .def_property_readonly("disjunct_count",
                             [](const GroundProblem& gp) { return gp.goal.disjuncts.size(); })
      .def("initial_state",
           [](const GroundProblem& gp) {
             std::vector<std::string> out;
             for (AtomId id : gp.initial_state) out.push_back(gp.atom_text(id));
             return out;
           })
      .def("goal_satisfied_in_init", [](const GroundProblem& gp) {
        return goal_satisfied(gp.initial_state, gp.goal);
      });

  m.def("ground_problem", &ground_problem);
  m.def(
      "plan",
      [](const GroundProblem& gp, const std::string& strategy, size_t max_nodes,
         double max_seconds) {
        SearchBudget budget;
        budget.max_expanded_nodes = max_nodes;
        budget.max_wall_time =
            std::chrono::milliseconds(static_cast<long>(max_seconds * 1000));
        return strategy == "optimal" ? plan_optimal(gp, gp.initial_state, budget)
                                     : plan_bffs(gp, gp.initial_state, budget);
      },
      py::arg("ground_problem"), py::arg("strategy") = "bffs",
      py::arg("max_nodes") = size_t{100000}, py::arg("max_seconds") = 5.0);
  m.def("validate_plan", [](const GroundProblem& gp, const Plan& plan) {
    PlanValidation v = validate_plan(gp, gp.initial_state, plan);
    return std::make_pair(v.ok, v.reason);
  });

  // --- backends -------------------------------------------------------------
  py::class_<ChatBackend>(m, "ChatBackend")
      .def_property_readonly("total_prompt_tokens", &ChatBackend::total_prompt_tokens)
      .def_property_readonly("total_completion_tokens",
                             &ChatBackend::total_completion_tokens);

  py::class_<ScriptedBackend, ChatBackend>(m, "ScriptedBackend")
      .def(py::init<>())
      .def("add_exact", &ScriptedBackend::add_exact)
      .def("add_prefix", &ScriptedBackend::add_prefix)
      .def("add_wildcard", &ScriptedBackend::add_wildcard)
      .def("complete", [](ScriptedBackend& b, const std::string& prompt) {
        ChatRequest request;
        request.messages.push_back({"user", prompt});
        return b.complete(request).content;
      });

  m.def(
      "translate_goal",
      [](const std::string& task, ChatBackend& backend) {
        TranslationOutcome outcome = translate_goal(task, alfred_domain(), backend);
        return py::make_tuple(outcome.ok, outcome.goal, outcome.error, outcome.attempts);
      },
      py::arg("task"), py::arg("backend"));

  // --- simulator -------------------------------------------------------------
  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def_readonly("seed", &ScenarioSpec::seed)
      .def_property_readonly("family",
                             [](const ScenarioSpec& s) { return to_string(s.task.family); })
      .def_property_readonly("nl_instruction",
                             [](const ScenarioSpec& s) { return s.task.nl_instruction; })
      .def_property_readonly("goal", [](const ScenarioSpec& s) { return s.task.goal(); })
      .def("to_json", [](const ScenarioSpec& s) { return json_to_py(s.to_json()); })
      .def_static("from_json", [](const std::string& text) {
        return ScenarioSpec::from_json(nlohmann::json::parse(text));
      });

  m.def("generate_scenario", [](const std::string& family, uint64_t seed) {
    return generate_scenario(family_from_string(family), seed);
  });

  py::class_<Observation>(m, "Observation")
      .def_readonly("location", &Observation::location)
      .def_readonly("action_feedback", &Observation::action_feedback)
      .def_property_readonly("contents",
                             [](const Observation& o) {
                               std::vector<std::string> out;
                               for (const auto& c : o.contents) out.push_back(c.name);
                               return out;
                             })
      .def("__str__", &Observation::text);

  py::class_<Simulator>(m, "Simulator")
      .def(py::init<ScenarioSpec, bool>(), py::arg("spec"), py::arg("oracle_enabled") = false)
      .def("reset",
           [](Simulator& sim) {
             Simulator::ResetResult r = sim.reset();
             return py::make_tuple(r.observation, r.nl_instruction);
           })
      .def("step",
           [](Simulator& sim, const GroundAction& action) {
             Simulator::StepResult r = sim.step(action);
             return py::make_tuple(r.observation, r.done);
           })
      .def_property_readonly("done", &Simulator::done)
      .def_property_readonly("steps_taken", &Simulator::steps_taken)
      .def("oracle_state", [](const Simulator& sim) {
        std::vector<std::string> out;
        for (const auto& a : sim.oracle_state()) out.push_back(a.to_string());
        return out;
      });

  // --- agent + harness --------------------------------------------------------
  m.def(
      "run_episode",
      [](Simulator& env, ChatBackend& backend, const std::string& sampler, int n_samples,
         uint64_t seed, bool fallback, const std::string& planner, int max_steps) {
        AgentConfig cfg =
            make_agent_config(sampler, n_samples, seed, fallback, planner, max_steps);
        EpisodeTrace trace = run_episode(env, cfg, backend);
        py::dict out;
        out["success"] = trace.success;
        out["steps"] = trace.steps;
        out["failure_reason"] = trace.failure_reason;
        out["task"] = trace.task;
        out["prompt_tokens"] = trace.prompt_tokens();
        out["completion_tokens"] = trace.completion_tokens();
        out["jsonl"] = trace.to_jsonl();
        return out;
      },
      py::arg("env"), py::arg("backend"), py::arg("sampler") = "random",
      py::arg("n_samples") = 3, py::arg("seed") = 0, py::arg("fallback") = true,
      py::arg("planner") = "bffs", py::arg("max_steps") = 50);

  m.def(
      "run_suite",
      [](const std::vector<std::string>& families, int episodes, const std::string& sampler,
         int n_samples, bool fallback, const std::string& planner, uint64_t seed,
         int workers, int max_steps) {
        SuiteConfig config;
        config.families.clear();
        for (const auto& f : families) config.families.push_back(family_from_string(f));
        config.episodes_per_family = episodes;
        config.agent = make_agent_config(sampler, n_samples, seed, fallback, planner,
                                         max_steps);
        config.base_seed = seed;
        config.workers = workers;
        SuiteReport report = run_suite(config);
        return json_to_py(report.to_json());
      },
      py::arg("families") = std::vector<std::string>{"clean", "cool", "examine", "heat",
                                                     "put", "puttwo"},
      py::arg("episodes") = 2, py::arg("sampler") = "random", py::arg("n_samples") = 3,
      py::arg("fallback") = true, py::arg("planner") = "bffs", py::arg("seed") = 7,
      py::arg("workers") = 2, py::arg("max_steps") = 50);
}
