// Command-line front end: `plan` solves a domain/problem file pair, `run`
// executes a seeded episode suite, `ablate` sweeps sampler settings.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "llmdp/harness.hpp"
#include "llmdp/prompts.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_sigint(int) { g_stop.store(true); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    std::exit(64);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::vector<llmdp::TaskFamily> parse_families(const std::string& csv) {
  std::vector<llmdp::TaskFamily> families;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) families.push_back(llmdp::family_from_string(item));
  }
  return families;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"household planning agent"};
  app.require_subcommand(1);

  // --- plan ---------------------------------------------------------------
  auto* plan_cmd = app.add_subcommand("plan", "solve a PDDL domain/problem pair");
  std::string domain_path, problem_path, planner_name = "bffs";
  size_t max_nodes = 100000;
  double max_seconds = 5.0;
  plan_cmd->add_option("domain", domain_path, "domain file")->required();
  plan_cmd->add_option("problem", problem_path, "problem file")->required();
  plan_cmd->add_option("--planner", planner_name, "bffs|optimal (default bffs)");
  plan_cmd->add_option("--max-nodes", max_nodes, "node budget (default 100000)");
  plan_cmd->add_option("--max-seconds", max_seconds, "wall-time budget (default 5)");

  // --- run / ablate shared flags ------------------------------------------
  llmdp::SuiteConfig config;
  std::string families_csv = "clean,cool,examine,heat,put,puttwo";
  std::string sampler_name = "random";
  std::string run_planner = "bffs";
  std::string backend_name = "scripted";
  std::string out_dir;
  bool no_fallback = false;
  bool strict_loop = false;
  bool dump_traces = false;
  std::string n_values_csv = "3,5";

  auto add_shared = [&](CLI::App* cmd) {
    cmd->add_option("--families", families_csv, "comma-separated task families");
    cmd->add_option("--episodes", config.episodes_per_family, "episodes per family");
    cmd->add_option("--n-samples", config.agent.sampler.n_samples, "belief samples per round");
    cmd->add_option("--sampler", sampler_name, "random|oracle|llm");
    cmd->add_flag("--no-fallback", no_fallback, "disable the random resample fallback");
    cmd->add_option("--planner", run_planner, "bffs|optimal");
    cmd->add_option("--backend", backend_name, "scripted|http");
    cmd->add_option("--seed", config.base_seed, "base seed");
    cmd->add_option("--workers", config.workers, "parallel episode workers");
    cmd->add_option("--max-steps", config.agent.max_steps, "episode step budget");
    cmd->add_flag("--strict-loop", strict_loop, "resample after every action");
    cmd->add_option("--out", out_dir, "directory for report files");
    cmd->add_flag("--traces", dump_traces, "also write per-episode JSONL traces");
  };
  auto* run_cmd = app.add_subcommand("run", "run an episode suite and report metrics");
  add_shared(run_cmd);
  auto* ablate_cmd = app.add_subcommand("ablate", "sweep sampler sizes and fallback");
  add_shared(ablate_cmd);
  ablate_cmd->add_option("--n", n_values_csv, "comma-separated sample counts");

  CLI11_PARSE(app, argc, argv);

  if (plan_cmd->parsed()) {
    llmdp::DomainDef domain;
    llmdp::ProblemDef problem;
    llmdp::GroundProblem gp;
    try {
      domain = llmdp::parse_domain(read_file(domain_path));
      problem = llmdp::parse_problem(read_file(problem_path), domain);
      gp = llmdp::ground_problem(domain, problem);
    } catch (const llmdp::Error& e) {
      std::cerr << e.what() << "\n";
      return 64;
    }
    llmdp::SearchBudget budget;
    budget.max_expanded_nodes = max_nodes;
    budget.max_wall_time =
        std::chrono::milliseconds(static_cast<long>(max_seconds * 1000));
    llmdp::PlanResult result = planner_name == "optimal"
                                   ? llmdp::plan_optimal(gp, gp.initial_state, budget)
                                   : llmdp::plan_bffs(gp, gp.initial_state, budget);
    switch (result.status) {
      case llmdp::PlanStatus::Found:
        std::cout << result.plan.to_string();
        return 0;
      case llmdp::PlanStatus::Unsolvable:
        std::cerr << "unsolvable\n";
        return 1;
      case llmdp::PlanStatus::BudgetExhausted:
        std::cerr << "budget exhausted after " << result.expanded << " nodes\n";
        return 2;
    }
    return 0;
  }

  // shared config materialization
  config.families = parse_families(families_csv);
  config.agent.sampler.strategy = llmdp::sampler_strategy_from_string(sampler_name);
  config.agent.sampler.fallback_to_random = !no_fallback;
  config.agent.planner = run_planner == "optimal"
                             ? llmdp::AgentConfig::PlannerStrategy::Optimal
                             : llmdp::AgentConfig::PlannerStrategy::Bffs;
  config.agent.resample_every_step = strict_loop;
  config.backend =
      backend_name == "http" ? llmdp::BackendKind::Http : llmdp::BackendKind::Scripted;

  std::signal(SIGINT, handle_sigint);
  std::filesystem::path out(out_dir);
  if (!out_dir.empty()) std::filesystem::create_directories(out);

  if (run_cmd->parsed()) {
    std::vector<std::string> traces;
    llmdp::SuiteReport report =
        llmdp::run_suite(config, nullptr, &g_stop, dump_traces ? &traces : nullptr);
    std::cout << report.to_text();
    if (!out_dir.empty()) {
      write_file(out / "report.txt", report.to_text());
      write_file(out / "report.json", report.to_json().dump(2) + "\n");
      write_file(out / "report.csv", report.to_csv());
      if (dump_traces) {
        std::string all;
        for (const auto& t : traces) all += t;
        write_file(out / "traces.jsonl", all);
      }
    }
    return 0;
  }

  if (ablate_cmd->parsed()) {
    std::vector<int> n_values;
    std::stringstream ss(n_values_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) n_values.push_back(std::stoi(item));
    }
    llmdp::AblationReport report =
        llmdp::ablate(config, n_values, {true, false}, nullptr, &g_stop);
    std::cout << report.to_text();
    if (!out_dir.empty()) {
      write_file(out / "ablation.txt", report.to_text());
      write_file(out / "ablation.json", report.to_json().dump(2) + "\n");
      write_file(out / "ablation.csv", report.to_csv());
    }
    return 0;
  }
  return 0;
}
