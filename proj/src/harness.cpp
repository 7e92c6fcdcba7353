#include "llmdp/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <thread>

#include "llmdp/prompts.hpp"
#include "llmdp/rng.hpp"

namespace llmdp {

using nlohmann::json;

uint64_t episode_seed(uint64_t base_seed, TaskFamily family, int index) {
  return mix_seed(base_seed, static_cast<uint64_t>(family) + 1,
                  static_cast<uint64_t>(index) + 1);
}

void FamilyStats::absorb(const EpisodeSummary& e) {
  ++episodes;
  steps_all += e.steps;
  if (e.success) {
    ++successes;
    steps_successes += e.steps;
  }
  prompt_tokens += e.prompt_tokens;
  completion_tokens += e.completion_tokens;
}

void add_scripted_fixtures(const SuiteConfig& config, ScriptedBackend& backend) {
  for (TaskFamily family : config.families) {
    for (int i = 0; i < config.episodes_per_family; ++i) {
      ScenarioSpec spec = generate_scenario(family, episode_seed(config.base_seed, family, i));
      backend.add_exact("Your task is to: " + spec.task.nl_instruction,
                        print_goal(spec.task.goal()));
    }
  }
  backend.add_prefix("Known world state:", "unknown");
}

namespace {

struct Job {
  TaskFamily family;
  int index;
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

SuiteReport run_suite(const SuiteConfig& config, ChatBackend* backend,
                      const std::atomic<bool>* stop, std::vector<std::string>* traces) {
  SuiteReport report;
  report.config = config;

  ScriptedBackend scripted;
  std::unique_ptr<HttpBackend> http;
  if (backend == nullptr) {
    if (config.backend == BackendKind::Scripted) {
      add_scripted_fixtures(config, scripted);
      backend = &scripted;
    } else {
      http = std::make_unique<HttpBackend>(HttpBackend::config_from_env());
      backend = http.get();
    }
  }

  std::vector<Job> jobs;
  for (TaskFamily family : config.families) {
    for (int i = 0; i < config.episodes_per_family; ++i) jobs.push_back({family, i});
  }
  std::vector<EpisodeSummary> summaries(jobs.size());
  std::vector<char> completed(jobs.size(), 0);
  if (traces != nullptr) traces->assign(jobs.size(), "");

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      if (stop != nullptr && stop->load()) return;
      size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      uint64_t seed = episode_seed(config.base_seed, job.family, job.index);
      EpisodeSummary summary;
      summary.family = job.family;
      summary.index = job.index;
      summary.seed = seed;
      try {
        ScenarioSpec spec = generate_scenario(job.family, seed);
        Simulator env(std::move(spec),
                      config.agent.sampler.strategy == SamplerStrategy::Oracle);
        AgentConfig agent_cfg = config.agent;
        agent_cfg.sampler.seed = seed;
        EpisodeTrace trace = run_episode(env, agent_cfg, *backend);
        summary.success = trace.success;
        summary.steps = trace.steps;
        summary.prompt_tokens = trace.prompt_tokens();
        summary.completion_tokens = trace.completion_tokens();
        summary.failure_reason = trace.failure_reason;
        summary.task = trace.task;
        if (traces != nullptr) (*traces)[i] = trace.to_jsonl();
      } catch (const std::exception& e) {
        summary.success = false;
        summary.failure_reason = std::string("exception: ") + e.what();
      }
      summaries[i] = std::move(summary);
      completed[i] = 1;
    }
  };

  int n_workers = std::max(1, std::min<int>(config.workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  report.interrupted = stop != nullptr && stop->load();
  for (TaskFamily family : config.families) report.per_family.push_back({family, {}});
  for (size_t i = 0; i < jobs.size(); ++i) {
    if (!completed[i]) continue;  // interrupt: flush what finished
    report.episodes.push_back(summaries[i]);
    report.overall.absorb(summaries[i]);
    for (auto& [family, stats] : report.per_family) {
      if (family == jobs[i].family) stats.absorb(summaries[i]);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report emission

std::string SuiteReport::to_text() const {
  std::string out;
  out += "suite report (episode-length averages are over successful episodes)\n";
  out += "sampler=" + std::string(to_string(config.agent.sampler.strategy)) +
         " n=" + std::to_string(config.agent.sampler.n_samples) +
         " fallback=" + (config.agent.sampler.fallback_to_random ? "on" : "off") +
         " planner=" +
         (config.agent.planner == AgentConfig::PlannerStrategy::Bffs ? "bffs" : "optimal") +
         " seed=" + std::to_string(config.base_seed) + "\n";
  if (interrupted) out += "NOTE: interrupted, partial results\n";

  auto row = [&](const std::string& label, const std::function<std::string(const FamilyStats&)>& cell) {
    std::string line = label;
    line.resize(20, ' ');
    for (const auto& [family, stats] : per_family) {
      std::string v = cell(stats);
      line += ' ';
      line.insert(line.end(), v.size() < 9 ? 9 - v.size() : 0, ' ');
      line += v;
    }
    std::string v = cell(overall);
    line += " |";
    line.insert(line.end(), v.size() < 9 ? 9 - v.size() : 0, ' ');
    line += v;
    return line + "\n";
  };

  std::string header = "metric";
  header.resize(20, ' ');
  for (const auto& [family, _] : per_family) {
    std::string name = to_string(family);
    header += ' ';
    header.insert(header.end(), name.size() < 9 ? 9 - name.size() : 0, ' ');
    header += name;
  }
  header += " |  overall";
  out += header + "\n";
  out += row("episodes", [](const FamilyStats& s) { return std::to_string(s.episodes); });
  out += row("success_rate",
             [](const FamilyStats& s) { return format_double(s.success_rate()); });
  out += row("avg_episode_length",
             [](const FamilyStats& s) { return format_double(s.mean_length_successes()); });
  out += row("total_tokens", [](const FamilyStats& s) { return std::to_string(s.tokens()); });
  return out;
}

static json stats_json(const FamilyStats& s) {
  return {{"episodes", s.episodes},
          {"successes", s.successes},
          {"success_rate", s.success_rate()},
          {"avg_episode_length_successes", s.mean_length_successes()},
          {"avg_episode_length_all", s.mean_length_all()},
          {"prompt_tokens", s.prompt_tokens},
          {"completion_tokens", s.completion_tokens},
          {"total_tokens", s.tokens()}};
}

json SuiteReport::to_json() const {
  json j;
  j["config"] = {{"sampler", std::string(to_string(config.agent.sampler.strategy))},
                 {"n_samples", config.agent.sampler.n_samples},
                 {"fallback", config.agent.sampler.fallback_to_random},
                 {"planner", config.agent.planner == AgentConfig::PlannerStrategy::Bffs
                                 ? "bffs"
                                 : "optimal"},
                 {"max_steps", config.agent.max_steps},
                 {"base_seed", config.base_seed},
                 {"episodes_per_family", config.episodes_per_family}};
  j["interrupted"] = interrupted;
  j["families"] = json::object();
  for (const auto& [family, stats] : per_family) {
    j["families"][to_string(family)] = stats_json(stats);
  }
  j["overall"] = stats_json(overall);
  j["episodes"] = json::array();
  for (const auto& e : episodes) {
    j["episodes"].push_back({{"family", std::string(to_string(e.family))},
                             {"index", e.index},
                             {"seed", e.seed},
                             {"success", e.success},
                             {"steps", e.steps},
                             {"prompt_tokens", e.prompt_tokens},
                             {"completion_tokens", e.completion_tokens},
                             {"failure_reason", e.failure_reason},
                             {"task", e.task}});
  }
  return j;
}

std::string SuiteReport::to_csv() const {
  std::string out =
      "family,episodes,successes,success_rate,avg_episode_length_successes,"
      "avg_episode_length_all,prompt_tokens,completion_tokens,total_tokens\n";
  auto line = [&](const std::string& name, const FamilyStats& s) {
    out += name + ',' + std::to_string(s.episodes) + ',' + std::to_string(s.successes) + ',' +
           format_double(s.success_rate()) + ',' + format_double(s.mean_length_successes()) +
           ',' + format_double(s.mean_length_all()) + ',' + std::to_string(s.prompt_tokens) +
           ',' + std::to_string(s.completion_tokens) + ',' + std::to_string(s.tokens()) + '\n';
  };
  for (const auto& [family, stats] : per_family) line(to_string(family), stats);
  line("overall", overall);
  return out;
}

// ---------------------------------------------------------------------------
// Ablation

AblationReport ablate(const SuiteConfig& base, const std::vector<int>& n_values,
                      const std::vector<bool>& fallback_flags, ChatBackend* backend,
                      const std::atomic<bool>* stop) {
  AblationReport report;
  for (int n : n_values) {
    for (bool fallback : fallback_flags) {
      SuiteConfig config = base;
      config.agent.sampler.n_samples = n;
      config.agent.sampler.fallback_to_random = fallback;
      AblationRow row;
      row.label = "LLM-DP (n=" + std::to_string(n) + ")" + (fallback ? "" : " - fallback");
      row.n_samples = n;
      row.fallback = fallback;
      row.report = run_suite(config, backend, stop);
      row.success_rate = row.report.overall.success_rate();
      row.mean_episode_length = row.report.overall.mean_length_successes();
      report.rows.push_back(std::move(row));
      if (stop != nullptr && stop->load()) return report;
    }
  }
  return report;
}

std::string AblationReport::to_text() const {
  std::string out = "ablation report (SR = success rate, EL = avg episode length)\n";
  for (const auto& row : rows) {
    std::string label = row.label;
    label.resize(28, ' ');
    out += label + " SR " + format_double(row.success_rate) + "  EL " +
           format_double(row.mean_episode_length) + "\n";
  }
  return out;
}

json AblationReport::to_json() const {
  json j = json::array();
  for (const auto& row : rows) {
    j.push_back({{"label", row.label},
                 {"n_samples", row.n_samples},
                 {"fallback", row.fallback},
                 {"success_rate", row.success_rate},
                 {"avg_episode_length", row.mean_episode_length}});
  }
  return j;
}

std::string AblationReport::to_csv() const {
  std::string out = "label,n_samples,fallback,success_rate,avg_episode_length\n";
  for (const auto& row : rows) {
    out += row.label + ',' + std::to_string(row.n_samples) + ',' +
           (row.fallback ? "on" : "off") + ',' + format_double(row.success_rate) + ',' +
           format_double(row.mean_episode_length) + '\n';
  }
  return out;
}

}  // namespace llmdp
