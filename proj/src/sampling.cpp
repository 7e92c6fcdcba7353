#include "llmdp/sampling.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>

#include "llmdp/rng.hpp"

namespace llmdp {

const char* to_string(SamplerStrategy strategy) {
  switch (strategy) {
    case SamplerStrategy::Random: return "random";
    case SamplerStrategy::Oracle: return "oracle";
    case SamplerStrategy::Llm: return "llm";
  }
  return "?";
}

SamplerStrategy sampler_strategy_from_string(const std::string& name) {
  if (name == "random") return SamplerStrategy::Random;
  if (name == "oracle") return SamplerStrategy::Oracle;
  if (name == "llm") return SamplerStrategy::Llm;
  raise(ErrorKind::MalformedExpression, "unknown sampler strategy '" + name + "'");
}

std::set<Atom> assignment_atoms(const Assignment& a) {
  std::set<Atom> out;
  for (const auto& [_, atom] : a) out.insert(atom);
  return out;
}

namespace {

Assignment random_assignment(const BeliefSet& b, uint64_t sub_seed) {
  SplitMix rng(sub_seed);
  Assignment out;
  for (const auto& [obj, slot] : b.slots) {
    out[obj] = slot.candidates[rng.below(slot.candidates.size())];
  }
  return out;
}

// Candidate receptacle cost for the oracle mapping: fetching from a closed
// openable receptacle needs one extra open action.
bool location_closed(const OracleInfo& oracle, const std::string& receptacle) {
  return oracle.atoms.count({"openable", {receptacle}}) > 0 &&
         oracle.atoms.count({"opened", {receptacle}}) == 0;
}

std::string true_location(const OracleInfo& oracle, const std::string& object) {
  for (const auto& a : oracle.atoms) {
    if (a.predicate == "inReceptacle" && a.args[0] == object) return a.args[1];
  }
  return {};
}

// Maps each type's hypothetical slots to distinct unobserved real objects,
// minimizing the number of distinct closed receptacles the plan must open;
// ties break toward lexicographically smaller object sets.
Assignment oracle_assignment(const WorldModel& w, const BeliefSet& b,
                             const OracleInfo& oracle, uint64_t fallback_seed) {
  Assignment out;
  SplitMix fallback_rng(fallback_seed);

  std::map<std::string, std::vector<std::string>> slots_by_type;
  for (const auto& [obj, slot] : b.slots) {
    auto it = w.objects.find(obj);
    std::string type = it != w.objects.end() ? it->second.type : std::string();
    slots_by_type[type].push_back(obj);
  }

  for (auto& [type, slot_objects] : slots_by_type) {
    std::sort(slot_objects.begin(), slot_objects.end());
    std::vector<std::string> reals;
    for (const auto& [name, obj_type] : oracle.object_types) {
      if (obj_type != type || w.objects.count(name) > 0) continue;
      if (true_location(oracle, name).empty()) continue;  // held or absent
      reals.push_back(name);
    }
    std::sort(reals.begin(), reals.end());

    const size_t k = slot_objects.size();
    std::vector<std::string> chosen;
    if (reals.size() >= k) {
      // lexicographic combinations of size k
      std::vector<size_t> idx(k);
      for (size_t i = 0; i < k; ++i) idx[i] = i;
      auto advance = [&]() -> bool {
        for (size_t i = k; i-- > 0;) {
          if (idx[i] < reals.size() - k + i) {
            ++idx[i];
            for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
          }
        }
        return false;
      };
      size_t best_cost = SIZE_MAX;
      do {
        std::set<std::string> closed;
        std::vector<std::string> subset;
        for (size_t i : idx) {
          subset.push_back(reals[i]);
          std::string loc = true_location(oracle, reals[i]);
          if (location_closed(oracle, loc)) closed.insert(loc);
        }
        if (closed.size() < best_cost) {
          best_cost = closed.size();
          chosen = subset;
        }
      } while (advance());
    }

    for (size_t i = 0; i < slot_objects.size(); ++i) {
      const BeliefSlot& slot = b.slots.at(slot_objects[i]);
      Atom pick;
      if (i < chosen.size()) {
        std::string loc = true_location(oracle, chosen[i]);
        Atom candidate{"inReceptacle", {slot_objects[i], loc}};
        if (std::find(slot.candidates.begin(), slot.candidates.end(), candidate) !=
            slot.candidates.end()) {
          pick = candidate;
        }
      }
      if (pick.predicate.empty()) {
        pick = slot.candidates[fallback_rng.below(slot.candidates.size())];
      }
      out[slot_objects[i]] = pick;
    }
  }
  return out;
}

std::optional<Atom> parse_llm_choice(const std::string& reply, const BeliefSlot& slot) {
  // Earliest candidate name contained in the reply wins; longer names break
  // position ties so drawer-12 is not shadowed by drawer-1.
  size_t best_pos = std::string::npos;
  size_t best_len = 0;
  const Atom* best = nullptr;
  for (const auto& candidate : slot.candidates) {
    const std::string& option = candidate.args[1];
    size_t pos = reply.find(option);
    if (pos == std::string::npos) continue;
    if (pos < best_pos || (pos == best_pos && option.size() > best_len)) {
      best_pos = pos;
      best_len = option.size();
      best = &candidate;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

Assignment llm_assignment(const WorldModel& w, const BeliefSet& b, const SampleContext& ctx,
                          uint64_t fallback_seed) {
  if (ctx.backend == nullptr) {
    raise(ErrorKind::BackendUnavailable, "llm sampler has no backend configured");
  }
  SplitMix fallback_rng(fallback_seed);
  Assignment out;
  for (const auto& [obj, slot] : b.slots) {
    ChatRequest request;
    request.messages.push_back({"user", sampler_prompt(w, slot)});
    ChatResponse response = ctx.backend->complete(request);
    if (ctx.recorder != nullptr) ctx.recorder->record("sampler", request, response);
    auto choice = parse_llm_choice(response.content, slot);
    out[obj] = choice ? *choice
                      : slot.candidates[fallback_rng.below(slot.candidates.size())];
  }
  return out;
}

}  // namespace

std::string sampler_prompt(const WorldModel& w, const BeliefSlot& slot) {
  std::string prompt = "Known world state:\n";
  for (const auto& atom : w.known_true) {
    prompt += atom.to_string();
    prompt += '\n';
  }
  prompt += "The location of " + slot.object + " is unknown. Belief: (" + slot.predicate +
            " " + slot.object + " ?x)\n";
  prompt += "Options for ?x:";
  for (size_t i = 0; i < slot.candidates.size(); ++i) {
    prompt += (i == 0 ? " " : ", ") + slot.candidates[i].args[1];
  }
  prompt += "\nReply with the single most likely option.";
  return prompt;
}

std::vector<Assignment> sample(const WorldModel& w, const BeliefSet& b,
                               const SamplerConfig& cfg, const SampleContext& ctx) {
  if (cfg.n_samples < 1) {
    raise(ErrorKind::MalformedExpression, "n_samples must be at least 1");
  }
  std::vector<Assignment> out;
  out.reserve(cfg.n_samples);
  if (b.empty()) {
    out.assign(cfg.n_samples, Assignment{});
    return out;
  }
  for (int i = 0; i < cfg.n_samples; ++i) {
    uint64_t sub_seed = mix_seed(cfg.seed, ctx.round, static_cast<uint64_t>(i));
    switch (cfg.strategy) {
      case SamplerStrategy::Random:
        out.push_back(random_assignment(b, sub_seed));
        break;
      case SamplerStrategy::Oracle: {
        if (ctx.oracle == nullptr) {
          raise(ErrorKind::OracleDisabled, "oracle sampler needs simulator ground truth");
        }
        out.push_back(oracle_assignment(w, b, *ctx.oracle, sub_seed));
        break;
      }
      case SamplerStrategy::Llm:
        out.push_back(llm_assignment(w, b, ctx, sub_seed));
        break;
    }
  }
  return out;
}

ScreenResult dedupe_and_screen(const std::vector<Assignment>& assignments,
                               const WorldModel& w, const GroundProblem& gp) {
  ScreenResult result;
  std::set<std::set<Atom>> seen;
  for (size_t i = 0; i < assignments.size(); ++i) {
    std::set<Atom> atoms = assignment_atoms(assignments[i]);
    if (!seen.insert(atoms).second) continue;
    result.usable.push_back(static_cast<int>(i));
    std::set<Atom> init = w.known_true;
    init.insert(atoms.begin(), atoms.end());
    if (!goal_satisfied(gp.intern_state(init), gp.goal)) {
      result.all_satisfied = false;
    }
  }
  return result;
}

}  // namespace llmdp
