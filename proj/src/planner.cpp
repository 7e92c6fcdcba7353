#include "llmdp/planner.hpp"

#include <deque>
#include <queue>
#include <unordered_set>

namespace llmdp {

const char* to_string(PlanStatus status) {
  switch (status) {
    case PlanStatus::Found: return "Found";
    case PlanStatus::Unsolvable: return "Unsolvable";
    case PlanStatus::BudgetExhausted: return "BudgetExhausted";
  }
  return "?";
}

std::string Plan::to_string() const {
  std::string out;
  for (const auto& step : steps) {
    out += step.to_string();
    out += '\n';
  }
  return out;
}

namespace {

struct Node {
  State state;
  int32_t parent;   // index into arena, -1 for root
  int32_t action;   // index into problem.actions
};

// Nodes live in a deque so references stay valid while the closed set keeps
// indices into it.
struct ClosedSet {
  const std::deque<Node>* arena;
  struct Hash {
    const std::deque<Node>* arena;
    size_t operator()(int32_t i) const { return StateHash{}((*arena)[i].state); }
  };
  struct Eq {
    const std::deque<Node>* arena;
    bool operator()(int32_t a, int32_t b) const {
      return (*arena)[a].state == (*arena)[b].state;
    }
  };
  std::unordered_set<int32_t, Hash, Eq> set;

  explicit ClosedSet(const std::deque<Node>* a)
      : arena(a), set(64, Hash{a}, Eq{a}) {}
  bool insert(int32_t i) { return set.insert(i).second; }
};

// Buckets actions by their rarest positive precondition atom, so expansion
// only probes actions whose pivot holds in the state. Candidates come back
// sorted by action index, so the generation order is identical to a full
// scan over the action list.
class ActionIndex {
 public:
  explicit ActionIndex(const GroundProblem& problem) {
    std::unordered_map<AtomId, uint32_t> counts;
    for (const auto& a : problem.actions) {
      for (AtomId id : a.pre_pos) ++counts[id];
    }
    for (uint32_t i = 0; i < problem.actions.size(); ++i) {
      const auto& pre = problem.actions[i].pre_pos;
      if (pre.empty()) {
        always_.push_back(i);
        continue;
      }
      AtomId pivot = pre[0];
      for (AtomId id : pre) {
        if (counts[id] < counts[pivot]) pivot = id;
      }
      buckets_[pivot].push_back(i);
    }
  }

  void candidates(const State& s, std::vector<uint32_t>& out) const {
    out = always_;
    for (AtomId id : s) {
      auto it = buckets_.find(id);
      if (it != buckets_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
  }

 private:
  std::vector<uint32_t> always_;
  std::unordered_map<AtomId, std::vector<uint32_t>> buckets_;
};

Plan extract_plan(const GroundProblem& problem, const std::deque<Node>& arena, int32_t leaf) {
  std::vector<int32_t> actions;
  for (int32_t i = leaf; arena[i].parent >= 0; i = arena[i].parent) {
    actions.push_back(arena[i].action);
  }
  Plan plan;
  plan.steps.reserve(actions.size());
  for (auto it = actions.rbegin(); it != actions.rend(); ++it) {
    plan.steps.push_back(problem.actions[*it]);
  }
  return plan;
}

struct Deadline {
  std::chrono::steady_clock::time_point end;
  explicit Deadline(std::chrono::milliseconds d)
      : end(std::chrono::steady_clock::now() + d) {}
  bool expired() const { return std::chrono::steady_clock::now() >= end; }
};

}  // namespace

PlanResult plan_optimal(const GroundProblem& problem, const State& init,
                        const SearchBudget& budget) {
  PlanResult result;
  if (goal_satisfied(init, problem.goal)) {
    result.status = PlanStatus::Found;
    return result;
  }
  std::deque<Node> arena;
  arena.push_back({init, -1, -1});
  ClosedSet closed(&arena);
  closed.insert(0);
  std::queue<int32_t> open;
  open.push(0);
  Deadline deadline(budget.max_wall_time);
  ActionIndex index(problem);
  std::vector<uint32_t> candidate_actions;

  while (!open.empty()) {
    if (result.expanded >= budget.max_expanded_nodes ||
        (result.expanded % 256 == 0 && deadline.expired())) {
      result.status = PlanStatus::BudgetExhausted;
      return result;
    }
    int32_t cur = open.front();
    open.pop();
    ++result.expanded;
    index.candidates(arena[cur].state, candidate_actions);
    for (uint32_t ai : candidate_actions) {
      const GroundAction& a = problem.actions[ai];
      if (!applicable(arena[cur].state, a)) continue;
      Node next{apply_action(arena[cur].state, a), cur, static_cast<int32_t>(ai)};
      int32_t idx = static_cast<int32_t>(arena.size());
      arena.push_back(std::move(next));
      if (!closed.insert(idx)) {
        arena.pop_back();
        continue;
      }
      if (goal_satisfied(arena[idx].state, problem.goal)) {
        result.status = PlanStatus::Found;
        result.plan = extract_plan(problem, arena, idx);
        return result;
      }
      open.push(idx);
    }
  }
  result.status = PlanStatus::Unsolvable;
  return result;
}

namespace {

// Width-2 novelty tables: rank 1 for a state containing an atom never seen
// before, 2 for a new atom pair, 3 otherwise.
class NoveltyTables {
 public:
  explicit NoveltyTables(size_t atom_count) : seen_atom_(atom_count, 0) {}

  uint8_t rank_and_record(const State& s) {
    uint8_t rank = 3;
    for (AtomId id : s) {
      if (!seen_atom_[id]) {
        seen_atom_[id] = 1;
        rank = 1;
      }
    }
    for (size_t i = 0; i < s.size(); ++i) {
      for (size_t j = i + 1; j < s.size(); ++j) {
        uint64_t key = (static_cast<uint64_t>(s[i]) << 32) | s[j];
        if (seen_pair_.insert(key).second && rank > 2) rank = 2;
      }
    }
    return rank;
  }

 private:
  std::vector<char> seen_atom_;
  std::unordered_set<uint64_t> seen_pair_;
};

uint32_t goal_count(const State& s, const GroundGoal& goal) {
  uint32_t best = UINT32_MAX;
  for (const auto& d : goal.disjuncts) {
    uint32_t missing = 0;
    for (AtomId id : d) {
      if (!state_contains(s, id)) ++missing;
    }
    if (missing < best) best = missing;
  }
  return best;
}

struct QueueEntry {
  uint8_t novelty;
  uint32_t h;
  uint64_t seq;
  int32_t node;
  bool operator>(const QueueEntry& o) const {
    if (novelty != o.novelty) return novelty > o.novelty;
    if (h != o.h) return h > o.h;
    return seq > o.seq;
  }
};

}  // namespace

PlanResult plan_bffs(const GroundProblem& problem, const State& init,
                     const SearchBudget& budget) {
  PlanResult result;
  if (goal_satisfied(init, problem.goal)) {
    result.status = PlanStatus::Found;
    return result;
  }
  std::deque<Node> arena;
  arena.push_back({init, -1, -1});
  ClosedSet closed(&arena);
  closed.insert(0);
  NoveltyTables novelty(problem.atom_count());
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> open;
  uint64_t seq = 0;
  open.push({novelty.rank_and_record(init), goal_count(init, problem.goal), seq++, 0});
  Deadline deadline(budget.max_wall_time);
  ActionIndex index(problem);
  std::vector<uint32_t> candidate_actions;

  while (!open.empty()) {
    if (result.expanded >= budget.max_expanded_nodes ||
        (result.expanded % 256 == 0 && deadline.expired())) {
      result.status = PlanStatus::BudgetExhausted;
      return result;
    }
    int32_t cur = open.top().node;
    open.pop();
    ++result.expanded;
    index.candidates(arena[cur].state, candidate_actions);
    for (uint32_t ai : candidate_actions) {
      const GroundAction& a = problem.actions[ai];
      if (!applicable(arena[cur].state, a)) continue;
      Node next{apply_action(arena[cur].state, a), cur, static_cast<int32_t>(ai)};
      int32_t idx = static_cast<int32_t>(arena.size());
      arena.push_back(std::move(next));
      if (!closed.insert(idx)) {
        arena.pop_back();
        continue;
      }
      const State& ns = arena[idx].state;
      if (goal_satisfied(ns, problem.goal)) {
        result.status = PlanStatus::Found;
        result.plan = extract_plan(problem, arena, idx);
        return result;
      }
      open.push({novelty.rank_and_record(ns), goal_count(ns, problem.goal), seq++, idx});
    }
  }
  result.status = PlanStatus::Unsolvable;
  return result;
}

PlanValidation validate_plan(const GroundProblem& problem, const State& init, const Plan& plan) {
  State s = init;
  for (size_t i = 0; i < plan.steps.size(); ++i) {
    if (!applicable(s, plan.steps[i])) {
      return {false, static_cast<int>(i),
              "step " + std::to_string(i) + " " + plan.steps[i].to_string() +
                  " is not applicable"};
    }
    s = apply_action(s, plan.steps[i]);
  }
  if (!goal_satisfied(s, problem.goal)) {
    return {false, -1, "final state does not satisfy the goal"};
  }
  return {true, -1, ""};
}

}  // namespace llmdp
