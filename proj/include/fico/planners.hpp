#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fico/conflict_engine.hpp"
#include "fico/heuristics.hpp"
#include "fico/parallel.hpp"
#include "fico/system_model.hpp"

namespace fico {

struct PlannerConfig {
  int horizon = 3;
  // Conflict-free agents pulled in per congestion-resolution round.
  int batch_size = 10;
  bool hindrance = true;
  // Count-weighted (true) or uniform (false) tie-breaking among equally short moves.
  bool balanced = true;
  std::uint64_t seed = 0;
  // Worker count; 0 means every hardware thread.
  int threads = 1;
  // Reuse the tail of a conflict-free agent's trajectory as its next proposal.
  bool cache_plans = true;
  // Treat every agent as conflicting (fallback path, used by tests).
  bool force_all_conflicting = false;

  void validate() const;
};

// Agents in descending priority.
struct PriorityOrder {
  std::vector<AgentId> order;
};

// Steps since each agent last stood on its goal; 0 on first sight and
// whenever the agent is at its goal.
class PriorityTracker {
 public:
  void observe(const State& state, const Instance& instance);
  std::span<const std::int64_t> elapsed() const noexcept { return elapsed_; }

 private:
  std::vector<std::int64_t> elapsed_;
  std::vector<std::int32_t> goal_index_;
};

// Lexicographic: elapsed descending, distance-to-goal descending, id ascending.
PriorityOrder priorities_computation(std::span<const AgentId> group, std::span<const std::int64_t> elapsed,
                                     std::span<const std::int32_t> distance);

// Fills every agent's goal context deep enough that all distance/count
// lookups within `horizon` steps of its position are pure reads. Throws
// Unsolvable for an unreachable goal.
void prepare_heuristics(HeuristicCache& cache, const Instance& instance, const State& state, int horizon,
                        Executor& executor);

// Contexts per agent id; requires prepare_heuristics.
std::vector<const GoalContext*> agent_contexts(const HeuristicCache& cache, const Instance& instance);

// Each agent follows count-weighted shortest-path sampling for `horizon`
// steps, waiting once at its goal. Agent a at step t draws from the stream
// (seed, t, a).
PlanSet individual_plan(std::span<const GoalContext* const> contexts, const State& state, int horizon,
                        bool balanced, std::uint64_t seed, Timestep t, Executor& executor);

// Constraints imposed by finalized trajectories on one transition tau -> tau + 1.
struct BlockedConstraints {
  const SpaceTimeHash* finalized = nullptr;
  int tau = 0;

  bool vertex_blocked(Vertex v) const noexcept { return finalized && finalized->occupied(v, tau + 1); }
  bool edge_blocked(Vertex from, Vertex to) const noexcept {
    return finalized && finalized->has_edge(to, from, tau);
  }
};

struct PibtOptions {
  bool hindrance = true;
  bool balanced = true;
  std::uint64_t seed = 0;
  Timestep t = 0;
};

// One PIBT transition for `group`, visiting agents in the order of
// `priorities` (which must list exactly the group). `positions` is aligned
// with `group`. Returns next vertices aligned with `group`, or nullopt when
// some agent has no vertex compatible with `blocked`.
//
// Candidates are ordered by distance to goal, then hindrance (when enabled),
// then a count-weighted random key drawn from stream (seed, t, agent, tau).
std::optional<std::vector<Vertex>> pibt_step(const GridGraph& graph, std::span<const AgentId> group,
                                             std::span<const Vertex> positions, const PriorityOrder& priorities,
                                             std::span<const GoalContext* const> contexts,
                                             const BlockedConstraints& blocked, const PibtOptions& options);

// Number of agents standing on a neighbor of `v` for which `v` is one step
// closer to their goal. `occupant_at(w)` returns the agent on w or kNoAgent.
template <class Occupant>
int hindrance_score(const GridGraph& graph, AgentId self, Vertex v, std::span<const GoalContext* const> contexts,
                    Occupant&& occupant_at) {
  int score = 0;
  for (Vertex w : graph.neighbors(v)) {
    const AgentId b = occupant_at(w);
    if (b == kNoAgent || b == self) continue;
    const auto dw = contexts[b]->peek_distance(w);
    if (dw != kUnreachable && dw > 0 && contexts[b]->peek_distance(v) == dw - 1) ++score;
  }
  return score;
}

struct GroupPlanResult {
  // Trajectories aligned with the group, each of length horizon + 1; empty on failure.
  std::vector<std::vector<Vertex>> paths;
  bool ok() const noexcept { return !paths.empty(); }
};

// Rolls pibt_step forward for tau = 0..horizon-1 against the finalized
// trajectories.
// `positions` is aligned with `group`.
GroupPlanResult replan_group(const GridGraph& graph, std::span<const AgentId> group, std::span<const Vertex> positions,
                             const PriorityOrder& priorities, std::span<const GoalContext* const> contexts,
                             const SpaceTimeHash& finalized, int horizon, const PibtOptions& options);

// The `batch_size` conflict-free agents closest (graph distance) to any
// conflicting agent, ties by id. All of them when fewer remain. `positions`
// is indexed by agent id.
std::vector<AgentId> congestion_resolution(const GridGraph& graph, std::span<const AgentId> conflicting,
                                           std::span<const AgentId> conflict_free, std::span<const Vertex> positions,
                                           int batch_size);

struct FicoStepStats {
  std::size_t agents = 0;
  // First-level partition, before any congestion resolution.
  std::size_t initial_conflict_free = 0;
  std::size_t final_conflict_free = 0;
  std::size_t groups = 0;
  std::size_t enlargements = 0;
  std::size_t largest_group = 0;
};

// Cross-step controller memory: heuristic contexts, priorities, cached plans.
class PlannerMemory {
 public:
  PlannerMemory(const GridGraph& graph, int threads);

  HeuristicCache& heuristics() noexcept { return heuristics_; }
  PriorityTracker& priorities() noexcept { return priorities_; }
  Executor& executor() noexcept { return executor_; }

  // Cached trajectories of last step's conflict-free agents.
  std::vector<std::vector<Vertex>> cached_paths;
  std::vector<Vertex> cached_goals;

 private:
  HeuristicCache heuristics_;
  PriorityTracker priorities_;
  Executor executor_;
};

Movement fico_step(const Instance& instance, const State& state, const PlannerConfig& config, Timestep t,
                   PlannerMemory& memory, FicoStepStats* stats = nullptr);

// Global one-step PIBT over all agents with no finalized trajectories.
Movement pibt_controller(const Instance& instance, const State& state, const PlannerConfig& config, Timestep t,
                         PlannerMemory& memory);

class FicoController final : public Controller {
 public:
  FicoController(const GridGraph& graph, PlannerConfig config);
  Movement plan(const State& state, const Instance& instance, Timestep t) override;
  const FicoStepStats& last_stats() const noexcept { return stats_; }
  std::optional<double> conflict_free_fraction() const override;

 private:
  PlannerConfig config_;
  PlannerMemory memory_;
  FicoStepStats stats_;
};

class PibtController final : public Controller {
 public:
  PibtController(const GridGraph& graph, PlannerConfig config);
  Movement plan(const State& state, const Instance& instance, Timestep t) override;

 private:
  PlannerConfig config_;
  PlannerMemory memory_;
};

}  // namespace fico
