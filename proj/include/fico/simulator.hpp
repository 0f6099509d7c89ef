#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fico/system_model.hpp"

namespace fico {

enum class TerminationKind { kAllAtGoal, kTimeLimit, kItemBudget };

enum class TerminationReason { kAllAtGoal, kTimeLimit, kBudgetExhausted, kSafetyCap };

const char* to_string(TerminationReason reason) noexcept;

struct Termination {
  TerminationKind kind = TerminationKind::kAllAtGoal;
  Timestep t_max = 0;
  // Item budget: each step costs its planning wall-clock plus step_seconds of
  // virtual time; the run ends before the step that would exceed the budget.
  double budget_seconds = 60.0;
  double step_seconds = 2.0;
  // 0 selects the default cap, 10 * (width + height + N).
  Timestep safety_cap = 0;

  static Termination all_at_goal() { return {}; }
  static Termination time_limit(Timestep t_max) { return {TerminationKind::kTimeLimit, t_max}; }
  static Termination item_budget(double budget_seconds = 60.0, double step_seconds = 2.0) {
    return {TerminationKind::kItemBudget, 0, budget_seconds, step_seconds};
  }
};

struct TraceStep {
  State state;
  Movement planned;
  Movement executed;
  double planning_seconds = 0.0;
  std::vector<AgentId> arrivals;
  std::optional<AgentId> added;
  std::optional<double> conflict_free_fraction;
};

struct ExecutionTrace {
  std::vector<TraceStep> steps;
  State final_state;
  TerminationReason reason = TerminationReason::kAllAtGoal;
  bool incomplete = false;
  // Goal-arrival timesteps per agent (arrival at t means on the goal at t + 1).
  std::vector<std::vector<Timestep>> arrivals;
  // Per-agent start and first goal, captured before the run mutates goals.
  std::vector<Vertex> starts;
  std::vector<Vertex> first_goals;
  std::vector<Timestep> entry_time;
  bool lifelong = false;
  Timestep t_max = 0;
  double virtual_seconds = 0.0;

  Timestep length() const noexcept { return static_cast<Timestep>(steps.size()); }
  // State at time t, 0 <= t <= length().
  const State& state_at(Timestep t) const;
};

// plan -> actuate -> environment step until `termination` fires. Mutates the
// instance (lifelong goals, added agents).
ExecutionTrace run_closed_loop(Controller& controller, Actuator& actuator, const Environment& environment,
                               Instance& instance, const Termination& termination);

enum class ViolationKind { kVertex, kEdge, kAdjacency, kInconsistent };

const char* to_string(ViolationKind kind) noexcept;

struct Violation {
  Timestep t = 0;
  ViolationKind kind = ViolationKind::kVertex;
  AgentId a = kNoAgent;
  AgentId b = kNoAgent;
  Vertex vertex = kNoVertex;
  bool planned = false;

  bool operator==(const Violation&) const = default;
};

// Naive pairwise check of one transition: `from` positions, moves, and the
// resulting destinations.
std::vector<Violation> movement_violations(const GridGraph& graph, const State& from, const Movement& movement,
                                           Timestep t, bool planned = false);

// Every planned and executed transition plus the state chain. Empty iff valid.
std::vector<Violation> validate_trace(const ExecutionTrace& trace, const GridGraph& graph);

struct MetricsReport {
  Timestep makespan = 0;
  std::int64_t soc = 0;
  std::optional<std::int64_t> delta_soc;
  double throughput = 0.0;
  double ert_seconds = 0.0;
  std::vector<double> planning_seconds;
  std::int64_t goals_reached = 0;
  std::optional<std::int64_t> items_delivered;
  std::optional<double> mean_conflict_free_fraction;
};

MetricsReport compute_metrics(const ExecutionTrace& trace, const GridGraph& graph);

// One JSON object per line: {"t","agent","vertex","x","y"} for every agent at
// every recorded state, then one {"summary":true,...} record.
void write_trace_jsonl(std::ostream& out, const ExecutionTrace& trace, const GridGraph& graph);

// Distinct uniform starts and distinct uniform goals, each goal in its
// start's component.
Instance random_instance(std::shared_ptr<const GridGraph> graph, std::size_t agents, std::uint64_t seed);

}  // namespace fico
