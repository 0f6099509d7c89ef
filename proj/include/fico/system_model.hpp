#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fico/grid_world.hpp"
#include "fico/random.hpp"

namespace fico {

// Agent ids are dense indices 0..N-1; added agents take the next index.
struct State {
  std::vector<Vertex> positions;

  std::size_t size() const noexcept { return positions.size(); }
  bool operator==(const State&) const = default;
};

struct Move {
  Vertex from = kNoVertex;
  Vertex to = kNoVertex;
  bool is_wait() const noexcept { return from == to; }
  bool operator==(const Move&) const = default;
};

struct Movement {
  std::vector<Move> moves;

  std::size_t size() const noexcept { return moves.size(); }
  bool operator==(const Movement&) const = default;
};

Movement wait_all(const State& state);
std::vector<Vertex> destinations(const Movement& movement);

enum class ExhaustPolicy { kError, kHoldLast };

// Time-indexed MAPF instance. One-shot instances have a fixed goal per agent;
// lifelong instances reveal goals one at a time from a per-agent stream.
class Instance {
 public:
  Instance(std::shared_ptr<const GridGraph> graph, std::vector<Vertex> starts, std::vector<Vertex> goals);

  // Switches to lifelong mode. Explicit goal lists start with the current
  // goal; agents without a list (or all agents when `lists` is empty) draw
  // future goals lazily from `stream_seed`.
  void make_lifelong(std::uint64_t stream_seed, std::vector<std::vector<Vertex>> lists = {},
                     ExhaustPolicy policy = ExhaustPolicy::kError);

  const GridGraph& graph() const noexcept { return *graph_; }
  std::shared_ptr<const GridGraph> graph_ptr() const noexcept { return graph_; }
  std::size_t agent_count() const noexcept { return goals_.size(); }
  std::span<const Vertex> starts() const noexcept { return starts_; }
  std::span<const Vertex> goals() const noexcept { return goals_; }
  Vertex start(AgentId a) const { return starts_[a]; }
  Vertex goal(AgentId a) const { return goals_[a]; }
  bool lifelong() const noexcept { return lifelong_; }
  // Number of goals agent `a` has completed (index of its current goal).
  std::int32_t goal_index(AgentId a) const { return goal_index_[a]; }
  // Component label per vertex; equal labels are mutually reachable.
  std::int32_t component(Vertex v) const { return (*components_)[v]; }

  // Reveals and installs the next goal of `a`. `position` is where the agent is.
  void advance_goal(AgentId a, Vertex position);
  AgentId add_agent(Vertex start, Vertex goal);

  // Throws Unsolvable naming the first agent whose goal is unreachable.
  void validate() const;

 private:
  Vertex draw_goal(AgentId a, std::int32_t k, Vertex avoid) const;

  std::shared_ptr<const GridGraph> graph_;
  std::shared_ptr<const std::vector<std::int32_t>> components_;
  std::vector<Vertex> starts_;
  std::vector<Vertex> goals_;
  bool lifelong_ = false;
  std::uint64_t stream_seed_ = 0;
  ExhaustPolicy policy_ = ExhaustPolicy::kError;
  std::vector<std::vector<Vertex>> goal_lists_;
  std::vector<std::int32_t> goal_index_;
};

// Edges i -> j where i's planned destination is j's current vertex.
struct DependencyGraph {
  std::vector<std::vector<AgentId>> out;

  std::size_t edge_count() const noexcept;
};

// Controller: maps (state, instance) to a planned movement.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual Movement plan(const State& state, const Instance& instance, Timestep t) = 0;
  // Share of agents left untouched by coordination in the last plan call, if
  // the controller factorizes at all.
  virtual std::optional<double> conflict_free_fraction() const { return std::nullopt; }
};

// Actuator: maps a planned movement to the executed one.
class Actuator {
 public:
  virtual ~Actuator() = default;
  virtual Movement actuate(const Movement& planned, const State& state, Timestep t) = 0;
};

Movement perfect_actuate(const Movement& planned, const State& state);

DependencyGraph build_dependency_graph(const State& state, const Movement& planned);

// Agents with a directed path (possibly empty) to a delayed agent.
std::vector<AgentId> stationary_set(const DependencyGraph& dep, std::span<const AgentId> delayed);

// Executes `planned` with the given primary delay set: stationary agents wait.
Movement apply_delays(const Movement& planned, const State& state, std::span<const AgentId> delayed);

// Samples the primary delay set (independent Bernoulli per agent, in id
// order) and applies it.
Movement delay_actuate(const Movement& planned, const State& state, double p_delay, Rng& rng);

class PerfectActuator final : public Actuator {
 public:
  Movement actuate(const Movement& planned, const State& state, Timestep) override {
    return perfect_actuate(planned, state);
  }
};

class DelayActuator final : public Actuator {
 public:
  DelayActuator(double p_delay, std::uint64_t seed);
  Movement actuate(const Movement& planned, const State& state, Timestep t) override;

 private:
  double p_delay_;
  std::uint64_t seed_;
};

struct EnvironmentStep {
  State next;
  // Agents whose executed destination equals their goal at arrival time.
  std::vector<AgentId> arrivals;
  std::optional<AgentId> added;
};

struct EnvironmentOptions {
  double p_add = 0.0;
  std::uint64_t seed = 0;
};

// Static, lifelong (when the instance is lifelong) and stochastic-addition
// environment in one: goals advance on arrival for lifelong instances, and a
// new agent appears with probability p_add per step.
class Environment {
 public:
  explicit Environment(EnvironmentOptions options = {}) : options_(options) {}

  EnvironmentStep step(const Movement& executed, const State& state, Instance& instance, Timestep t) const;

 private:
  EnvironmentOptions options_;
};

}  // namespace fico
