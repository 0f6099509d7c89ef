#include "fico/planners.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>
#include <tuple>

#include "fico/random.hpp"

namespace fico {

void PlannerConfig::validate() const {
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
  if (batch_size < 1) throw InvalidArgument("batch size must be at least 1");
  if (threads < 0) throw InvalidArgument("thread count must be non-negative");
}

void PriorityTracker::observe(const State& state, const Instance& instance) {
  const auto n = state.size();
  const auto seen = elapsed_.size();
  elapsed_.resize(n, 0);
  goal_index_.resize(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    const auto id = static_cast<AgentId>(a);
    const bool fresh = a >= seen || goal_index_[a] != instance.goal_index(id);
    goal_index_[a] = instance.goal_index(id);
    if (fresh || state.positions[a] == instance.goal(id)) {
      elapsed_[a] = 0;
    } else {
      ++elapsed_[a];
    }
  }
}

PriorityOrder priorities_computation(std::span<const AgentId> group, std::span<const std::int64_t> elapsed,
                                     std::span<const std::int32_t> distance) {
  PriorityOrder p;
  p.order.assign(group.begin(), group.end());
  std::sort(p.order.begin(), p.order.end(), [&](AgentId a, AgentId b) {
    if (elapsed[a] != elapsed[b]) return elapsed[a] > elapsed[b];
    if (distance[a] != distance[b]) return distance[a] > distance[b];
    return a < b;
  });
  return p;
}

void prepare_heuristics(HeuristicCache& cache, const Instance& instance, const State& state, int horizon,
                        Executor& executor) {
  const auto n = state.size();
  cache.retain(instance.goals(), std::max<std::size_t>(64, 2 * n));
  std::map<Vertex, std::vector<Vertex>> by_goal;
  for (std::size_t a = 0; a < n; ++a) by_goal[instance.goal(static_cast<AgentId>(a))].push_back(state.positions[a]);

  std::vector<GoalContext*> contexts;
  std::vector<const std::vector<Vertex>*> starts;
  for (auto& [goal, from] : by_goal) {
    contexts.push_back(&cache.context(goal));
    starts.push_back(&from);
  }
  executor.parallel_for(contexts.size(), [&](std::size_t i) {
    std::int32_t deepest = 0;
    for (Vertex v : *starts[i]) {
      const auto d = contexts[i]->distance(v);
      if (d == kUnreachable) throw Unsolvable("goal " + std::to_string(contexts[i]->goal()) + " is unreachable");
      deepest = std::max(deepest, d);
    }
    contexts[i]->settle_through(deepest + horizon + 1);
  });
}

std::vector<const GoalContext*> agent_contexts(const HeuristicCache& cache, const Instance& instance) {
  std::vector<const GoalContext*> out(instance.agent_count());
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = cache.find(instance.goal(static_cast<AgentId>(a)));
    if (!out[a]) throw std::logic_error("agent_contexts: heuristics not prepared");
  }
  return out;
}

namespace {

void rollout(const GoalContext& ctx, std::vector<Vertex>& path, std::size_t from, int horizon, bool balanced, Rng& rng) {
  path.resize(static_cast<std::size_t>(horizon) + 1);
  for (std::size_t tau = from; tau < path.size(); ++tau) path[tau] = ctx.sample_settled(path[tau - 1], rng, balanced);
}

PlanSet plan_individually(std::span<const GoalContext* const> contexts, const State& state, int horizon,
                          bool balanced, std::uint64_t seed, Timestep t, Executor& executor,
                          const PlannerMemory* memory) {
  PlanSet plans;
  plans.horizon = horizon;
  plans.paths.resize(state.size());
  executor.parallel_for(state.size(), [&](std::size_t a) {
    auto rng = make_stream(seed, Stream::kIndividualPlan, {static_cast<std::uint64_t>(t), a});
    auto& path = plans.paths[a];
    const Vertex here = state.positions[a];
    if (memory && a < memory->cached_paths.size()) {
      const auto& cached = memory->cached_paths[a];
      if (cached.size() == static_cast<std::size_t>(horizon) + 1 && memory->cached_goals[a] == contexts[a]->goal() &&
          cached[1] == here) {
        path.assign(cached.begin() + 1, cached.end());
        rollout(*contexts[a], path, static_cast<std::size_t>(horizon), horizon, balanced, rng);
        return;
      }
    }
    path.assign(1, here);
    rollout(*contexts[a], path, 1, horizon, balanced, rng);
  });
  return plans;
}

// Dense per-thread scratch for pibt_step; every touched slot is reset before return.
struct PibtWorkspace {
  std::vector<std::int32_t> occupant;  // vertex -> local index at tau
  std::vector<std::int32_t> reserved;  // vertex -> local index at tau + 1
  std::vector<Vertex> touched;

  void ensure(std::size_t vertex_count) {
    if (occupant.size() != vertex_count) {
      occupant.assign(vertex_count, -1);
      reserved.assign(vertex_count, -1);
    }
  }
};

thread_local PibtWorkspace tls_workspace;

struct Candidate {
  Vertex v;
  std::int32_t distance;
  int hindrance;
  double key;
};

class PibtSolver {
 public:
  PibtSolver(const GridGraph& graph, std::span<const AgentId> group, std::span<const Vertex> positions,
             std::span<const GoalContext* const> contexts, const BlockedConstraints& blocked,
             const PibtOptions& options, PibtWorkspace& ws)
      : graph_(graph),
        group_(group),
        pos_(positions),
        contexts_(contexts),
        blocked_(blocked),
        options_(options),
        ws_(ws),
        next_(group.size(), kNoVertex) {}

  bool failed() const noexcept { return failed_; }
  std::vector<Vertex>& next() noexcept { return next_; }

  // Returns false when `i` could not move off its vertex (it then stays).
  bool solve(std::int32_t i, std::int32_t parent) {
    const Vertex here = pos_[i];
    auto cands = candidates(i);
    for (const auto& c : cands) {
      const Vertex v = c.v;
      if (ws_.reserved[v] >= 0) continue;
      if (parent >= 0 && v == pos_[parent]) continue;
      if (blocked_.vertex_blocked(v) || blocked_.edge_blocked(here, v)) continue;
      const std::int32_t k = ws_.occupant[v];
      if (k >= 0 && k != i && next_[k] == here) continue;
      reserve(v, i);
      if (k >= 0 && k != i && next_[k] == kNoVertex) {
        if (solve(k, i)) return true;
        if (failed_) return false;
        continue;
      }
      return true;
    }
    reserve(here, i);
    if (blocked_.vertex_blocked(here)) failed_ = true;
    return false;
  }

  void reserve(Vertex v, std::int32_t i) {
    if (ws_.reserved[v] < 0) ws_.touched.push_back(v);
    ws_.reserved[v] = i;
    next_[i] = v;
  }

 private:
  AgentId occupant_at(Vertex w) const {
    const auto local = ws_.occupant[w];
    if (local >= 0) return group_[local];
    AgentId found = kNoAgent;
    if (blocked_.finalized) blocked_.finalized->for_each_occupant(w, blocked_.tau, [&](AgentId b, Vertex) { found = b; });
    return found;
  }

  std::vector<Candidate> candidates(std::int32_t i) const {
    const AgentId a = group_[i];
    const Vertex here = pos_[i];
    const GoalContext& ctx = *contexts_[a];
    std::vector<Candidate> out;
    bool stay_added = false;
    auto add = [&](Vertex v) { out.push_back({v, ctx.peek_distance(v), 0, 0.0}); };
    for (Vertex w : graph_.neighbors(here)) {
      if (!stay_added && here < w) {
        add(here);
        stay_added = true;
      }
      add(w);
    }
    if (!stay_added) add(here);

    auto rng = make_stream(options_.seed, Stream::kPibt,
                           {static_cast<std::uint64_t>(options_.t), static_cast<std::uint64_t>(a),
                            static_cast<std::uint64_t>(blocked_.tau)});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& c : out) {
      const double u = 1.0 - unit(rng);
      if (options_.balanced) {
        const double w = std::max(ctx.peek_count(c.v), 1.0);
        c.key = std::log(u) / w;
      } else {
        c.key = u;
      }
      if (options_.hindrance)
        c.hindrance = hindrance_score(graph_, a, c.v, contexts_, [&](Vertex w) { return occupant_at(w); });
    }
    std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) {
      return std::tie(x.distance, x.hindrance, y.key, x.v) < std::tie(y.distance, y.hindrance, x.key, y.v);
    });
    return out;
  }

  const GridGraph& graph_;
  std::span<const AgentId> group_;
  std::span<const Vertex> pos_;
  std::span<const GoalContext* const> contexts_;
  const BlockedConstraints& blocked_;
  const PibtOptions& options_;
  PibtWorkspace& ws_;
  std::vector<Vertex> next_;
  bool failed_ = false;
};

}  // namespace

PlanSet individual_plan(std::span<const GoalContext* const> contexts, const State& state, int horizon,
                        bool balanced, std::uint64_t seed, Timestep t, Executor& executor) {
  return plan_individually(contexts, state, horizon, balanced, seed, t, executor, nullptr);
}

std::optional<std::vector<Vertex>> pibt_step(const GridGraph& graph, std::span<const AgentId> group,
                                             std::span<const Vertex> positions, const PriorityOrder& priorities,
                                             std::span<const GoalContext* const> contexts,
                                             const BlockedConstraints& blocked, const PibtOptions& options) {
  if (positions.size() != group.size() || priorities.order.size() != group.size())
    throw InvalidArgument("pibt_step: group, positions and priorities differ in size");
  auto& ws = tls_workspace;
  ws.ensure(static_cast<std::size_t>(graph.vertex_count()));
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (ws.occupant[positions[i]] >= 0) {
      for (std::size_t j = 0; j < i; ++j) ws.occupant[positions[j]] = -1;
      throw InvalidArgument("pibt_step: group positions are not distinct");
    }
    ws.occupant[positions[i]] = static_cast<std::int32_t>(i);
  }

  PibtSolver solver(graph, group, positions, contexts, blocked, options, ws);
  // Local index of each prioritized agent.
  std::vector<std::int32_t> local;
  local.reserve(group.size());
  {
    std::vector<std::pair<AgentId, std::int32_t>> index(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) index[i] = {group[i], static_cast<std::int32_t>(i)};
    std::sort(index.begin(), index.end());
    for (AgentId a : priorities.order) {
      auto it = std::lower_bound(index.begin(), index.end(), std::pair<AgentId, std::int32_t>{a, -1});
      if (it == index.end() || it->first != a) {
        for (Vertex v : positions) ws.occupant[v] = -1;
        throw InvalidArgument("pibt_step: priorities name an agent outside the group");
      }
      local.push_back(it->second);
    }
  }

  for (auto i : local) {
    if (solver.next()[i] != kNoVertex) continue;
    solver.solve(i, -1);
    if (solver.failed()) break;
  }

  for (Vertex v : positions) ws.occupant[v] = -1;
  for (Vertex v : ws.touched) ws.reserved[v] = -1;
  ws.touched.clear();
  if (solver.failed()) return std::nullopt;
  return std::move(solver.next());
}

GroupPlanResult replan_group(const GridGraph& graph, std::span<const AgentId> group, std::span<const Vertex> positions,
                             const PriorityOrder& priorities, std::span<const GoalContext* const> contexts,
                             const SpaceTimeHash& finalized, int horizon, const PibtOptions& options) {
  GroupPlanResult result;
  std::vector<std::vector<Vertex>> paths(group.size(), std::vector<Vertex>(static_cast<std::size_t>(horizon) + 1));
  std::vector<Vertex> current(positions.begin(), positions.end());
  for (std::size_t i = 0; i < group.size(); ++i) paths[i][0] = current[i];
  for (int tau = 0; tau < horizon; ++tau) {
    BlockedConstraints blocked{&finalized, tau};
    auto next = pibt_step(graph, group, current, priorities, contexts, blocked, options);
    if (!next) return result;
    current = std::move(*next);
    for (std::size_t i = 0; i < group.size(); ++i) paths[i][tau + 1] = current[i];
  }
  result.paths = std::move(paths);
  return result;
}

std::vector<AgentId> congestion_resolution(const GridGraph& graph, std::span<const AgentId> conflicting,
                                           std::span<const AgentId> conflict_free, std::span<const Vertex> positions,
                                           int batch_size) {
  std::vector<std::int32_t> dist(static_cast<std::size_t>(graph.vertex_count()), kUnreachable);
  std::deque<Vertex> queue;
  for (AgentId a : conflicting) {
    if (dist[positions[a]] == kUnreachable) {
      dist[positions[a]] = 0;
      queue.push_back(positions[a]);
    }
  }
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    for (Vertex w : graph.neighbors(u)) {
      if (dist[w] == kUnreachable) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  std::vector<std::pair<std::int32_t, AgentId>> ranked;
  ranked.reserve(conflict_free.size());
  for (AgentId a : conflict_free) ranked.emplace_back(dist[positions[a]], a);
  const auto take = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(std::max(batch_size, 0)));
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());
  std::vector<AgentId> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(ranked[i].second);
  return out;
}

PlannerMemory::PlannerMemory(const GridGraph& graph, int threads) : heuristics_(graph), executor_(threads) {}

namespace {

std::vector<std::int32_t> distances_to_goal(std::span<const GoalContext* const> contexts, const State& state) {
  std::vector<std::int32_t> d(state.size());
  for (std::size_t a = 0; a < d.size(); ++a) d[a] = contexts[a]->peek_distance(state.positions[a]);
  return d;
}

Movement first_steps(const State& state, const PlanSet& plans) {
  Movement m;
  m.moves.resize(state.size());
  for (std::size_t a = 0; a < state.size(); ++a) m.moves[a] = {state.positions[a], plans.paths[a][1]};
  return m;
}

}  // namespace

Movement fico_step(const Instance& instance, const State& state, const PlannerConfig& config, Timestep t,
                   PlannerMemory& memory, FicoStepStats* stats) {
  config.validate();
  if (state.size() != instance.agent_count()) throw InvalidArgument("state and instance disagree on agent count");
  const auto& graph = instance.graph();
  const auto V = graph.vertex_count();
  const int H = config.horizon;
  const auto n = state.size();
  auto& executor = memory.executor();

  memory.priorities().observe(state, instance);
  prepare_heuristics(memory.heuristics(), instance, state, H, executor);
  const auto contexts = agent_contexts(memory.heuristics(), instance);
  const auto distance = distances_to_goal(contexts, state);
  const auto elapsed = memory.priorities().elapsed();

  PlanSet plans = plan_individually(contexts, state, H, config.balanced, config.seed, t, executor,
                                    config.cache_plans ? &memory : nullptr);

  FicoStepStats local;
  local.agents = n;
  std::vector<char> forced(n, config.force_all_conflicting ? 1 : 0);
  const PibtOptions options{config.hindrance, config.balanced, config.seed, t};
  Partition part;
  for (bool first = true;; first = false) {
    part = detect_conflicts(plans, V, forced);
    if (first) local.initial_conflict_free = part.conflict_free.size();
    local.groups = 0;
    local.largest_group = 0;
    if (part.conflicting.empty()) break;

    const auto finalized = build_space_time_hash(plans, part.conflict_free, V);
    const auto regions = compute_reachable_sets(graph, part.conflicting, state.positions, H, finalized);
    const auto grouping = group_by_reachability(part.conflicting, regions, V, H);

    std::vector<GroupPlanResult> results(grouping.groups.size());
    executor.parallel_for(grouping.groups.size(), [&](std::size_t g) {
      const auto& group = grouping.groups[g];
      std::vector<Vertex> at(group.size());
      for (std::size_t i = 0; i < group.size(); ++i) at[i] = state.positions[group[i]];
      const auto priorities = priorities_computation(group, elapsed, distance);
      results[g] = replan_group(graph, group, at, priorities, contexts, finalized, H, options);
    });

    const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.ok(); });
    if (ok) {
      for (std::size_t g = 0; g < results.size(); ++g) {
        const auto& group = grouping.groups[g];
        for (std::size_t i = 0; i < group.size(); ++i) plans.paths[group[i]] = std::move(results[g].paths[i]);
        local.largest_group = std::max(local.largest_group, group.size());
      }
      local.groups = grouping.groups.size();
      break;
    }
    if (part.conflict_free.empty())
      throw std::logic_error("fico_step: group replanning failed with no finalized trajectories");
    for (AgentId a : congestion_resolution(graph, part.conflicting, part.conflict_free, state.positions,
                                           config.batch_size))
      forced[a] = 1;
    ++local.enlargements;
  }
  local.final_conflict_free = part.conflict_free.size();

  memory.cached_paths.assign(n, {});
  memory.cached_goals.assign(n, kNoVertex);
  for (AgentId a : part.conflict_free) {
    memory.cached_paths[a] = plans.paths[a];
    memory.cached_goals[a] = instance.goal(a);
  }
  if (stats) *stats = local;
  return first_steps(state, plans);
}

Movement pibt_controller(const Instance& instance, const State& state, const PlannerConfig& config, Timestep t,
                         PlannerMemory& memory) {
  config.validate();
  if (state.size() != instance.agent_count()) throw InvalidArgument("state and instance disagree on agent count");
  memory.priorities().observe(state, instance);
  prepare_heuristics(memory.heuristics(), instance, state, 1, memory.executor());
  const auto contexts = agent_contexts(memory.heuristics(), instance);
  const auto distance = distances_to_goal(contexts, state);

  std::vector<AgentId> all(state.size());
  for (std::size_t a = 0; a < all.size(); ++a) all[a] = static_cast<AgentId>(a);
  const auto priorities = priorities_computation(all, memory.priorities().elapsed(), distance);
  const PibtOptions options{config.hindrance, config.balanced, config.seed, t};
  auto next = pibt_step(instance.graph(), all, state.positions, priorities, contexts, BlockedConstraints{}, options);
  if (!next) throw std::logic_error("pibt_controller: unconstrained PIBT failed");
  Movement m;
  m.moves.resize(state.size());
  for (std::size_t a = 0; a < state.size(); ++a) m.moves[a] = {state.positions[a], (*next)[a]};
  return m;
}

FicoController::FicoController(const GridGraph& graph, PlannerConfig config)
    : config_(config), memory_(graph, config.threads) {
  config_.validate();
}

Movement FicoController::plan(const State& state, const Instance& instance, Timestep t) {
  return fico_step(instance, state, config_, t, memory_, &stats_);
}

std::optional<double> FicoController::conflict_free_fraction() const {
  if (stats_.agents == 0) return std::nullopt;
  return static_cast<double>(stats_.initial_conflict_free) / static_cast<double>(stats_.agents);
}

PibtController::PibtController(const GridGraph& graph, PlannerConfig config)
    : config_(config), memory_(graph, config.threads) {
  config_.validate();
}

Movement PibtController::plan(const State& state, const Instance& instance, Timestep t) {
  return pibt_controller(instance, state, config_, t, memory_);
}

}  // namespace fico
