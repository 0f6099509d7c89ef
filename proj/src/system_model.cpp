#include "fico/system_model.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace fico {

namespace {

std::vector<std::int32_t> label_components(const GridGraph& g) {
  std::vector<std::int32_t> label(g.vertex_count(), -1);
  std::int32_t next = 0;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < g.vertex_count(); ++s) {
    if (label[s] != -1) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      for (Vertex n : g.neighbors(u)) {
        if (label[n] == -1) {
          label[n] = next;
          stack.push_back(n);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace

Movement wait_all(const State& state) {
  Movement m;
  m.moves.reserve(state.size());
  for (Vertex v : state.positions) m.moves.push_back({v, v});
  return m;
}

std::vector<Vertex> destinations(const Movement& movement) {
  std::vector<Vertex> out;
  out.reserve(movement.size());
  for (const auto& mv : movement.moves) out.push_back(mv.to);
  return out;
}

Instance::Instance(std::shared_ptr<const GridGraph> graph, std::vector<Vertex> starts, std::vector<Vertex> goals)
    : graph_(std::move(graph)), starts_(std::move(starts)), goals_(std::move(goals)) {
  if (!graph_) throw InvalidArgument("instance requires a graph");
  if (starts_.size() != goals_.size()) throw InvalidArgument("starts and goals differ in length");
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    if (starts_[i] < 0 || starts_[i] >= graph_->vertex_count() || goals_[i] < 0 ||
        goals_[i] >= graph_->vertex_count())
      throw InvalidArgument("agent " + std::to_string(i) + " has a start or goal outside the graph");
  }
  components_ = std::make_shared<const std::vector<std::int32_t>>(label_components(*graph_));
  goal_index_.assign(goals_.size(), 0);
}

void Instance::make_lifelong(std::uint64_t stream_seed, std::vector<std::vector<Vertex>> lists,
                             ExhaustPolicy policy) {
  lifelong_ = true;
  stream_seed_ = stream_seed;
  policy_ = policy;
  goal_lists_ = std::move(lists);
  goal_lists_.resize(goals_.size());
  for (std::size_t a = 0; a < goals_.size(); ++a) {
    if (!goal_lists_[a].empty()) goals_[a] = goal_lists_[a].front();
  }
}

Vertex Instance::draw_goal(AgentId a, std::int32_t k, Vertex avoid) const {
  auto rng = make_stream(stream_seed_, Stream::kGoalStream,
                         {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(k)});
  std::uniform_int_distribution<Vertex> pick(0, graph_->vertex_count() - 1);
  const auto comp = (*components_)[avoid];
  // Single-vertex components have no valid alternative; the agent keeps its goal.
  for (int attempt = 0; attempt < 1 << 16; ++attempt) {
    Vertex g = pick(rng);
    if (g != avoid && (*components_)[g] == comp) return g;
  }
  return avoid;
}

void Instance::advance_goal(AgentId a, Vertex position) {
  if (!lifelong_) return;
  const std::int32_t k = ++goal_index_[a];
  const auto& list = goal_lists_[a];
  if (!list.empty()) {
    if (static_cast<std::size_t>(k) < list.size()) {
      goals_[a] = list[k];
      return;
    }
    if (policy_ == ExhaustPolicy::kError)
      throw Error("goal stream of agent " + std::to_string(a) + " is exhausted");
    return;  // hold last goal
  }
  goals_[a] = draw_goal(a, k, position);
}

AgentId Instance::add_agent(Vertex start, Vertex goal) {
  const auto id = static_cast<AgentId>(goals_.size());
  starts_.push_back(start);
  goals_.push_back(goal);
  goal_index_.push_back(0);
  if (lifelong_) goal_lists_.emplace_back();
  return id;
}

void Instance::validate() const {
  for (std::size_t a = 0; a < goals_.size(); ++a) {
    if ((*components_)[starts_[a]] != (*components_)[goals_[a]])
      throw Unsolvable("goal of agent " + std::to_string(a) + " is unreachable from its start");
  }
}

std::size_t DependencyGraph::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& o : out) n += o.size();
  return n;
}

Movement perfect_actuate(const Movement& planned, const State&) { return planned; }

DependencyGraph build_dependency_graph(const State& state, const Movement& planned) {
  if (planned.size() != state.size()) throw InvalidArgument("movement and state sizes differ");
  std::unordered_multimap<Vertex, AgentId> occupant;
  occupant.reserve(state.size() * 2);
  for (std::size_t j = 0; j < state.size(); ++j) occupant.emplace(state.positions[j], static_cast<AgentId>(j));
  DependencyGraph dep;
  dep.out.resize(state.size());
  for (std::size_t i = 0; i < planned.size(); ++i) {
    auto [lo, hi] = occupant.equal_range(planned.moves[i].to);
    for (auto it = lo; it != hi; ++it) {
      if (it->second != static_cast<AgentId>(i)) dep.out[i].push_back(it->second);
    }
    std::sort(dep.out[i].begin(), dep.out[i].end());
  }
  return dep;
}

std::vector<AgentId> stationary_set(const DependencyGraph& dep, std::span<const AgentId> delayed) {
  const auto n = dep.out.size();
  std::vector<std::vector<AgentId>> rev(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (AgentId j : dep.out[i]) rev[j].push_back(static_cast<AgentId>(i));
  }
  std::vector<char> mark(n, 0);
  std::vector<AgentId> stack;
  for (AgentId d : delayed) {
    if (d < 0 || static_cast<std::size_t>(d) >= n) throw InvalidArgument("delayed agent out of range");
    if (!mark[d]) {
      mark[d] = 1;
      stack.push_back(d);
    }
  }
  while (!stack.empty()) {
    AgentId j = stack.back();
    stack.pop_back();
    for (AgentId i : rev[j]) {
      if (!mark[i]) {
        mark[i] = 1;
        stack.push_back(i);
      }
    }
  }
  std::vector<AgentId> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (mark[i]) out.push_back(static_cast<AgentId>(i));
  }
  return out;
}

Movement apply_delays(const Movement& planned, const State& state, std::span<const AgentId> delayed) {
  if (delayed.empty()) return planned;
  Movement executed = planned;
  for (AgentId a : stationary_set(build_dependency_graph(state, planned), delayed)) {
    executed.moves[a].to = executed.moves[a].from;
  }
  return executed;
}

Movement delay_actuate(const Movement& planned, const State& state, double p_delay, Rng& rng) {
  if (p_delay < 0.0 || p_delay > 1.0) throw InvalidArgument("p_delay must lie in [0, 1]");
  std::bernoulli_distribution coin(p_delay);
  std::vector<AgentId> delayed;
  for (std::size_t a = 0; a < planned.size(); ++a) {
    if (coin(rng)) delayed.push_back(static_cast<AgentId>(a));
  }
  return apply_delays(planned, state, delayed);
}

DelayActuator::DelayActuator(double p_delay, std::uint64_t seed) : p_delay_(p_delay), seed_(seed) {
  if (p_delay < 0.0 || p_delay > 1.0) throw InvalidArgument("p_delay must lie in [0, 1]");
}

Movement DelayActuator::actuate(const Movement& planned, const State& state, Timestep t) {
  auto rng = make_stream(seed_, Stream::kDelay, {static_cast<std::uint64_t>(t)});
  return delay_actuate(planned, state, p_delay_, rng);
}

EnvironmentStep Environment::step(const Movement& executed, const State& state, Instance& instance,
                                  Timestep t) const {
  if (executed.size() != state.size() || state.size() != instance.agent_count())
    throw InvalidArgument("executed movement does not match the state");
  const auto& g = instance.graph();
  EnvironmentStep out;
  out.next.positions.resize(state.size());
  for (std::size_t a = 0; a < state.size(); ++a) {
    const auto& mv = executed.moves[a];
    if (mv.from != state.positions[a]) throw InvalidArgument("movement does not start at the agent position");
    if (!g.can_move(mv.from, mv.to)) throw InvalidArgument("movement is not a graph edge");
    out.next.positions[a] = mv.to;
  }

  for (std::size_t a = 0; a < state.size(); ++a) {
    const auto id = static_cast<AgentId>(a);
    const Vertex pos = out.next.positions[a];
    if (pos != instance.goal(id)) continue;
    if (instance.lifelong()) {
      out.arrivals.push_back(id);
      instance.advance_goal(id, pos);
    } else if (state.positions[a] != pos) {
      out.arrivals.push_back(id);
    }
  }

  if (options_.p_add > 0.0) {
    auto rng = make_stream(options_.seed, Stream::kAddition, {static_cast<std::uint64_t>(t)});
    std::bernoulli_distribution add(options_.p_add);
    if (add(rng)) {
      std::vector<char> occupied(g.vertex_count(), 0);
      for (Vertex v : out.next.positions) occupied[v] = 1;
      std::vector<Vertex> free;
      for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (!occupied[v]) free.push_back(v);
      }
      if (!free.empty()) {
        const Vertex start = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
        std::vector<Vertex> reachable;
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
          if (v != start && instance.component(v) == instance.component(start)) reachable.push_back(v);
        }
        const Vertex goal = reachable.empty()
                                ? start
                                : reachable[std::uniform_int_distribution<std::size_t>(0, reachable.size() - 1)(rng)];
        out.added = instance.add_agent(start, goal);
        out.next.positions.push_back(start);
      }
    }
  }
  return out;
}

}  // namespace fico
