#include "fico/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "json.hpp"

#include "fico/random.hpp"

namespace fico {

const char* to_string(TerminationReason reason) noexcept {
  switch (reason) {
    case TerminationReason::kAllAtGoal: return "all-at-goal";
    case TerminationReason::kTimeLimit: return "time-limit";
    case TerminationReason::kBudgetExhausted: return "budget-exhausted";
    case TerminationReason::kSafetyCap: return "safety-cap";
  }
  return "unknown";
}

const char* to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::kVertex: return "vertex";
    case ViolationKind::kEdge: return "edge";
    case ViolationKind::kAdjacency: return "adjacency";
    case ViolationKind::kInconsistent: return "inconsistent";
  }
  return "unknown";
}

const State& ExecutionTrace::state_at(Timestep t) const {
  if (t < 0 || t > length()) throw InvalidArgument("timestep outside the trace");
  return t == length() ? final_state : steps[static_cast<std::size_t>(t)].state;
}

namespace {

bool all_at_goal(const State& state, const Instance& instance) {
  for (std::size_t a = 0; a < state.size(); ++a) {
    if (state.positions[a] != instance.goal(static_cast<AgentId>(a))) return false;
  }
  return true;
}

}  // namespace

ExecutionTrace run_closed_loop(Controller& controller, Actuator& actuator, const Environment& environment,
                               Instance& instance, const Termination& termination) {
  instance.validate();
  const auto& graph = instance.graph();
  ExecutionTrace trace;
  trace.lifelong = instance.lifelong();
  trace.t_max = termination.kind == TerminationKind::kTimeLimit ? termination.t_max : 0;
  trace.starts.assign(instance.starts().begin(), instance.starts().end());
  trace.first_goals.assign(instance.goals().begin(), instance.goals().end());
  trace.entry_time.assign(instance.agent_count(), 0);
  trace.arrivals.assign(instance.agent_count(), {});

  const Timestep cap = termination.safety_cap > 0
                           ? termination.safety_cap
                           : 10 * static_cast<Timestep>(graph.width() + graph.height() + instance.agent_count());
  State state{std::vector<Vertex>(instance.starts().begin(), instance.starts().end())};

  for (Timestep t = 0;; ++t) {
    if (termination.kind == TerminationKind::kAllAtGoal && all_at_goal(state, instance)) {
      trace.reason = TerminationReason::kAllAtGoal;
      break;
    }
    if (termination.kind == TerminationKind::kTimeLimit && t >= termination.t_max) {
      trace.reason = TerminationReason::kTimeLimit;
      break;
    }
    if (t >= cap) {
      trace.reason = TerminationReason::kSafetyCap;
      trace.incomplete = true;
      break;
    }

    const auto begin = std::chrono::steady_clock::now();
    Movement planned = controller.plan(state, instance, t);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();

    if (termination.kind == TerminationKind::kItemBudget) {
      const double cost = std::max(seconds, 0.0) + termination.step_seconds;
      if (trace.virtual_seconds + cost > termination.budget_seconds) {
        trace.reason = TerminationReason::kBudgetExhausted;
        break;
      }
      trace.virtual_seconds += cost;
    }

    Movement executed = actuator.actuate(planned, state, t);
    auto env = environment.step(executed, state, instance, t);

    TraceStep step;
    step.state = std::move(state);
    step.planned = std::move(planned);
    step.executed = std::move(executed);
    step.planning_seconds = seconds;
    step.arrivals = env.arrivals;
    step.added = env.added;
    step.conflict_free_fraction = controller.conflict_free_fraction();
    for (AgentId a : env.arrivals) trace.arrivals[a].push_back(t);
    if (env.added) {
      trace.starts.push_back(instance.start(*env.added));
      trace.first_goals.push_back(instance.goal(*env.added));
      trace.entry_time.push_back(t + 1);
      trace.arrivals.emplace_back();
    }
    trace.steps.push_back(std::move(step));
    state = std::move(env.next);
  }
  trace.final_state = std::move(state);
  return trace;
}

std::vector<Violation> movement_violations(const GridGraph& graph, const State& from, const Movement& movement,
                                           Timestep t, bool planned) {
  std::vector<Violation> out;
  const auto n = from.size();
  if (movement.size() != n) {
    out.push_back({t, ViolationKind::kInconsistent, kNoAgent, kNoAgent, kNoVertex, planned});
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = movement.moves[i];
    const auto a = static_cast<AgentId>(i);
    if (m.from != from.positions[i]) out.push_back({t, ViolationKind::kInconsistent, a, kNoAgent, m.from, planned});
    if (m.from != m.to && !graph.adjacent(m.from, m.to))
      out.push_back({t, ViolationKind::kAdjacency, a, kNoAgent, m.to, planned});
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& mi = movement.moves[i];
      const auto& mj = movement.moves[j];
      const auto a = static_cast<AgentId>(i);
      const auto b = static_cast<AgentId>(j);
      if (mi.to == mj.to) out.push_back({t, ViolationKind::kVertex, a, b, mi.to, planned});
      if (mi.from != mi.to && mi.from == mj.to && mi.to == mj.from)
        out.push_back({t, ViolationKind::kEdge, a, b, mi.from, planned});
    }
  }
  return out;
}

std::vector<Violation> validate_trace(const ExecutionTrace& trace, const GridGraph& graph) {
  std::vector<Violation> out;
  auto append = [&](std::vector<Violation> v) { out.insert(out.end(), v.begin(), v.end()); };

  // The initial state itself must be collision-free.
  if (!trace.steps.empty() || !trace.final_state.positions.empty()) {
    const auto& s0 = trace.state_at(0);
    for (std::size_t i = 0; i < s0.size(); ++i)
      for (std::size_t j = i + 1; j < s0.size(); ++j)
        if (s0.positions[i] == s0.positions[j])
          out.push_back({0, ViolationKind::kVertex, static_cast<AgentId>(i), static_cast<AgentId>(j), s0.positions[i]});
  }

  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto t = static_cast<Timestep>(k);
    const auto& step = trace.steps[k];
    append(movement_violations(graph, step.state, step.planned, t, true));
    append(movement_violations(graph, step.state, step.executed, t, false));

    // Replaying the executed movement (plus an addition) must give the next state.
    const auto& next = trace.state_at(t + 1);
    std::vector<Vertex> expect = destinations(step.executed);
    if (step.added) {
      if (next.size() == expect.size() + 1) expect.push_back(next.positions.back());
    }
    if (expect != next.positions) out.push_back({t, ViolationKind::kInconsistent});
    if (step.added) {
      for (std::size_t i = 0; i + 1 < next.size(); ++i)
        if (next.positions[i] == next.positions.back())
          out.push_back({t, ViolationKind::kVertex, static_cast<AgentId>(i), static_cast<AgentId>(next.size() - 1),
                         next.positions[i]});
    }
  }
  return out;
}

MetricsReport compute_metrics(const ExecutionTrace& trace, const GridGraph& graph) {
  MetricsReport m;
  const auto T = trace.length();
  m.makespan = T;

  // Cost counts every recorded state (0..T) at which an agent is off its
  // one-shot goal. Lifelong runs use the first goal for the same sum.
  for (Timestep t = 0; t <= T; ++t) {
    const auto& s = trace.state_at(t);
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (s.positions[a] != trace.first_goals[a]) ++m.soc;
    }
  }

  for (const auto& per_agent : trace.arrivals) m.goals_reached += static_cast<std::int64_t>(per_agent.size());

  if (!trace.lifelong) {
    std::int64_t lower = 0;
    std::vector<std::int32_t> dist(static_cast<std::size_t>(graph.vertex_count()));
    for (std::size_t a = 0; a < trace.starts.size(); ++a) {
      // Plain BFS from the goal; metrics are off the hot path.
      std::fill(dist.begin(), dist.end(), kUnreachable);
      std::vector<Vertex> queue{trace.first_goals[a]};
      dist[trace.first_goals[a]] = 0;
      for (std::size_t h = 0; h < queue.size() && dist[trace.starts[a]] == kUnreachable; ++h) {
        for (Vertex w : graph.neighbors(queue[h])) {
          if (dist[w] == kUnreachable) {
            dist[w] = dist[queue[h]] + 1;
            queue.push_back(w);
          }
        }
      }
      lower += dist[trace.starts[a]];
    }
    m.delta_soc = m.soc - lower;
  }

  const Timestep denom = trace.t_max > 0 ? trace.t_max : T;
  m.throughput = denom > 0 ? static_cast<double>(m.goals_reached) / static_cast<double>(denom) : 0.0;

  m.planning_seconds.reserve(trace.steps.size());
  double cf_sum = 0.0;
  std::size_t cf_count = 0;
  for (const auto& s : trace.steps) {
    m.planning_seconds.push_back(s.planning_seconds);
    if (s.conflict_free_fraction) {
      cf_sum += *s.conflict_free_fraction;
      ++cf_count;
    }
  }
  if (!trace.steps.empty()) m.ert_seconds = trace.steps.front().planning_seconds;
  if (cf_count > 0) m.mean_conflict_free_fraction = cf_sum / static_cast<double>(cf_count);
  if (trace.reason == TerminationReason::kBudgetExhausted) m.items_delivered = m.goals_reached;
  return m;
}

void write_trace_jsonl(std::ostream& out, const ExecutionTrace& trace, const GridGraph& graph) {
  for (Timestep t = 0; t <= trace.length(); ++t) {
    const auto& s = trace.state_at(t);
    for (std::size_t a = 0; a < s.size(); ++a) {
      const Vertex v = s.positions[a];
      nlohmann::json rec{{"t", t}, {"agent", a}, {"vertex", v}, {"x", graph.x(v)}, {"y", graph.y(v)}};
      out << rec.dump() << '\n';
    }
  }
  std::int64_t arrivals = 0;
  for (const auto& per_agent : trace.arrivals) arrivals += static_cast<std::int64_t>(per_agent.size());
  nlohmann::json summary{{"summary", true},
                         {"steps", trace.length()},
                         {"agents", trace.final_state.size()},
                         {"termination", to_string(trace.reason)},
                         {"incomplete", trace.incomplete},
                         {"arrivals", arrivals}};
  out << summary.dump() << '\n';
}

Instance random_instance(std::shared_ptr<const GridGraph> graph, std::size_t agents, std::uint64_t seed) {
  const auto V = static_cast<std::size_t>(graph->vertex_count());
  if (agents > V) throw InvalidArgument("more agents than passable cells");
  auto rng = make_stream(seed, Stream::kInstance, {});
  std::vector<Vertex> cells(V);
  std::iota(cells.begin(), cells.end(), 0);

  std::shuffle(cells.begin(), cells.end(), rng);
  std::vector<Vertex> starts(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(agents));

  // Component labels, to keep each goal reachable from its start.
  std::vector<std::int32_t> comp(V, -1);
  std::int32_t labels = 0;
  for (std::size_t s = 0; s < V; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<Vertex> stack{static_cast<Vertex>(s)};
    comp[s] = labels;
    while (!stack.empty()) {
      const Vertex u = stack.back();
      stack.pop_back();
      for (Vertex w : graph->neighbors(u)) {
        if (comp[w] < 0) {
          comp[w] = labels;
          stack.push_back(w);
        }
      }
    }
    ++labels;
  }

  std::shuffle(cells.begin(), cells.end(), rng);
  std::vector<char> used(V, 0);
  std::vector<Vertex> goals(agents, kNoVertex);
  for (std::size_t a = 0; a < agents; ++a) {
    for (Vertex v : cells) {
      if (!used[v] && comp[v] == comp[starts[a]]) {
        goals[a] = v;
        used[v] = 1;
        break;
      }
    }
    if (goals[a] == kNoVertex) throw InvalidArgument("not enough cells for distinct goals");
  }
  return Instance(std::move(graph), std::move(starts), std::move(goals));
}

}  // namespace fico
