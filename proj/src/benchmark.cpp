#include "fico/benchmark.hpp"

#include <cstdio>
#include <type_traits>

#include "json.hpp"

#include "fico/parallel.hpp"

namespace fico {

const char* to_string(RunMode mode) noexcept {
  switch (mode) {
    case RunMode::kOneShot: return "one-shot";
    case RunMode::kLifelong: return "lifelong";
    case RunMode::kItemBudget: return "item-budget";
  }
  return "unknown";
}

const char* to_string(Algorithm algo) noexcept { return algo == Algorithm::kFico ? "fico" : "pibt"; }

RunMode parse_mode(const std::string& text) {
  if (text == "one-shot") return RunMode::kOneShot;
  if (text == "lifelong") return RunMode::kLifelong;
  if (text == "item-budget") return RunMode::kItemBudget;
  throw InvalidArgument("unknown mode '" + text + "' (expected one-shot, lifelong or item-budget)");
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "fico") return Algorithm::kFico;
  if (text == "pibt") return Algorithm::kPibt;
  throw InvalidArgument("unknown algorithm '" + text + "' (expected fico or pibt)");
}

void RunConfig::validate() const {
  if (map_path.empty()) throw InvalidArgument("a map is required");
  if (agents == 0) throw InvalidArgument("agent count must be positive");
  if (algorithms.empty()) throw InvalidArgument("at least one algorithm is required");
  if (seeds.empty()) throw InvalidArgument("at least one seed is required");
  if (!(p_delay >= 0.0 && p_delay <= 1.0)) throw InvalidArgument("p_delay must lie in [0, 1]");
  if (!(p_add >= 0.0 && p_add <= 1.0)) throw InvalidArgument("p_add must lie in [0, 1]");
  if (mode == RunMode::kLifelong && t_max <= 0) throw InvalidArgument("lifelong runs need t_max > 0");
  if (budget_seconds <= 0.0 || step_seconds < 0.0) throw InvalidArgument("invalid item budget");
  if (threads < 0) throw InvalidArgument("thread count must be non-negative");
  planner(0).validate();
}

PlannerConfig RunConfig::planner(std::uint64_t seed) const {
  PlannerConfig p;
  p.horizon = horizon;
  p.batch_size = batch_size;
  p.hindrance = hindrance;
  p.balanced = balanced;
  p.seed = seed;
  p.threads = threads;
  return p;
}

Workload load_workload(const RunConfig& config) {
  config.validate();
  Workload w;
  w.graph = std::make_shared<const GridGraph>(build_graph(load_map(config.map_path)));
  if (config.agents > static_cast<std::size_t>(w.graph->vertex_count()))
    throw InvalidArgument("agent count exceeds the number of passable cells");
  if (!config.scenario_path.empty()) {
    w.scenario = load_scenario(config.scenario_path, *w.graph);
    if (w.scenario.size() < config.agents) throw InvalidArgument("scenario has fewer entries than agents");
  }
  return w;
}

Instance make_instance(const Workload& workload, const RunConfig& config, std::uint64_t seed) {
  auto instance = [&] {
    if (workload.scenario.empty()) return random_instance(workload.graph, config.agents, seed);
    std::vector<Vertex> starts, goals;
    for (std::size_t a = 0; a < config.agents; ++a) {
      starts.push_back(workload.scenario[a].start);
      goals.push_back(workload.scenario[a].goal);
    }
    return Instance(workload.graph, std::move(starts), std::move(goals));
  }();
  if (config.mode != RunMode::kOneShot) instance.make_lifelong(seed);
  return instance;
}

ResultRow run_single(const Workload& workload, const RunConfig& config, Algorithm algo, std::uint64_t seed,
                     ExecutionTrace* trace_out) {
  Instance instance = make_instance(workload, config, seed);
  std::unique_ptr<Controller> controller;
  if (algo == Algorithm::kFico) {
    controller = std::make_unique<FicoController>(*workload.graph, config.planner(seed));
  } else {
    controller = std::make_unique<PibtController>(*workload.graph, config.planner(seed));
  }
  std::unique_ptr<Actuator> actuator;
  if (config.p_delay > 0.0) {
    actuator = std::make_unique<DelayActuator>(config.p_delay, seed);
  } else {
    actuator = std::make_unique<PerfectActuator>();
  }
  const Environment environment(EnvironmentOptions{config.p_add, seed});

  Termination termination;
  switch (config.mode) {
    case RunMode::kOneShot: termination = Termination::all_at_goal(); break;
    case RunMode::kLifelong: termination = Termination::time_limit(config.t_max); break;
    case RunMode::kItemBudget:
      termination = Termination::item_budget(config.budget_seconds, config.step_seconds);
      break;
  }
  termination.safety_cap = config.safety_cap;

  ExecutionTrace trace = run_closed_loop(*controller, *actuator, environment, instance, termination);
  ResultRow row;
  row.seed = seed;
  row.algorithm = algo;
  row.mode = config.mode;
  row.agents = config.agents;
  row.final_agents = trace.final_state.size();
  row.steps = trace.length();
  row.termination = trace.reason;
  row.incomplete = trace.incomplete;
  row.violations = validate_trace(trace, *workload.graph).size();
  row.metrics = compute_metrics(trace, *workload.graph);
  if (trace_out) *trace_out = std::move(trace);
  return row;
}

std::vector<ResultRow> run_benchmark(const RunConfig& config) {
  const Workload workload = load_workload(config);
  const auto algos = config.algorithms.size();
  const auto entries = config.seeds.size() * algos;
  std::vector<ResultRow> rows(entries);

  // Independent runs share the thread budget; each controller then plans on
  // one thread. A single run gets the whole budget.
  RunConfig per_run = config;
  Executor sweep(entries > 1 ? config.threads : 1);
  if (sweep.threads() > 1) per_run.threads = 1;
  sweep.parallel_for(entries, [&](std::size_t i) {
    rows[i] = run_single(workload, per_run, config.algorithms[i % algos], config.seeds[i / algos]);
  });
  return rows;
}

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return fixed(*v);
  } else {
    return std::to_string(*v);
  }
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

void write_rows(std::ostream& out, const RunConfig& config, const std::vector<ResultRow>& rows, RowFormat format) {
  if (format.jsonl) {
    for (const auto& r : rows) {
      const auto& m = r.metrics;
      nlohmann::ordered_json j;
      j["seed"] = r.seed;
      j["algo"] = to_string(r.algorithm);
      j["mode"] = to_string(r.mode);
      j["agents"] = r.agents;
      j["final_agents"] = r.final_agents;
      j["horizon"] = config.horizon;
      j["batch_size"] = config.batch_size;
      j["hindrance"] = config.hindrance;
      j["balanced"] = config.balanced;
      j["p_delay"] = config.p_delay;
      j["p_add"] = config.p_add;
      j["steps"] = r.steps;
      j["termination"] = to_string(r.termination);
      j["incomplete"] = r.incomplete;
      j["violations"] = r.violations;
      j["makespan"] = m.makespan;
      j["soc"] = m.soc;
      j["delta_soc"] = m.delta_soc ? nlohmann::ordered_json(*m.delta_soc) : nlohmann::ordered_json(nullptr);
      j["throughput"] = m.throughput;
      j["goals_reached"] = m.goals_reached;
      j["items_delivered"] =
          m.items_delivered ? nlohmann::ordered_json(*m.items_delivered) : nlohmann::ordered_json(nullptr);
      j["mean_cf_fraction"] = m.mean_conflict_free_fraction ? nlohmann::ordered_json(*m.mean_conflict_free_fraction)
                                                            : nlohmann::ordered_json(nullptr);
      if (format.timing) {
        j["ert_seconds"] = m.ert_seconds;
        j["mean_plan_seconds"] = mean_of(m.planning_seconds);
        j["max_plan_seconds"] = max_of(m.planning_seconds);
      }
      out << j.dump() << '\n';
    }
    return;
  }

  out << "seed,algo,mode,agents,final_agents,horizon,batch_size,hindrance,balanced,p_delay,p_add,steps,termination,"
         "incomplete,violations,makespan,soc,delta_soc,throughput,goals_reached,items_delivered,mean_cf_fraction";
  if (format.timing) out << ",ert_seconds,mean_plan_seconds,max_plan_seconds";
  out << '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << r.seed << ',' << to_string(r.algorithm) << ',' << to_string(r.mode) << ',' << r.agents << ','
        << r.final_agents << ',' << config.horizon << ',' << config.batch_size << ',' << int(config.hindrance) << ','
        << int(config.balanced) << ',' << fixed(config.p_delay) << ',' << fixed(config.p_add) << ',' << r.steps << ','
        << to_string(r.termination) << ',' << int(r.incomplete) << ',' << r.violations << ',' << m.makespan << ','
        << m.soc << ',' << opt(m.delta_soc) << ',' << fixed(m.throughput) << ',' << m.goals_reached << ','
        << opt(m.items_delivered) << ',' << opt(m.mean_conflict_free_fraction);
    if (format.timing)
      out << ',' << fixed(m.ert_seconds) << ',' << fixed(mean_of(m.planning_seconds)) << ','
          << fixed(max_of(m.planning_seconds));
    out << '\n';
  }
}

}  // namespace fico
