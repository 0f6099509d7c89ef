#include "fico/fico.h"

#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <string>

#include "fico/benchmark.hpp"

struct fico_map {
  fico::GridMap map;
};

struct fico_run {
  std::shared_ptr<const fico::GridGraph> graph;
  fico::ExecutionTrace trace;
  fico::ResultRow row;
};

namespace {

thread_local std::string last_error;

fico_status fail(fico_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, translating library exceptions into status codes.
template <class F>
fico_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return FICO_OK;
  } catch (const fico::ParseError& e) {
    return fail(FICO_E_PARSE, e.what());
  } catch (const fico::IoError& e) {
    return fail(FICO_E_IO, e.what());
  } catch (const fico::InvalidArgument& e) {
    return fail(FICO_E_INVALID_ARGUMENT, e.what());
  } catch (const fico::Unsolvable& e) {
    return fail(FICO_E_UNSOLVABLE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FICO_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FICO_E_INTERNAL, e.what());
  } catch (...) {
    return fail(FICO_E_INTERNAL, "unknown error");
  }
}

fico::Algorithm to_algorithm(fico_algorithm a) {
  return a == FICO_ALGO_FICO ? fico::Algorithm::kFico : fico::Algorithm::kPibt;
}

fico::RunConfig to_run_config(const fico_run_config& c) {
  if (c.mode < FICO_MODE_ONE_SHOT || c.mode > FICO_MODE_ITEM_BUDGET) throw fico::InvalidArgument("unknown mode");
  fico::RunConfig rc;
  rc.map_path = c.map_path;
  rc.scenario_path = c.scenario_path ? c.scenario_path : "";
  rc.agents = c.agents;
  rc.mode = static_cast<fico::RunMode>(c.mode);
  rc.algorithms = {to_algorithm(c.algorithm)};
  rc.horizon = c.horizon;
  rc.batch_size = c.batch_size;
  rc.hindrance = c.hindrance != 0;
  rc.balanced = c.balanced != 0;
  rc.p_delay = c.p_delay;
  rc.p_add = c.p_add;
  rc.t_max = c.t_max;
  rc.seeds = {c.seed};
  rc.threads = c.threads;
  rc.budget_seconds = c.budget_seconds;
  rc.step_seconds = c.step_seconds;
  rc.safety_cap = c.safety_cap;
  return rc;
}

}  // namespace

extern "C" {

const char* fico_last_error(void) { return last_error.c_str(); }

const char* fico_status_name(fico_status status) {
  switch (status) {
    case FICO_OK: return "ok";
    case FICO_E_INVALID_ARGUMENT: return "invalid argument";
    case FICO_E_PARSE: return "parse error";
    case FICO_E_IO: return "i/o error";
    case FICO_E_UNSOLVABLE: return "unsolvable";
    case FICO_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

fico_status fico_map_load(const char* path, fico_map** out) {
  if (!path || !out) return fail(FICO_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fico_map{fico::load_map(path)}; });
}

fico_status fico_map_parse(const char* text, fico_map** out) {
  if (!text || !out) return fail(FICO_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fico_map{fico::parse_map(std::string_view(text))}; });
}

fico_status fico_map_generate_random(int width, int height, double obstacle_ratio, uint64_t seed, fico_map** out) {
  if (!out) return fail(FICO_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fico_map{fico::generate_random_map(width, height, obstacle_ratio, seed)}; });
}

fico_status fico_map_write(const fico_map* map, const char* path) {
  if (!map || !path) return fail(FICO_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) throw fico::IoError(std::string("cannot write ") + path);
    out << map->map.to_movingai();
    if (!out) throw fico::IoError(std::string("write failed: ") + path);
  });
}

int fico_map_width(const fico_map* map) { return map ? map->map.width() : 0; }
int fico_map_height(const fico_map* map) { return map ? map->map.height() : 0; }
int fico_map_passable_count(const fico_map* map) { return map ? static_cast<int>(map->map.passable_count()) : 0; }
void fico_map_free(fico_map* map) { delete map; }

void fico_run_config_init(fico_run_config* config) {
  if (!config) return;
  const fico::RunConfig defaults;
  *config = fico_run_config{};
  config->map_path = nullptr;
  config->scenario_path = nullptr;
  config->agents = 0;
  config->mode = FICO_MODE_ONE_SHOT;
  config->algorithm = FICO_ALGO_FICO;
  config->horizon = defaults.horizon;
  config->batch_size = defaults.batch_size;
  config->hindrance = defaults.hindrance;
  config->balanced = defaults.balanced;
  config->p_delay = defaults.p_delay;
  config->p_add = defaults.p_add;
  config->t_max = defaults.t_max;
  config->seed = 0;
  config->threads = defaults.threads;
  config->budget_seconds = defaults.budget_seconds;
  config->step_seconds = defaults.step_seconds;
  config->safety_cap = defaults.safety_cap;
}

fico_status fico_run_execute(const fico_run_config* config, fico_run** out) {
  if (!config || !out) return fail(FICO_E_INVALID_ARGUMENT, "null argument");
  if (!config->map_path) return fail(FICO_E_INVALID_ARGUMENT, "map_path is required");
  if (config->algorithm != FICO_ALGO_FICO && config->algorithm != FICO_ALGO_PIBT)
    return fail(FICO_E_INVALID_ARGUMENT, "unknown algorithm");
  return guarded([&] {
    const auto rc = to_run_config(*config);
    const auto algo = rc.algorithms.front();
    const auto workload = fico::load_workload(rc);
    auto run = std::make_unique<fico_run>();
    run->graph = workload.graph;
    run->row = fico::run_single(workload, rc, algo, config->seed, &run->trace);
    *out = run.release();
  });
}

fico_status fico_run_metrics(const fico_run* run, fico_metrics* out) {
  if (!run || !out) return fail(FICO_E_INVALID_ARGUMENT, "null argument");
  const auto& m = run->row.metrics;
  *out = fico_metrics{};
  out->steps = run->row.steps;
  out->makespan = m.makespan;
  out->soc = m.soc;
  out->has_delta_soc = m.delta_soc.has_value();
  out->delta_soc = m.delta_soc.value_or(0);
  out->throughput = m.throughput;
  out->goals_reached = m.goals_reached;
  out->has_items_delivered = m.items_delivered.has_value();
  out->items_delivered = m.items_delivered.value_or(0);
  out->has_conflict_free_fraction = m.mean_conflict_free_fraction.has_value();
  out->mean_conflict_free_fraction = m.mean_conflict_free_fraction.value_or(0.0);
  out->ert_seconds = m.ert_seconds;
  double total = 0.0;
  for (double s : m.planning_seconds) total += s;
  out->mean_planning_seconds = m.planning_seconds.empty() ? 0.0 : total / static_cast<double>(m.planning_seconds.size());
  out->incomplete = run->row.incomplete;
  out->final_agents = run->row.final_agents;
  last_error.clear();
  return FICO_OK;
}

size_t fico_run_violation_count(const fico_run* run) { return run ? run->row.violations : 0; }

fico_status fico_run_write_trace(const fico_run* run, const char* path) {
  if (!run || !path) return fail(FICO_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) throw fico::IoError(std::string("cannot write ") + path);
    fico::write_trace_jsonl(out, run->trace, *run->graph);
  });
}

void fico_run_free(fico_run* run) { delete run; }

fico_status fico_benchmark_write(const fico_run_config* config, const uint64_t* seeds, size_t seed_count,
                                 const fico_algorithm* algorithms, size_t algorithm_count, int jsonl, int timing,
                                 const char* out_path) {
  if (!config || !config->map_path || (!seeds && seed_count) || (!algorithms && algorithm_count))
    return fail(FICO_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto rc = to_run_config(*config);
    rc.seeds.assign(seeds, seeds + seed_count);
    rc.algorithms.clear();
    for (size_t i = 0; i < algorithm_count; ++i) {
      if (algorithms[i] != FICO_ALGO_FICO && algorithms[i] != FICO_ALGO_PIBT)
        throw fico::InvalidArgument("unknown algorithm");
      rc.algorithms.push_back(to_algorithm(algorithms[i]));
    }
    const auto rows = fico::run_benchmark(rc);
    const fico::RowFormat format{jsonl != 0, timing != 0};
    if (out_path) {
      std::ofstream out(out_path);
      if (!out) throw fico::IoError(std::string("cannot write ") + out_path);
      fico::write_rows(out, rc, rows, format);
    } else {
      fico::write_rows(std::cout, rc, rows, format);
      std::cout.flush();
    }
  });
}

}  // extern "C"
