#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fico/planners.hpp"
#include "fico/simulator.hpp"

namespace fico {

enum class RunMode { kOneShot, kLifelong, kItemBudget };
enum class Algorithm { kFico, kPibt };

const char* to_string(RunMode mode) noexcept;
const char* to_string(Algorithm algo) noexcept;
RunMode parse_mode(const std::string& text);
Algorithm parse_algorithm(const std::string& text);

struct RunConfig {
  std::string map_path;
  // Optional; without it instances are drawn by random_instance.
  std::string scenario_path;
  std::size_t agents = 0;
  RunMode mode = RunMode::kOneShot;
  std::vector<Algorithm> algorithms{Algorithm::kFico};
  int horizon = 3;
  int batch_size = 10;
  bool hindrance = true;
  bool balanced = true;
  double p_delay = 0.0;
  double p_add = 0.0;
  Timestep t_max = 500;
  std::vector<std::uint64_t> seeds{0};
  int threads = 1;
  double budget_seconds = 60.0;
  double step_seconds = 2.0;
  // 0 selects the simulator default.
  Timestep safety_cap = 0;

  void validate() const;
  PlannerConfig planner(std::uint64_t seed) const;
};

struct ResultRow {
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::kFico;
  RunMode mode = RunMode::kOneShot;
  std::size_t agents = 0;
  std::size_t final_agents = 0;
  Timestep steps = 0;
  TerminationReason termination = TerminationReason::kAllAtGoal;
  bool incomplete = false;
  std::size_t violations = 0;
  MetricsReport metrics;
};

// One instance per seed: graph and instance construction shared by all runners.
struct Workload {
  std::shared_ptr<const GridGraph> graph;
  std::vector<ScenarioEntry> scenario;
};

Workload load_workload(const RunConfig& config);
Instance make_instance(const Workload& workload, const RunConfig& config, std::uint64_t seed);

// One closed-loop run. `trace_out` receives the trace when non-null.
ResultRow run_single(const Workload& workload, const RunConfig& config, Algorithm algo, std::uint64_t seed,
                     ExecutionTrace* trace_out = nullptr);

// Rows ordered by (seed, algorithm) as listed in the config.
std::vector<ResultRow> run_benchmark(const RunConfig& config);

struct RowFormat {
  bool jsonl = false;
  // Wall-clock columns differ between reruns; off by default.
  bool timing = false;
};

void write_rows(std::ostream& out, const RunConfig& config, const std::vector<ResultRow>& rows, RowFormat format);

}  // namespace fico
