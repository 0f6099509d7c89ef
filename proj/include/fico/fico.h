#ifndef FICO_FICO_H
#define FICO_FICO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define FICO_API __declspec(dllexport)
#else
#define FICO_API __attribute__((visibility("default")))
#endif

typedef enum fico_status {
  FICO_OK = 0,
  FICO_E_INVALID_ARGUMENT = 1,
  FICO_E_PARSE = 2,
  FICO_E_IO = 3,
  FICO_E_UNSOLVABLE = 4,
  FICO_E_INTERNAL = 5
} fico_status;

/* Message for the last failed call on this thread; "" after a success. */
FICO_API const char* fico_last_error(void);
FICO_API const char* fico_status_name(fico_status status);

typedef struct fico_map fico_map;

FICO_API fico_status fico_map_load(const char* path, fico_map** out);
FICO_API fico_status fico_map_parse(const char* text, fico_map** out);
/* Random obstacles at `obstacle_ratio`, reduced to the largest free component. */
FICO_API fico_status fico_map_generate_random(int width, int height, double obstacle_ratio, uint64_t seed,
                                              fico_map** out);
FICO_API fico_status fico_map_write(const fico_map* map, const char* path);
FICO_API int fico_map_width(const fico_map* map);
FICO_API int fico_map_height(const fico_map* map);
FICO_API int fico_map_passable_count(const fico_map* map);
FICO_API void fico_map_free(fico_map* map);

typedef enum fico_mode { FICO_MODE_ONE_SHOT = 0, FICO_MODE_LIFELONG = 1, FICO_MODE_ITEM_BUDGET = 2 } fico_mode;
typedef enum fico_algorithm { FICO_ALGO_FICO = 0, FICO_ALGO_PIBT = 1 } fico_algorithm;

typedef struct fico_run_config {
  const char* map_path;
  const char* scenario_path; /* NULL or "" draws a random instance from the seed */
  size_t agents;
  fico_mode mode;
  fico_algorithm algorithm;
  int horizon;
  int batch_size;
  int hindrance;
  int balanced;
  double p_delay;
  double p_add;
  int64_t t_max;
  uint64_t seed;
  int threads; /* 0: all hardware threads */
  double budget_seconds;
  double step_seconds;
  int64_t safety_cap; /* 0: default */
} fico_run_config;

/* Library defaults (horizon 3, batch size 10, hindrance and balancing on, ...). */
FICO_API void fico_run_config_init(fico_run_config* config);

typedef struct fico_metrics {
  int64_t steps;
  int64_t makespan;
  int64_t soc;
  int has_delta_soc;
  int64_t delta_soc;
  double throughput;
  int64_t goals_reached;
  int has_items_delivered;
  int64_t items_delivered;
  int has_conflict_free_fraction;
  double mean_conflict_free_fraction;
  double ert_seconds;
  double mean_planning_seconds;
  int incomplete;
  size_t final_agents;
} fico_metrics;

typedef struct fico_run fico_run;

/* Runs one closed-loop simulation; the trace stays attached to the handle. */
FICO_API fico_status fico_run_execute(const fico_run_config* config, fico_run** out);
FICO_API fico_status fico_run_metrics(const fico_run* run, fico_metrics* out);
FICO_API size_t fico_run_violation_count(const fico_run* run);
/* JSON-lines trace (one record per agent per timestep, then a summary). */
FICO_API fico_status fico_run_write_trace(const fico_run* run, const char* path);
FICO_API void fico_run_free(fico_run* run);

/* Seed x algorithm sweep over `config` (its seed and algorithm fields are
   ignored). Writes one row per run as CSV, or JSON lines when `jsonl` is set,
   to `out_path` or stdout when it is NULL. `timing` adds wall-clock columns. */
FICO_API fico_status fico_benchmark_write(const fico_run_config* config, const uint64_t* seeds, size_t seed_count,
                                          const fico_algorithm* algorithms, size_t algorithm_count, int jsonl,
                                          int timing, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif
