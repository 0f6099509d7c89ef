#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fico/fico.h"

namespace {

const char* kOpen =
    "type octile\nheight 6\nwidth 6\nmap\n"
    "......\n......\n......\n......\n......\n......\n";

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_open_map() {
  const auto path = temp_path("fico_capi_open.map");
  std::ofstream(path) << kOpen;
  return path;
}

}  // namespace

TEST_CASE("map handles") {
  fico_map* map = nullptr;
  REQUIRE(fico_map_parse(kOpen, &map) == FICO_OK);
  CHECK(std::string(fico_last_error()).empty());
  CHECK(fico_map_width(map) == 6);
  CHECK(fico_map_height(map) == 6);
  CHECK(fico_map_passable_count(map) == 36);
  const auto path = temp_path("fico_capi_roundtrip.map");
  REQUIRE(fico_map_write(map, path.c_str()) == FICO_OK);
  fico_map_free(map);

  fico_map* again = nullptr;
  REQUIRE(fico_map_load(path.c_str(), &again) == FICO_OK);
  CHECK(fico_map_passable_count(again) == 36);
  fico_map_free(again);

  fico_map* random = nullptr;
  REQUIRE(fico_map_generate_random(20, 10, 0.2, 3, &random) == FICO_OK);
  CHECK(fico_map_width(random) == 20);
  CHECK(fico_map_passable_count(random) <= 200);
  fico_map_free(random);
}

TEST_CASE("errors map to status codes with a message") {
  fico_map* map = nullptr;
  CHECK(fico_map_parse("type octile\nheight x\n", &map) == FICO_E_PARSE);
  CHECK(map == nullptr);
  CHECK(std::strlen(fico_last_error()) > 0);
  CHECK(fico_map_load("/nonexistent/none.map", &map) == FICO_E_IO);
  CHECK(fico_map_parse(nullptr, &map) == FICO_E_INVALID_ARGUMENT);
  CHECK(fico_map_parse(kOpen, nullptr) == FICO_E_INVALID_ARGUMENT);
  CHECK(std::string(fico_status_name(FICO_E_UNSOLVABLE)) == "unsolvable");

  fico_run_config c;
  fico_run_config_init(&c);
  fico_run* run = nullptr;
  CHECK(fico_run_execute(&c, &run) == FICO_E_INVALID_ARGUMENT);
  const auto path = write_open_map();
  c.map_path = path.c_str();
  c.agents = 100;
  CHECK(fico_run_execute(&c, &run) == FICO_E_INVALID_ARGUMENT);
  c.agents = 4;
  c.mode = static_cast<fico_mode>(9);
  CHECK(fico_run_execute(&c, &run) == FICO_E_INVALID_ARGUMENT);
  CHECK(run == nullptr);
}

TEST_CASE("run, metrics and trace through the C API") {
  const auto path = write_open_map();
  fico_run_config c;
  fico_run_config_init(&c);
  CHECK(c.horizon == 3);
  CHECK(c.batch_size == 10);
  c.map_path = path.c_str();
  c.agents = 8;
  c.seed = 4;
  fico_run* run = nullptr;
  REQUIRE(fico_run_execute(&c, &run) == FICO_OK);
  fico_metrics m;
  REQUIRE(fico_run_metrics(run, &m) == FICO_OK);
  CHECK(m.incomplete == 0);
  CHECK(m.makespan == m.steps);
  CHECK(m.has_delta_soc == 1);
  CHECK(m.delta_soc >= 0);
  CHECK(m.has_conflict_free_fraction == 1);
  CHECK(m.final_agents == 8);
  CHECK(fico_run_violation_count(run) == 0);

  const auto trace = temp_path("fico_capi_trace.jsonl");
  REQUIRE(fico_run_write_trace(run, trace.c_str()) == FICO_OK);
  const auto text = slurp(trace);
  CHECK(text.find("\"summary\":true") != std::string::npos);
  fico_run_free(run);
  fico_run_free(nullptr);
}

TEST_CASE("benchmark sweep writes one row per seed and algorithm") {
  const auto path = write_open_map();
  fico_run_config c;
  fico_run_config_init(&c);
  c.map_path = path.c_str();
  c.agents = 6;
  const uint64_t seeds[] = {0, 1};
  const fico_algorithm algos[] = {FICO_ALGO_FICO, FICO_ALGO_PIBT};
  const auto out = temp_path("fico_capi_rows.csv");
  REQUIRE(fico_benchmark_write(&c, seeds, 2, algos, 2, 0, 0, out.c_str()) == FICO_OK);
  const auto csv = slurp(out);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 5);
  CHECK(csv.rfind("seed,algo,mode", 0) == 0);
  CHECK(fico_benchmark_write(&c, seeds, 0, algos, 2, 0, 0, out.c_str()) == FICO_E_INVALID_ARGUMENT);
}
