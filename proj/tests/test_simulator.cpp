#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fico/benchmark.hpp"
#include "fico/planners.hpp"
#include "fico/simulator.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace fico;

namespace {

Movement moves(const std::vector<Vertex>& from, const std::vector<Vertex>& to) {
  Movement m;
  for (std::size_t i = 0; i < from.size(); ++i) m.moves.push_back({from[i], to[i]});
  return m;
}

// Trace from a list of joint positions, planned == executed.
ExecutionTrace hand_trace(const std::vector<std::vector<Vertex>>& states, const std::vector<Vertex>& goals) {
  ExecutionTrace tr;
  for (std::size_t t = 0; t + 1 < states.size(); ++t) {
    TraceStep s;
    s.state = State{states[t]};
    s.planned = s.executed = moves(states[t], states[t + 1]);
    tr.steps.push_back(s);
  }
  tr.final_state = State{states.back()};
  tr.starts = states.front();
  tr.first_goals = goals;
  tr.arrivals.resize(goals.size());
  tr.entry_time.assign(goals.size(), 0);
  return tr;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

std::string write_map(const std::string& name, const std::vector<std::string>& rows) {
  const auto path = temp_file(name);
  std::ofstream out(path);
  out << "type octile\nheight " << rows.size() << "\nwidth " << rows.front().size() << "\nmap\n";
  for (const auto& r : rows) out << r << '\n';
  return path.string();
}

}  // namespace

TEST_CASE("single agent four steps from its goal finishes at makespan 4") {
  auto g = oracle::grid({"....."});
  Instance inst(g, {0}, {4});
  FicoController ctl(*g, PlannerConfig{});
  PerfectActuator act;
  auto tr = run_closed_loop(ctl, act, Environment{}, inst, Termination::all_at_goal());
  CHECK(tr.reason == TerminationReason::kAllAtGoal);
  CHECK_FALSE(tr.incomplete);
  auto m = compute_metrics(tr, *g);
  CHECK(m.makespan == 4);
  CHECK(m.soc == 4);
  CHECK(*m.delta_soc == 0);
  CHECK(validate_trace(tr, *g).empty());
}

TEST_CASE("time-limited runs record exactly t_max steps") {
  auto g = oracle::open_grid(8, 8);
  Instance inst = random_instance(g, 10, 2);
  inst.make_lifelong(2);
  FicoController ctl(*g, PlannerConfig{});
  PerfectActuator act;
  auto tr = run_closed_loop(ctl, act, Environment{}, inst, Termination::time_limit(100));
  CHECK(tr.length() == 100);
  CHECK(tr.reason == TerminationReason::kTimeLimit);
  CHECK(validate_trace(tr, *g).empty());
  auto m = compute_metrics(tr, *g);
  CHECK_FALSE(m.delta_soc.has_value());
  CHECK(m.throughput == doctest::Approx(static_cast<double>(m.goals_reached) / 100.0));
}

TEST_CASE("agents that never move hit the safety cap and are flagged") {
  auto g = oracle::open_grid(5, 5);
  Instance inst(g, {0, 24}, {24, 0});
  FicoController ctl(*g, PlannerConfig{});
  DelayActuator act(1.0, 0);
  auto tr = run_closed_loop(ctl, act, Environment{}, inst, Termination::all_at_goal());
  CHECK(tr.reason == TerminationReason::kSafetyCap);
  CHECK(tr.incomplete);
  CHECK(tr.length() == 10 * (5 + 5 + 2));
  CHECK(tr.final_state.positions == std::vector<Vertex>{0, 24});
}

TEST_CASE("validator flags swaps, shared cells and jumps") {
  auto g = oracle::grid({"....."});
  SUBCASE("swap") {
    auto v = movement_violations(*g, State{{1, 2}}, moves({1, 2}, {2, 1}), 0);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::kEdge);
  }
  SUBCASE("vertex") {
    auto v = movement_violations(*g, State{{1, 3}}, moves({1, 3}, {2, 2}), 0);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::kVertex);
    CHECK(v[0].vertex == 2);
  }
  SUBCASE("jump") {
    auto v = movement_violations(*g, State{{0}}, moves({0}, {2}), 0);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::kAdjacency);
  }
  SUBCASE("following is fine") {
    CHECK(movement_violations(*g, State{{1, 2}}, moves({1, 2}, {2, 3}), 0).empty());
  }
  SUBCASE("whole trace") {
    auto tr = hand_trace({{0, 3}, {1, 2}, {2, 1}}, {4, 0});
    auto v = validate_trace(tr, *g);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].t == 1);
  }
}

TEST_CASE("metric examples on hand-built traces") {
  auto g = oracle::grid({"....."});
  // Agent 0 takes 3 steps, agent 1 starts on its goal.
  auto tr = hand_trace({{0, 4}, {1, 4}, {2, 4}, {3, 4}}, {3, 4});
  auto m = compute_metrics(tr, *g);
  CHECK(m.makespan == 3);
  CHECK(m.soc == 3);
  CHECK(*m.delta_soc == 0);

  // One wait adds one to the cost and to the excess.
  auto slow = hand_trace({{0}, {0}, {1}, {2}, {3}}, {3});
  CHECK(*compute_metrics(slow, *g).delta_soc == 1);

  // Ten lifelong steps with one delivery.
  auto life = hand_trace(std::vector<std::vector<Vertex>>(11, std::vector<Vertex>{0}), {1});
  life.lifelong = true;
  life.t_max = 10;
  life.arrivals[0].push_back(4);
  auto lm = compute_metrics(life, *g);
  CHECK(lm.throughput == doctest::Approx(0.1));
  CHECK_FALSE(lm.delta_soc.has_value());
  CHECK_FALSE(lm.items_delivered.has_value());
}

TEST_CASE("trace reconstructs states and planned equals executed without delays") {
  auto g = std::make_shared<const GridGraph>(build_graph(generate_random_map(16, 16, 0.1, 5)));
  Instance inst = random_instance(g, 30, 5);
  FicoController ctl(*g, PlannerConfig{});
  PerfectActuator act;
  auto tr = run_closed_loop(ctl, act, Environment{}, inst, Termination::all_at_goal());
  REQUIRE(tr.reason == TerminationReason::kAllAtGoal);
  State s{tr.starts};
  for (Timestep t = 0; t < tr.length(); ++t) {
    CHECK(tr.state_at(t) == s);
    CHECK(tr.steps[t].planned == tr.steps[t].executed);
    s.positions = destinations(tr.steps[t].executed);
  }
  CHECK(s == tr.final_state);
  for (std::size_t a = 0; a < s.size(); ++a) CHECK(s.positions[a] == tr.first_goals[a]);
  CHECK(validate_trace(tr, *g).empty());
}

TEST_CASE("delayed runs stay valid and keep the item budget honest") {
  auto g = std::make_shared<const GridGraph>(build_graph(generate_random_map(16, 16, 0.1, 6)));
  Instance inst = random_instance(g, 30, 6);
  inst.make_lifelong(6);
  FicoController ctl(*g, PlannerConfig{});
  DelayActuator act(0.2, 6);
  auto tr = run_closed_loop(ctl, act, Environment{EnvironmentOptions{0.1, 6}}, inst,
                            Termination::item_budget(60.0, 2.0));
  CHECK(tr.reason == TerminationReason::kBudgetExhausted);
  CHECK(tr.length() <= 30);
  CHECK(tr.virtual_seconds <= 60.0);
  CHECK(validate_trace(tr, *g).empty());
  auto m = compute_metrics(tr, *g);
  REQUIRE(m.items_delivered.has_value());
  CHECK(*m.items_delivered == m.goals_reached);
}

TEST_CASE("JSON-lines trace export") {
  auto g = oracle::grid({"....."});
  auto tr = hand_trace({{0, 4}, {1, 4}}, {1, 4});
  std::ostringstream out;
  write_trace_jsonl(out, tr, *g);
  std::istringstream in(out.str());
  std::vector<nlohmann::json> recs;
  for (std::string line; std::getline(in, line);) recs.push_back(nlohmann::json::parse(line));
  REQUIRE(recs.size() == 5);
  CHECK(recs[2]["t"] == 1);
  CHECK(recs[2]["agent"] == 0);
  CHECK(recs[2]["vertex"] == 1);
  CHECK(recs[2]["x"] == 1);
  CHECK(recs[2]["y"] == 0);
  CHECK(recs[4]["summary"] == true);
  CHECK(recs[4]["steps"] == 1);
  CHECK(recs[4]["agents"] == 2);
}

TEST_CASE("benchmark rows are byte-identical across reruns") {
  RunConfig cfg;
  cfg.map_path = write_map("fico_bench_rows.map", std::vector<std::string>(12, std::string(12, '.')));
  cfg.agents = 20;
  cfg.algorithms = {Algorithm::kFico, Algorithm::kPibt};
  cfg.seeds = {1, 2, 3};
  cfg.p_delay = 0.1;
  cfg.threads = 2;
  auto render = [&](RowFormat f) {
    std::ostringstream out;
    write_rows(out, cfg, run_benchmark(cfg), f);
    return out.str();
  };
  const auto first = render({});
  CHECK(first == render({}));
  CHECK(first.find("fico") != std::string::npos);

  cfg.threads = 1;
  CHECK(first == render({}));

  cfg.mode = RunMode::kLifelong;
  cfg.t_max = 50;
  auto rows = run_benchmark(cfg);
  for (const auto& r : rows) {
    CHECK_FALSE(r.metrics.delta_soc.has_value());
    CHECK(r.steps == 50);
    CHECK(r.violations == 0);
  }
  std::ostringstream js;
  write_rows(js, cfg, rows, RowFormat{true, false});
  std::istringstream in(js.str());
  std::string line;
  std::getline(in, line);
  CHECK(nlohmann::json::parse(line)["delta_soc"].is_null());
}

TEST_CASE("run configuration is validated") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.map_path = "x.map";
  cfg.agents = 3;
  cfg.p_delay = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK_THROWS_AS(parse_mode("sometimes"), InvalidArgument);
  CHECK(parse_algorithm("pibt") == Algorithm::kPibt);
}
