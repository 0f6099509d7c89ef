#include <map>
#include <random>

#include "doctest.h"
#include "fico/heuristics.hpp"
#include "fico/random.hpp"
#include "oracles.hpp"

using namespace fico;

TEST_CASE("distance on small grids matches BFS") {
  auto open = oracle::open_grid(3, 3);
  GoalContext ctx(*open, open->vertex_at(2, 2));
  CHECK(ctx.distance(open->vertex_at(0, 0)) == 4);
  CHECK(ctx.distance(open->vertex_at(2, 2)) == 0);

  auto ring = oracle::grid({"...", ".@.", "..."});
  GoalContext rc(*ring, ring->vertex_at(2, 2));
  CHECK(rc.distance(ring->vertex_at(0, 0)) == 4);
}

TEST_CASE("distance and counts agree with oracles on a cluttered map") {
  auto g = std::make_shared<const GridGraph>(build_graph(generate_random_map(12, 10, 0.2, 3)));
  for (Vertex goal : {Vertex{0}, g->vertex_count() / 2, g->vertex_count() - 1}) {
    GoalContext ctx(*g, goal);
    const auto d = oracle::bfs(*g, goal);
    // Query in a scrambled order so the lazy expansion is exercised.
    for (Vertex v = g->vertex_count() - 1; v >= 0; v -= 3) CHECK(ctx.distance(v) == d[v]);
    for (Vertex v = 0; v < g->vertex_count(); v += 7) {
      if (d[v] > 8) continue;
      const auto paths = oracle::shortest_paths(*g, v, goal);
      CHECK(ctx.path_count(v) == doctest::Approx(static_cast<double>(paths.size())));
    }
  }
}

TEST_CASE("distance stops expanding once the query is answered") {
  auto g = oracle::open_grid(20, 20);
  GoalContext ctx(*g, g->vertex_at(0, 0));
  CHECK(ctx.distance(g->vertex_at(1, 0)) == 1);
  CHECK(ctx.expansions() < 5);
  CHECK_FALSE(ctx.exhausted());
}

TEST_CASE("unreachable vertices") {
  auto g = oracle::grid({"..@..", "..@.."});
  GoalContext ctx(*g, g->vertex_at(0, 0));
  CHECK(ctx.distance(g->vertex_at(4, 1)) == kUnreachable);
  CHECK(ctx.exhausted());
  CHECK_THROWS_AS(ctx.path_count(g->vertex_at(4, 1)), Unsolvable);
}

TEST_CASE("path counts on the examples") {
  auto open = oracle::open_grid(3, 3);
  GoalContext ctx(*open, open->vertex_at(2, 2));
  CHECK(ctx.path_count(open->vertex_at(0, 0)) == 6.0);
  CHECK(ctx.path_count(open->vertex_at(2, 2)) == 1.0);
  CHECK(ctx.path_count(open->vertex_at(2, 0)) == 1.0);
  CHECK(ctx.path_count(open->vertex_at(1, 1)) == 2.0);

  auto corridor = oracle::grid({"...."});
  GoalContext cc(*corridor, 0);
  CHECK(cc.path_count(3) == 1.0);
}

TEST_CASE("candidate sets") {
  auto open = oracle::open_grid(3, 3);
  GoalContext ctx(*open, open->vertex_at(2, 2));
  CHECK(ctx.candidate_set(open->vertex_at(0, 0)) ==
        std::vector<Vertex>{open->vertex_at(1, 0), open->vertex_at(0, 1)});
  CHECK(ctx.candidate_set(open->vertex_at(2, 2)).empty());

  auto corridor = oracle::grid({"....."});
  GoalContext cc(*corridor, 4);
  CHECK(cc.candidate_set(2) == std::vector<Vertex>{3});

  auto ring = oracle::grid({"...", ".@.", "..."});
  GoalContext rc(*ring, ring->vertex_at(2, 2));
  CHECK(rc.candidate_set(ring->vertex_at(0, 1)) == std::vector<Vertex>{ring->vertex_at(0, 2)});
}

TEST_CASE("balanced sampling follows successor path counts") {
  auto g = oracle::open_grid(3, 3);
  GoalContext ctx(*g, g->vertex_at(2, 2));
  Rng rng(11);
  const int trials = 30000;

  std::map<Vertex, int> from_corner, from_edge;
  for (int i = 0; i < trials; ++i) {
    ++from_corner[ctx.sample_balanced(g->vertex_at(0, 0), rng)];
    ++from_edge[ctx.sample_balanced(g->vertex_at(1, 0), rng)];
  }
  CHECK(from_corner[g->vertex_at(1, 0)] / double(trials) == doctest::Approx(0.5).epsilon(0.03));
  CHECK(from_corner[g->vertex_at(0, 1)] / double(trials) == doctest::Approx(0.5).epsilon(0.03));
  CHECK(from_edge[g->vertex_at(2, 0)] / double(trials) == doctest::Approx(1.0 / 3).epsilon(0.04));
  CHECK(from_edge[g->vertex_at(1, 1)] / double(trials) == doctest::Approx(2.0 / 3).epsilon(0.03));
  CHECK(ctx.sample_balanced(g->vertex_at(2, 2), rng) == g->vertex_at(2, 2));
}

TEST_CASE("settled sampling matches the mutating sampler draw for draw") {
  auto g = std::make_shared<const GridGraph>(build_graph(generate_random_map(16, 16, 0.15, 9)));
  GoalContext lazy(*g, g->vertex_count() - 1);
  GoalContext settled(*g, g->vertex_count() - 1);
  settled.settle_through(1000);
  for (bool balanced : {true, false}) {
    Rng a(4), b(4);
    for (Vertex v = 0; v < g->vertex_count(); ++v) {
      const Vertex x = balanced ? lazy.sample_balanced(v, a) : lazy.sample_uniform(v, a);
      CHECK(x == settled.sample_settled(v, b, balanced));
    }
  }
}

TEST_CASE("settled region guards reads beyond it") {
  auto g = oracle::open_grid(10, 1);
  GoalContext ctx(*g, 0);
  ctx.settle_through(2);
  CHECK(ctx.peek_distance(3) == 3);
  CHECK(ctx.peek_count(2) == 1.0);
  CHECK(ctx.peek_count(3) < 0);
  Rng rng(1);
  CHECK(ctx.sample_settled(2, rng, true) == 1);
  CHECK_THROWS_AS(ctx.sample_settled(8, rng, true), std::logic_error);
}

TEST_CASE("cache shares contexts per goal and evicts dead ones over capacity") {
  auto g = oracle::open_grid(4, 4);
  HeuristicCache cache(*g);
  auto& a = cache.context(3);
  CHECK(&cache.context(3) == &a);
  cache.context(5);
  cache.context(7);
  CHECK(cache.size() == 3);
  const std::vector<Vertex> live{3};
  cache.retain(live, 8);
  CHECK(cache.size() == 3);
  cache.retain(live, 2);
  CHECK(cache.size() == 1);
  CHECK(cache.find(3) == &a);
  CHECK(cache.find(5) == nullptr);
}
