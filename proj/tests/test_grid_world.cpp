#include <sstream>

#include "doctest.h"
#include "fico/grid_world.hpp"
#include "oracles.hpp"

using namespace fico;

namespace {

std::string map_text(int h, int w, const std::string& rows) {
  return "type octile\nheight " + std::to_string(h) + "\nwidth " + std::to_string(w) + "\nmap\n" + rows;
}

}  // namespace

TEST_CASE("parse_map counts passable cells") {
  auto m = parse_map(std::string_view(map_text(4, 4, "....\n.@..\n....\n....\n")));
  CHECK(m.width() == 4);
  CHECK(m.height() == 4);
  CHECK(m.passable_count() == 15);
  CHECK_FALSE(m.passable(1, 1));
  CHECK(m.passable(0, 1));
}

TEST_CASE("parse_map accepts width before height and tree/out-of-bounds glyphs") {
  auto m = parse_map(std::string_view("type octile\nwidth 3\nheight 2\nmap\n.T.\nGO@\n"));
  CHECK(m.width() == 3);
  CHECK(m.height() == 2);
  CHECK(m.passable_count() == 3);
}

TEST_CASE("parse_map rejects an extra row with its line number") {
  try {
    parse_map(std::string_view(map_text(2, 2, "..\n..\n..\n")));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
  }
}

TEST_CASE("parse_map rejects short rows, unknown glyphs and missing rows") {
  CHECK_THROWS_AS(parse_map(std::string_view(map_text(2, 3, "...\n..\n"))), ParseError);
  CHECK_THROWS_AS(parse_map(std::string_view(map_text(1, 3, ".x.\n"))), ParseError);
  CHECK_THROWS_AS(parse_map(std::string_view(map_text(3, 3, "...\n"))), ParseError);
  CHECK_THROWS_AS(parse_map(std::string_view("type octile\nheight 0\nwidth 3\nmap\n")), ParseError);
}

TEST_CASE("all-blocked map parses but has no graph") {
  auto m = parse_map(std::string_view(map_text(2, 2, "@@\n@@\n")));
  CHECK(m.passable_count() == 0);
  CHECK_THROWS_AS(build_graph(m), InvalidArgument);
}

TEST_CASE("map round-trips through the MovingAI writer") {
  auto m = parse_map(std::string_view(map_text(3, 4, "..@.\n....\n@...\n")));
  auto again = parse_map(std::string_view(m.to_movingai()));
  CHECK(again.width() == 4);
  CHECK(std::equal(m.cells().begin(), m.cells().end(), again.cells().begin(), again.cells().end()));
}

TEST_CASE("build_graph on open and punctured 3x3") {
  auto open = oracle::open_grid(3, 3);
  CHECK(open->vertex_count() == 9);
  CHECK(open->neighbors(open->vertex_at(0, 0)).size() == 2);
  CHECK(open->neighbors(open->vertex_at(1, 1)).size() == 4);

  auto ring = oracle::grid({"...", ".@.", "..."});
  CHECK(ring->vertex_count() == 8);
  CHECK(ring->vertex_at(1, 1) == kNoVertex);
  for (Vertex v = 0; v < ring->vertex_count(); ++v) CHECK(ring->neighbors(v).size() == 2);
}

TEST_CASE("1x1 map has one vertex and only waiting") {
  auto g = oracle::grid({"."});
  CHECK(g->vertex_count() == 1);
  CHECK(g->neighbors(0).empty());
  CHECK(g->can_move(0, 0));
}

TEST_CASE("vertex ids are row-major and adjacency is symmetric") {
  auto g = oracle::grid({"..@.", "....", ".@.."});
  Vertex prev = -1;
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 4; ++x) {
      const Vertex v = g->vertex_at(x, y);
      if (v == kNoVertex) continue;
      CHECK(v == prev + 1);
      CHECK(g->x(v) == x);
      CHECK(g->y(v) == y);
      prev = v;
    }
  for (Vertex u = 0; u < g->vertex_count(); ++u) {
    const auto n = g->neighbors(u);
    CHECK(std::is_sorted(n.begin(), n.end()));
    for (Vertex w : n) {
      CHECK(w != u);
      CHECK(g->adjacent(w, u));
      CHECK(std::abs(g->x(u) - g->x(w)) + std::abs(g->y(u) - g->y(w)) == 1);
    }
  }
}

TEST_CASE("generic graphs reject self loops") {
  CHECK_THROWS_AS(GridGraph(std::vector<std::vector<Vertex>>{{0}}), InvalidArgument);
  GridGraph g({{1}, {0, 2}, {1}});
  CHECK(g.adjacent(0, 1));
  CHECK_FALSE(g.adjacent(0, 2));
}

TEST_CASE("parse_scenario maps coordinates and reports bad lines") {
  auto g = oracle::open_grid(4, 4);
  const std::string scen = "version 1\n0\tm.map\t4\t4\t0\t0\t3\t3\t6\n1\tm.map\t4\t4\t1\t0\t0\t2\t3.0\n";
  auto entries = parse_scenario(std::string_view(scen), *g);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].start == g->vertex_at(0, 0));
  CHECK(entries[0].goal == g->vertex_at(3, 3));
  CHECK(entries[1].goal == g->vertex_at(0, 2));
  CHECK(entries[0].optimal_length == doctest::Approx(6.0));

  CHECK(parse_scenario(std::string_view(""), *g).empty());

  auto blocked = oracle::grid({"@...", "....", "....", "...."});
  try {
    parse_scenario(std::string_view("version 1\n0\tm.map\t4\t4\t0\t0\t3\t3\t6\n"), *blocked);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_scenario(std::string_view("0\tm.map\t4\t4\t9\t0\t3\t3\t6\n"), *g), ParseError);
  CHECK_THROWS_AS(parse_scenario(std::string_view("0\tm.map\t4\n"), *g), ParseError);
}

TEST_CASE("load_map reports missing files as i/o errors") {
  CHECK_THROWS_AS(load_map("/nonexistent/file.map"), IoError);
}

TEST_CASE("random maps are connected, seeded and near the requested ratio") {
  auto a = generate_random_map(32, 32, 0.1, 5);
  auto b = generate_random_map(32, 32, 0.1, 5);
  auto c = generate_random_map(32, 32, 0.1, 6);
  CHECK(std::equal(a.cells().begin(), a.cells().end(), b.cells().begin(), b.cells().end()));
  CHECK_FALSE(std::equal(a.cells().begin(), a.cells().end(), c.cells().begin(), c.cells().end()));
  const auto g = build_graph(a);
  const auto d = oracle::bfs(g, 0);
  CHECK(std::all_of(d.begin(), d.end(), [](int x) { return x >= 0; }));
  CHECK(g.vertex_count() >= static_cast<int>(0.85 * 32 * 32));
  CHECK(g.vertex_count() <= static_cast<int>(0.90 * 32 * 32) + 1);
}
