#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fico/types.hpp"

namespace fico {

// Rectangular occupancy grid, row-major, y grows downwards as in MovingAI files.
class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height, std::vector<std::uint8_t> passable);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool passable(int x, int y) const { return passable_[index(x, y)] != 0; }
  bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  int index(int x, int y) const noexcept { return y * width_ + x; }
  std::size_t passable_count() const noexcept;
  std::span<const std::uint8_t> cells() const noexcept { return passable_; }

  // MovingAI .map text ("type octile" header, '.' free, '@' blocked).
  std::string to_movingai() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> passable_;
};

// Reflexive, 4-connected graph over the passable cells of a GridMap. Waiting
// is always legal and is not stored in the neighbor lists.
class GridGraph {
 public:
  GridGraph() = default;

  // Generic constructor for non-grid graphs (tests); neighbor lists are kept
  // as given after sorting.
  explicit GridGraph(std::vector<std::vector<Vertex>> adjacency);

  std::int32_t vertex_count() const noexcept {
    return static_cast<std::int32_t>(offsets_.empty() ? 0 : offsets_.size() - 1);
  }
  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  bool adjacent(Vertex u, Vertex v) const noexcept;
  // u == v or u, v adjacent.
  bool can_move(Vertex from, Vertex to) const noexcept { return from == to || adjacent(from, to); }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  // Grid coordinates; only meaningful for graphs built from a GridMap.
  int x(Vertex v) const { return coords_[v].first; }
  int y(Vertex v) const { return coords_[v].second; }
  // kNoVertex for blocked or out-of-range cells.
  Vertex vertex_at(int x, int y) const noexcept;

  // Re-emits the passability grid the graph was built from.
  GridMap to_map() const;

 private:
  friend GridGraph build_graph(const GridMap& map);

  std::vector<std::int32_t> offsets_;
  std::vector<Vertex> targets_;
  std::vector<std::pair<int, int>> coords_;
  std::vector<Vertex> cell_to_vertex_;
  int width_ = 0;
  int height_ = 0;
};

struct ScenarioEntry {
  std::int32_t agent = 0;
  Vertex start = kNoVertex;
  Vertex goal = kNoVertex;
  double optimal_length = 0.0;
};

GridMap parse_map(std::istream& in);
GridMap parse_map(std::string_view text);
GridMap load_map(const std::string& path);

std::vector<ScenarioEntry> parse_scenario(std::istream& in, const GridGraph& graph);
std::vector<ScenarioEntry> parse_scenario(std::string_view text, const GridGraph& graph);
std::vector<ScenarioEntry> load_scenario(const std::string& path, const GridGraph& graph);

// Throws InvalidArgument when the map has no passable cell.
GridGraph build_graph(const GridMap& map);

// Uniformly random obstacles at the given ratio; cells outside the largest
// 4-connected free component are then blocked so every pair of free cells is
// mutually reachable.
GridMap generate_random_map(int width, int height, double obstacle_ratio, std::uint64_t seed);

}  // namespace fico
