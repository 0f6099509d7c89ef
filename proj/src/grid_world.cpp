#include "fico/grid_world.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

namespace fico {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

bool parse_int(std::string_view s, int& out) {
  s = trim(s);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// "key value" header line; returns false when the key does not match.
bool header_value(std::string_view line, std::string_view key, int& value) {
  line = trim(line);
  if (line.substr(0, key.size()) != key) return false;
  auto rest = line.substr(key.size());
  if (rest.empty() || (rest.front() != ' ' && rest.front() != '\t')) return false;
  return parse_int(rest, value);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

GridMap::GridMap(int width, int height, std::vector<std::uint8_t> passable)
    : width_(width), height_(height), passable_(std::move(passable)) {
  if (width <= 0 || height <= 0) throw InvalidArgument("map dimensions must be positive");
  if (passable_.size() != static_cast<std::size_t>(width) * height)
    throw InvalidArgument("passability grid size does not match dimensions");
}

std::size_t GridMap::passable_count() const noexcept {
  return static_cast<std::size_t>(std::count(passable_.begin(), passable_.end(), std::uint8_t{1}));
}

std::string GridMap::to_movingai() const {
  std::string out = "type octile\nheight " + std::to_string(height_) + "\nwidth " +
                    std::to_string(width_) + "\nmap\n";
  out.reserve(out.size() + static_cast<std::size_t>(height_) * (width_ + 1));
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) out.push_back(passable(x, y) ? '.' : '@');
    out.push_back('\n');
  }
  return out;
}

GridMap parse_map(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  };

  if (!next_line()) throw ParseError("empty map file", 1);
  if (trim(line).substr(0, 5) != "type ") throw ParseError("expected 'type' header", line_no);

  int height = -1;
  int width = -1;
  for (int i = 0; i < 2; ++i) {
    if (!next_line()) throw ParseError("unexpected end of header", line_no + 1);
    if (!header_value(line, "height", height) && !header_value(line, "width", width))
      throw ParseError("expected 'height H' or 'width W' header", line_no);
  }
  if (height <= 0 || width <= 0) throw ParseError("missing or non-positive height/width", line_no);
  if (!next_line() || trim(line) != "map") throw ParseError("expected 'map' line", line_no);

  std::vector<std::uint8_t> cells;
  cells.reserve(static_cast<std::size_t>(width) * height);
  int rows = 0;
  while (next_line()) {
    auto row = trim(line);
    if (row.empty()) continue;
    ++rows;
    if (rows > height)
      throw ParseError("more map rows than declared height " + std::to_string(height) +
                           " (map row " + std::to_string(rows) + ")",
                       line_no);
    if (static_cast<int>(row.size()) != width)
      throw ParseError("row length " + std::to_string(row.size()) + " does not match width " +
                           std::to_string(width),
                       line_no);
    for (char c : row) {
      switch (c) {
        case '.':
        case 'G':
          cells.push_back(1);
          break;
        case '@':
        case 'T':
        case 'O':
          cells.push_back(0);
          break;
        default:
          throw ParseError(std::string("unknown cell character '") + c + "'", line_no);
      }
    }
  }
  if (rows != height)
    throw ParseError("expected " + std::to_string(height) + " map rows, found " + std::to_string(rows),
                     line_no + 1);
  return GridMap(width, height, std::move(cells));
}

GridMap parse_map(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_map(in);
}

GridMap load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open map file: " + path);
  return parse_map(in);
}

std::vector<ScenarioEntry> parse_scenario(std::istream& in, const GridGraph& graph) {
  std::vector<ScenarioEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto content = trim(line);
    if (content.empty()) continue;
    if (content.substr(0, 7) == "version") continue;

    auto fields = split_fields(content);
    if (fields.size() < 8) throw ParseError("expected at least 8 fields in scenario line", line_no);
    // bucket, map, map width, map height, start x, start y, goal x, goal y, optimal length
    int nums[6];
    const int field_idx[6] = {2, 3, 4, 5, 6, 7};
    for (int k = 0; k < 6; ++k) {
      if (!parse_int(fields[field_idx[k]], nums[k]))
        throw ParseError("non-integer scenario field " + std::to_string(field_idx[k] + 1), line_no);
    }
    const int sx = nums[2], sy = nums[3], gx = nums[4], gy = nums[5];
    ScenarioEntry e;
    e.agent = static_cast<std::int32_t>(entries.size());
    e.start = graph.vertex_at(sx, sy);
    e.goal = graph.vertex_at(gx, gy);
    if (e.start == kNoVertex)
      throw ParseError("start (" + std::to_string(sx) + "," + std::to_string(sy) +
                           ") is out of bounds or blocked",
                       line_no);
    if (e.goal == kNoVertex)
      throw ParseError("goal (" + std::to_string(gx) + "," + std::to_string(gy) +
                           ") is out of bounds or blocked",
                       line_no);
    if (fields.size() >= 9) {
      std::string opt(fields[8]);
      try {
        e.optimal_length = std::stod(opt);
      } catch (const std::exception&) {
        throw ParseError("malformed optimal length", line_no);
      }
    }
    entries.push_back(e);
  }
  return entries;
}

std::vector<ScenarioEntry> parse_scenario(std::string_view text, const GridGraph& graph) {
  std::istringstream in{std::string(text)};
  return parse_scenario(in, graph);
}

std::vector<ScenarioEntry> load_scenario(const std::string& path, const GridGraph& graph) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  return parse_scenario(in, graph);
}

GridGraph::GridGraph(std::vector<std::vector<Vertex>> adjacency) {
  offsets_.reserve(adjacency.size() + 1);
  offsets_.push_back(0);
  for (auto& list : adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (Vertex v : list) {
      if (v < 0 || v >= static_cast<Vertex>(adjacency.size()))
        throw InvalidArgument("adjacency references unknown vertex");
      targets_.push_back(v);
    }
    offsets_.push_back(static_cast<std::int32_t>(targets_.size()));
  }
  coords_.resize(adjacency.size(), {-1, -1});
  for (std::size_t v = 0; v < adjacency.size(); ++v) {
    if (std::find(adjacency[v].begin(), adjacency[v].end(), static_cast<Vertex>(v)) != adjacency[v].end())
      throw InvalidArgument("neighbor lists must not contain the vertex itself");
  }
}

bool GridGraph::adjacent(Vertex u, Vertex v) const noexcept {
  auto n = neighbors(u);
  return std::find(n.begin(), n.end(), v) != n.end();
}

Vertex GridGraph::vertex_at(int x, int y) const noexcept {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return kNoVertex;
  return cell_to_vertex_[static_cast<std::size_t>(y) * width_ + x];
}

GridMap GridGraph::to_map() const {
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(width_) * height_, 0);
  for (std::size_t i = 0; i < cell_to_vertex_.size(); ++i) cells[i] = cell_to_vertex_[i] != kNoVertex;
  return GridMap(width_, height_, std::move(cells));
}

GridGraph build_graph(const GridMap& map) {
  if (map.passable_count() == 0) throw InvalidArgument("map has no passable cell");
  GridGraph g;
  g.width_ = map.width();
  g.height_ = map.height();
  g.cell_to_vertex_.assign(static_cast<std::size_t>(map.width()) * map.height(), kNoVertex);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.passable(x, y)) continue;
      g.cell_to_vertex_[map.index(x, y)] = static_cast<Vertex>(g.coords_.size());
      g.coords_.emplace_back(x, y);
    }
  }
  // Neighbor order: up, left, right, down; ascending vertex id under row-major numbering.
  static constexpr int kDx[4] = {0, -1, 1, 0};
  static constexpr int kDy[4] = {-1, 0, 0, 1};
  g.offsets_.reserve(g.coords_.size() + 1);
  g.offsets_.push_back(0);
  for (const auto& [x, y] : g.coords_) {
    for (int k = 0; k < 4; ++k) {
      Vertex n = g.vertex_at(x + kDx[k], y + kDy[k]);
      if (n != kNoVertex) g.targets_.push_back(n);
    }
    g.offsets_.push_back(static_cast<std::int32_t>(g.targets_.size()));
  }
  return g;
}

GridMap generate_random_map(int width, int height, double obstacle_ratio, std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw InvalidArgument("map dimensions must be positive");
  if (obstacle_ratio < 0.0 || obstacle_ratio >= 1.0) throw InvalidArgument("obstacle ratio must be in [0, 1)");
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<std::uint8_t> cells(n, 1);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto blocked = static_cast<std::size_t>(obstacle_ratio * static_cast<double>(n) + 0.5);
  for (std::size_t i = 0; i < blocked && i < n - 1; ++i) cells[order[i]] = 0;

  // Keep only the largest connected free component.
  std::vector<int> label(n, -1);
  int best_label = -1;
  std::size_t best_size = 0;
  int next_label = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!cells[s] || label[s] != -1) continue;
    std::size_t size = 0;
    std::queue<std::size_t> q;
    q.push(s);
    label[s] = next_label;
    while (!q.empty()) {
      auto c = q.front();
      q.pop();
      ++size;
      const int cx = static_cast<int>(c % width), cy = static_cast<int>(c / width);
      const int nx[4] = {cx, cx - 1, cx + 1, cx};
      const int ny[4] = {cy - 1, cy, cy, cy + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= width || ny[k] >= height) continue;
        auto nc = static_cast<std::size_t>(ny[k]) * width + nx[k];
        if (cells[nc] && label[nc] == -1) {
          label[nc] = next_label;
          q.push(nc);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_label = next_label;
    }
    ++next_label;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cells[i] && label[i] != best_label) cells[i] = 0;
  }
  return GridMap(width, height, std::move(cells));
}

}  // namespace fico
