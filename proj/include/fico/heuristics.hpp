#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <span>
#include <unordered_map>
#include <vector>

#include "fico/grid_world.hpp"

namespace fico {

// Lazily-filled backward BFS from one goal: exact shortest-path distances and
// shortest-path counts to that goal.
//
// Counts are doubles; only their ratios drive sampling, and they are exact
// integers as long as they stay below 2^53.
//
// A context has one owner while it is being extended. Once settle_through()
// covers the distances a planning round needs, the peek_* accessors are pure
// reads and may be called concurrently.
class GoalContext {
 public:
  GoalContext(const GridGraph& graph, Vertex goal);

  Vertex goal() const noexcept { return goal_; }

  // Exact distance to the goal, or kUnreachable. Expands the BFS only until
  // `v` is discovered.
  std::int32_t distance(Vertex v);

  // Number of shortest v->goal paths. Throws Unsolvable if `v` cannot reach the goal.
  double path_count(Vertex v);

  // Neighbors exactly one step closer to the goal, ascending vertex id.
  // Empty at the goal.
  std::vector<Vertex> candidate_set(Vertex v);

  // Next vertex on a shortest path, drawn with probability proportional to the
  // successor's path count. Returns `v` at the goal.
  template <class URBG>
  Vertex sample_balanced(Vertex v, URBG& rng);

  // Same as sample_balanced but picks uniformly among candidates.
  template <class URBG>
  Vertex sample_uniform(Vertex v, URBG& rng);

  // Ensures every vertex with distance <= max_distance has its distance and
  // count filled, and every vertex at max_distance + 1 has its distance.
  void settle_through(std::int32_t max_distance);

  // Read-only lookups; kUnreachable / negative when not filled yet.
  std::int32_t peek_distance(Vertex v) const noexcept { return dist_[v]; }
  double peek_count(Vertex v) const noexcept { return counted(v) ? counts_[v] : -1.0; }
  bool exhausted() const noexcept { return head_ >= order_.size(); }

  // sample_balanced / sample_uniform restricted to the settled region, without
  // touching the context. Throws std::logic_error outside that region.
  template <class URBG>
  Vertex sample_settled(Vertex v, URBG& rng, bool balanced) const;

  // Vertices popped from the BFS queue so far.
  std::size_t expansions() const noexcept { return head_; }

 private:
  void expand_one();
  bool counted(Vertex v) const noexcept {
    return order_index_[v] >= 0 && static_cast<std::size_t>(order_index_[v]) < count_cursor_;
  }
  void count_through(std::size_t order_pos);

  const GridGraph* graph_;
  Vertex goal_;
  std::vector<std::int32_t> dist_;
  std::vector<std::int32_t> order_index_;
  std::vector<Vertex> order_;
  std::size_t head_ = 0;
  std::vector<double> counts_;
  std::size_t count_cursor_ = 0;
};

// Goal-keyed store of contexts shared by agents with the same goal.
class HeuristicCache {
 public:
  explicit HeuristicCache(const GridGraph& graph) : graph_(&graph) {}

  GoalContext& context(Vertex goal);
  // nullptr when no context exists for this goal.
  const GoalContext* find(Vertex goal) const noexcept;

  // Drops contexts whose goal is not listed, once the store holds more than
  // `capacity` contexts.
  void retain(std::span<const Vertex> live_goals, std::size_t capacity);
  std::size_t size() const noexcept { return contexts_.size(); }
  const GridGraph& graph() const noexcept { return *graph_; }

 private:
  const GridGraph* graph_;
  std::unordered_map<Vertex, std::unique_ptr<GoalContext>> contexts_;
};

template <class URBG>
Vertex GoalContext::sample_balanced(Vertex v, URBG& rng) {
  if (v == goal_) return v;
  auto cand = candidate_set(v);
  if (cand.empty()) throw Unsolvable("vertex cannot reach its goal");
  if (cand.size() == 1) return cand.front();
  double total = 0.0;
  for (Vertex c : cand) total += path_count(c);
  std::uniform_real_distribution<double> pick(0.0, total);
  double r = pick(rng);
  for (Vertex c : cand) {
    r -= counts_[c];
    if (r < 0.0) return c;
  }
  return cand.back();
}

template <class URBG>
Vertex GoalContext::sample_uniform(Vertex v, URBG& rng) {
  if (v == goal_) return v;
  auto cand = candidate_set(v);
  if (cand.empty()) throw Unsolvable("vertex cannot reach its goal");
  if (cand.size() == 1) return cand.front();
  // Same draw as the weighted samplers with unit weights.
  std::uniform_real_distribution<double> pick(0.0, static_cast<double>(cand.size()));
  const auto i = static_cast<std::size_t>(pick(rng));
  return cand[std::min(i, cand.size() - 1)];
}

template <class URBG>
Vertex GoalContext::sample_settled(Vertex v, URBG& rng, bool balanced) const {
  const auto d = dist_[v];
  if (d == 0) return v;
  if (d == kUnreachable) throw std::logic_error("sample_settled: vertex outside the settled region");
  Vertex cand[8];
  double weight[8];
  int n = 0;
  double total = 0.0;
  for (Vertex c : graph_->neighbors(v)) {
    if (dist_[c] != d - 1) continue;
    if (!counted(c)) throw std::logic_error("sample_settled: candidate count not settled");
    cand[n] = c;
    weight[n] = balanced ? counts_[c] : 1.0;
    total += weight[n];
    if (++n == 8) break;
  }
  if (n == 0) throw std::logic_error("sample_settled: no candidate");
  if (n == 1) return cand[0];
  std::uniform_real_distribution<double> pick(0.0, total);
  double r = pick(rng);
  for (int i = 0; i < n; ++i) {
    r -= weight[i];
    if (r < 0.0) return cand[i];
  }
  return cand[n - 1];
}

}  // namespace fico
