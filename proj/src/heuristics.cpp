#include "fico/heuristics.hpp"

#include <algorithm>
#include <unordered_set>

namespace fico {

GoalContext::GoalContext(const GridGraph& graph, Vertex goal)
    : graph_(&graph),
      goal_(goal),
      dist_(graph.vertex_count(), kUnreachable),
      order_index_(graph.vertex_count(), -1),
      counts_(graph.vertex_count(), 0.0) {
  if (goal < 0 || goal >= graph.vertex_count()) throw InvalidArgument("goal is not a graph vertex");
  dist_[goal] = 0;
  order_index_[goal] = 0;
  order_.push_back(goal);
}

// Grid graphs are symmetric, so the backward search walks forward neighbor lists.
void GoalContext::expand_one() {
  const Vertex u = order_[head_++];
  const std::int32_t d = dist_[u] + 1;
  for (Vertex n : graph_->neighbors(u)) {
    if (dist_[n] != kUnreachable) continue;
    dist_[n] = d;
    order_index_[n] = static_cast<std::int32_t>(order_.size());
    order_.push_back(n);
  }
}

std::int32_t GoalContext::distance(Vertex v) {
  while (dist_[v] == kUnreachable && head_ < order_.size()) expand_one();
  return dist_[v];
}

void GoalContext::count_through(std::size_t order_pos) {
  // A vertex is counted only after it has been popped: by then every vertex one
  // layer closer has been popped too, and precedes it in discovery order.
  while (head_ <= order_pos) expand_one();
  for (; count_cursor_ <= order_pos; ++count_cursor_) {
    const Vertex u = order_[count_cursor_];
    if (u == goal_) {
      counts_[u] = 1.0;
      continue;
    }
    double c = 0.0;
    for (Vertex n : graph_->neighbors(u)) {
      if (dist_[n] == dist_[u] - 1) c += counts_[n];
    }
    counts_[u] = c;
  }
}

double GoalContext::path_count(Vertex v) {
  if (distance(v) == kUnreachable) throw Unsolvable("vertex cannot reach its goal");
  if (!counted(v)) count_through(static_cast<std::size_t>(order_index_[v]));
  return counts_[v];
}

std::vector<Vertex> GoalContext::candidate_set(Vertex v) {
  std::vector<Vertex> out;
  const auto d = distance(v);
  if (d == 0 || d == kUnreachable) return out;
  for (Vertex n : graph_->neighbors(v)) {
    if (distance(n) == d - 1) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void GoalContext::settle_through(std::int32_t max_distance) {
  while (head_ < order_.size() && dist_[order_[head_]] <= max_distance) expand_one();
  if (head_ > 0) count_through(head_ - 1);
}

GoalContext& HeuristicCache::context(Vertex goal) {
  auto it = contexts_.find(goal);
  if (it == contexts_.end()) it = contexts_.emplace(goal, std::make_unique<GoalContext>(*graph_, goal)).first;
  return *it->second;
}

const GoalContext* HeuristicCache::find(Vertex goal) const noexcept {
  auto it = contexts_.find(goal);
  return it == contexts_.end() ? nullptr : it->second.get();
}

void HeuristicCache::retain(std::span<const Vertex> live_goals, std::size_t capacity) {
  if (contexts_.size() <= capacity) return;
  std::unordered_set<Vertex> live(live_goals.begin(), live_goals.end());
  std::erase_if(contexts_, [&](const auto& kv) { return !live.contains(kv.first); });
}

}  // namespace fico
