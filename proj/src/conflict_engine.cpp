#include "fico/conflict_engine.hpp"

#include <algorithm>
#include <numeric>

namespace fico {

SpaceTimeHash::SpaceTimeHash(std::int32_t vertex_count, int horizon)
    : vertex_count_(vertex_count),
      horizon_(horizon),
      heads_(static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(vertex_count), -1) {
  if (horizon < 0) throw InvalidArgument("horizon must be non-negative");
}

void SpaceTimeHash::insert_path(AgentId agent, std::span<const Vertex> path) {
  if (path.size() != static_cast<std::size_t>(horizon_) + 1)
    throw InvalidArgument("path length does not match the horizon");
  for (int tau = 0; tau <= horizon_; ++tau) {
    const auto k = key(path[tau], tau);
    const Vertex next = tau < horizon_ ? path[tau + 1] : kNoVertex;
    entries_.push_back({agent, next, heads_[k]});
    heads_[k] = static_cast<std::int32_t>(entries_.size() - 1);
  }
}

bool SpaceTimeHash::has_edge(Vertex from, Vertex to, int tau) const noexcept {
  if (from == to || tau >= horizon_) return false;
  for (auto e = heads_[key(from, tau)]; e >= 0; e = entries_[e].next_entry) {
    if (entries_[e].next_vertex == to) return true;
  }
  return false;
}

SpaceTimeHash build_space_time_hash(const PlanSet& plans, std::span<const AgentId> agents,
                                    std::int32_t vertex_count) {
  SpaceTimeHash hash(vertex_count, plans.horizon);
  for (AgentId a : agents) hash.insert_path(a, plans.paths[a]);
  return hash;
}

Partition detect_conflicts(const PlanSet& plans, std::int32_t vertex_count, std::span<const char> forced) {
  const int H = plans.horizon;
  const auto n = plans.size();
  std::vector<AgentId> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto hash = build_space_time_hash(plans, all, vertex_count);

  std::vector<char> conflicted(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    if (!forced.empty() && forced[a]) conflicted[a] = 1;
  }
  for (std::size_t a = 0; a < n; ++a) {
    const auto& path = plans.paths[a];
    for (int tau = 0; tau <= H; ++tau) {
      // Vertex conflict: another occupant of the same cell.
      hash.for_each_occupant(path[tau], tau, [&](AgentId b, Vertex) {
        if (b != static_cast<AgentId>(a)) conflicted[a] = 1;
      });
      // Edge conflict: probe the reverse directed edge.
      if (tau < H && path[tau] != path[tau + 1] && hash.has_edge(path[tau + 1], path[tau], tau))
        conflicted[a] = 1;
    }
  }

  Partition p;
  for (std::size_t a = 0; a < n; ++a) (conflicted[a] ? p.conflicting : p.conflict_free).push_back(static_cast<AgentId>(a));
  return p;
}

bool ReachableRegion::contains(Vertex v, int tau, std::int32_t vertex_count) const {
  const auto k = static_cast<std::uint64_t>(tau) * static_cast<std::uint64_t>(vertex_count) + static_cast<std::uint64_t>(v);
  return std::binary_search(cells.begin(), cells.end(), k);
}

ReachableRegion compute_reachable_region(const GridGraph& graph, Vertex start, int horizon,
                                         const SpaceTimeHash& blocked) {
  const auto V = static_cast<std::uint64_t>(graph.vertex_count());
  ReachableRegion region;
  std::vector<Vertex> layer{start};
  std::vector<Vertex> next;
  region.cells.push_back(static_cast<std::uint64_t>(start));
  for (int tau = 0; tau < horizon && !layer.empty(); ++tau) {
    next.clear();
    auto try_enter = [&](Vertex from, Vertex to) {
      if (blocked.occupied(to, tau + 1)) return;
      if (blocked.has_edge(to, from, tau)) return;
      next.push_back(to);
    };
    for (Vertex u : layer) {
      try_enter(u, u);
      for (Vertex w : graph.neighbors(u)) try_enter(u, w);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    const auto base = static_cast<std::uint64_t>(tau + 1) * V;
    for (Vertex v : next) region.cells.push_back(base + static_cast<std::uint64_t>(v));
    std::swap(layer, next);
  }
  // Cells were appended layer by layer with sorted vertices, so already sorted.
  return region;
}

std::vector<ReachableRegion> compute_reachable_sets(const GridGraph& graph, std::span<const AgentId> agents,
                                                    std::span<const Vertex> positions, int horizon,
                                                    const SpaceTimeHash& blocked) {
  std::vector<ReachableRegion> out;
  out.reserve(agents.size());
  for (AgentId a : agents) out.push_back(compute_reachable_region(graph, positions[a], horizon, blocked));
  return out;
}

DisjointSetUnion::DisjointSetUnion(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSetUnion::root(std::size_t x) {
  std::size_t r = x;
  while (parent_[r] != r) r = parent_[r];
  while (parent_[x] != r) {
    auto next = parent_[x];
    parent_[x] = r;
    x = next;
  }
  return r;
}

std::size_t DisjointSetUnion::find(std::size_t x) {
  ++operations_;
  return root(x);
}

bool DisjointSetUnion::unite(std::size_t a, std::size_t b) {
  ++operations_;
  a = root(a);
  b = root(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

GroupingResult group_by_reachability(std::span<const AgentId> agents, std::span<const ReachableRegion> regions,
                                     std::int32_t vertex_count, int horizon) {
  if (agents.size() != regions.size()) throw InvalidArgument("one region per agent is required");
  GroupingResult result;
  DisjointSetUnion dsu(agents.size());
  // Cell -> index (into `agents`) of the first agent whose region covers it.
  std::vector<std::int32_t> first(static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(vertex_count), -1);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (auto cell : regions[i].cells) {
      ++result.region_cells;
      auto& slot = first[cell];
      if (slot < 0) {
        slot = static_cast<std::int32_t>(i);
      } else {
        dsu.unite(static_cast<std::size_t>(slot), i);
      }
    }
  }

  std::vector<std::int32_t> group_of_root(agents.size(), -1);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto r = dsu.find(i);
    if (group_of_root[r] < 0) {
      group_of_root[r] = static_cast<std::int32_t>(result.groups.size());
      result.groups.emplace_back();
    }
    result.groups[group_of_root[r]].push_back(agents[i]);
  }
  for (auto& g : result.groups) std::sort(g.begin(), g.end());
  std::sort(result.groups.begin(), result.groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  result.dsu_operations = dsu.operations();
  return result;
}

}  // namespace fico
