#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fico/grid_world.hpp"

namespace fico {

// Horizon-limited trajectories, indexed by agent id. Every path has length
// horizon + 1 and starts at the agent's current position.
struct PlanSet {
  int horizon = 0;
  std::vector<std::vector<Vertex>> paths;

  std::size_t size() const noexcept { return paths.size(); }
};

struct Partition {
  std::vector<AgentId> conflict_free;
  std::vector<AgentId> conflicting;
};

// Space-time occupancy of a set of trajectories: (vertex, tau) -> agents, with
// each entry also remembering where its agent is at tau + 1 so that directed
// edges can be probed. Keys are dense (tau * |V| + v).
class SpaceTimeHash {
 public:
  SpaceTimeHash(std::int32_t vertex_count, int horizon);

  void insert_path(AgentId agent, std::span<const Vertex> path);

  int horizon() const noexcept { return horizon_; }
  std::size_t entry_count() const noexcept { return entries_.size(); }

  bool occupied(Vertex v, int tau) const noexcept { return heads_[key(v, tau)] >= 0; }
  // Some agent goes from `from` at tau to `to` at tau + 1 (from != to).
  bool has_edge(Vertex from, Vertex to, int tau) const noexcept;

  template <class F>
  void for_each_occupant(Vertex v, int tau, F&& f) const {
    for (auto e = heads_[key(v, tau)]; e >= 0; e = entries_[e].next_entry) f(entries_[e].agent, entries_[e].next_vertex);
  }

 private:
  std::size_t key(Vertex v, int tau) const noexcept {
    return static_cast<std::size_t>(tau) * static_cast<std::size_t>(vertex_count_) + static_cast<std::size_t>(v);
  }
  struct Entry {
    AgentId agent;
    Vertex next_vertex;  // kNoVertex at tau == horizon
    std::int32_t next_entry;
  };

  std::int32_t vertex_count_;
  int horizon_;
  std::vector<std::int32_t> heads_;
  std::vector<Entry> entries_;
};

// Agents listed in `forced` are reported conflicting regardless of their
// plans (agents pulled in by congestion resolution).
Partition detect_conflicts(const PlanSet& plans, std::int32_t vertex_count, std::span<const char> forced = {});

SpaceTimeHash build_space_time_hash(const PlanSet& plans, std::span<const AgentId> agents,
                                    std::int32_t vertex_count);

// Space-time cells an agent may occupy within the horizon while avoiding
// cells and edge swaps of the finalized trajectories in `blocked`. Cells are
// packed as tau * |V| + v and sorted.
struct ReachableRegion {
  std::vector<std::uint64_t> cells;

  bool contains(Vertex v, int tau, std::int32_t vertex_count) const;
};

ReachableRegion compute_reachable_region(const GridGraph& graph, Vertex start, int horizon,
                                         const SpaceTimeHash& blocked);

std::vector<ReachableRegion> compute_reachable_sets(const GridGraph& graph, std::span<const AgentId> agents,
                                                    std::span<const Vertex> positions, int horizon,
                                                    const SpaceTimeHash& blocked);

// Union-find over dense indices; union by rank with path compression.
class DisjointSetUnion {
 public:
  explicit DisjointSetUnion(std::size_t n);

  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);

  // Top-level find/unite calls made by clients.
  std::size_t operations() const noexcept { return operations_; }

 private:
  std::size_t root(std::size_t x);

  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
  std::size_t operations_ = 0;
};

struct GroupingResult {
  // Agent ids sorted ascending within each group; groups ordered by smallest member.
  std::vector<std::vector<AgentId>> groups;
  std::size_t dsu_operations = 0;
  std::size_t region_cells = 0;
};

// `regions[i]` belongs to `agents[i]`.
GroupingResult group_by_reachability(std::span<const AgentId> agents, std::span<const ReachableRegion> regions,
                                     std::int32_t vertex_count, int horizon);

}  // namespace fico
