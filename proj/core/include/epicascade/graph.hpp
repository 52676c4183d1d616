#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace epicascade {

/// Dense agent index, stable for the lifetime of a network.
using AgentId = std::int32_t;

using Edge = std::pair<AgentId, AgentId>;

/** Undirected, connected social graph over densely numbered agents.
 *
 * Construction validates that there are no self loops, that every endpoint is
 * in range, and that the graph forms a single component. Duplicate edges are
 * collapsed. Instances are immutable afterwards and safe to share read-only
 * across threads.
 */
class Graph {
 public:
  AgentId agent_count() const noexcept { return n_; }

  /// Neighbor set of x, sorted ascending. Throws OutOfRange for bad ids.
  const std::vector<AgentId>& neighbors(AgentId x) const;

  /// Canonical edge list: (min, max) pairs, sorted.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool has_edge(AgentId x, AgentId y) const;

  friend Graph build_graph(AgentId n, const std::vector<Edge>& edges);

 private:
  Graph() = default;

  AgentId n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<AgentId>> adjacency_;
};

/// Builds a validated graph from an edge list.
/// Errors: InvalidEdge (self loop, id out of range), DisconnectedGraph.
Graph build_graph(AgentId n, const std::vector<Edge>& edges);

/// Samples an Erdos-Renyi graph: each unordered pair is drawn independently
/// with probability p, and whole graphs are resampled until one is connected.
/// Deterministic for a given seed. Errors: GenerationFailed after
/// max_attempts disconnected draws.
Graph generate_er_graph(AgentId n, double p, std::uint64_t seed, int max_attempts = 1000);

}  // namespace epicascade
