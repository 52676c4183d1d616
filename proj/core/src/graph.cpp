#include "epicascade/graph.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "epicascade/error.hpp"
#include "epicascade/rng.hpp"

namespace epicascade {

namespace {

bool connected(AgentId n, const std::vector<std::vector<AgentId>>& adjacency) {
  if (n <= 1) return true;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  std::vector<AgentId> stack{0};
  seen[0] = 1;
  AgentId reached = 1;
  while (!stack.empty()) {
    const AgentId v = stack.back();
    stack.pop_back();
    for (AgentId w : adjacency[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

std::vector<std::vector<AgentId>> adjacency_of(AgentId n, const std::vector<Edge>& edges) {
  std::vector<std::vector<AgentId>> adjacency(static_cast<std::size_t>(n));
  for (const auto& [a, b] : edges) {
    adjacency[static_cast<std::size_t>(a)].push_back(b);
    adjacency[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nbrs : adjacency) std::sort(nbrs.begin(), nbrs.end());
  return adjacency;
}

}  // namespace

const std::vector<AgentId>& Graph::neighbors(AgentId x) const {
  if (x < 0 || x >= n_) {
    throw Error(errc::out_of_range,
                "agent id " + std::to_string(x) + " not in [0, " + std::to_string(n_) + ")");
  }
  return adjacency_[static_cast<std::size_t>(x)];
}

bool Graph::has_edge(AgentId x, AgentId y) const {
  const auto& nbrs = neighbors(x);
  return std::binary_search(nbrs.begin(), nbrs.end(), y);
}

Graph build_graph(AgentId n, const std::vector<Edge>& edges) {
  if (n < 1) throw Error(errc::validation_error, "agent count must be >= 1");

  std::set<Edge> canonical;
  for (const auto& [a, b] : edges) {
    if (a == b) throw Error(errc::invalid_edge, "self loop on agent " + std::to_string(a));
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw Error(errc::invalid_edge, "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                          ") out of range for n=" + std::to_string(n));
    }
    canonical.emplace(std::min(a, b), std::max(a, b));
  }

  Graph g;
  g.n_ = n;
  g.edges_.assign(canonical.begin(), canonical.end());
  g.adjacency_ = adjacency_of(n, g.edges_);
  if (!connected(n, g.adjacency_)) {
    throw Error(errc::disconnected_graph, "graph has more than one component");
  }
  return g;
}

Graph generate_er_graph(AgentId n, double p, std::uint64_t seed, int max_attempts) {
  if (n < 2) throw Error(errc::validation_error, "generator needs n >= 2");
  if (!(p > 0.0) || p > 1.0) throw Error(errc::validation_error, "edge probability must be in (0, 1]");
  if (max_attempts < 1) throw Error(errc::validation_error, "max_attempts must be >= 1");

  Rng rng(seed);
  std::vector<Edge> edges;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    edges.clear();
    for (AgentId i = 0; i < n; ++i) {
      for (AgentId j = i + 1; j < n; ++j) {
        if (rng.uniform01() < p) edges.emplace_back(i, j);
      }
    }
    const auto adjacency = adjacency_of(n, edges);
    if (connected(n, adjacency)) return build_graph(n, edges);
  }
  throw Error(errc::generation_failed,
              "no connected draw in " + std::to_string(max_attempts) + " attempts (n=" +
                  std::to_string(n) + ", p=" + std::to_string(p) + ")");
}

}  // namespace epicascade
