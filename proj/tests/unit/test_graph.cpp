#include <algorithm>
#include <doctest.h>
#include <vector>

#include "epicascade/error.hpp"
#include "epicascade/graph.hpp"
#include "epicascade/rng.hpp"

using namespace epicascade;

namespace {

errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return errc::io_error;
}

}  // namespace

TEST_CASE("triangle construction and neighbor lookup") {
  const Graph g = build_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(g.agent_count() == 3);
  CHECK(g.edge_count() == 3);
  CHECK(g.neighbors(0) == std::vector<AgentId>{1, 2});
  CHECK(g.neighbors(1) == std::vector<AgentId>{0, 2});
  CHECK(g.has_edge(2, 0));
}

TEST_CASE("path graph neighbors") {
  const Graph g = build_graph(3, {{0, 1}, {1, 2}});
  CHECK(g.neighbors(1) == std::vector<AgentId>{0, 2});
  CHECK(g.neighbors(0) == std::vector<AgentId>{1});
}

TEST_CASE("duplicate edges collapse silently") {
  const Graph g = build_graph(2, {{0, 1}, {1, 0}, {0, 1}});
  CHECK(g.edge_count() == 1);
}

TEST_CASE("construction rejects bad inputs") {
  CHECK(code_of([] { build_graph(3, {{0, 1}}); }) == errc::disconnected_graph);
  CHECK(code_of([] { build_graph(2, {{0, 0}}); }) == errc::invalid_edge);
  CHECK(code_of([] { build_graph(2, {{0, 5}}); }) == errc::invalid_edge);
  const Graph g = build_graph(2, {{0, 1}});
  CHECK(code_of([&] { g.neighbors(7); }) == errc::out_of_range);
  CHECK(code_of([&] { g.neighbors(-1); }) == errc::out_of_range);
}

TEST_CASE("p = 1 forces the complete graph") {
  const Graph g = generate_er_graph(20, 1.0, 99);
  CHECK(g.edge_count() == 190);
}

TEST_CASE("generation is deterministic per seed") {
  const Graph a = generate_er_graph(20, 0.5, 1234);
  const Graph b = generate_er_graph(20, 0.5, 1234);
  const Graph c = generate_er_graph(20, 0.5, 1235);
  CHECK(a.edges() == b.edges());
  CHECK(a.edges() != c.edges());
}

TEST_CASE("sparse draws exhaust the attempt budget") {
  CHECK(code_of([] { generate_er_graph(5, 0.01, 7, 3); }) == errc::generation_failed);
}

TEST_CASE("generator rejects bad parameters") {
  CHECK(code_of([] { generate_er_graph(1, 0.5, 7); }) == errc::validation_error);
  CHECK(code_of([] { generate_er_graph(5, 0.0, 7); }) == errc::validation_error);
  CHECK(code_of([] { generate_er_graph(5, 1.5, 7); }) == errc::validation_error);
}

TEST_CASE("generated graphs are symmetric and connected") {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const auto n = static_cast<AgentId>(rng.uniform_int(2, 30));
    Graph g = [&] {
      for (;;) {
        try {
          return generate_er_graph(n, rng.uniform(0.3, 0.9), rng.next_u64(), 64);
        } catch (const Error&) {
        }
      }
    }();

    for (AgentId x = 0; x < n; ++x) {
      const auto& nbrs = g.neighbors(x);
      CHECK(std::is_sorted(nbrs.begin(), nbrs.end()));
      for (AgentId y : nbrs) {
        CHECK(y != x);
        const auto& back = g.neighbors(y);
        CHECK(std::binary_search(back.begin(), back.end(), x));
      }
    }

    // Independent reachability check.
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
    std::vector<AgentId> frontier{0};
    seen[0] = 1;
    AgentId reached = 1;
    while (!frontier.empty()) {
      const AgentId v = frontier.back();
      frontier.pop_back();
      for (AgentId w : g.neighbors(v)) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++reached;
          frontier.push_back(w);
        }
      }
    }
    CHECK(reached == n);
  }
}
