#include <cmath>
#include <doctest.h>
#include <set>
#include <string>

#include "epicascade/cascade.hpp"
#include "epicascade/epistemics.hpp"
#include "epicascade/error.hpp"
#include "epicascade/rng.hpp"

using namespace epicascade;

namespace {

Agent make_agent(AgentId id, std::set<std::string> groups, double r) {
  Agent a;
  a.id = id;
  a.groups = std::move(groups);
  a.reliability = r;
  return a;
}

/// High/low/medium-education trio with the intersectional group structure
/// that produces the reference credibility table.
std::vector<Agent> trio() {
  return {make_agent(0, {"gender", "income"}, 0.8),
          make_agent(1, {"gender", "income", "age"}, 0.3),
          make_agent(2, {"age"}, 0.6)};
}

}  // namespace

TEST_CASE("intersectional factor halves per group") {
  CHECK(discrimination_factor({}) == 1.0);
  CHECK(discrimination_factor({"gender", "income"}) == 0.25);
  CHECK(discrimination_factor({"gender", "income", "age"}) == 0.125);
}

TEST_CASE("relational factor over shared groups") {
  CHECK(relational_factor({}, {}, EtaMode::excess) == 1.0);
  CHECK(relational_factor({"a"}, {"b"}, EtaMode::deficit) == 1.0);
  CHECK(relational_factor({"gender", "income"}, {"gender", "income"}, EtaMode::excess) == 4.0);
  CHECK(relational_factor({"age", "x"}, {"age"}, EtaMode::excess) == 2.0);
  CHECK(relational_factor({"gender", "income"}, {"gender", "income"}, EtaMode::deficit) == 0.25);
}

TEST_CASE("relational factor is symmetric") {
  Rng rng(5);
  const std::string labels[] = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 200; ++trial) {
    std::set<std::string> gx, gy;
    for (const auto& l : labels) {
      if (rng.bernoulli(0.5)) gx.insert(l);
      if (rng.bernoulli(0.5)) gy.insert(l);
    }
    const EtaMode mode = rng.bernoulli(0.5) ? EtaMode::excess : EtaMode::deficit;
    CHECK(relational_factor(gx, gy, mode) == relational_factor(gy, gx, mode));
  }
}

TEST_CASE("trio credibility values are reproduced bit-exactly") {
  const auto agents = trio();
  const CredibilityMatrix m = build_credibility_matrix(agents);
  CHECK(m(0, 1) == 0.8);
  CHECK(m(0, 2) == 0.2);
  CHECK(m(1, 0) == 0.15);
  CHECK(m(1, 2) == 0.075);
  CHECK(m(2, 0) == 0.3);
  CHECK(m(2, 1) == 0.6);
}

TEST_CASE("no groups means credibility equals reliability") {
  std::vector<Agent> agents = {make_agent(0, {}, 0.37), make_agent(1, {}, 0.91),
                               make_agent(2, {}, 0.0)};
  const CredibilityMatrix m = build_credibility_matrix(agents);
  for (AgentId x = 0; x < 3; ++x) {
    for (AgentId y = 0; y < 3; ++y) {
      if (x != y) CHECK(m(x, y) == agents[static_cast<std::size_t>(x)].reliability);
    }
  }
  CHECK(is_epistemically_fair(m, agents));
}

TEST_CASE("overrides replace computed entries") {
  std::vector<Agent> agents = {make_agent(0, {}, 1.0), make_agent(1, {}, 1.0)};
  const CredibilityMatrix m = build_credibility_matrix(agents, EtaMode::excess, {{0, 1, 0.5}});
  CHECK(m(0, 1) == 0.5);
  CHECK(m(1, 0) == 1.0);
  CHECK_FALSE(is_epistemically_fair(m, agents));

  CHECK_THROWS_WITH_AS(build_credibility_matrix(agents, EtaMode::excess, {{0, 1, 1.2}}),
                       doctest::Contains("OverrideOutOfRange"), Error);
  CHECK_THROWS_AS(build_credibility_matrix(agents, EtaMode::excess, {{1, 1, 0.5}}), Error);
}

TEST_CASE("credibility deltas") {
  const auto agents = trio();
  const CredibilityMatrix m = build_credibility_matrix(agents);
  CHECK(credibility_delta(m, agents, 0, 2) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(credibility_delta(m, agents, 2, 1) == 0.0);   // full mitigation
  CHECK(credibility_delta(m, agents, 0, 1) == 0.0);
}

TEST_CASE("delta plus credibility recovers reliability") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Agent> agents;
    const std::string labels[] = {"a", "b", "c", "d"};
    for (AgentId i = 0; i < 5; ++i) {
      std::set<std::string> groups;
      for (const auto& l : labels) {
        if (rng.bernoulli(0.4)) groups.insert(l);
      }
      agents.push_back(make_agent(i, std::move(groups), rng.uniform01()));
    }
    const CredibilityMatrix m = build_credibility_matrix(agents);
    for (AgentId x = 0; x < 5; ++x) {
      for (AgentId y = 0; y < 5; ++y) {
        if (x == y) continue;
        const double delta = credibility_delta(m, agents, x, y);
        CHECK(std::abs(delta + m(x, y) - agents[static_cast<std::size_t>(x)].reliability) <
              1e-15);
        // Default mode never awards more credibility than the reliability,
        // with equality exactly when the hearer shares all of the speaker's
        // groups.
        CHECK(m(x, y) <= agents[static_cast<std::size_t>(x)].reliability);
        const auto& gx = agents[static_cast<std::size_t>(x)].groups;
        const auto& gy = agents[static_cast<std::size_t>(y)].groups;
        const bool all_shared =
            std::all_of(gx.begin(), gx.end(), [&](const auto& g) { return gy.count(g) > 0; });
        if (agents[static_cast<std::size_t>(x)].reliability > 0.0) {
          CHECK((delta == 0.0) == all_shared);
        }
      }
    }
  }
}

TEST_CASE("fairness verdicts") {
  auto agents = trio();
  const CredibilityMatrix biased = build_credibility_matrix(agents);
  CHECK_FALSE(is_epistemically_fair(biased, agents));

  // Heterogeneous reliabilities are compatible with fairness.
  for (auto& a : agents) a.groups.clear();
  const CredibilityMatrix fair = build_credibility_matrix(agents);
  CHECK(is_epistemically_fair(fair, agents));

  const CredibilityMatrix broken =
      build_credibility_matrix(agents, EtaMode::excess, {{0, 1, agents[0].reliability / 2}});
  CHECK_FALSE(is_epistemically_fair(broken, agents));
}

TEST_CASE("fair matrix drives the same step as reliability weights") {
  Rng rng(23);
  const Graph net = build_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
  std::vector<Agent> agents;
  for (AgentId i = 0; i < 4; ++i) agents.push_back(make_agent(i, {}, rng.uniform(0.1, 1.0)));
  const CredibilityMatrix from_groups = build_credibility_matrix(agents);

  CredibilityMatrix manual(4);
  for (AgentId x = 0; x < 4; ++x) {
    for (AgentId y = 0; y < 4; ++y) {
      if (x != y) manual.set(x, y, agents[static_cast<std::size_t>(x)].reliability);
    }
  }

  for (int trial = 0; trial < 50; ++trial) {
    CascadeState state;
    state.adopted = {static_cast<std::uint8_t>(rng.bernoulli(0.5)),
                     static_cast<std::uint8_t>(rng.bernoulli(0.5)),
                     static_cast<std::uint8_t>(rng.bernoulli(0.5)),
                     static_cast<std::uint8_t>(rng.bernoulli(0.5))};
    state.thresholds = {rng.uniform01(), rng.uniform01(), rng.uniform01(), rng.uniform01()};
    CHECK(step(net, from_groups, state).adopted == step(net, manual, state).adopted);
  }
}
