#include <benchmark/benchmark.h>

#include <vector>

#include "epicascade/cascade.hpp"
#include "epicascade/control.hpp"
#include "epicascade/graph.hpp"
#include "epicascade/rng.hpp"
#include "epicascade/scenario.hpp"

namespace {

using namespace epicascade;

struct Fixture {
  Graph net;
  CredibilityMatrix gamma;
  std::vector<double> thresholds;
  std::vector<AgentId> seeds;
};

Fixture make_fixture(AgentId n, double p, std::uint64_t seed) {
  Rng rng(seed);
  Fixture f{generate_er_graph(n, p, seed, 1000), CredibilityMatrix(n), {}, {}};
  f.thresholds.resize(static_cast<std::size_t>(n));
  for (AgentId x = 0; x < n; ++x) {
    f.thresholds[static_cast<std::size_t>(x)] = rng.uniform(0.1, 0.9);
    for (AgentId y = 0; y < n; ++y) {
      if (x != y) f.gamma.set(x, y, rng.uniform01());
    }
  }
  for (AgentId x = 0; x < n / 20 + 1; ++x) f.seeds.push_back(x);
  return f;
}

void BM_CascadeStep(benchmark::State& state) {
  const auto f = make_fixture(static_cast<AgentId>(state.range(0)), 0.1, 42);
  const CascadeState s0 = initial_state(f.net, f.thresholds, f.seeds);
  for (auto _ : state) {
    benchmark::DoNotOptimize(step(f.net, f.gamma, s0));
  }
}
BENCHMARK(BM_CascadeStep)->Arg(100)->Arg(400);

void BM_Simulate(benchmark::State& state) {
  const auto f = make_fixture(static_cast<AgentId>(state.range(0)), 0.1, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate(f.net, f.gamma, f.thresholds, f.seeds, f.net.agent_count()));
  }
}
BENCHMARK(BM_Simulate)->Arg(100)->Arg(400);

void BM_LargestCohesiveSubset(benchmark::State& state) {
  const auto f = make_fixture(static_cast<AgentId>(state.range(0)), 0.1, 42);
  std::vector<AgentId> base;
  for (AgentId x = static_cast<AgentId>(f.seeds.size()); x < f.net.agent_count(); ++x) {
    base.push_back(x);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(largest_cohesive_subset(f.net, f.gamma, f.thresholds, base));
  }
}
BENCHMARK(BM_LargestCohesiveSubset)->Arg(100)->Arg(400);

void BM_GainSchedule(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(riccati_gain(-1.0, 1.0, 1.0, horizon));
  }
}
BENCHMARK(BM_GainSchedule)->Arg(10)->Arg(50);

void BM_RecedingHorizonRun(benchmark::State& state) {
  const Scenario s = generate_comparative(1, 7);
  const ScenarioRuntime rt = build_runtime(s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(receding_horizon_run(rt.net, rt.gamma, s.agents, s.policy));
  }
}
BENCHMARK(BM_RecedingHorizonRun);

void BM_BuildCredibilityMatrix(benchmark::State& state) {
  Rng rng(9);
  const auto n = static_cast<AgentId>(state.range(0));
  std::vector<Agent> agents(static_cast<std::size_t>(n));
  const std::string labels[] = {"a", "b", "c"};
  for (AgentId i = 0; i < n; ++i) {
    agents[static_cast<std::size_t>(i)].id = i;
    agents[static_cast<std::size_t>(i)].reliability = rng.uniform01();
    for (const auto& l : labels) {
      if (rng.bernoulli(0.4)) agents[static_cast<std::size_t>(i)].groups.insert(l);
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_credibility_matrix(agents));
  }
}
BENCHMARK(BM_BuildCredibilityMatrix)->Arg(168);

}  // namespace

BENCHMARK_MAIN();
