#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "epicascade/cascade.hpp"
#include "epicascade/error.hpp"
#include "epicascade/scenario.hpp"

using namespace epicascade;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("epicascade_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

fs::path write_text(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path out = dir / name;
  std::ofstream stream(out, std::ios::binary);
  stream << text;
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kMinimalFair = R"({
  "agents": [
    {"id": 0, "groups": [], "reliability": 1.0, "rho0": 0.5, "responsiveness": -1.0, "is_seed": true},
    {"id": 1, "groups": [], "reliability": 1.0, "rho0": 0.5, "responsiveness": -1.0, "is_seed": false},
    {"id": 2, "groups": [], "reliability": 1.0, "rho0": 0.5, "responsiveness": -1.0, "is_seed": false}
  ],
  "graph": {"edges": [[0, 1], [1, 2]]},
  "run": {"mode": "open_loop", "label": "minimal", "rng_seed": 1}
})";

}  // namespace

TEST_CASE("minimal scenario loads with defaults") {
  TempDir tmp;
  const Scenario s = load_scenario(write_text(tmp.path, "minimal.json", kMinimalFair));
  CHECK(s.agents.size() == 3);
  CHECK(s.mode == RunMode::open_loop);
  CHECK(s.credibility_mode == EtaMode::excess);
  CHECK(s.overrides.empty());
  const ScenarioRuntime rt = build_runtime(s);
  CHECK(is_epistemically_fair(rt.gamma, s.agents));
  CHECK(rt.seeds == std::vector<AgentId>{0});
}

TEST_CASE("load rejects out-of-range reliability") {
  TempDir tmp;
  std::string bad = kMinimalFair;
  bad.replace(bad.find("\"reliability\": 1.0"), 18, "\"reliability\": 1.2");
  CHECK_THROWS_WITH_AS(load_scenario(write_text(tmp.path, "bad.json", bad)),
                       doctest::Contains("reliability"), Error);
}

TEST_CASE("load rejects unknown fields") {
  TempDir tmp;
  std::string bad = kMinimalFair;
  bad.replace(bad.find("\"run\""), 5, "\"runx\"");
  CHECK_THROWS_WITH_AS(load_scenario(write_text(tmp.path, "bad.json", bad)),
                       doctest::Contains("unknown field"), Error);
}

TEST_CASE("load reports parse errors with a line number") {
  TempDir tmp;
  const auto path = write_text(tmp.path, "broken.json", "{\n  \"agents\": [\n  oops\n");
  CHECK_THROWS_WITH_AS(load_scenario(path), doctest::Contains("line 3"), Error);
  CHECK_THROWS_WITH_AS(load_scenario(tmp.path / "missing.json"),
                       doctest::Contains("does not exist"), Error);
}

TEST_CASE("load rejects non-positive effort weight in closed loop") {
  TempDir tmp;
  std::string bad = kMinimalFair;
  bad.replace(bad.find("\"mode\": \"open_loop\""), 19, "\"mode\": \"closed_loop\"");
  bad.insert(bad.rfind("\"run\""), "\"policy\": {\"omega_u\": 0.0},\n  ");
  CHECK_THROWS_WITH_AS(load_scenario(write_text(tmp.path, "bad.json", bad)),
                       doctest::Contains("effort weight"), Error);
}

TEST_CASE("education trio fixture reproduces the credibility table") {
  TempDir tmp;
  const char* fixture = R"({
    "agents": [
      {"id": 0, "groups": ["gender", "income"], "reliability": 0.8, "rho0": 0.5, "responsiveness": -1.0, "is_seed": true},
      {"id": 1, "groups": ["gender", "income", "age"], "reliability": 0.3, "rho0": 0.5, "responsiveness": -1.0, "is_seed": false},
      {"id": 2, "groups": ["age"], "reliability": 0.6, "rho0": 0.5, "responsiveness": -1.0, "is_seed": false}
    ],
    "graph": {"edges": [[0, 1], [1, 2], [0, 2]]},
    "run": {"mode": "open_loop", "label": "trio", "rng_seed": 0}
  })";
  const Scenario s = load_scenario(write_text(tmp.path, "trio.json", fixture));
  const ScenarioRuntime rt = build_runtime(s);
  CHECK(rt.gamma(0, 1) == 0.8);
  CHECK(rt.gamma(0, 2) == 0.2);
  CHECK(rt.gamma(1, 0) == 0.15);
  CHECK(rt.gamma(1, 2) == 0.075);
  CHECK(rt.gamma(2, 0) == 0.3);
  CHECK(rt.gamma(2, 1) == 0.6);
}

TEST_CASE("save and load round-trip field for field") {
  TempDir tmp;
  Scenario s = generate_comparative(2, 987654321);
  s.policy.recompute_targets = true;
  s.credibility_mode = EtaMode::deficit;
  const auto path = tmp.path / "roundtrip.json";
  save_scenario(s, path);
  const Scenario loaded = load_scenario(path);
  CHECK(loaded == s);
  CHECK(scenario_to_string(loaded) == scenario_to_string(s));
}

TEST_CASE("comparative generator invariants") {
  const std::uint64_t seed = 20240817;
  const Scenario s1 = generate_comparative(1, seed);
  const Scenario s2 = generate_comparative(2, seed);
  const Scenario s3 = generate_comparative(3, seed);

  const ScenarioRuntime r1 = build_runtime(s1);
  const ScenarioRuntime r2 = build_runtime(s2);
  const ScenarioRuntime r3 = build_runtime(s3);

  CHECK(s1.agents.size() == 20);
  CHECK(r1.seeds.size() == 2);
  // Shared seed: identical topology and seed agents across the three setups.
  CHECK(r1.net.edges() == r2.net.edges());
  CHECK(r1.net.edges() == r3.net.edges());
  CHECK(r1.seeds == r2.seeds);
  CHECK(r1.seeds == r3.seeds);

  CHECK(is_epistemically_fair(r1.gamma, s1.agents));
  CHECK_FALSE(is_epistemically_fair(r2.gamma, s2.agents));
  CHECK_FALSE(is_epistemically_fair(r3.gamma, s3.agents));

  std::vector<std::uint8_t> seeded(20, 0);
  for (AgentId s : r1.seeds) seeded[static_cast<std::size_t>(s)] = 1;
  for (AgentId x = 0; x < 20; ++x) {
    if (!seeded[static_cast<std::size_t>(x)]) continue;
    for (AgentId y = 0; y < 20; ++y) {
      if (x == y || seeded[static_cast<std::size_t>(y)]) continue;
      CHECK(r2.gamma(x, y) < r2.gamma(y, x));
      CHECK(r3.gamma(x, y) > r3.gamma(y, x));
    }
  }

  CHECK_THROWS_AS(generate_comparative(4, seed), Error);
}

TEST_CASE("synthetic respondents are deterministic and in range") {
  const auto a = synthetic_agent_records(168, 4242);
  const auto b = synthetic_agent_records(168, 4242);
  const auto c = synthetic_agent_records(168, 4243);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.size() == 168);
  bool any_owner = false;
  for (const auto& rec : a) {
    CHECK((rec.education == "low" || rec.education == "medium" || rec.education == "high"));
    CHECK(rec.resistivity >= 0.0);
    CHECK(rec.resistivity <= 1.0);
    any_owner = any_owner || rec.owns_ev;
  }
  CHECK(any_owner);
}

TEST_CASE("data-driven generator maps education and ownership") {
  TempDir tmp;
  const char* respondents = R"({
    "respondents": [
      {"education": "high", "groups": ["gender"], "owns_ev": true, "resistivity": 0.6},
      {"education": "low", "groups": ["gender"], "owns_ev": false, "resistivity": 0.7},
      {"education": "medium", "groups": [], "owns_ev": false, "resistivity": 0.8}
    ]
  })";
  const auto path = write_text(tmp.path, "agents.json", respondents);
  const Scenario s = generate_data_driven(path, 11);

  CHECK(s.agents[0].reliability == 0.8);
  CHECK(s.agents[1].reliability == 0.3);
  CHECK(s.agents[2].reliability == 0.6);
  CHECK(s.agents[0].is_seed);
  CHECK_FALSE(s.agents[1].is_seed);
  CHECK(s.agents[1].rho0 == 0.7);

  // Hearers sharing all of the speaker's groups restore full reliability.
  const ScenarioRuntime rt = build_runtime(s);
  CHECK(rt.gamma(0, 1) == s.agents[0].reliability);
  CHECK(rt.gamma(1, 0) == s.agents[1].reliability);

  SUBCASE("jitter stays seeded and bounded") {
    const Scenario j1 = generate_data_driven(path, 11, 0.05);
    const Scenario j2 = generate_data_driven(path, 11, 0.05);
    CHECK(j1 == j2);
    CHECK(j1.agents[0].reliability != s.agents[0].reliability);
    for (const auto& a : j1.agents) {
      CHECK(a.reliability >= 0.0);
      CHECK(a.reliability <= 1.0);
    }
  }
}

TEST_CASE("bad respondent rows carry their row number") {
  TempDir tmp;
  const char* respondents = R"({
    "respondents": [
      {"education": "high", "groups": [], "owns_ev": true, "resistivity": 0.6},
      {"education": "phd", "groups": [], "owns_ev": false, "resistivity": 0.7}
    ]
  })";
  CHECK_THROWS_WITH_AS(load_agent_records(write_text(tmp.path, "agents.json", respondents)),
                       doctest::Contains("row 1"), Error);
}

TEST_CASE("metrics definitions") {
  const Graph net = build_graph(2, {{0, 1}});
  std::vector<Agent> agents(2);
  for (AgentId i = 0; i < 2; ++i) {
    agents[static_cast<std::size_t>(i)].id = i;
    agents[static_cast<std::size_t>(i)].is_seed = true;
  }
  const CredibilityMatrix gamma = build_credibility_matrix(agents);
  const ControlledTrajectory traj = receding_horizon_run(net, gamma, agents, PolicyParams{});
  const Metrics m = compute_metrics(traj, "all-seeds", 7);
  CHECK(m.total_cost == 0.0);
  REQUIRE(m.t_full.has_value());
  CHECK(*m.t_full == 0);
  CHECK(m.avg_cost == 0.0);
  CHECK(m.label == "all-seeds");

  const Scenario s = generate_comparative(1, 5);
  const ScenarioRuntime rt = build_runtime(s);
  const ControlledTrajectory run = receding_horizon_run(rt.net, rt.gamma, s.agents, s.policy);
  const Metrics full = compute_metrics(run, s.label, s.rng_seed);
  CHECK(full.avg_cost * 20.0 == doctest::Approx(full.total_cost).epsilon(1e-12));
  CHECK(full.t_full.has_value());
}

TEST_CASE("closed-loop export manifest and determinism") {
  TempDir tmp;
  const Scenario s = generate_comparative(1, 5);
  const ScenarioRuntime rt = build_runtime(s);
  const ControlledTrajectory run = receding_horizon_run(rt.net, rt.gamma, s.agents, s.policy);
  const Metrics metrics = compute_metrics(run, s.label, s.rng_seed);

  const auto written = export_results(run, metrics, tmp.path / "a");
  REQUIRE(written.size() == 5);
  for (const auto& path : written) CHECK(fs::exists(path));
  CHECK(fs::exists(tmp.path / "a" / "trajectory.csv"));
  CHECK(fs::exists(tmp.path / "a" / "metrics.json"));
  CHECK(fs::exists(tmp.path / "a" / "fig_inputs_t0.csv"));
  CHECK(fs::exists(tmp.path / "a" / "fig_thresholds_t1.csv"));
  CHECK(fs::exists(tmp.path / "a" / "fig_inputs_vs_weight.csv"));

  const std::string csv = slurp(tmp.path / "a" / "trajectory.csv");
  CHECK(csv.rfind("t,agent,adopted,rho_u,u,kappa,target\n", 0) == 0);
  const std::string json = slurp(tmp.path / "a" / "metrics.json");
  CHECK(json.find("\"C\"") != std::string::npos);
  CHECK(json.find("\"C_bar\"") != std::string::npos);
  CHECK(json.find("\"t_star_star\"") != std::string::npos);
  CHECK(json.find("\"scenario_label\"") != std::string::npos);
  CHECK(json.find("\"rng_seed\"") != std::string::npos);

  export_results(run, metrics, tmp.path / "b");
  CHECK(slurp(tmp.path / "a" / "trajectory.csv") == slurp(tmp.path / "b" / "trajectory.csv"));
  CHECK(slurp(tmp.path / "a" / "metrics.json") == slurp(tmp.path / "b" / "metrics.json"));

  SUBCASE("format filters") {
    const auto csv_only = export_results(run, metrics, tmp.path / "c", {true, false});
    CHECK(csv_only.size() == 4);
    CHECK_FALSE(fs::exists(tmp.path / "c" / "metrics.json"));
    const auto json_only = export_results(run, metrics, tmp.path / "d", {false, true});
    CHECK(json_only.size() == 1);
  }
}

TEST_CASE("open-loop export has no input columns") {
  TempDir tmp;
  const Graph net = build_graph(3, {{0, 1}, {0, 2}});
  std::vector<Agent> agents(3);
  for (AgentId i = 0; i < 3; ++i) {
    agents[static_cast<std::size_t>(i)].id = i;
    agents[static_cast<std::size_t>(i)].rho0 = 0.5;
  }
  agents[1].is_seed = true;
  agents[2].rho0 = 0.4;
  const CredibilityMatrix gamma = build_credibility_matrix(agents);
  const Trajectory traj = simulate(net, gamma, {0.5, 0.5, 0.4}, {1}, 3);

  const auto written = export_results(traj, tmp.path / "open");
  REQUIRE(written.size() == 2);
  const std::string csv = slurp(tmp.path / "open" / "trajectory.csv");
  CHECK(csv.rfind("t,agent,adopted,ratio\n", 0) == 0);
  CHECK(csv.find("rho_u") == std::string::npos);
  const std::string summary = slurp(tmp.path / "open" / "summary.json");
  CHECK(summary.find("\"s_star_star\"") != std::string::npos);
  CHECK(summary.find("\"t_fixed\": 2") != std::string::npos);
}

TEST_CASE("identical scenario and seed reproduce the same run") {
  const Scenario s = generate_comparative(3, 77);
  const ScenarioRuntime rt1 = build_runtime(s);
  const ScenarioRuntime rt2 = build_runtime(s);
  CHECK(rt1.net.edges() == rt2.net.edges());
  const ControlledTrajectory a = receding_horizon_run(rt1.net, rt1.gamma, s.agents, s.policy);
  const ControlledTrajectory b = receding_horizon_run(rt2.net, rt2.gamma, s.agents, s.policy);
  CHECK(a.inputs == b.inputs);
  CHECK(compute_metrics(a, s.label, s.rng_seed).total_cost ==
        compute_metrics(b, s.label, s.rng_seed).total_cost);
}
