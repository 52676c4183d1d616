#include "epicascade/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epicascade/error.hpp"
#include "epicascade/rng.hpp"

namespace epicascade {

namespace {

void require(bool ok, const std::string& invariant) {
  if (!ok) throw Error(errc::validation_error, invariant);
}

double reliability_from_education(const std::string& level, int row) {
  if (level == "low") return 0.3;
  if (level == "medium") return 0.6;
  if (level == "high") return 0.8;
  throw Error(errc::bad_record,
              "row " + std::to_string(row) + ": unknown education level '" + level + "'");
}

}  // namespace

void validate_scenario(const Scenario& scenario) {
  require(!scenario.agents.empty(), "scenario must declare at least one agent");
  const auto n = static_cast<AgentId>(scenario.agents.size());

  bool any_seed = false;
  for (AgentId i = 0; i < n; ++i) {
    const Agent& a = scenario.agents[static_cast<std::size_t>(i)];
    require(a.id == i, "agent ids must be dense and ascending from 0");
    require(a.reliability >= 0.0 && a.reliability <= 1.0,
            "reliability of agent " + std::to_string(i) + " outside [0, 1]");
    require(a.rho0 >= 0.0 && a.rho0 <= 1.0,
            "rho0 of agent " + std::to_string(i) + " outside [0, 1]");
    require(a.responsiveness >= -1.0 && a.responsiveness <= 1.0,
            "responsiveness of agent " + std::to_string(i) + " outside [-1, 1]");
    if (!a.is_seed) {
      require(a.responsiveness != 0.0,
              "non-seed agent " + std::to_string(i) + " has zero responsiveness");
    }
    any_seed = any_seed || a.is_seed;
  }
  require(any_seed, "scenario must declare at least one seed agent");

  require(scenario.graph.edge_list.has_value() != scenario.graph.generator.has_value(),
          "graph section must declare exactly one of edges or generator");
  if (scenario.graph.generator) {
    const auto& gen = *scenario.graph.generator;
    require(gen.n == n, "generator agent count must match the agent list");
    require(gen.p > 0.0 && gen.p <= 1.0, "generator edge probability outside (0, 1]");
    require(gen.max_attempts >= 1, "generator max_attempts must be >= 1");
  }

  for (const auto& o : scenario.overrides) {
    require(o.speaker >= 0 && o.speaker < n && o.hearer >= 0 && o.hearer < n,
            "credibility override references an unknown agent");
    require(o.speaker != o.hearer, "credibility override on the unused diagonal");
    if (!(o.value >= 0.0 && o.value <= 1.0)) {
      throw Error(errc::override_out_of_range, "override value outside [0, 1]");
    }
  }

  if (scenario.mode == RunMode::closed_loop) {
    require(scenario.policy.omega_rho_bar > 0.0, "tracking weight must be > 0");
    require(scenario.policy.omega_u > 0.0, "effort weight must be > 0");
    require(scenario.policy.horizon >= 1, "horizon must be >= 1");
    require(scenario.policy.t_max >= 0, "t_max must be >= 0");
  }
}

ScenarioRuntime build_runtime(const Scenario& scenario) {
  validate_scenario(scenario);
  const auto n = static_cast<AgentId>(scenario.agents.size());

  Graph net = scenario.graph.edge_list
                  ? build_graph(n, *scenario.graph.edge_list)
                  : generate_er_graph(scenario.graph.generator->n, scenario.graph.generator->p,
                                      scenario.graph.generator->seed,
                                      scenario.graph.generator->max_attempts);

  ScenarioRuntime runtime{std::move(net),
                          build_credibility_matrix(scenario.agents, scenario.credibility_mode,
                                                   scenario.overrides),
                          {},
                          {}};
  runtime.thresholds.reserve(static_cast<std::size_t>(n));
  for (const Agent& a : scenario.agents) {
    runtime.thresholds.push_back(a.rho0);
    if (a.is_seed) runtime.seeds.push_back(a.id);
  }
  return runtime;
}

Scenario generate_comparative(int scenario_id, std::uint64_t rng_seed) {
  if (scenario_id < 1 || scenario_id > 3) {
    throw Error(errc::validation_error, "comparative scenario id must be 1, 2, or 3");
  }

  constexpr AgentId kAgents = 20;
  constexpr int kSeeds = 2;

  Scenario scenario;
  scenario.label = "comparative-" + std::to_string(scenario_id);
  scenario.rng_seed = rng_seed;
  scenario.mode = RunMode::closed_loop;
  scenario.policy = PolicyParams{1.0, 1.0, 10, 100, false};
  scenario.graph.generator = GraphSpec::Generator{kAgents, 0.5, rng_seed, 1000};

  // Same graph and seed agents for every id under a shared rng seed; only the
  // override pattern differs.
  Rng picker(split_seed(rng_seed, 1));
  std::vector<AgentId> ids(kAgents);
  for (AgentId i = 0; i < kAgents; ++i) ids[static_cast<std::size_t>(i)] = i;
  picker.shuffle(ids);
  std::vector<std::uint8_t> is_seed(kAgents, 0);
  for (int i = 0; i < kSeeds; ++i) is_seed[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] = 1;

  scenario.agents.reserve(kAgents);
  for (AgentId i = 0; i < kAgents; ++i) {
    Agent a;
    a.id = i;
    a.reliability = 1.0;
    a.rho0 = 0.8;
    a.responsiveness = -1.0;
    a.is_seed = is_seed[static_cast<std::size_t>(i)] != 0;
    scenario.agents.push_back(std::move(a));
  }

  // Uniform credibility is the fair baseline; the biased variants discount
  // one side's speakers to 0.5 against everyone else.
  constexpr double kDiscount = 0.5;
  if (scenario_id != 1) {
    const bool discount_seeds = scenario_id == 2;
    for (AgentId x = 0; x < kAgents; ++x) {
      if ((is_seed[static_cast<std::size_t>(x)] != 0) != discount_seeds) continue;
      for (AgentId y = 0; y < kAgents; ++y) {
        if (x == y) continue;
        scenario.overrides.push_back({x, y, kDiscount});
      }
    }
  }
  return scenario;
}

std::vector<AgentRecord> synthetic_agent_records(int n, std::uint64_t seed) {
  if (n < 2) throw Error(errc::validation_error, "need at least two respondents");

  static const char* kEducation[] = {"low", "medium", "high"};
  static const char* kGroups[] = {"gender", "income", "age"};
  static const double kResistivityGrid[] = {0.5, 0.6, 0.7, 0.8, 0.9};

  Rng rng(seed);
  std::vector<AgentRecord> records;
  records.reserve(static_cast<std::size_t>(n));
  bool any_owner = false;
  for (int i = 0; i < n; ++i) {
    AgentRecord rec;
    rec.education = kEducation[rng.uniform_int(0, 2)];
    for (const char* g : kGroups) {
      if (rng.bernoulli(0.4)) rec.groups.insert(g);
    }
    rec.owns_ev = rng.bernoulli(0.1);
    rec.resistivity = kResistivityGrid[rng.uniform_int(0, 4)];
    any_owner = any_owner || rec.owns_ev;
    records.push_back(std::move(rec));
  }
  if (!any_owner) records.front().owns_ev = true;
  return records;
}

Scenario generate_data_driven(const std::filesystem::path& agent_file, std::uint64_t rng_seed,
                              double reliability_jitter) {
  const auto records = load_agent_records(agent_file);
  if (records.size() < 2) {
    throw Error(errc::validation_error, "data-driven scenario needs at least two respondents");
  }
  if (reliability_jitter < 0.0) {
    throw Error(errc::validation_error, "reliability jitter must be >= 0");
  }

  Scenario scenario;
  scenario.label = "data-driven";
  scenario.rng_seed = rng_seed;
  scenario.mode = RunMode::closed_loop;
  scenario.policy = PolicyParams{1.0, 1.0, 10, 100, false};
  scenario.graph.generator =
      GraphSpec::Generator{static_cast<AgentId>(records.size()), 0.5, rng_seed, 1000};

  Rng jitter(split_seed(rng_seed, 2));
  scenario.agents.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AgentRecord& rec = records[i];
    Agent a;
    a.id = static_cast<AgentId>(i);
    a.groups = rec.groups;
    double r = reliability_from_education(rec.education, static_cast<int>(i));
    if (reliability_jitter > 0.0) {
      r += jitter.uniform(-reliability_jitter, reliability_jitter);
    }
    a.reliability = std::clamp(r, 0.0, 1.0);
    a.rho0 = rec.resistivity;
    a.responsiveness = -1.0;
    a.is_seed = rec.owns_ev;
    scenario.agents.push_back(std::move(a));
  }
  return scenario;
}

Metrics compute_metrics(const ControlledTrajectory& traj, const std::string& label,
                        std::uint64_t rng_seed) {
  Metrics metrics;
  metrics.label = label;
  metrics.rng_seed = rng_seed;
  double total = 0.0;
  for (const auto& step_inputs : traj.inputs) {
    for (double u : step_inputs) total += u;
  }
  metrics.total_cost = total;
  const auto n = traj.states.empty() ? 0 : traj.states.front().adopted.size();
  metrics.avg_cost = n > 0 ? total / static_cast<double>(n) : 0.0;
  if (traj.full_adoption) metrics.t_full = traj.t_end;
  return metrics;
}

}  // namespace epicascade
