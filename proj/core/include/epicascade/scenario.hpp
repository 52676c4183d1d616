#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "epicascade/control.hpp"
#include "epicascade/epistemics.hpp"
#include "epicascade/graph.hpp"

namespace epicascade {

/// Graph section of a scenario: either an explicit edge list or a seeded
/// generator spec that is expanded deterministically at load time.
struct GraphSpec {
  struct Generator {
    AgentId n = 0;
    double p = 0.5;
    std::uint64_t seed = 0;
    int max_attempts = 1000;

    bool operator==(const Generator&) const = default;
  };

  std::optional<std::vector<Edge>> edge_list;
  std::optional<Generator> generator;

  bool operator==(const GraphSpec&) const = default;
};

enum class RunMode { open_loop, closed_loop };

/// One self-contained experiment: agents, topology, credibility structure,
/// policy parameters, and run metadata. Immutable after load.
struct Scenario {
  std::vector<Agent> agents;
  GraphSpec graph;
  EtaMode credibility_mode = EtaMode::excess;
  std::vector<CredibilityOverride> overrides;
  PolicyParams policy;
  RunMode mode = RunMode::closed_loop;
  std::string label;
  std::uint64_t rng_seed = 0;

  bool operator==(const Scenario&) const = default;
};

/// Expanded, validated scenario ready to run.
struct ScenarioRuntime {
  Graph net;
  CredibilityMatrix gamma;
  std::vector<double> thresholds;
  std::vector<AgentId> seeds;
};

/// Checks every declared invariant (ranges, id density, seed presence,
/// weights); throws ValidationError naming the violated one.
void validate_scenario(const Scenario& scenario);

/// Expands the graph spec and builds the credibility matrix.
ScenarioRuntime build_runtime(const Scenario& scenario);

/// Reads and fully validates a scenario file. Unknown fields are rejected.
/// Errors: ParseError (with line/field), ValidationError, IoError.
Scenario load_scenario(const std::filesystem::path& path);

void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
std::string scenario_to_string(const Scenario& scenario);

/// The 20-agent comparative setups. A shared rng seed yields the same graph
/// and seed agents across the three ids; they differ only in the credibility
/// overrides: (1) uniform credibility, (2) seed speakers discounted,
/// (3) non-seed speakers discounted.
Scenario generate_comparative(int scenario_id, std::uint64_t rng_seed);

/// Survey-style respondent record for the data-driven setup.
struct AgentRecord {
  std::string education;  // "low" | "medium" | "high"
  std::set<std::string> groups;
  bool owns_ev = false;
  double resistivity = 0.5;

  bool operator==(const AgentRecord&) const = default;
};

/// Errors: BadRecord with the offending row, ParseError, IoError.
std::vector<AgentRecord> load_agent_records(const std::filesystem::path& path);
void write_agent_records(const std::vector<AgentRecord>& records,
                         const std::filesystem::path& path);

/// Deterministic schema-conformant respondent sample; resistivities come
/// from a small grid so equal-threshold comparisons are possible.
std::vector<AgentRecord> synthetic_agent_records(int n, std::uint64_t seed);

/// Builds the data-driven scenario from a respondent file: EV owners become
/// seeds, reliability follows the education mapping low/medium/high ->
/// 0.3/0.6/0.8 with an optional seeded uniform jitter, and credibility comes
/// from the intersectional group structure.
Scenario generate_data_driven(const std::filesystem::path& agent_file, std::uint64_t rng_seed,
                              double reliability_jitter = 0.0);

/// Policy performance indicators of one closed-loop run.
struct Metrics {
  double total_cost = 0.0;        // C: sum of all applied inputs
  double avg_cost = 0.0;          // C_bar = C / n
  std::optional<int> t_full;      // first time of full adoption, if reached
  std::string label;
  std::uint64_t rng_seed = 0;
};

Metrics compute_metrics(const ControlledTrajectory& traj, const std::string& label,
                        std::uint64_t rng_seed);

struct ExportFormats {
  bool csv = true;
  bool json = true;
};

/// Open-loop export: trajectory CSV plus a JSON summary of the terminal set,
/// fixed-point time, and switching sets. Returns the written paths.
std::vector<std::filesystem::path> export_results(const Trajectory& traj,
                                                  const std::filesystem::path& out_dir,
                                                  ExportFormats formats = {});

/// Closed-loop export: trajectory CSV, metrics JSON, and plot-ready tables
/// (inputs vs opposite target at t = 0, thresholds vs target at t = 1,
/// inputs vs resistivity-weighted epistemic weight).
std::vector<std::filesystem::path> export_results(const ControlledTrajectory& traj,
                                                  const Metrics& metrics,
                                                  const std::filesystem::path& out_dir,
                                                  ExportFormats formats = {});

}  // namespace epicascade
