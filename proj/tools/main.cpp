#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "epicascade/cascade.hpp"
#include "epicascade/control.hpp"
#include "epicascade/error.hpp"
#include "epicascade/scenario.hpp"
#include "epicascade/verify.hpp"

namespace {

using namespace epicascade;

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitUsage = 2;

ExportFormats formats_from(const std::string& format) {
  if (format == "csv") return {true, false};
  if (format == "json") return {false, true};
  return {true, true};
}

std::string id_list(const std::vector<AgentId>& ids) {
  std::string out = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(ids[i]);
  }
  return out + "}";
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 const std::string& format) {
  const Scenario scenario = load_scenario(scenario_path);
  if (scenario.mode != RunMode::open_loop) {
    throw Error(errc::validation_error, "simulate needs run.mode = open_loop");
  }
  const ScenarioRuntime rt = build_runtime(scenario);
  const Trajectory traj = simulate(rt.net, rt.gamma, rt.thresholds, rt.seeds,
                                   rt.net.agent_count());
  const auto written = export_results(traj, out_dir, formats_from(format));

  std::cout << "scenario: " << scenario.label << "\n"
            << "final adopters S**: " << id_list(traj.final_adopters) << " ("
            << traj.final_adopters.size() << " of " << rt.net.agent_count() << ")\n"
            << "fixed point reached at t = " << traj.t_fixed << "\n";
  for (const auto& path : written) std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

int cmd_control(const std::string& scenario_path, const std::string& out_dir,
                const std::string& format) {
  const Scenario scenario = load_scenario(scenario_path);
  if (scenario.mode != RunMode::closed_loop) {
    throw Error(errc::validation_error, "control needs run.mode = closed_loop");
  }
  const ScenarioRuntime rt = build_runtime(scenario);
  const ControlledTrajectory traj =
      receding_horizon_run(rt.net, rt.gamma, scenario.agents, scenario.policy);
  const Metrics metrics = compute_metrics(traj, scenario.label, scenario.rng_seed);
  const auto written = export_results(traj, metrics, out_dir, formats_from(format));

  std::cout << "scenario: " << scenario.label << "\n"
            << "total policy cost C = " << metrics.total_cost
            << ", average C_bar = " << metrics.avg_cost << "\n";
  if (metrics.t_full) {
    std::cout << "full adoption at t** = " << *metrics.t_full << "\n";
  } else {
    std::cout << "full adoption not reached within t_max = " << scenario.policy.t_max << "\n";
  }
  for (const auto& path : written) std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

int cmd_analyze(const std::string& scenario_path) {
  const Scenario scenario = load_scenario(scenario_path);
  const ScenarioRuntime rt = build_runtime(scenario);

  std::vector<AgentId> non_seeds;
  std::vector<std::uint8_t> seeded(static_cast<std::size_t>(rt.net.agent_count()), 0);
  for (AgentId s : rt.seeds) seeded[static_cast<std::size_t>(s)] = 1;
  for (AgentId x = 0; x < rt.net.agent_count(); ++x) {
    if (!seeded[static_cast<std::size_t>(x)]) non_seeds.push_back(x);
  }

  const bool fair = is_epistemically_fair(rt.gamma, scenario.agents);
  const auto immune = largest_cohesive_subset(rt.net, rt.gamma, rt.thresholds, non_seeds);
  const auto predicted = final_adopters(rt.net, rt.gamma, rt.thresholds, rt.seeds);
  const Trajectory traj = simulate(rt.net, rt.gamma, rt.thresholds, rt.seeds,
                                   rt.net.agent_count());

  std::cout << "scenario: " << scenario.label << "\n"
            << "epistemically fair: " << (fair ? "yes" : "no") << "\n"
            << "largest cohesive subset of the non-seeds: " << id_list(immune) << "\n"
            << "predicted S**: " << id_list(predicted) << "\n"
            << "simulated S**: " << id_list(traj.final_adopters) << "\n";
  if (predicted != traj.final_adopters) {
    std::cout << "MISMATCH between analysis and simulation\n";
    return kExitPropertyFailure;
  }
  std::cout << "analysis and simulation agree\n";
  return kExitOk;
}

int cmd_verify(const std::string& suite, int trials, std::uint64_t seed,
               const std::string& out_dir) {
  const auto run_one = [&](const std::string& name) {
    const verify::SuiteResult result = verify::run_suite(name, trials, seed);
    std::cout << (result.passed() ? "[PASS] " : "[FAIL] ") << result.suite << ": "
              << result.trials << " trials, " << result.failures << " failures — "
              << result.detail << "\n";
    if (!result.passed() && !result.counterexample.empty()) {
      std::filesystem::create_directories(out_dir);
      const auto path =
          std::filesystem::path(out_dir) / ("counterexample_" + result.suite + ".json");
      std::ofstream out(path, std::ios::binary);
      out << result.counterexample;
      std::cout << "counterexample written to " << path.string() << "\n";
    }
    return result.passed();
  };

  bool all_passed = true;
  if (suite == "all") {
    for (const auto& name : verify::suite_names()) all_passed = run_one(name) && all_passed;
  } else {
    all_passed = run_one(suite);
  }
  return all_passed ? kExitOk : kExitPropertyFailure;
}

int cmd_generate(int comparative_id, bool data_driven, const std::string& agents_path,
                 int synthetic_agents, std::uint64_t seed, const std::string& out_path) {
  if (synthetic_agents > 0) {
    write_agent_records(synthetic_agent_records(synthetic_agents, seed), out_path);
    std::cout << "wrote " << synthetic_agents << " synthetic respondents to " << out_path << "\n";
    return kExitOk;
  }
  Scenario scenario;
  if (data_driven) {
    if (agents_path.empty()) {
      throw Error(errc::validation_error, "--data-driven needs --agents <file>");
    }
    scenario = generate_data_driven(agents_path, seed);
  } else {
    scenario = generate_comparative(comparative_id, seed);
  }
  save_scenario(scenario, out_path);
  std::cout << "wrote scenario '" << scenario.label << "' to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epistemically weighted threshold cascades, steady-state analysis, and "
               "resistivity-nudging policy synthesis"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string format = "all";
  std::string suite = "all";
  std::string agents_path;
  std::string out_path = "scenario.json";
  std::uint64_t seed = 0;
  int trials = 0;
  int comparative_id = 1;
  int synthetic_agents = 0;
  bool data_driven = false;

  auto* simulate_cmd = app.add_subcommand("simulate", "run the open-loop cascade");
  simulate_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate_cmd->add_option("--out", out_dir, "output directory");
  simulate_cmd->add_option("--format", format, "csv|json|all")
      ->check(CLI::IsMember({"csv", "json", "all"}));

  auto* control_cmd = app.add_subcommand("control", "run the receding-horizon nudging policy");
  control_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  control_cmd->add_option("--out", out_dir, "output directory");
  control_cmd->add_option("--format", format, "csv|json|all")
      ->check(CLI::IsMember({"csv", "json", "all"}));

  auto* analyze_cmd = app.add_subcommand("analyze", "cohesive-set steady-state analysis");
  analyze_cmd->add_option("--scenario", scenario_path, "scenario file")->required();

  auto* verify_cmd = app.add_subcommand("verify", "run a randomized property suite");
  verify_cmd->add_option("--suite", suite, "lemma1|theorem1|prop3|lemma2|riccati|all")
      ->check(CLI::IsMember({"lemma1", "theorem1", "prop3", "lemma2", "riccati", "all"}));
  verify_cmd->add_option("--trials", trials, "trial count (0 = suite default)");
  verify_cmd->add_option("--seed", seed, "rng seed");
  verify_cmd->add_option("--out", out_dir, "directory for counterexample dumps");

  auto* generate_cmd = app.add_subcommand("generate", "write scenario or respondent files");
  generate_cmd->add_option("--comparative", comparative_id, "comparative scenario id (1|2|3)")
      ->check(CLI::Range(1, 3));
  generate_cmd->add_flag("--data-driven", data_driven, "build the data-driven scenario");
  generate_cmd->add_option("--agents", agents_path, "respondent file for --data-driven");
  generate_cmd->add_option("--synthetic-agents", synthetic_agents,
                           "emit a synthetic respondent file with this many rows");
  generate_cmd->add_option("--seed", seed, "rng seed");
  generate_cmd->add_option("--out", out_path, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate_cmd->parsed()) return cmd_simulate(scenario_path, out_dir, format);
    if (control_cmd->parsed()) return cmd_control(scenario_path, out_dir, format);
    if (analyze_cmd->parsed()) return cmd_analyze(scenario_path);
    if (verify_cmd->parsed()) return cmd_verify(suite, trials, seed, out_dir);
    if (generate_cmd->parsed()) {
      return cmd_generate(comparative_id, data_driven, agents_path, synthetic_agents, seed,
                          out_path);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
