#pragma once

#include <vector>

#include "epicascade/cascade.hpp"
#include "epicascade/epistemics.hpp"
#include "epicascade/graph.hpp"

namespace epicascade {

struct PolicyParams {
  /// Tracking weight scale applied to every non-adopter.
  double omega_rho_bar = 1.0;
  /// Effort weight on the squared input.
  double omega_u = 1.0;
  /// Prediction horizon length (>= 1).
  int horizon = 10;
  /// Hard bound on closed-loop run length.
  int t_max = 100;
  /// Recompute per-agent targets against the current adopter set each step
  /// instead of freezing them at t = 0. Off by default; sensitivity runs only.
  bool recompute_targets = false;

  bool operator==(const PolicyParams&) const = default;
};

/** Backward solution of the per-agent scalar tracking regulator.
 *
 * gains[tau] is the feedback gain at stage tau of the horizon, cost_to_go[tau]
 * the quadratic value coefficient; cost_to_go.back() is the terminal weight.
 * The product b * gain is never positive, so the closed loop contracts the
 * tracking error for either sign of the responsiveness.
 */
struct GainSchedule {
  std::vector<double> gains;
  std::vector<double> cost_to_go;

  double gain() const noexcept { return gains.empty() ? 0.0 : gains.front(); }
};

/// Exact dynamic-programming solution for horizon T. omega_rho may be zero
/// (adopters), which zeroes the whole schedule. Errors: NonPositiveWeights,
/// ValidationError for T < 1.
GainSchedule riccati_gain(double b, double omega_rho, double omega_u, int horizon);

/// Proportional nudging input from the current threshold error.
double control_input(double gain, double rho_u, double rho_bar);

/// Target threshold for a non-seed: its seed-neighbor credibility share at
/// t = 0 (zero when the agent attributes no credibility). Errors: IsSeed.
double individual_target(const Graph& net, const CredibilityMatrix& gamma,
                         const std::vector<AgentId>& seeds, AgentId x);

/// Split of the nudging input into the individual-predisposition part
/// gain * (rho_u - 1) and the epistemic part driven by non-seed neighbor
/// credibility. The two sum back to control_input. Errors: IsSeed.
struct InputDecomposition {
  double predisposition = 0.0;
  double epistemic = 0.0;

  double total() const noexcept { return predisposition + epistemic; }
};
InputDecomposition input_decomposition(const Graph& net, const CredibilityMatrix& gamma,
                                       const std::vector<AgentId>& seeds, double gain,
                                       double rho_u, AgentId x);

/// True iff, relative to a reliability-weighted run sharing the same state,
/// the credibility gaps around x strictly reduce the input it receives
/// (deficit mass concentrated on non-seed neighbors). Splits neighbors by
/// the seed set.
bool input_reduction_condition(const Graph& net, const CredibilityMatrix& gamma,
                               const std::vector<Agent>& agents,
                               const std::vector<AgentId>& seeds, AgentId x);

struct ControlledState {
  int t = 0;
  std::vector<std::uint8_t> adopted;
  std::vector<double> rho_u;
};

struct ControlledTrajectory {
  std::vector<ControlledState> states;
  /// Applied inputs and gains, one entry per executed step (states.size() - 1).
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> gains;
  /// Frozen per-agent targets; zero for seeds.
  std::vector<double> targets;
  std::vector<std::vector<AgentId>> switching_sets;
  bool full_adoption = false;
  /// Time of the last recorded state; equals the full-adoption time when
  /// full_adoption is set.
  int t_end = 0;
};

/// Receding-horizon run of the nudged cascade: per step, re-solve the scalar
/// regulator for every non-adopter, apply the first input, move thresholds,
/// and advance the cascade. Stops at full adoption or t_max.
/// Errors: EmptySeedSet, NonPositiveWeights, ValidationError.
ControlledTrajectory receding_horizon_run(const Graph& net, const CredibilityMatrix& gamma,
                                          const std::vector<Agent>& agents,
                                          const PolicyParams& params);

}  // namespace epicascade
