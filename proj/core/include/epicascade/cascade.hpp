#pragma once

#include <vector>

#include "epicascade/epistemics.hpp"
#include "epicascade/graph.hpp"

namespace epicascade {

/// Slack for threshold boundaries. Ties count toward adoption (the update
/// rule is a >=), while cohesiveness demands a strict margin on the other
/// side of the same boundary, so a ratio sitting exactly on it is never
/// cohesive.
inline constexpr double kThresholdTol = 1e-12;

/// Snapshot of the diffusion process at one time step. Thresholds are
/// constant in open loop and move under policy inputs in closed loop.
struct CascadeState {
  int t = 0;
  std::vector<std::uint8_t> adopted;
  std::vector<double> thresholds;

  AgentId agent_count() const noexcept { return static_cast<AgentId>(adopted.size()); }
  bool all_adopted() const noexcept;
  std::vector<AgentId> adopter_set() const;
};

/// Credibility-weighted exposure of one agent: adopter-neighbor mass over
/// total neighbor mass, as perceived by the hearer. Zero when the hearer
/// attributes no credibility at all (epistemic isolation).
struct InfluenceRatio {
  AgentId agent = 0;
  double numerator = 0.0;
  double denominator = 0.0;
  double value = 0.0;
};

struct Trajectory {
  std::vector<CascadeState> states;
  /// Influence ratios per recorded state, per agent.
  std::vector<std::vector<double>> ratios;
  /// Agents switching at t = 1, 2, ..., t_fixed (one entry per step taken).
  std::vector<std::vector<AgentId>> switching_sets;
  std::vector<AgentId> final_adopters;
  int t_fixed = 0;
  bool reached_fixed_point = false;
};

/// State at t = 0: the seed set adopted, everyone else susceptible.
/// Errors: EmptySeedSet, OutOfRange.
CascadeState initial_state(const Graph& net, const std::vector<double>& thresholds,
                           const std::vector<AgentId>& seeds);

InfluenceRatio influence_ratio(const Graph& net, const CredibilityMatrix& gamma,
                               const CascadeState& state, AgentId x);

/// One synchronous update: an agent adopts iff it already has, or its
/// influence ratio reaches its threshold. All reads are from the time-t state.
CascadeState step(const Graph& net, const CredibilityMatrix& gamma, const CascadeState& state);

/// Iterates step until no agent switches or max_t is hit. Monotone adopter
/// growth bounds the run by the agent count.
Trajectory simulate(const Graph& net, const CredibilityMatrix& gamma,
                    const std::vector<double>& thresholds, const std::vector<AgentId>& seeds,
                    int max_t);

/// True iff every member's within-set credibility share strictly exceeds
/// 1 - rho. The empty set qualifies vacuously; an epistemically isolated
/// member counts its entire (empty) neighborhood mass as internal.
bool is_cohesive(const Graph& net, const CredibilityMatrix& gamma,
                 const std::vector<double>& thresholds, const std::vector<AgentId>& members);

/// Maximum cohesive subset of `base`, found by peeling violators until none
/// remain. Union-closure of cohesive sets makes the result order-independent.
std::vector<AgentId> largest_cohesive_subset(const Graph& net, const CredibilityMatrix& gamma,
                                             const std::vector<double>& thresholds,
                                             const std::vector<AgentId>& base);

/// One-step lookahead: no agent outside `adopters` would switch. Debug builds
/// cross-check the answer against cohesiveness of the complement.
bool is_fixed_point(const Graph& net, const CredibilityMatrix& gamma,
                    const std::vector<double>& thresholds, const std::vector<AgentId>& adopters);

/// Steady-state adopter set, via the complement of the maximum cohesive
/// subset of the non-seeds. Agrees with running the dynamics out.
std::vector<AgentId> final_adopters(const Graph& net, const CredibilityMatrix& gamma,
                                    const std::vector<double>& thresholds,
                                    const std::vector<AgentId>& seeds);

/// Per-agent flag for the transient comparison between a biased run and its
/// reliability-weighted counterpart sharing the same adopter set: true when
/// the deficit mass on adopter neighbors is small enough (relative to the
/// non-adopter side) that the bias cannot slow this agent's next switch.
std::vector<bool> transient_condition(const Graph& net, const CredibilityMatrix& gamma,
                                      const std::vector<Agent>& agents, const CascadeState& state);

}  // namespace epicascade
