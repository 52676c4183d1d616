#include "epicascade/control.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "epicascade/error.hpp"
#include "epicascade/parallel.hpp"

namespace epicascade {

namespace {

std::vector<std::uint8_t> seed_mask(AgentId n, const std::vector<AgentId>& seeds) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
  for (AgentId s : seeds) {
    if (s < 0 || s >= n) {
      throw Error(errc::out_of_range, "seed id " + std::to_string(s) + " out of range");
    }
    mask[static_cast<std::size_t>(s)] = 1;
  }
  return mask;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

GainSchedule riccati_gain(double b, double omega_rho, double omega_u, int horizon) {
  if (!(omega_u > 0.0)) throw Error(errc::non_positive_weights, "effort weight must be > 0");
  if (omega_rho < 0.0) throw Error(errc::non_positive_weights, "tracking weight must be >= 0");
  if (horizon < 1) throw Error(errc::validation_error, "horizon must be >= 1");

  GainSchedule sched;
  sched.cost_to_go.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
  sched.gains.assign(static_cast<std::size_t>(horizon), 0.0);
  sched.cost_to_go[static_cast<std::size_t>(horizon)] = omega_rho;
  for (int tau = horizon - 1; tau >= 0; --tau) {
    const double p_next = sched.cost_to_go[static_cast<std::size_t>(tau) + 1];
    const double denom = omega_u + p_next * b * b;
    const double kappa = p_next == 0.0 ? 0.0 : -b * p_next / denom;
    sched.gains[static_cast<std::size_t>(tau)] = kappa;
    sched.cost_to_go[static_cast<std::size_t>(tau)] =
        omega_rho + p_next - b * b * p_next * p_next / denom;
  }
  return sched;
}

double control_input(double gain, double rho_u, double rho_bar) {
  return gain * (rho_u - rho_bar);
}

double individual_target(const Graph& net, const CredibilityMatrix& gamma,
                         const std::vector<AgentId>& seeds, AgentId x) {
  const auto mask = seed_mask(net.agent_count(), seeds);
  if (mask[static_cast<std::size_t>(x)]) {
    throw Error(errc::is_seed, "agent " + std::to_string(x) + " is a seed and has no target");
  }
  double inside = 0.0;
  double total = 0.0;
  for (AgentId y : net.neighbors(x)) {
    const double g = gamma(y, x);
    total += g;
    if (mask[static_cast<std::size_t>(y)]) inside += g;
  }
  return total > 0.0 ? inside / total : 0.0;
}

InputDecomposition input_decomposition(const Graph& net, const CredibilityMatrix& gamma,
                                       const std::vector<AgentId>& seeds, double gain,
                                       double rho_u, AgentId x) {
  const auto mask = seed_mask(net.agent_count(), seeds);
  if (mask[static_cast<std::size_t>(x)]) {
    throw Error(errc::is_seed, "agent " + std::to_string(x) + " is a seed");
  }
  double outside = 0.0;
  double total = 0.0;
  for (AgentId y : net.neighbors(x)) {
    const double g = gamma(y, x);
    total += g;
    if (!mask[static_cast<std::size_t>(y)]) outside += g;
  }
  InputDecomposition parts;
  parts.predisposition = gain * (rho_u - 1.0);
  parts.epistemic = total > 0.0 ? gain * (outside / total) : 0.0;
  return parts;
}

bool input_reduction_condition(const Graph& net, const CredibilityMatrix& gamma,
                               const std::vector<Agent>& agents,
                               const std::vector<AgentId>& seeds, AgentId x) {
  const auto mask = seed_mask(net.agent_count(), seeds);
  double r_in = 0.0, d_in = 0.0;
  double r_out = 0.0, d_out = 0.0;
  for (AgentId y : net.neighbors(x)) {
    const double r = agents[static_cast<std::size_t>(y)].reliability;
    const double d = r - gamma(y, x);
    if (mask[static_cast<std::size_t>(y)]) {
      r_in += r;
      d_in += d;
    } else {
      r_out += r;
      d_out += d;
    }
  }
  return d_out * r_in > d_in * r_out;
}

ControlledTrajectory receding_horizon_run(const Graph& net, const CredibilityMatrix& gamma,
                                          const std::vector<Agent>& agents,
                                          const PolicyParams& params) {
  const AgentId n = net.agent_count();
  if (agents.size() != static_cast<std::size_t>(n)) {
    throw Error(errc::validation_error, "agent list size does not match network");
  }
  if (!(params.omega_rho_bar > 0.0) || !(params.omega_u > 0.0)) {
    throw Error(errc::non_positive_weights, "policy weights must be > 0");
  }
  if (params.horizon < 1) throw Error(errc::validation_error, "horizon must be >= 1");
  if (params.t_max < 0) throw Error(errc::validation_error, "t_max must be >= 0");

  std::vector<AgentId> seeds;
  for (const Agent& a : agents) {
    if (a.is_seed) seeds.push_back(a.id);
  }
  if (seeds.empty()) throw Error(errc::empty_seed_set, "no seed agents in scenario");
  const auto seeds_at_start = seed_mask(n, seeds);

  for (const Agent& a : agents) {
    if (!a.is_seed && a.responsiveness == 0.0) {
      throw Error(errc::validation_error,
                  "non-seed agent " + std::to_string(a.id) + " has zero responsiveness");
    }
  }

  ControlledTrajectory traj;
  traj.targets.assign(static_cast<std::size_t>(n), 0.0);
  for (AgentId x = 0; x < n; ++x) {
    if (!seeds_at_start[static_cast<std::size_t>(x)]) {
      traj.targets[static_cast<std::size_t>(x)] = individual_target(net, gamma, seeds, x);
    }
  }

  ControlledState state;
  state.t = 0;
  state.adopted = seeds_at_start;
  state.rho_u.resize(static_cast<std::size_t>(n));
  for (AgentId x = 0; x < n; ++x) {
    state.rho_u[static_cast<std::size_t>(x)] = agents[static_cast<std::size_t>(x)].rho0;
  }
  traj.states.push_back(state);

  // A non-adopter's gain depends only on (b, weights, horizon), all constant
  // over the run, so solve once per distinct responsiveness up front.
  std::map<double, double> gain_by_b;
  std::vector<double> agent_gain(static_cast<std::size_t>(n), 0.0);
  for (AgentId x = 0; x < n; ++x) {
    if (seeds_at_start[static_cast<std::size_t>(x)]) continue;
    const double b = agents[static_cast<std::size_t>(x)].responsiveness;
    auto found = gain_by_b.find(b);
    if (found == gain_by_b.end()) {
      found = gain_by_b
                  .emplace(b, riccati_gain(b, params.omega_rho_bar, params.omega_u, params.horizon)
                                  .gain())
                  .first;
    }
    agent_gain[static_cast<std::size_t>(x)] = found->second;
  }

  std::vector<double> targets = traj.targets;
  while (!std::all_of(state.adopted.begin(), state.adopted.end(),
                      [](std::uint8_t a) { return a != 0; }) &&
         state.t < params.t_max) {
    if (params.recompute_targets) {
      std::vector<AgentId> adopters;
      for (AgentId x = 0; x < n; ++x) {
        if (state.adopted[static_cast<std::size_t>(x)]) adopters.push_back(x);
      }
      for (AgentId x = 0; x < n; ++x) {
        if (!state.adopted[static_cast<std::size_t>(x)]) {
          targets[static_cast<std::size_t>(x)] = individual_target(net, gamma, adopters, x);
        }
      }
    }

    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    std::vector<double> kappa(static_cast<std::size_t>(n), 0.0);
    CascadeState cascade;
    cascade.t = state.t;
    cascade.adopted = state.adopted;
    cascade.thresholds = state.rho_u;

    ControlledState next;
    next.t = state.t + 1;
    next.adopted = state.adopted;
    next.rho_u = state.rho_u;

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      const auto x = static_cast<AgentId>(i);
      if (!state.adopted[i]) {
        // Adopters keep a zero tracking weight, hence zero gain and input.
        kappa[i] = agent_gain[i];
        u[i] = control_input(kappa[i], state.rho_u[i], targets[i]);
        const InfluenceRatio r = influence_ratio(net, gamma, cascade, x);
        if (r.value >= state.rho_u[i] - kThresholdTol) next.adopted[i] = 1;
        next.rho_u[i] = clamp01(state.rho_u[i] + agents[i].responsiveness * u[i]);
      }
    });

    std::vector<AgentId> switched;
    for (AgentId x = 0; x < n; ++x) {
      if (next.adopted[static_cast<std::size_t>(x)] && !state.adopted[static_cast<std::size_t>(x)]) {
        switched.push_back(x);
      }
    }
    traj.inputs.push_back(std::move(u));
    traj.gains.push_back(std::move(kappa));
    traj.switching_sets.push_back(std::move(switched));
    state = std::move(next);
    traj.states.push_back(state);
  }

  traj.full_adoption = std::all_of(state.adopted.begin(), state.adopted.end(),
                                   [](std::uint8_t a) { return a != 0; });
  traj.t_end = state.t;
  return traj;
}

}  // namespace epicascade
