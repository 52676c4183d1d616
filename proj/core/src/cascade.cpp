#include "epicascade/cascade.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "epicascade/error.hpp"
#include "epicascade/parallel.hpp"

namespace epicascade {

namespace {

std::vector<std::uint8_t> mask_of(AgentId n, const std::vector<AgentId>& members,
                                  const char* what) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
  for (AgentId x : members) {
    if (x < 0 || x >= n) {
      throw Error(errc::out_of_range,
                  std::string(what) + " id " + std::to_string(x) + " out of range");
    }
    mask[static_cast<std::size_t>(x)] = 1;
  }
  return mask;
}

std::vector<AgentId> set_of(const std::vector<std::uint8_t>& mask) {
  std::vector<AgentId> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(static_cast<AgentId>(i));
  }
  return out;
}

bool adopts(double ratio, double threshold) { return ratio >= threshold - kThresholdTol; }

/// Internal-mass share of x within the member mask. Full share by convention
/// when x attributes no credibility to any neighbor: an epistemically
/// isolated agent cannot be reached from outside, so it never breaks the
/// set's cohesion. This mirrors the zero-exposure convention of the update
/// rule exactly at the tolerance boundary.
double internal_share(const Graph& net, const CredibilityMatrix& gamma,
                      const std::vector<std::uint8_t>& members, AgentId x) {
  double inside = 0.0;
  double total = 0.0;
  for (AgentId y : net.neighbors(x)) {
    const double g = gamma(y, x);
    total += g;
    if (members[static_cast<std::size_t>(y)]) inside += g;
  }
  return total > 0.0 ? inside / total : 1.0;
}

bool cohesive_at(const Graph& net, const CredibilityMatrix& gamma,
                 const std::vector<double>& thresholds, const std::vector<std::uint8_t>& members,
                 AgentId x) {
  const double share = internal_share(net, gamma, members, x);
  return share > 1.0 - thresholds[static_cast<std::size_t>(x)] + kThresholdTol;
}

bool no_switch_from(const Graph& net, const CredibilityMatrix& gamma,
                    const std::vector<double>& thresholds,
                    const std::vector<std::uint8_t>& adopted) {
  const AgentId n = net.agent_count();
  for (AgentId x = 0; x < n; ++x) {
    if (adopted[static_cast<std::size_t>(x)]) continue;
    double inside = 0.0;
    double total = 0.0;
    for (AgentId y : net.neighbors(x)) {
      const double g = gamma(y, x);
      total += g;
      if (adopted[static_cast<std::size_t>(y)]) inside += g;
    }
    const double ratio = total > 0.0 ? inside / total : 0.0;
    if (adopts(ratio, thresholds[static_cast<std::size_t>(x)])) return false;
  }
  return true;
}

}  // namespace

bool CascadeState::all_adopted() const noexcept {
  return std::all_of(adopted.begin(), adopted.end(), [](std::uint8_t a) { return a != 0; });
}

std::vector<AgentId> CascadeState::adopter_set() const { return set_of(adopted); }

CascadeState initial_state(const Graph& net, const std::vector<double>& thresholds,
                           const std::vector<AgentId>& seeds) {
  const AgentId n = net.agent_count();
  if (thresholds.size() != static_cast<std::size_t>(n)) {
    throw Error(errc::validation_error, "threshold vector size does not match agent count");
  }
  if (seeds.empty()) throw Error(errc::empty_seed_set, "seed set must be nonempty");
  CascadeState state;
  state.t = 0;
  state.adopted = mask_of(n, seeds, "seed");
  state.thresholds = thresholds;
  return state;
}

InfluenceRatio influence_ratio(const Graph& net, const CredibilityMatrix& gamma,
                               const CascadeState& state, AgentId x) {
  InfluenceRatio out;
  out.agent = x;
  for (AgentId y : net.neighbors(x)) {
    const double g = gamma(y, x);
    out.denominator += g;
    if (state.adopted[static_cast<std::size_t>(y)]) out.numerator += g;
  }
  out.value = out.denominator > 0.0 ? out.numerator / out.denominator : 0.0;
  return out;
}

CascadeState step(const Graph& net, const CredibilityMatrix& gamma, const CascadeState& state) {
  const AgentId n = net.agent_count();
  CascadeState next = state;
  next.t = state.t + 1;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto x = static_cast<AgentId>(i);
    if (state.adopted[i]) return;
    const InfluenceRatio r = influence_ratio(net, gamma, state, x);
    next.adopted[i] = adopts(r.value, state.thresholds[i]) ? 1 : 0;
  });
  return next;
}

Trajectory simulate(const Graph& net, const CredibilityMatrix& gamma,
                    const std::vector<double>& thresholds, const std::vector<AgentId>& seeds,
                    int max_t) {
  const AgentId n = net.agent_count();
  Trajectory traj;
  CascadeState state = initial_state(net, thresholds, seeds);

  const auto record = [&](const CascadeState& s) {
    std::vector<double> r(static_cast<std::size_t>(n), 0.0);
    for (AgentId x = 0; x < n; ++x) {
      r[static_cast<std::size_t>(x)] = influence_ratio(net, gamma, s, x).value;
    }
    traj.states.push_back(s);
    traj.ratios.push_back(std::move(r));
  };

  record(state);
  while (state.t < max_t) {
    CascadeState next = step(net, gamma, state);
    std::vector<AgentId> switched;
    for (AgentId x = 0; x < n; ++x) {
      if (next.adopted[static_cast<std::size_t>(x)] && !state.adopted[static_cast<std::size_t>(x)]) {
        switched.push_back(x);
      }
    }
    if (switched.empty()) {
      traj.reached_fixed_point = true;
      break;
    }
    traj.switching_sets.push_back(std::move(switched));
    state = std::move(next);
    record(state);
  }
  if (!traj.reached_fixed_point) {
    // Hit max_t; the terminal state may still happen to be absorbing.
    traj.reached_fixed_point = no_switch_from(net, gamma, state.thresholds, state.adopted);
  }
  traj.t_fixed = state.t;
  traj.final_adopters = state.adopter_set();
  return traj;
}

bool is_cohesive(const Graph& net, const CredibilityMatrix& gamma,
                 const std::vector<double>& thresholds, const std::vector<AgentId>& members) {
  const AgentId n = net.agent_count();
  const auto mask = mask_of(n, members, "member");
  for (AgentId x : members) {
    if (!cohesive_at(net, gamma, thresholds, mask, x)) return false;
  }
  return true;
}

std::vector<AgentId> largest_cohesive_subset(const Graph& net, const CredibilityMatrix& gamma,
                                             const std::vector<double>& thresholds,
                                             const std::vector<AgentId>& base) {
  const AgentId n = net.agent_count();
  auto members = mask_of(n, base, "base");

  // Sweep-peel every violator of the current candidate set; repeat until the
  // sweep is clean. Each peel only shrinks other members' internal share, so
  // no removal ever has to be revisited.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<AgentId> peel;
    for (AgentId x = 0; x < n; ++x) {
      if (members[static_cast<std::size_t>(x)] && !cohesive_at(net, gamma, thresholds, members, x)) {
        peel.push_back(x);
      }
    }
    for (AgentId x : peel) {
      members[static_cast<std::size_t>(x)] = 0;
      changed = true;
    }
  }
  return set_of(members);
}

bool is_fixed_point(const Graph& net, const CredibilityMatrix& gamma,
                    const std::vector<double>& thresholds, const std::vector<AgentId>& adopters) {
  const AgentId n = net.agent_count();
  const auto mask = mask_of(n, adopters, "adopter");
  const bool fixed = no_switch_from(net, gamma, thresholds, mask);
#ifndef NDEBUG
  std::vector<AgentId> complement;
  for (AgentId x = 0; x < n; ++x) {
    if (!mask[static_cast<std::size_t>(x)]) complement.push_back(x);
  }
  assert(fixed == is_cohesive(net, gamma, thresholds, complement) &&
         "fixed-point lookahead disagrees with complement cohesiveness");
#endif
  return fixed;
}

std::vector<AgentId> final_adopters(const Graph& net, const CredibilityMatrix& gamma,
                                    const std::vector<double>& thresholds,
                                    const std::vector<AgentId>& seeds) {
  const AgentId n = net.agent_count();
  if (seeds.empty()) throw Error(errc::empty_seed_set, "seed set must be nonempty");
  const auto seed_mask = mask_of(n, seeds, "seed");

  std::vector<AgentId> non_seeds;
  for (AgentId x = 0; x < n; ++x) {
    if (!seed_mask[static_cast<std::size_t>(x)]) non_seeds.push_back(x);
  }
  const auto immune = largest_cohesive_subset(net, gamma, thresholds, non_seeds);
  const auto immune_mask = mask_of(n, immune, "member");

  std::vector<AgentId> adopters;
  for (AgentId x = 0; x < n; ++x) {
    if (!immune_mask[static_cast<std::size_t>(x)]) adopters.push_back(x);
  }
  return adopters;
}

std::vector<bool> transient_condition(const Graph& net, const CredibilityMatrix& gamma,
                                      const std::vector<Agent>& agents,
                                      const CascadeState& state) {
  const AgentId n = net.agent_count();
  if (agents.size() != static_cast<std::size_t>(n)) {
    throw Error(errc::validation_error, "agent list size does not match network");
  }
  std::vector<bool> holds(static_cast<std::size_t>(n), false);
  for (AgentId x = 0; x < n; ++x) {
    double r_in = 0.0, d_in = 0.0;   // adopter-neighbor reliability and deficit mass
    double r_out = 0.0, d_out = 0.0; // non-adopter side
    for (AgentId y : net.neighbors(x)) {
      const double r = agents[static_cast<std::size_t>(y)].reliability;
      const double d = r - gamma(y, x);
      if (state.adopted[static_cast<std::size_t>(y)]) {
        r_in += r;
        d_in += d;
      } else {
        r_out += r;
        d_out += d;
      }
    }
    holds[static_cast<std::size_t>(x)] = r_in * d_out >= r_out * d_in;
  }
  return holds;
}

}  // namespace epicascade
