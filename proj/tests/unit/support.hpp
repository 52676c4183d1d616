#pragma once

#include <vector>

#include "epicascade/cascade.hpp"
#include "epicascade/epistemics.hpp"
#include "epicascade/graph.hpp"
#include "epicascade/rng.hpp"

namespace epicascade::testing {

struct RandomInstance {
  Graph net;
  CredibilityMatrix gamma;
  std::vector<double> thresholds;
  std::vector<AgentId> seeds;
};

inline Graph random_connected_graph(Rng& rng, AgentId n) {
  for (;;) {
    try {
      return generate_er_graph(n, rng.uniform(0.3, 0.9), rng.next_u64(), 64);
    } catch (...) {
    }
  }
}

inline RandomInstance random_instance(Rng& rng, AgentId n_min, AgentId n_max) {
  const auto n = static_cast<AgentId>(rng.uniform_int(n_min, n_max));
  RandomInstance inst{random_connected_graph(rng, n), CredibilityMatrix(n), {}, {}};
  for (AgentId x = 0; x < n; ++x) {
    for (AgentId y = 0; y < n; ++y) {
      if (x != y) inst.gamma.set(x, y, rng.uniform01());
    }
  }
  inst.thresholds.resize(static_cast<std::size_t>(n));
  for (auto& rho : inst.thresholds) rho = rng.uniform01();
  for (AgentId x = 0; x < n; ++x) {
    if (rng.bernoulli(0.25)) inst.seeds.push_back(x);
  }
  if (inst.seeds.empty()) {
    inst.seeds.push_back(static_cast<AgentId>(rng.uniform_int(0, n - 1)));
  }
  return inst;
}

/// Star 0-1, 0-2 with identical unit reliabilities: the canonical fair case.
inline Graph star_graph() { return build_graph(3, {{0, 1}, {0, 2}}); }

inline std::vector<Agent> star_agents(bool seed_is_1 = true) {
  std::vector<Agent> agents(3);
  for (AgentId i = 0; i < 3; ++i) {
    agents[static_cast<std::size_t>(i)].id = i;
    agents[static_cast<std::size_t>(i)].reliability = 1.0;
    agents[static_cast<std::size_t>(i)].responsiveness = -1.0;
  }
  agents[0].rho0 = 0.5;
  agents[1].rho0 = 0.5;
  agents[2].rho0 = 0.4;
  agents[1].is_seed = seed_is_1;
  return agents;
}

/// Unit-credibility star; hub threshold 0.5, leaf 0.4, seed {1}.
inline CredibilityMatrix fair_star_matrix() {
  return build_credibility_matrix(star_agents());
}

/// Same star with the hub hearing speaker 1 at 0.4 and speaker 2 at 0.6,
/// which blocks the cascade at the hub.
inline CredibilityMatrix biased_star_matrix() {
  return build_credibility_matrix(star_agents(), EtaMode::excess,
                                  {{1, 0, 0.4}, {2, 0, 0.6}});
}

}  // namespace epicascade::testing
