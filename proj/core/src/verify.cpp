#include "epicascade/verify.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>
#include <string>

#include "epicascade/cascade.hpp"
#include "epicascade/control.hpp"
#include "epicascade/error.hpp"
#include "epicascade/parallel.hpp"
#include "epicascade/rng.hpp"
#include "epicascade/scenario.hpp"

namespace epicascade::verify {

namespace {

using nlohmann::json;

struct TrialOutcome {
  bool failed = false;
  std::string note;
  std::string counterexample;
};

/// Runs `trials` independent trials (fanned out across workers, each on its
/// own derived seed) and folds them into a SuiteResult.
template <typename TrialFn>
SuiteResult run_trials(const std::string& suite, int trials, std::uint64_t seed, TrialFn&& trial) {
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t i) {
    Rng rng(split_seed(seed, i));
    outcomes[i] = trial(rng, i);
  });

  SuiteResult result;
  result.suite = suite;
  result.trials = trials;
  for (const auto& outcome : outcomes) {
    if (!outcome.failed) continue;
    ++result.failures;
    if (result.counterexample.empty()) {
      result.detail = outcome.note;
      result.counterexample = outcome.counterexample;
    }
  }
  if (result.failures == 0) result.detail = "all trials passed";
  return result;
}

Graph random_connected_graph(Rng& rng, AgentId n) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double p = rng.uniform(0.3, 0.9);
    try {
      return generate_er_graph(n, p, rng.next_u64(), 64);
    } catch (const Error&) {
      // Disconnected streak; redraw the density.
    }
  }
  return generate_er_graph(n, 1.0, rng.next_u64(), 1);
}

CredibilityMatrix random_matrix(Rng& rng, AgentId n) {
  CredibilityMatrix gamma(n);
  for (AgentId x = 0; x < n; ++x) {
    for (AgentId y = 0; y < n; ++y) {
      if (x != y) gamma.set(x, y, rng.uniform01());
    }
  }
  return gamma;
}

std::vector<double> random_thresholds(Rng& rng, AgentId n, double lo = 0.0, double hi = 1.0) {
  std::vector<double> rho(static_cast<std::size_t>(n));
  for (auto& v : rho) v = rng.uniform(lo, hi);
  return rho;
}

std::vector<AgentId> random_subset(Rng& rng, AgentId n, double p, bool force_nonempty) {
  std::vector<AgentId> subset;
  for (AgentId x = 0; x < n; ++x) {
    if (rng.bernoulli(p)) subset.push_back(x);
  }
  if (force_nonempty && subset.empty()) {
    subset.push_back(static_cast<AgentId>(rng.uniform_int(0, n - 1)));
  }
  return subset;
}

CredibilityMatrix reliability_matrix(const std::vector<Agent>& agents) {
  const auto n = static_cast<AgentId>(agents.size());
  CredibilityMatrix fair(n);
  for (AgentId x = 0; x < n; ++x) {
    for (AgentId y = 0; y < n; ++y) {
      if (x != y) fair.set(x, y, agents[static_cast<std::size_t>(x)].reliability);
    }
  }
  return fair;
}

/// Wraps a random instance into a loadable scenario file so failures can be
/// replayed from the CLI.
std::string instance_scenario(const Graph& net, const CredibilityMatrix& gamma,
                              const std::vector<double>& thresholds,
                              const std::vector<AgentId>& seeds,
                              const std::vector<double>* reliabilities, const std::string& label) {
  const AgentId n = net.agent_count();
  Scenario s;
  s.label = label;
  s.mode = RunMode::open_loop;
  s.graph.edge_list = net.edges();
  std::vector<std::uint8_t> seeded(static_cast<std::size_t>(n), 0);
  for (AgentId x : seeds) seeded[static_cast<std::size_t>(x)] = 1;
  for (AgentId i = 0; i < n; ++i) {
    Agent a;
    a.id = i;
    a.reliability = reliabilities ? (*reliabilities)[static_cast<std::size_t>(i)] : 1.0;
    a.rho0 = thresholds[static_cast<std::size_t>(i)];
    a.responsiveness = -1.0;
    a.is_seed = seeded[static_cast<std::size_t>(i)] != 0;
    s.agents.push_back(std::move(a));
  }
  for (AgentId x = 0; x < n; ++x) {
    for (AgentId y = 0; y < n; ++y) {
      if (x != y) s.overrides.push_back({x, y, gamma(x, y)});
    }
  }
  return scenario_to_string(s);
}

std::string id_list(const std::vector<AgentId>& ids) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
  out << '}';
  return out.str();
}

/// Solves the dense symmetric system via Gaussian elimination with partial
/// pivoting. Horizon sizes are tiny, so no factorization library is needed.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double factor = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t row = n; row-- > 0;) {
    double acc = b[row];
    for (std::size_t k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
    x[row] = acc / a[row][row];
  }
  return x;
}

/// Independent argmin of the finite-horizon quadratic cost: builds the error
/// propagation matrix explicitly and minimizes over all inputs at once.
std::vector<double> quadratic_cost_argmin(double b, double omega_rho, double omega_u, int horizon,
                                          double e0) {
  const auto T = static_cast<std::size_t>(horizon);
  // e(tau) = e0 + sum_{s < tau} b * u(s): rows tau = 0..T, columns s = 0..T-1.
  std::vector<std::vector<double>> prop(T + 1, std::vector<double>(T, 0.0));
  for (std::size_t tau = 0; tau <= T; ++tau) {
    for (std::size_t s = 0; s < tau; ++s) prop[tau][s] = b;
  }
  std::vector<std::vector<double>> h(T, std::vector<double>(T, 0.0));
  std::vector<double> g(T, 0.0);
  for (std::size_t i = 0; i < T; ++i) {
    h[i][i] = omega_u;
    for (std::size_t j = 0; j < T; ++j) {
      for (std::size_t tau = 0; tau <= T; ++tau) {
        h[i][j] += omega_rho * prop[tau][i] * prop[tau][j];
      }
    }
    for (std::size_t tau = 0; tau <= T; ++tau) g[i] += omega_rho * prop[tau][i] * e0;
  }
  for (double& v : g) v = -v;
  return solve_dense(std::move(h), std::move(g));
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"lemma1", "theorem1", "prop3", "lemma2", "riccati"};
}

int default_trials(const std::string& name) {
  if (name == "lemma1") return 50;
  if (name == "theorem1") return 100;
  if (name == "prop3") return 50;
  if (name == "lemma2") return 50;
  if (name == "riccati") return 100;
  throw Error(errc::validation_error, "unknown suite '" + name + "'");
}

SuiteResult run_suite(const std::string& name, int trials, std::uint64_t seed) {
  const int count = trials > 0 ? trials : default_trials(name);
  if (name == "lemma1") return fixed_point_duality_suite(count, seed);
  if (name == "theorem1") return steady_state_route_suite(count, seed);
  if (name == "prop3") return transient_containment_suite(count, seed);
  if (name == "lemma2") return input_reduction_suite(count, seed);
  if (name == "riccati") return gain_schedule_oracle_suite(count, seed);
  throw Error(errc::validation_error, "unknown suite '" + name + "'");
}

SuiteResult fixed_point_duality_suite(int graphs, std::uint64_t seed) {
  return run_trials("lemma1", graphs, seed, [](Rng& rng, std::size_t) {
    TrialOutcome outcome;
    const auto n = static_cast<AgentId>(rng.uniform_int(2, 8));
    const Graph net = random_connected_graph(rng, n);
    const CredibilityMatrix gamma = random_matrix(rng, n);
    const std::vector<double> rho = random_thresholds(rng, n);

    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<AgentId> adopters;
      std::vector<AgentId> complement;
      for (AgentId x = 0; x < n; ++x) {
        if (mask & (1u << x)) {
          adopters.push_back(x);
        } else {
          complement.push_back(x);
        }
      }
      const bool fixed = is_fixed_point(net, gamma, rho, adopters);
      const bool cohesive = is_cohesive(net, gamma, rho, complement);
      if (fixed != cohesive) {
        outcome.failed = true;
        outcome.note = "adopter set " + id_list(adopters) + ": lookahead says " +
                       (fixed ? "fixed" : "not fixed") + " but complement cohesiveness says " +
                       (cohesive ? "cohesive" : "not cohesive");
        outcome.counterexample =
            instance_scenario(net, gamma, rho, adopters.empty() ? complement : adopters, nullptr,
                              "duality-counterexample");
        return outcome;
      }
    }
    return outcome;
  });
}

SuiteResult steady_state_route_suite(int trials, std::uint64_t seed) {
  return run_trials("theorem1", trials, seed, [](Rng& rng, std::size_t) {
    TrialOutcome outcome;
    const auto n = static_cast<AgentId>(rng.uniform_int(2, 40));
    const Graph net = random_connected_graph(rng, n);
    const CredibilityMatrix gamma = random_matrix(rng, n);
    const std::vector<double> rho = random_thresholds(rng, n);
    const std::vector<AgentId> seeds = random_subset(rng, n, 0.25, true);

    const Trajectory traj = simulate(net, gamma, rho, seeds, n);
    const std::vector<AgentId> predicted = final_adopters(net, gamma, rho, seeds);
    if (traj.final_adopters != predicted) {
      outcome.failed = true;
      outcome.note = "dynamics reach " + id_list(traj.final_adopters) + " but peeling predicts " +
                     id_list(predicted);
      outcome.counterexample = instance_scenario(net, gamma, rho, seeds, nullptr,
                                                 "steady-state-counterexample");
      return outcome;
    }

    if (n <= 12) {
      std::vector<AgentId> base;
      std::vector<std::uint8_t> seeded(static_cast<std::size_t>(n), 0);
      for (AgentId s : seeds) seeded[static_cast<std::size_t>(s)] = 1;
      for (AgentId x = 0; x < n; ++x) {
        if (!seeded[static_cast<std::size_t>(x)]) base.push_back(x);
      }
      // Union of every cohesive subset: cohesive sets are closed under
      // union, so this is the exhaustive maximum.
      std::vector<std::uint8_t> in_union(static_cast<std::size_t>(n), 0);
      const auto k = static_cast<std::uint32_t>(base.size());
      for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<AgentId> subset;
        for (std::uint32_t bit = 0; bit < k; ++bit) {
          if (mask & (1u << bit)) subset.push_back(base[bit]);
        }
        if (is_cohesive(net, gamma, rho, subset)) {
          for (AgentId x : subset) in_union[static_cast<std::size_t>(x)] = 1;
        }
      }
      std::vector<AgentId> exhaustive;
      for (AgentId x = 0; x < n; ++x) {
        if (in_union[static_cast<std::size_t>(x)]) exhaustive.push_back(x);
      }
      const std::vector<AgentId> peeled = largest_cohesive_subset(net, gamma, rho, base);
      if (peeled != exhaustive) {
        outcome.failed = true;
        outcome.note = "peeling finds " + id_list(peeled) + " but exhaustive union is " +
                       id_list(exhaustive);
        outcome.counterexample = instance_scenario(net, gamma, rho, seeds, nullptr,
                                                   "peeling-counterexample");
      }
    }
    return outcome;
  });
}

SuiteResult transient_containment_suite(int instances, std::uint64_t seed) {
  return run_trials("prop3", instances, seed, [](Rng& rng, std::size_t trial) {
    TrialOutcome outcome;
    // Even trials restrict credibility gaps to non-adopter speakers, which
    // satisfies the condition by construction; odd trials draw free matrices
    // and filter on the premise.
    const bool constructed = trial % 2 == 0;

    for (int attempt = 0; attempt < 400; ++attempt) {
      const auto n = static_cast<AgentId>(rng.uniform_int(3, 20));
      const Graph net = random_connected_graph(rng, n);

      std::vector<Agent> agents(static_cast<std::size_t>(n));
      for (AgentId i = 0; i < n; ++i) {
        auto& a = agents[static_cast<std::size_t>(i)];
        a.id = i;
        a.reliability = rng.uniform(0.05, 1.0);
        a.rho0 = rng.uniform(0.05, 0.6);
        a.responsiveness = -1.0;
      }
      const std::vector<AgentId> adopters = random_subset(rng, n, 0.3, true);
      if (adopters.size() == static_cast<std::size_t>(n)) continue;

      CredibilityMatrix gamma(n);
      std::vector<std::uint8_t> adopted(static_cast<std::size_t>(n), 0);
      for (AgentId x : adopters) adopted[static_cast<std::size_t>(x)] = 1;
      for (AgentId x = 0; x < n; ++x) {
        const double r = agents[static_cast<std::size_t>(x)].reliability;
        for (AgentId y = 0; y < n; ++y) {
          if (x == y) continue;
          double value;
          if (constructed) {
            value = adopted[static_cast<std::size_t>(x)] ? r : r * rng.uniform01();
          } else {
            value = rng.uniform01();
          }
          gamma.set(x, y, value);
        }
      }

      std::vector<double> rho(static_cast<std::size_t>(n));
      for (AgentId i = 0; i < n; ++i) rho[static_cast<std::size_t>(i)] = agents[static_cast<std::size_t>(i)].rho0;

      CascadeState state;
      state.t = 0;
      state.adopted = adopted;
      state.thresholds = rho;

      const CredibilityMatrix fair = reliability_matrix(agents);
      const CascadeState fair_next = step(net, fair, state);
      std::vector<AgentId> fair_switchers;
      for (AgentId x = 0; x < n; ++x) {
        if (fair_next.adopted[static_cast<std::size_t>(x)] && !adopted[static_cast<std::size_t>(x)]) {
          fair_switchers.push_back(x);
        }
      }
      if (fair_switchers.empty()) continue;

      const std::vector<bool> holds = transient_condition(net, gamma, agents, state);
      bool premise = true;
      for (AgentId x : fair_switchers) premise = premise && holds[static_cast<std::size_t>(x)];
      if (!premise) continue;

      const CascadeState biased_next = step(net, gamma, state);
      for (AgentId x : fair_switchers) {
        if (!biased_next.adopted[static_cast<std::size_t>(x)]) {
          outcome.failed = true;
          outcome.note = "agent " + std::to_string(x) +
                         " switches in the fair run but not in the biased one although the "
                         "condition holds for every fair switcher";
          std::vector<double> reliabilities;
          for (const Agent& a : agents) reliabilities.push_back(a.reliability);
          outcome.counterexample = instance_scenario(net, gamma, rho, adopters, &reliabilities,
                                                     "transient-counterexample");
          return outcome;
        }
      }
      return outcome;  // qualifying instance passed
    }
    outcome.failed = true;
    outcome.note = "could not build a qualifying instance in 400 attempts";
    return outcome;
  });
}

SuiteResult input_reduction_suite(int pairs, std::uint64_t seed) {
  return run_trials("lemma2", pairs, seed, [](Rng& rng, std::size_t) {
    TrialOutcome outcome;
    for (int attempt = 0; attempt < 400; ++attempt) {
      const auto n = static_cast<AgentId>(rng.uniform_int(3, 20));
      const Graph net = random_connected_graph(rng, n);

      std::vector<Agent> agents(static_cast<std::size_t>(n));
      const double b = (rng.bernoulli(0.5) ? -1.0 : 1.0) * rng.uniform(0.1, 1.0);
      for (AgentId i = 0; i < n; ++i) {
        auto& a = agents[static_cast<std::size_t>(i)];
        a.id = i;
        a.reliability = rng.uniform(0.05, 1.0);
        a.rho0 = rng.uniform01();
        a.responsiveness = b;
      }
      const std::vector<AgentId> seeds = random_subset(rng, n, 0.25, true);
      if (seeds.size() == static_cast<std::size_t>(n)) continue;

      std::vector<std::uint8_t> seeded(static_cast<std::size_t>(n), 0);
      for (AgentId s : seeds) seeded[static_cast<std::size_t>(s)] = 1;
      AgentId x = static_cast<AgentId>(rng.uniform_int(0, n - 1));
      while (seeded[static_cast<std::size_t>(x)]) x = static_cast<AgentId>((x + 1) % n);

      const CredibilityMatrix gamma = random_matrix(rng, n);
      const CredibilityMatrix fair = reliability_matrix(agents);

      // The strict condition margin, recomputed here so near-ties can be
      // skipped instead of testing an inequality on noise.
      double r_in = 0.0, d_in = 0.0, r_out = 0.0, d_out = 0.0;
      for (AgentId y : net.neighbors(x)) {
        const double r = agents[static_cast<std::size_t>(y)].reliability;
        const double d = r - gamma(y, x);
        if (seeded[static_cast<std::size_t>(y)]) {
          r_in += r;
          d_in += d;
        } else {
          r_out += r;
          d_out += d;
        }
      }
      const double margin = d_out * r_in - d_in * r_out;
      if (std::abs(margin) < 1e-9) continue;

      const bool condition = input_reduction_condition(net, gamma, agents, seeds, x);
      if (condition != (margin > 0.0)) {
        outcome.failed = true;
        outcome.note = "condition flag disagrees with its own margin";
        return outcome;
      }

      const double omega_rho = rng.uniform(0.1, 10.0);
      const double omega_u = rng.uniform(0.1, 10.0);
      const int horizon = static_cast<int>(rng.uniform_int(1, 6));
      const double kappa = riccati_gain(b, omega_rho, omega_u, horizon).gain();
      const double rho_u = rng.uniform01();

      const double target_fair = individual_target(net, fair, seeds, x);
      const double target_biased = individual_target(net, gamma, seeds, x);
      const double u_fair = control_input(kappa, rho_u, target_fair);
      const double u_biased = control_input(kappa, rho_u, target_biased);
      const double next_fair = rho_u + b * u_fair;
      const double next_biased = rho_u + b * u_biased;

      const bool input_reduced = b < 0.0 ? u_biased < u_fair : u_biased > u_fair;
      const bool reduction_lessened = next_biased > next_fair;
      if (condition != input_reduced || condition != reduction_lessened) {
        outcome.failed = true;
        outcome.note = "agent " + std::to_string(x) + ": condition=" +
                       (condition ? "true" : "false") + " but u_fair=" + std::to_string(u_fair) +
                       ", u_biased=" + std::to_string(u_biased);
        json dump;
        dump["b"] = b;
        dump["omega_rho"] = omega_rho;
        dump["omega_u"] = omega_u;
        dump["horizon"] = horizon;
        dump["rho_u"] = rho_u;
        dump["target_fair"] = target_fair;
        dump["target_biased"] = target_biased;
        outcome.counterexample = dump.dump(2) + "\n";
        return outcome;
      }
      return outcome;
    }
    outcome.failed = true;
    outcome.note = "could not build a decisive pair in 400 attempts";
    return outcome;
  });
}

SuiteResult gain_schedule_oracle_suite(int trials, std::uint64_t seed) {
  return run_trials("riccati", trials, seed, [](Rng& rng, std::size_t) {
    TrialOutcome outcome;
    const double b = (rng.bernoulli(0.5) ? -1.0 : 1.0) * rng.uniform(0.1, 1.0);
    const double omega_rho = rng.uniform(0.1, 10.0);
    const double omega_u = rng.uniform(0.1, 10.0);
    const int horizon = static_cast<int>(rng.uniform_int(1, 6));
    double e0 = rng.uniform(-2.0, 2.0);
    if (std::abs(e0) < 0.01) e0 = 0.5;

    const GainSchedule sched = riccati_gain(b, omega_rho, omega_u, horizon);
    std::vector<double> rolled(static_cast<std::size_t>(horizon), 0.0);
    double error = e0;
    for (int tau = 0; tau < horizon; ++tau) {
      rolled[static_cast<std::size_t>(tau)] = sched.gains[static_cast<std::size_t>(tau)] * error;
      error += b * rolled[static_cast<std::size_t>(tau)];
    }

    const std::vector<double> oracle = quadratic_cost_argmin(b, omega_rho, omega_u, horizon, e0);
    double worst = 0.0;
    for (int tau = 0; tau < horizon; ++tau) {
      worst = std::max(worst, std::abs(rolled[static_cast<std::size_t>(tau)] -
                                       oracle[static_cast<std::size_t>(tau)]));
    }
    if (worst > 1e-8) {
      outcome.failed = true;
      outcome.note = "max input deviation " + std::to_string(worst);
      json dump;
      dump["b"] = b;
      dump["omega_rho"] = omega_rho;
      dump["omega_u"] = omega_u;
      dump["horizon"] = horizon;
      dump["e0"] = e0;
      dump["schedule_inputs"] = rolled;
      dump["oracle_inputs"] = oracle;
      outcome.counterexample = dump.dump(2) + "\n";
    }
    return outcome;
  });
}

}  // namespace epicascade::verify
