#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace epicascade::verify {

/// Outcome of one randomized property suite. When a trial fails,
/// `counterexample` holds a replayable JSON document (a full scenario file
/// for the graph-based suites, a parameter dump for the scalar ones).
struct SuiteResult {
  std::string suite;
  int trials = 0;
  int failures = 0;
  std::string detail;
  std::string counterexample;

  bool passed() const noexcept { return failures == 0; }
};

std::vector<std::string> suite_names();
int default_trials(const std::string& name);

/// Dispatch by suite name: lemma1 | theorem1 | prop3 | lemma2 | riccati.
/// `trials <= 0` selects the suite default. Unknown names throw
/// ValidationError.
SuiteResult run_suite(const std::string& name, int trials, std::uint64_t seed);

/// One-step absorption agrees with cohesiveness of the complement, checked
/// exhaustively over all adopter subsets of small random graphs.
SuiteResult fixed_point_duality_suite(int graphs, std::uint64_t seed);

/// Running the dynamics out and peeling the non-seed base reach the same
/// steady state; small instances are also checked against exhaustive
/// enumeration of every cohesive subset.
SuiteResult steady_state_route_suite(int trials, std::uint64_t seed);

/// When the transient condition holds for every fair one-step switcher, the
/// biased one-step adopter set contains the fair one.
SuiteResult transient_containment_suite(int instances, std::uint64_t seed);

/// Sign of the input-reduction condition decides, strictly, how the biased
/// input and next threshold compare against the fair run.
SuiteResult input_reduction_suite(int pairs, std::uint64_t seed);

/// The backward gain schedule reproduces the argmin of the dense quadratic
/// horizon cost computed by Gaussian elimination, elementwise to 1e-8.
SuiteResult gain_schedule_oracle_suite(int trials, std::uint64_t seed);

}  // namespace epicascade::verify
