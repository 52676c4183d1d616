#pragma once

#include <set>
#include <string>
#include <vector>

#include "epicascade/graph.hpp"

namespace epicascade {

/// Absolute tolerance for fairness equality checks. All credibility values
/// are products of exact dyadic factors and input reals, so this only guards
/// ingest rounding.
inline constexpr double kFairnessTol = 1e-12;

/// One individual in the network.
struct Agent {
  AgentId id = 0;
  /// Sensitive-group memberships (free-form labels).
  std::set<std::string> groups;
  /// Reliability r: how much the agent ought to be believed, in [0, 1].
  double reliability = 1.0;
  /// Initial resistivity threshold, in [0, 1].
  double rho0 = 0.5;
  /// Policy responsiveness b, in [-1, 1]; nonzero for non-seeds.
  double responsiveness = -1.0;
  bool is_seed = false;

  bool operator==(const Agent&) const = default;
};

/// Sign choice in the relational discrimination exponent. `excess` halves the
/// penalty per shared group (shared membership restores credibility) and is
/// the default; `deficit` compounds it instead.
enum class EtaMode { excess, deficit };

/// Intersectional discrimination factor: 0.5 per discriminated group.
double discrimination_factor(const std::set<std::string>& groups);

/// Relational discrimination factor over the shared groups of speaker and
/// hearer. Symmetric in its two group sets.
double relational_factor(const std::set<std::string>& groups_x,
                         const std::set<std::string>& groups_y, EtaMode mode);

/// Credibility the hearer attributes to the speaker: the speaker's
/// reliability scaled by both discrimination factors. In excess mode the
/// result never exceeds the speaker's reliability.
double relational_credibility(const Agent& speaker, const Agent& hearer, EtaMode mode);

/// Pairwise credibility values gamma(speaker, hearer). The diagonal is
/// unused; asymmetry across a pair is expected. Immutable once built.
class CredibilityMatrix {
 public:
  CredibilityMatrix() = default;
  explicit CredibilityMatrix(AgentId n, double fill = 0.0);

  AgentId agent_count() const noexcept { return n_; }

  double operator()(AgentId speaker, AgentId hearer) const noexcept {
    return values_[static_cast<std::size_t>(speaker) * static_cast<std::size_t>(n_) +
                   static_cast<std::size_t>(hearer)];
  }

  /// Bounds-checked write access; used by builders and tests.
  void set(AgentId speaker, AgentId hearer, double value);

 private:
  AgentId n_ = 0;
  std::vector<double> values_;
};

struct CredibilityOverride {
  AgentId speaker = 0;
  AgentId hearer = 0;
  double value = 0.0;

  bool operator==(const CredibilityOverride&) const = default;
};

/// Fills the full matrix from the agents' group structure, then applies
/// direct overrides. Errors: OverrideOutOfRange for values outside [0, 1],
/// OutOfRange for bad override ids.
CredibilityMatrix build_credibility_matrix(const std::vector<Agent>& agents,
                                           EtaMode mode = EtaMode::excess,
                                           const std::vector<CredibilityOverride>& overrides = {});

/// Credibility deficit (positive) or excess (negative) of speaker x toward
/// hearer y: reliability minus attributed credibility.
double credibility_delta(const CredibilityMatrix& matrix, const std::vector<Agent>& agents,
                         AgentId x, AgentId y);

/// True iff every ordered pair attributes the speaker exactly their
/// reliability (within kFairnessTol).
bool is_epistemically_fair(const CredibilityMatrix& matrix, const std::vector<Agent>& agents);

}  // namespace epicascade
