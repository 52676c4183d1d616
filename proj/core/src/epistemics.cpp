#include "epicascade/epistemics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "epicascade/error.hpp"

namespace epicascade {

namespace {

int shared_group_count(const std::set<std::string>& a, const std::set<std::string>& b) {
  int shared = 0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& g : small) shared += large.count(g) ? 1 : 0;
  return shared;
}

}  // namespace

double discrimination_factor(const std::set<std::string>& groups) {
  // Exact power of two keeps downstream products single-rounded.
  return std::ldexp(1.0, -static_cast<int>(groups.size()));
}

double relational_factor(const std::set<std::string>& groups_x,
                         const std::set<std::string>& groups_y, EtaMode mode) {
  const int shared = shared_group_count(groups_x, groups_y);
  return std::ldexp(1.0, mode == EtaMode::excess ? shared : -shared);
}

double relational_credibility(const Agent& speaker, const Agent& hearer, EtaMode mode) {
  const double phi = discrimination_factor(speaker.groups);
  const double eta = relational_factor(speaker.groups, hearer.groups, mode);
  return phi * eta * speaker.reliability;
}

CredibilityMatrix::CredibilityMatrix(AgentId n, double fill)
    : n_(n), values_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}

void CredibilityMatrix::set(AgentId speaker, AgentId hearer, double value) {
  if (speaker < 0 || hearer < 0 || speaker >= n_ || hearer >= n_) {
    throw Error(errc::out_of_range, "credibility pair (" + std::to_string(speaker) + ", " +
                                        std::to_string(hearer) + ") out of range");
  }
  values_[static_cast<std::size_t>(speaker) * static_cast<std::size_t>(n_) +
          static_cast<std::size_t>(hearer)] = value;
}

CredibilityMatrix build_credibility_matrix(const std::vector<Agent>& agents, EtaMode mode,
                                           const std::vector<CredibilityOverride>& overrides) {
  if (agents.empty()) throw Error(errc::validation_error, "agent list must be nonempty");

  const auto n = static_cast<AgentId>(agents.size());
  CredibilityMatrix matrix(n);
  for (AgentId x = 0; x < n; ++x) {
    for (AgentId y = 0; y < n; ++y) {
      if (x == y) continue;
      matrix.set(x, y, relational_credibility(agents[static_cast<std::size_t>(x)],
                                              agents[static_cast<std::size_t>(y)], mode));
    }
  }
  for (const auto& o : overrides) {
    if (!(o.value >= 0.0 && o.value <= 1.0)) {
      throw Error(errc::override_out_of_range,
                  "override for (" + std::to_string(o.speaker) + ", " + std::to_string(o.hearer) +
                      ") is " + std::to_string(o.value) + ", outside [0, 1]");
    }
    if (o.speaker == o.hearer) {
      throw Error(errc::out_of_range, "override on unused diagonal entry (" +
                                          std::to_string(o.speaker) + ", " +
                                          std::to_string(o.hearer) + ")");
    }
    matrix.set(o.speaker, o.hearer, o.value);
  }
  return matrix;
}

double credibility_delta(const CredibilityMatrix& matrix, const std::vector<Agent>& agents,
                         AgentId x, AgentId y) {
  if (x < 0 || y < 0 || static_cast<std::size_t>(x) >= agents.size() ||
      static_cast<std::size_t>(y) >= agents.size()) {
    throw Error(errc::out_of_range, "agent pair out of range");
  }
  return agents[static_cast<std::size_t>(x)].reliability - matrix(x, y);
}

bool is_epistemically_fair(const CredibilityMatrix& matrix, const std::vector<Agent>& agents) {
  const auto n = static_cast<AgentId>(agents.size());
  for (AgentId x = 0; x < n; ++x) {
    for (AgentId y = 0; y < n; ++y) {
      if (x == y) continue;
      if (std::abs(matrix(x, y) - agents[static_cast<std::size_t>(x)].reliability) > kFairnessTol) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace epicascade
