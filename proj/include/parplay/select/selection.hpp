#pragma once

#include <stdexcept>
#include <vector>

#include "parplay/game/nash.hpp"
#include "parplay/select/norm.hpp"
#include "parplay/select/personality.hpp"

namespace parplay {

/// Position within `eq` maximizing p_n(a) * p_alpha(a). Ties go to the lower
/// min-cost, then to the lexicographically smaller profile.
inline std::size_t select_equilibrium(const EquilibriumSet& eq, const std::vector<double>& p_n,
                                      const std::vector<double>& p_alpha, const AgentMask& excluded = {false, false}) {
  if (eq.empty()) throw std::invalid_argument("select_equilibrium: empty equilibrium set");
  if (p_n.size() != eq.size() || p_alpha.size() != eq.size())
    throw std::invalid_argument("select_equilibrium: distribution size mismatch");
  std::size_t best = 0;
  for (std::size_t n = 1; n < eq.size(); ++n) {
    const double score = p_n[n] * p_alpha[n];
    const double best_score = p_n[best] * p_alpha[best];
    if (score > best_score) {
      best = n;
    } else if (score == best_score) {
      const double m = min_cost(eq.costs[n], excluded);
      const double mb = min_cost(eq.costs[best], excluded);
      if (m < mb || (m == mb && eq.profiles[n] < eq.profiles[best])) best = n;
    }
  }
  return best;
}

/// Diagnostic snapshot of one equilibrium-selection pass.
struct SelectionRecord {
  EquilibriumSet equilibria;
  std::vector<double> p_norm;
  std::vector<double> p_alpha;
  PersonalityBelief belief;
  std::size_t chosen = 0;
};

/// Full norm-times-personality pipeline for the current equilibria.
inline SelectionRecord infer_and_select(const EquilibriumSet& eq, const InteractionHistory& history,
                                        const InitialEquilibria& init, const NormParams& norm,
                                        const PersonalityParams& personality, const AgentMask& excluded = {false, false},
                                        const AgentMask& evidence_skip = {false, false}) {
  SelectionRecord rec;
  rec.equilibria = eq;
  rec.p_norm = norm_distribution(eq, norm, excluded);
  rec.belief = theta_posterior(history, init, personality, evidence_skip);
  // Before any evidence the personality term is uniform over equilibria.
  rec.p_alpha = history.empty() ? uniform(eq.size()) : personality_distribution(eq, rec.belief);
  rec.chosen = select_equilibrium(eq, rec.p_norm, rec.p_alpha, excluded);
  return rec;
}

}  // namespace parplay
