#pragma once

#include <stdexcept>
#include <vector>

#include "parplay/game/nash.hpp"
#include "parplay/select/distributions.hpp"
#include "parplay/sim/world.hpp"

namespace parplay {

struct NormParams {
  double lambda_n = 50.0;

  void validate() const {
    if (!(lambda_n > 0.0)) throw std::invalid_argument("NormParams: lambda_n must be > 0");
  }
};

/// Agents whose cost no longer matters (already Done). They are left out of the
/// min-cost of the norm; if every agent is excluded all of them count again.
using AgentMask = PerAgent<bool>;

inline double min_cost(const CostPair& c, const AgentMask& excluded = {false, false}) {
  if (excluded[0] && excluded[1]) return std::min(c[0], c[1]);
  if (excluded[0]) return c[1];
  if (excluded[1]) return c[0];
  return std::min(c[0], c[1]);
}

inline double max_cost(const CostPair& c, const AgentMask& excluded = {false, false}) {
  if (excluded[0] && !excluded[1]) return c[1];
  if (excluded[1] && !excluded[0]) return c[0];
  return std::max(c[0], c[1]);
}

/// Min-norm prior: p(a) proportional to exp(-lambda_n * min_i c_i(a)).
inline std::vector<double> norm_distribution(const EquilibriumSet& eq, const NormParams& params,
                                             const AgentMask& excluded = {false, false}) {
  if (eq.empty()) throw std::invalid_argument("norm_distribution: empty equilibrium set");
  std::vector<double> logits;
  logits.reserve(eq.size());
  for (const CostPair& c : eq.costs) logits.push_back(-params.lambda_n * min_cost(c, excluded));
  return normalize_log_weights(logits);
}

}  // namespace parplay
