#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parplay/game/game.hpp"
#include "parplay/game/nash.hpp"
#include "parplay/select/selection.hpp"

namespace parplay {

/// `Idle` is a scripted opponent that always holds its pose; `External` is a
/// live human and only meaningful inside the play service.
enum class PolicyKind { Defensive, SelfishNash, NormNash, BayesNash, External, Idle };

inline std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Defensive: return "defensive";
    case PolicyKind::SelfishNash: return "selfish-nash";
    case PolicyKind::NormNash: return "norm-nash";
    case PolicyKind::BayesNash: return "bayes-nash";
    case PolicyKind::External: return "external";
    case PolicyKind::Idle: return "idle";
  }
  return "?";
}

inline PolicyKind policy_from_string(std::string_view s) {
  for (PolicyKind k : {PolicyKind::Defensive, PolicyKind::SelfishNash, PolicyKind::NormNash, PolicyKind::BayesNash,
                       PolicyKind::External, PolicyKind::Idle})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown policy '" + std::string(s) + "'");
}

struct PolicyParams {
  NormParams norm;
  PersonalityParams personality;
  /// Alternative reading of the maximin baseline: when every own action has an
  /// infinite worst case, ignore the opponent's Static action in the inner max.
  bool defensive_goal_achieving = false;
  /// Infer the opponent's personality from the opponent's executed states only.
  bool opponent_only_evidence = false;
};

struct AgentContext {
  int agent = 0;
  const GameSpec* game = nullptr;
  const EquilibriumSet* equilibria = nullptr;
  const InteractionHistory* history = nullptr;
  const InitialEquilibria* initial = nullptr;
  PolicyParams params;
  AgentMask excluded{false, false};

  double own(std::size_t mine, std::size_t theirs) const {
    const CostPair& c = agent == 0 ? game->costs.at(mine, theirs) : game->costs.at(theirs, mine);
    return c[agent];
  }
};

struct AgentDecision {
  std::size_t action = kStaticAction;
  std::optional<ProfileIndex> profile;
  std::optional<SelectionRecord> selection;
  std::vector<double> p_norm;  // filled by the norm-based policies
};

/// Maximin over own actions; lowest index wins ties, so the Static plan is preferred
/// when every option is equally bad.
inline std::size_t defensive_action(const AgentContext& ctx) {
  const std::size_t mine = ctx.game->costs.size(ctx.agent);
  const std::size_t theirs = ctx.game->costs.size(other(ctx.agent));
  auto worst_cases = [&](bool skip_static) {
    std::vector<double> worst(mine, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < mine; ++i)
      for (std::size_t j = 0; j < theirs; ++j) {
        if (skip_static && j == kStaticAction && theirs > 1) continue;
        worst[i] = std::max(worst[i], ctx.own(i, j));
      }
    return worst;
  };
  std::vector<double> worst = worst_cases(false);
  const bool all_infinite = std::all_of(worst.begin(), worst.end(), [](double w) { return std::isinf(w); });
  if (ctx.params.defensive_goal_achieving && all_infinite) worst = worst_cases(true);
  return static_cast<std::size_t>(std::min_element(worst.begin(), worst.end()) - worst.begin());
}

/// Position in the equilibrium set of the profile cheapest for the deciding agent.
inline std::size_t selfish_profile(const AgentContext& ctx) {
  const EquilibriumSet& eq = *ctx.equilibria;
  if (eq.empty()) throw std::invalid_argument("selfish_action: empty equilibrium set");
  std::size_t best = 0;
  for (std::size_t n = 1; n < eq.size(); ++n)
    if (eq.costs[n][ctx.agent] < eq.costs[best][ctx.agent]) best = n;
  return best;
}

inline std::size_t norm_profile(const AgentContext& ctx) {
  const EquilibriumSet& eq = *ctx.equilibria;
  const std::vector<double> p = norm_distribution(eq, ctx.params.norm, ctx.excluded);
  std::size_t best = 0;
  for (std::size_t n = 1; n < eq.size(); ++n) {
    if (p[n] > p[best]) {
      best = n;
    } else if (p[n] == p[best]) {
      const double lo = min_cost(eq.costs[n], ctx.excluded);
      const double lo_best = min_cost(eq.costs[best], ctx.excluded);
      const double hi = max_cost(eq.costs[n], ctx.excluded);
      const double hi_best = max_cost(eq.costs[best], ctx.excluded);
      if (lo < lo_best || (lo == lo_best && hi < hi_best)) best = n;
    }
  }
  return best;
}

inline std::size_t selfish_action(const AgentContext& ctx) {
  return ctx.equilibria->profiles[selfish_profile(ctx)][ctx.agent];
}

inline std::size_t norm_action(const AgentContext& ctx) {
  return ctx.equilibria->profiles[norm_profile(ctx)][ctx.agent];
}

inline SelectionRecord bayes_selection(const AgentContext& ctx) {
  if (ctx.equilibria->empty()) throw std::invalid_argument("bayes_action: empty equilibrium set");
  if (ctx.initial == nullptr || ctx.initial->empty())
    throw std::invalid_argument("bayes_action: missing initial equilibria");
  static const InteractionHistory kEmpty;
  AgentMask skip{false, false};
  if (ctx.params.opponent_only_evidence) skip[ctx.agent] = true;
  return infer_and_select(*ctx.equilibria, ctx.history ? *ctx.history : kEmpty, *ctx.initial, ctx.params.norm,
                          ctx.params.personality, ctx.excluded, skip);
}

inline std::size_t bayes_action(const AgentContext& ctx) {
  const SelectionRecord rec = bayes_selection(ctx);
  return rec.equilibria.profiles[rec.chosen][ctx.agent];
}

inline AgentDecision decide(PolicyKind kind, const AgentContext& ctx) {
  AgentDecision d;
  switch (kind) {
    case PolicyKind::Defensive: d.action = defensive_action(ctx); break;
    case PolicyKind::SelfishNash: {
      const ProfileIndex p = ctx.equilibria->profiles[selfish_profile(ctx)];
      d.profile = p;
      d.action = p[ctx.agent];
      break;
    }
    case PolicyKind::NormNash: {
      const ProfileIndex p = ctx.equilibria->profiles[norm_profile(ctx)];
      d.profile = p;
      d.action = p[ctx.agent];
      d.p_norm = norm_distribution(*ctx.equilibria, ctx.params.norm, ctx.excluded);
      break;
    }
    case PolicyKind::BayesNash: {
      d.selection = bayes_selection(ctx);
      d.profile = d.selection->equilibria.profiles[d.selection->chosen];
      d.action = (*d.profile)[ctx.agent];
      d.p_norm = d.selection->p_norm;
      break;
    }
    case PolicyKind::Idle:
    case PolicyKind::External: d.action = kStaticAction; break;
  }
  return d;
}

}  // namespace parplay
