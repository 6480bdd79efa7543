#include <gtest/gtest.h>

#include "oracles.hpp"
#include "parplay/agents/policies.hpp"

namespace parplay {
namespace {

GameSpec game_of(const std::vector<std::vector<double>>& c1, const std::vector<std::vector<double>>& c2) {
  GameSpec g;
  g.costs = CostMatrix::from_rows(c1, c2);
  return g;
}

AgentContext ctx_for(int agent, const GameSpec& g, const EquilibriumSet& eq) {
  AgentContext c;
  c.agent = agent;
  c.game = &g;
  c.equilibria = &eq;
  return c;
}

TEST(Defensive, HandMaximin) {
  const GameSpec g = game_of({{1, kInfiniteCost}, {2, 2}}, {{0, kInfiniteCost}, {0, 0}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  EXPECT_EQ(defensive_action(ctx_for(0, g, eq)), 1u);
}

TEST(Defensive, SingleOpponentActionIsArgmin) {
  const GameSpec g = game_of({{5}, {3}, {4}}, {{0}, {0}, {0}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  EXPECT_EQ(defensive_action(ctx_for(0, g, eq)), 1u);
}

TEST(Defensive, SeatTwoReadsColumns) {
  const GameSpec g = game_of({{0, 0}, {0, 0}}, {{1, 2}, {kInfiniteCost, 2}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  EXPECT_EQ(defensive_action(ctx_for(1, g, eq)), 1u);
}

TEST(Defensive, StaticFallbackWhenEveryOtherRowCanCollide) {
  const double inf = kInfiniteCost;
  const GameSpec g = game_of({{4, 4, 4}, {1, inf, 2}, {inf, 1, 1}}, {{4, 2, 2}, {4, inf, 2}, {inf, 2, 2}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  EXPECT_EQ(defensive_action(ctx_for(0, g, eq)), kStaticAction);
}

TEST(Defensive, GoalAchievingReadingIgnoresOpponentStatic) {
  const double inf = kInfiniteCost;
  // Every own row is infinite somewhere, including the opponent's Static column.
  const GameSpec g = game_of({{inf, 3, 3}, {inf, 2, inf}, {inf, 1, 1}}, {{inf, 1, 1}, {inf, 1, inf}, {inf, 1, 1}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  AgentContext c = ctx_for(0, g, eq);
  EXPECT_EQ(defensive_action(c), 0u);
  c.params.defensive_goal_achieving = true;
  EXPECT_EQ(defensive_action(c), 2u);
}

TEST(Defensive, NeverPicksInfiniteWorstCaseWhenFiniteExists) {
  Rng rng(51);
  for (int n = 0; n < 300; ++n) {
    const CostMatrix m = testing::random_game(rng, 8, 0.3);
    GameSpec g;
    g.costs = m;
    const EquilibriumSet eq = solve_equilibria(m);
    for (int agent = 0; agent < 2; ++agent) {
      const AgentContext c = ctx_for(agent, g, eq);
      auto worst = [&](std::size_t i) {
        double w = -1;
        for (std::size_t j = 0; j < 8; ++j) w = std::max(w, c.own(i, j));
        return w;
      };
      double best = kInfiniteCost;
      for (std::size_t i = 0; i < 8; ++i) best = std::min(best, worst(i));
      EXPECT_EQ(worst(defensive_action(c)), best);
    }
  }
}

TEST(Selfish, PicksOwnCheapestEquilibrium) {
  const GameSpec g = game_of({{1, 9}, {9, 2}}, {{2, 9}, {9, 1}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  EXPECT_EQ(selfish_action(ctx_for(0, g, eq)), 0u);
  EXPECT_EQ(selfish_action(ctx_for(1, g, eq)), 1u);
}

TEST(Selfish, Singleton) {
  const GameSpec g = game_of({{1, 3}, {2, 4}}, {{1, 2}, {3, 4}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  EXPECT_EQ(selfish_action(ctx_for(1, g, eq)), 0u);
}

TEST(Selfish, MatchesBruteForceOracle) {
  Rng rng(52);
  for (int n = 0; n < 300; ++n) {
    const CostMatrix m = testing::random_game(rng);
    GameSpec g;
    g.costs = m;
    const EquilibriumSet eq = solve_equilibria(m);
    if (eq.empty()) continue;
    for (int agent = 0; agent < 2; ++agent) {
      double best = kInfiniteCost;
      for (const auto& [i, j] : testing::brute_force_pareto(m, testing::brute_force_nash(m)))
        best = std::min(best, m.at(i, j)[agent]);
      const std::size_t a = selfish_action(ctx_for(agent, g, eq));
      bool found = false;
      for (const ProfileIndex& p : eq.profiles)
        if (p[agent] == a && m.at(p)[agent] == best) found = true;
      EXPECT_TRUE(found);
    }
  }
}

TEST(Norm, LowerMinCostWins) {
  const GameSpec g = game_of({{1.0, 9}, {9, 3.0}}, {{3.0, 9}, {9, 1.1}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  ASSERT_EQ(eq.size(), 2u);
  EXPECT_EQ(norm_action(ctx_for(0, g, eq)), 0u);
  EXPECT_EQ(norm_action(ctx_for(1, g, eq)), 0u);
}

TEST(Norm, TieBrokenByOtherCostThenIndex) {
  const GameSpec g = game_of({{1.0, 9, 9}, {9, 3.0, 9}, {9, 9, 1.0}}, {{4.0, 9, 9}, {9, 1.0, 9}, {9, 9, 2.0}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  ASSERT_EQ(eq.size(), 3u);
  EXPECT_EQ(norm_action(ctx_for(0, g, eq)), 2u);
  const GameSpec h = game_of({{1.0, 9}, {9, 2.0}}, {{2.0, 9}, {9, 1.0}});
  const EquilibriumSet eq2 = solve_equilibria(h.costs);
  EXPECT_EQ(norm_action(ctx_for(0, h, eq2)), 0u);
}

TEST(Bayes, UniformBeliefMatchesNormWhenBalanced) {
  const GameSpec g = game_of({{1.0, 9}, {9, 3.0}}, {{3.0, 9}, {9, 1.1}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  GameSpec with_actions = g;
  InitialEquilibria init{eq, {{Trajectory{}, Trajectory{}}, {Trajectory{}, Trajectory{}}}};
  AgentContext c = ctx_for(0, with_actions, eq);
  c.initial = &init;
  EXPECT_EQ(bayes_action(c), norm_action(c));
  const AgentDecision d = decide(PolicyKind::BayesNash, c);
  ASSERT_TRUE(d.selection.has_value());
  EXPECT_EQ(d.selection->belief, PersonalityBelief{});
  EXPECT_EQ(d.action, norm_action(c));
}

TEST(Bayes, RequiresInitialEquilibria) {
  const GameSpec g = game_of({{1}}, {{1}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  EXPECT_THROW(bayes_action(ctx_for(0, g, eq)), std::invalid_argument);
}

TEST(Decide, IdleAndExternalHold) {
  const GameSpec g = game_of({{3, 1}, {1, 1}}, {{3, 1}, {1, 1}});
  const EquilibriumSet eq = solve_equilibria(g.costs);
  EXPECT_EQ(decide(PolicyKind::Idle, ctx_for(0, g, eq)).action, kStaticAction);
  EXPECT_EQ(decide(PolicyKind::External, ctx_for(1, g, eq)).action, kStaticAction);
}

TEST(Decide, NashPoliciesReturnEquilibriumComponents) {
  Rng rng(53);
  for (int n = 0; n < 200; ++n) {
    GameSpec g;
    g.costs = testing::random_game(rng);
    const EquilibriumSet eq = solve_equilibria(g.costs);
    if (eq.empty()) continue;
    std::vector<PerAgent<Trajectory>> trajs(eq.size(), {static_trajectory({0, 0}), static_trajectory({0, 0})});
    InitialEquilibria init{eq, trajs};
    for (PolicyKind k : {PolicyKind::SelfishNash, PolicyKind::NormNash, PolicyKind::BayesNash}) {
      AgentContext c = ctx_for(n % 2, g, eq);
      c.initial = &init;
      const AgentDecision d = decide(k, c);
      ASSERT_TRUE(d.profile.has_value());
      EXPECT_NE(std::find(eq.profiles.begin(), eq.profiles.end(), *d.profile), eq.profiles.end());
      EXPECT_EQ(d.action, (*d.profile)[c.agent]);
      EXPECT_EQ(decide(k, c).action, d.action);
    }
  }
}

TEST(PolicyNames, RoundTrip) {
  for (PolicyKind k : {PolicyKind::Defensive, PolicyKind::SelfishNash, PolicyKind::NormNash, PolicyKind::BayesNash,
                       PolicyKind::External, PolicyKind::Idle})
    EXPECT_EQ(policy_from_string(to_string(k)), k);
  EXPECT_EQ(to_string(PolicyKind::SelfishNash), "selfish-nash");
  EXPECT_THROW(policy_from_string("greedy"), std::invalid_argument);
}

}  // namespace
}  // namespace parplay
