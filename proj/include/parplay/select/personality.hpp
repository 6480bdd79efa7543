#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "parplay/game/game.hpp"
#include "parplay/game/nash.hpp"
#include "parplay/plan/trajectory.hpp"
#include "parplay/select/distributions.hpp"
#include "parplay/sim/world.hpp"

namespace parplay {

inline constexpr int kNumPersonalities = 2;

/// Binary latent personality: theta = 0 favours agent 1, theta = 1 favours agent 2.
struct PersonalityParams {
  double lambda_alpha = 10.0;

  void validate() const {
    if (!(lambda_alpha > 0.0)) throw std::invalid_argument("PersonalityParams: lambda_alpha must be > 0");
  }
};

struct HistorySample {
  double t = 0.0;
  PerAgent<JointState> joints;

  friend bool operator==(const HistorySample&, const HistorySample&) = default;
};

/// Executed joint states of both agents since trial start, on the execution grid.
struct InteractionHistory {
  std::vector<HistorySample> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }

  void append(double t, const PerAgent<JointState>& joints) {
    if (!samples.empty() && !(t > samples.back().t))
      throw std::invalid_argument("InteractionHistory: timestamps must increase");
    samples.push_back({t, joints});
  }
};

/// Equilibria of the first game of a trial with their full trajectory pairs.
/// Frozen for the rest of the trial and used as the evidence anchors.
struct InitialEquilibria {
  EquilibriumSet equilibria;
  std::vector<PerAgent<Trajectory>> trajectories;

  std::size_t size() const { return equilibria.size(); }
  bool empty() const { return equilibria.empty(); }

  static InitialEquilibria from_game(const GameSpec& game, const EquilibriumSet& eq) {
    InitialEquilibria init{eq, {}};
    for (const ProfileIndex& p : eq.profiles)
      init.trajectories.push_back({game.action(0, p.i1), game.action(1, p.i2)});
    return init;
  }
};

struct PersonalityBelief {
  std::array<double, kNumPersonalities> probabilities{0.5, 0.5};

  double operator[](int theta) const { return probabilities[theta]; }
  friend bool operator==(const PersonalityBelief&, const PersonalityBelief&) = default;
};

/// Mean over history timestamps of the 4-vector joint error (both agents) between
/// the executed state and the profile resampled at that time. Agents flagged in
/// `skip` contribute nothing.
inline double profile_history_distance(const PerAgent<Trajectory>& profile, const InteractionHistory& history,
                                       const PerAgent<bool>& skip = {false, false}) {
  if (history.empty()) return 0.0;
  double total = 0.0;
  for (const HistorySample& s : history.samples) {
    double sq = 0.0;
    for (int i = 0; i < kNumAgents; ++i) {
      if (skip[i]) continue;
      const JointState ref = resample_at(profile[i], s.t);
      const double d1 = angle_diff(s.joints[i].q1, ref.q1);
      const double d2 = angle_diff(s.joints[i].q2, ref.q2);
      sq += d1 * d1 + d2 * d2;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(history.size());
}

/// p(a0 | H) proportional to exp(-lambda_alpha * f_dist(a0, H)) over the initial equilibria.
inline std::vector<double> initial_profile_likelihood(const InteractionHistory& history, const InitialEquilibria& init,
                                                      const PersonalityParams& params,
                                                      const PerAgent<bool>& skip = {false, false}) {
  if (init.empty()) throw std::invalid_argument("initial_profile_likelihood: empty initial equilibria");
  std::vector<double> logits;
  logits.reserve(init.size());
  for (const auto& profile : init.trajectories)
    logits.push_back(-params.lambda_alpha * profile_history_distance(profile, history, skip));
  return normalize_log_weights(logits);
}

/// Membership of a cost pair in each personality. Ties belong to both.
inline bool favours(const CostPair& c, int theta) {
  if (c[0] == c[1]) return true;
  return theta == 0 ? c[0] < c[1] : c[1] < c[0];
}

/// p(a | theta): uniform over the members of each personality; empty rows stay all-zero.
using ThetaTable = std::array<std::vector<double>, kNumPersonalities>;

inline ThetaTable profile_given_theta(const EquilibriumSet& eq) {
  if (eq.empty()) throw std::invalid_argument("profile_given_theta: empty equilibrium set");
  ThetaTable table;
  for (int theta = 0; theta < kNumPersonalities; ++theta) {
    std::vector<double> row(eq.size(), 0.0);
    double members = 0.0;
    for (std::size_t n = 0; n < eq.size(); ++n)
      if (favours(eq.costs[n], theta)) {
        row[n] = 1.0;
        members += 1.0;
      }
    if (members > 0.0)
      for (double& p : row) p /= members;
    table[theta] = std::move(row);
  }
  return table;
}

/// p(theta | H) = sum over initial profiles of p(a0 | H) p(theta | a0), with
/// p(theta | a0) from Bayes' rule under a uniform theta prior. Empty history is the prior.
inline PersonalityBelief theta_posterior(const InteractionHistory& history, const InitialEquilibria& init,
                                         const PersonalityParams& params,
                                         const PerAgent<bool>& skip = {false, false}) {
  if (history.empty() || init.empty()) return {};
  const std::vector<double> p_init = initial_profile_likelihood(history, init, params, skip);
  const ThetaTable given = profile_given_theta(init.equilibria);
  PersonalityBelief belief{{0.0, 0.0}};
  for (std::size_t n = 0; n < init.size(); ++n) {
    const double evidence = given[0][n] + given[1][n];
    for (int theta = 0; theta < kNumPersonalities; ++theta)
      belief.probabilities[theta] += p_init[n] * given[theta][n] / evidence;
  }
  const double total = belief.probabilities[0] + belief.probabilities[1];
  for (double& p : belief.probabilities) p /= total;
  return belief;
}

/// p_alpha(a) = sum_theta p(theta | H) p(a | theta) over the current equilibria;
/// an all-zero mixture falls back to uniform.
inline std::vector<double> personality_distribution(const EquilibriumSet& eq, const PersonalityBelief& belief) {
  const ThetaTable given = profile_given_theta(eq);
  std::vector<double> mix(eq.size(), 0.0);
  for (std::size_t n = 0; n < eq.size(); ++n)
    for (int theta = 0; theta < kNumPersonalities; ++theta) mix[n] += belief[theta] * given[theta][n];
  return normalize_weights(mix);
}

}  // namespace parplay
