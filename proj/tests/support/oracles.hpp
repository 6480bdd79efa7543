#pragma once

#include <set>
#include <utility>
#include <vector>

#include "parplay/game/cost_matrix.hpp"
#include "parplay/sim/random.hpp"

namespace parplay::testing {

/// Random k x k game. About a fifth of the profiles collide (both costs infinite);
/// the rest draw costs from a small integer grid so ties are common.
inline CostMatrix random_game(Rng& rng, std::size_t k = 8, double collision_rate = 0.2) {
  CostMatrix m(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (rng.uniform() < collision_rate) {
        m.at(i, j) = kCollisionCost;
      } else {
        m.at(i, j) = {static_cast<double>(static_cast<int>(rng.uniform() * 6.0)),
                      static_cast<double>(static_cast<int>(rng.uniform() * 6.0))};
      }
    }
  return m;
}

/// Enumerates every profile and every unilateral deviation.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_force_nash(const CostMatrix& m) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      bool stable = true;
      for (std::size_t d = 0; d < m.rows() && stable; ++d)
        if (m.at(d, j)[0] < m.at(i, j)[0]) stable = false;
      for (std::size_t d = 0; d < m.cols() && stable; ++d)
        if (m.at(i, d)[1] < m.at(i, j)[1]) stable = false;
      if (stable) out.emplace_back(i, j);
    }
  return out;
}

/// Drops every profile some other profile beats for both agents.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_force_pareto(
    const CostMatrix& m, const std::vector<std::pair<std::size_t, std::size_t>>& ne) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& a : ne) {
    bool dominated = false;
    for (const auto& b : ne) {
      const CostPair& ca = m.at(a.first, a.second);
      const CostPair& cb = m.at(b.first, b.second);
      if (cb[0] < ca[0] && cb[1] < ca[1]) dominated = true;
    }
    if (!dominated) out.push_back(a);
  }
  return out;
}

}  // namespace parplay::testing
